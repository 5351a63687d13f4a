/** Ratings export as JSON lines, one record per (item, condition).
 *
 * The line format is the ingestion contract of the reporting side: keys
 * listener_id, item_id, condition_id, score (integer), timestamp. Scores are
 * validated here again so a tampered DOM value can never leave the app.
 */

export interface RatingRecord {
  listenerId: string;
  itemId: string;
  conditionId: string;
  score: number;
  timestamp: string;
}

export class ExportError extends Error {
  override name = "ExportError";
}

export function toJsonLines(
  records: RatingRecord[],
  scale: { min: number; max: number } = { min: 0, max: 100 },
): string {
  if (records.length === 0) throw new ExportError("nothing to export");
  const lines = records.map((r) => {
    if (!Number.isInteger(r.score) || r.score < scale.min || r.score > scale.max) {
      throw new ExportError(
        `score ${r.score} outside [${scale.min}, ${scale.max}] ` +
          `(${r.listenerId}/${r.itemId}/${r.conditionId})`,
      );
    }
    if (r.listenerId === "") throw new ExportError("listener id is empty");
    return JSON.stringify({
      listener_id: r.listenerId,
      item_id: r.itemId,
      condition_id: r.conditionId,
      score: r.score,
      timestamp: r.timestamp,
    });
  });
  return lines.join("\n") + "\n";
}
