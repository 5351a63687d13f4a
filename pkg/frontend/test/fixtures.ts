/** Synthetic 2-item x 4-condition session payload in the on-disk format. */

export function sessionPayload(): Record<string, unknown> {
  const labels = ["c01", "c02", "c03", "c04"];
  return {
    scale: { min: 0, max: 100 },
    seed: 5,
    items: ["itemA", "itemB"].map((itemId) => ({
      item_id: itemId,
      stimuli: labels.map((label) => ({
        label,
        path: `stimuli/${itemId}__${label}.wav`,
      })),
    })),
    listener_orders: {
      L01: {
        items: ["itemB", "itemA"],
        conditions: {
          itemA: ["c03", "c01", "c04", "c02"],
          itemB: ["c02", "c04", "c01", "c03"],
        },
      },
    },
  };
}

export const ALL_LABELS = ["c01", "c02", "c03", "c04"];
export const ALL_ITEMS = ["itemA", "itemB"];
