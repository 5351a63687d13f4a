/** Validation of the public session manifest (session.json).
 *
 * The manifest deliberately carries only opaque condition labels; nothing in
 * it (or in this app) may reveal which label is the reference, the anchor,
 * or a system under test.
 */

export interface Stimulus {
  label: string;
  path: string;
}

export interface SessionItem {
  itemId: string;
  stimuli: Stimulus[];
}

export interface ListenerOrder {
  items: string[];
  conditions: Record<string, string[]>;
}

export interface PublicSession {
  scale: { min: number; max: number };
  seed: number;
  items: SessionItem[];
  listenerOrders: Record<string, ListenerOrder>;
}

export class SchemaError extends Error {
  override name = "SchemaError";
}

function fail(message: string): never {
  throw new SchemaError(message);
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function sameSorted(a: string[], b: string[]): boolean {
  if (a.length !== b.length) return false;
  const sa = [...a].sort();
  const sb = [...b].sort();
  return sa.every((v, i) => v === sb[i]);
}

export function parseSession(payload: unknown): PublicSession {
  if (!isRecord(payload)) fail("session payload must be a JSON object");

  const scale = payload["scale"];
  if (!isRecord(scale) || typeof scale["min"] !== "number" || typeof scale["max"] !== "number") {
    fail("session.scale must carry numeric min and max");
  }
  const min = scale["min"];
  const max = scale["max"];
  if (!(min < max)) fail(`session.scale must have min < max, got [${min}, ${max}]`);

  const seed = payload["seed"];
  if (typeof seed !== "number") fail("session.seed must be a number");

  const rawItems = payload["items"];
  if (!Array.isArray(rawItems) || rawItems.length === 0) {
    fail("session.items must be a non-empty array");
  }

  const items: SessionItem[] = [];
  const seenItems = new Set<string>();
  let labelSet: string[] | null = null;
  for (const entry of rawItems) {
    if (!isRecord(entry) || typeof entry["item_id"] !== "string" || entry["item_id"] === "") {
      fail("every session item needs a non-empty string item_id");
    }
    const itemId = entry["item_id"];
    if (seenItems.has(itemId)) fail(`duplicate item_id ${JSON.stringify(itemId)}`);
    seenItems.add(itemId);

    const rawStimuli = entry["stimuli"];
    if (!Array.isArray(rawStimuli) || rawStimuli.length < 2) {
      fail(`item ${itemId} needs at least two stimuli`);
    }
    const stimuli: Stimulus[] = [];
    const labels: string[] = [];
    for (const s of rawStimuli) {
      if (!isRecord(s) || typeof s["label"] !== "string" || typeof s["path"] !== "string") {
        fail(`item ${itemId}: every stimulus needs a string label and path`);
      }
      if (labels.includes(s["label"])) {
        fail(`item ${itemId}: duplicate stimulus label ${s["label"]}`);
      }
      labels.push(s["label"]);
      stimuli.push({ label: s["label"], path: s["path"] });
    }
    if (labelSet === null) {
      labelSet = labels;
    } else if (!sameSorted(labels, labelSet)) {
      fail(`item ${itemId} has a different label set from the first item`);
    }
    items.push({ itemId, stimuli });
  }

  const itemIds = items.map((i) => i.itemId);
  const listenerOrders: Record<string, ListenerOrder> = {};
  const rawOrders = payload["listener_orders"] ?? {};
  if (!isRecord(rawOrders)) fail("session.listener_orders must be an object");
  for (const [slot, rawOrder] of Object.entries(rawOrders)) {
    if (!isRecord(rawOrder) || !Array.isArray(rawOrder["items"]) || !isRecord(rawOrder["conditions"])) {
      fail(`listener order ${slot} needs items and conditions`);
    }
    const orderItems = rawOrder["items"].map(String);
    if (!sameSorted(orderItems, itemIds)) {
      fail(`listener order ${slot} is not a permutation of the session items`);
    }
    const conditions: Record<string, string[]> = {};
    for (const itemId of itemIds) {
      const order = (rawOrder["conditions"] as Record<string, unknown>)[itemId];
      if (!Array.isArray(order)) fail(`listener order ${slot} misses conditions for item ${itemId}`);
      const asStrings = order.map(String);
      if (!sameSorted(asStrings, labelSet ?? [])) {
        fail(`listener order ${slot}, item ${itemId}: conditions are not a permutation of the labels`);
      }
      conditions[itemId] = asStrings;
    }
    listenerOrders[slot] = { items: orderItems, conditions };
  }

  return { scale: { min, max }, seed, items, listenerOrders };
}

export function parseSessionText(text: string): PublicSession {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (exc) {
    fail(`session file is not valid JSON: ${(exc as Error).message}`);
  }
  return parseSession(payload);
}
