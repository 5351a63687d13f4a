import { describe, expect, it } from "vitest";

import { parseSession, parseSessionText, SchemaError } from "../src/schema.js";
import { sessionPayload } from "./fixtures.js";

describe("parseSession", () => {
  it("accepts the generator's format", () => {
    const session = parseSession(sessionPayload());
    expect(session.items.map((i) => i.itemId)).toEqual(["itemA", "itemB"]);
    expect(session.items[0]!.stimuli).toHaveLength(4);
    expect(session.items[0]!.stimuli[0]).toEqual({
      label: "c01",
      path: "stimuli/itemA__c01.wav",
    });
    expect(session.scale).toEqual({ min: 0, max: 100 });
    expect(session.listenerOrders["L01"]!.items).toEqual(["itemB", "itemA"]);
  });

  it("rejects non-objects", () => {
    expect(() => parseSession([1, 2])).toThrow(SchemaError);
    expect(() => parseSession("nope")).toThrow(/JSON object/);
  });

  it("rejects a missing or inverted scale", () => {
    const payload = sessionPayload();
    delete payload["scale"];
    expect(() => parseSession(payload)).toThrow(/scale/);
    const inverted = sessionPayload();
    inverted["scale"] = { min: 100, max: 0 };
    expect(() => parseSession(inverted)).toThrow(/min < max/);
  });

  it("rejects empty item lists", () => {
    const payload = sessionPayload();
    payload["items"] = [];
    expect(() => parseSession(payload)).toThrow(/non-empty/);
  });

  it("rejects duplicate item ids", () => {
    const payload = sessionPayload();
    const items = payload["items"] as Array<{ item_id: string }>;
    items[1]!.item_id = items[0]!.item_id;
    expect(() => parseSession(payload)).toThrow(/duplicate item_id/);
  });

  it("rejects an item with fewer than two stimuli", () => {
    const payload = sessionPayload();
    const items = payload["items"] as Array<{ stimuli: unknown[] }>;
    items[0]!.stimuli = items[0]!.stimuli.slice(0, 1);
    expect(() => parseSession(payload)).toThrow(/at least two stimuli/);
  });

  it("rejects duplicate labels within an item", () => {
    const payload = sessionPayload();
    const items = payload["items"] as Array<{ stimuli: Array<{ label: string }> }>;
    items[0]!.stimuli[1]!.label = "c01";
    expect(() => parseSession(payload)).toThrow(/duplicate stimulus label/);
  });

  it("rejects mismatched label sets across items, naming the item", () => {
    const payload = sessionPayload();
    const items = payload["items"] as Array<{ stimuli: Array<{ label: string }> }>;
    items[1]!.stimuli[3]!.label = "c99";
    expect(() => parseSession(payload)).toThrow(/itemB.*different label set/);
  });

  it("rejects listener orders that are not permutations", () => {
    const payload = sessionPayload();
    const orders = payload["listener_orders"] as Record<string, { items: string[] }>;
    orders["L01"]!.items = ["itemA", "itemA"];
    expect(() => parseSession(payload)).toThrow(/not a permutation/);

    const bad = sessionPayload();
    const conditions = (bad["listener_orders"] as Record<string, { conditions: Record<string, string[]> }>)[
      "L01"
    ]!.conditions;
    conditions["itemA"] = ["c01", "c02", "c03"];
    expect(() => parseSession(bad)).toThrow(/itemA.*permutation of the labels/);
  });

  it("reports invalid JSON text as a schema error", () => {
    expect(() => parseSessionText("{oops")).toThrow(SchemaError);
    expect(() => parseSessionText("{oops")).toThrow(/not valid JSON/);
  });
});
