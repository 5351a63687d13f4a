/** Session state: ratings, audition tracking, page gating, persistence.
 *
 * Invariants enforced here rather than in the DOM layer:
 *  - scores clamp to the session scale and are stored as integers;
 *  - the next page unlocks only when every condition of the current item has
 *    been both auditioned and rated;
 *  - submit unlocks only when every item is complete;
 *  - in-progress state persists across reloads until the session is
 *    submitted.
 */

import { PublicSession } from "./schema.js";
import { RatingRecord, toJsonLines } from "./export.js";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();
  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
  removeItem(key: string): void {
    this.data.delete(key);
  }
}

interface PersistedState {
  currentIndex: number;
  scores: Record<string, Record<string, number>>;
  auditioned: Record<string, string[]>;
}

export class SessionState {
  readonly session: PublicSession;
  readonly listenerId: string;
  private readonly store: KeyValueStore;
  private readonly slot: string | null;
  private currentIndex = 0;
  private scores = new Map<string, Map<string, number>>();
  private auditioned = new Map<string, Set<string>>();

  constructor(
    session: PublicSession,
    listenerId: string,
    store: KeyValueStore = new MemoryStore(),
    slot: string | null = null,
  ) {
    if (listenerId === "") throw new Error("listener id must not be empty");
    if (slot !== null && !(slot in session.listenerOrders)) {
      throw new Error(`unknown listener slot ${slot}`);
    }
    this.session = session;
    this.listenerId = listenerId;
    this.store = store;
    this.slot = slot;
    this.restore();
  }

  private get storageKey(): string {
    return `mushra:${this.session.seed}:${this.listenerId}`;
  }

  /** Item ids in presentation order (a listener slot's shuffle if given). */
  get itemOrder(): string[] {
    if (this.slot !== null) {
      const order = this.session.listenerOrders[this.slot];
      if (order) return [...order.items];
    }
    return this.session.items.map((i) => i.itemId);
  }

  get currentItem(): string {
    const order = this.itemOrder;
    const item = order[Math.min(this.currentIndex, order.length - 1)];
    if (item === undefined) throw new Error("session has no items");
    return item;
  }

  get pageIndex(): number {
    return this.currentIndex;
  }

  get numPages(): number {
    return this.session.items.length;
  }

  /** Labels for an item in presentation order. */
  labelsFor(itemId: string): string[] {
    if (this.slot !== null) {
      const order = this.session.listenerOrders[this.slot];
      const labels = order?.conditions[itemId];
      if (labels) return [...labels];
    }
    const item = this.session.items.find((i) => i.itemId === itemId);
    if (!item) throw new Error(`unknown item ${itemId}`);
    return item.stimuli.map((s) => s.label);
  }

  stimulusPath(itemId: string, label: string): string {
    const item = this.session.items.find((i) => i.itemId === itemId);
    const stimulus = item?.stimuli.find((s) => s.label === label);
    if (!stimulus) throw new Error(`unknown stimulus ${itemId}/${label}`);
    return stimulus.path;
  }

  /** Clamp to the scale, round to an integer, record, persist. */
  rate(itemId: string, label: string, score: number): number {
    this.stimulusPath(itemId, label); // validates the pair
    const { min, max } = this.session.scale;
    const clamped = Math.round(Math.min(max, Math.max(min, score)));
    let byLabel = this.scores.get(itemId);
    if (!byLabel) {
      byLabel = new Map();
      this.scores.set(itemId, byLabel);
    }
    byLabel.set(label, clamped);
    this.persist();
    return clamped;
  }

  markAuditioned(itemId: string, label: string): void {
    this.stimulusPath(itemId, label);
    let set = this.auditioned.get(itemId);
    if (!set) {
      set = new Set();
      this.auditioned.set(itemId, set);
    }
    set.add(label);
    this.persist();
  }

  ratingOf(itemId: string, label: string): number | null {
    return this.scores.get(itemId)?.get(label) ?? null;
  }

  wasAuditioned(itemId: string, label: string): boolean {
    return this.auditioned.get(itemId)?.has(label) ?? false;
  }

  /** Every condition of the item auditioned and rated. */
  itemComplete(itemId: string): boolean {
    return this.labelsFor(itemId).every(
      (label) => this.ratingOf(itemId, label) !== null && this.wasAuditioned(itemId, label),
    );
  }

  get canAdvance(): boolean {
    return this.itemComplete(this.currentItem) && this.currentIndex < this.numPages - 1;
  }

  next(): void {
    if (!this.canAdvance) throw new Error("current item is not fully auditioned and rated");
    this.currentIndex += 1;
    this.persist();
  }

  prev(): void {
    if (this.currentIndex > 0) {
      this.currentIndex -= 1;
      this.persist();
    }
  }

  /** Item ids that still block submission. */
  incompleteItems(): string[] {
    return this.itemOrder.filter((itemId) => !this.itemComplete(itemId));
  }

  get canSubmit(): boolean {
    return this.incompleteItems().length === 0;
  }

  toRecords(now: () => string): RatingRecord[] {
    const records: RatingRecord[] = [];
    for (const itemId of this.itemOrder) {
      for (const label of [...this.labelsFor(itemId)].sort()) {
        const score = this.ratingOf(itemId, label);
        if (score === null) throw new Error(`item ${itemId}, condition ${label} is unrated`);
        records.push({
          listenerId: this.listenerId,
          itemId,
          conditionId: label,
          score,
          timestamp: now(),
        });
      }
    }
    return records;
  }

  /** JSON-lines export; clears persisted in-progress state on success. */
  submit(now: () => string = () => new Date().toISOString()): string {
    if (!this.canSubmit) {
      throw new Error(`incomplete items: ${this.incompleteItems().join(", ")}`);
    }
    const text = toJsonLines(this.toRecords(now), this.session.scale);
    this.store.removeItem(this.storageKey);
    return text;
  }

  private persist(): void {
    const state: PersistedState = {
      currentIndex: this.currentIndex,
      scores: Object.fromEntries(
        [...this.scores].map(([item, byLabel]) => [item, Object.fromEntries(byLabel)]),
      ),
      auditioned: Object.fromEntries([...this.auditioned].map(([item, set]) => [item, [...set]])),
    };
    this.store.setItem(this.storageKey, JSON.stringify(state));
  }

  private restore(): void {
    const raw = this.store.getItem(this.storageKey);
    if (raw === null) return;
    try {
      const state = JSON.parse(raw) as PersistedState;
      this.currentIndex = Math.min(Math.max(0, state.currentIndex | 0), this.numPages - 1);
      for (const [item, byLabel] of Object.entries(state.scores ?? {})) {
        for (const [label, score] of Object.entries(byLabel)) {
          if (typeof score === "number") this.rate(item, label, score);
        }
      }
      for (const [item, labels] of Object.entries(state.auditioned ?? {})) {
        for (const label of labels) this.markAuditioned(item, label);
      }
    } catch {
      // a corrupt blob must never brick the session; start fresh
      this.store.removeItem(this.storageKey);
    }
  }
}
