/** Condition playback with sample-continuous switching.
 *
 * All stimuli of one item are time-aligned renderings of the same program,
 * so "instant switching" means: stop the current source and start the new
 * condition at the exact position the old one reached. Positions are
 * computed from the engine clock, never from wall time.
 *
 * The audio engine is injected so the logic is testable without a browser;
 * WebAudioEngine adapts the real AudioContext.
 */

export interface LoopRegion {
  start: number;
  end: number;
}

export interface SourceHandle {
  stop(): void;
}

export interface AudioEngine {
  /** Monotonic clock in seconds (AudioContext.currentTime). */
  now(): number;
  /** Start a stimulus at `offset` seconds; loops over `loop` when given. */
  play(label: string, offset: number, loop: LoopRegion | null): SourceHandle;
  duration(label: string): number;
}

export class PlayerError extends Error {
  override name = "PlayerError";
}

export class ConditionPlayer {
  private readonly engine: AudioEngine;
  private readonly labels: string[];
  private active: string | null = null;
  private handle: SourceHandle | null = null;
  private startedAt = 0; // engine time when playback began
  private baseOffset = 0; // stimulus position at that moment
  private isPlaying = false;
  private loop: LoopRegion | null = null;

  constructor(engine: AudioEngine, labels: string[]) {
    if (labels.length === 0) throw new PlayerError("no stimuli to play");
    this.engine = engine;
    this.labels = [...labels];
  }

  get current(): string | null {
    return this.active;
  }

  get playing(): boolean {
    return this.isPlaying;
  }

  /** Position in seconds within the stimulus, loop-wrapped. */
  position(): number {
    const raw = this.isPlaying
      ? this.baseOffset + (this.engine.now() - this.startedAt)
      : this.baseOffset;
    return this.wrap(raw);
  }

  private wrap(position: number): number {
    if (this.loop && position >= this.loop.end) {
      const span = this.loop.end - this.loop.start;
      return this.loop.start + ((position - this.loop.start) % span);
    }
    const duration = this.active === null ? Infinity : this.engine.duration(this.active);
    return Math.min(position, duration);
  }

  play(label: string): void {
    this.requireLabel(label);
    const offset = this.active === null ? 0 : this.position();
    this.stopSource();
    this.active = label;
    this.baseOffset = offset;
    this.startedAt = this.engine.now();
    this.handle = this.engine.play(label, offset, this.loop);
    this.isPlaying = true;
  }

  /** Switch conditions; playback position carries over exactly. */
  switchTo(label: string): void {
    this.requireLabel(label);
    if (label === this.active) return;
    const offset = this.position();
    const wasPlaying = this.isPlaying;
    this.stopSource();
    this.active = label;
    this.baseOffset = offset;
    if (wasPlaying) {
      this.startedAt = this.engine.now();
      this.handle = this.engine.play(label, offset, this.loop);
      this.isPlaying = true;
    }
  }

  pause(): void {
    if (!this.isPlaying) return;
    this.baseOffset = this.position();
    this.stopSource();
  }

  resume(): void {
    if (this.isPlaying) return;
    if (this.active === null) throw new PlayerError("nothing to resume");
    this.play(this.active);
  }

  /** Restrict playback to [start, end); takes effect on the running source.
   * A playhead outside the new region snaps to its start. */
  setLoop(start: number, end: number): void {
    if (!(start >= 0 && end > start)) {
      throw new PlayerError(`bad loop region [${start}, ${end})`);
    }
    const offset = this.position(); // before the region applies
    this.loop = { start, end };
    if (this.isPlaying && this.active !== null) {
      const label = this.active;
      this.stopSource();
      this.active = label;
      this.baseOffset = offset < start || offset >= end ? start : offset;
      this.startedAt = this.engine.now();
      this.handle = this.engine.play(label, this.baseOffset, this.loop);
      this.isPlaying = true;
    }
  }

  clearLoop(): void {
    this.loop = null;
  }

  stop(): void {
    this.stopSource();
    this.baseOffset = 0;
  }

  private stopSource(): void {
    if (this.handle) {
      this.handle.stop();
      this.handle = null;
    }
    this.isPlaying = false;
  }

  private requireLabel(label: string): void {
    if (!this.labels.includes(label)) {
      throw new PlayerError(`unknown condition label ${label}`);
    }
  }
}

/** Adapter for the real Web Audio API. Buffers are decoded up front so a
 * switch never waits on the network. */
export class WebAudioEngine implements AudioEngine {
  private readonly context: AudioContext;
  private readonly buffers = new Map<string, AudioBuffer>();

  constructor(context: AudioContext) {
    this.context = context;
  }

  async load(label: string, url: string): Promise<void> {
    const response = await fetch(url);
    if (!response.ok) {
      throw new PlayerError(`cannot fetch stimulus for label ${label}: HTTP ${response.status}`);
    }
    const data = await response.arrayBuffer();
    this.buffers.set(label, await this.context.decodeAudioData(data));
  }

  now(): number {
    return this.context.currentTime;
  }

  duration(label: string): number {
    return this.require(label).duration;
  }

  play(label: string, offset: number, loop: LoopRegion | null): SourceHandle {
    const source = this.context.createBufferSource();
    source.buffer = this.require(label);
    if (loop) {
      source.loop = true;
      source.loopStart = loop.start;
      source.loopEnd = loop.end;
    }
    source.connect(this.context.destination);
    source.start(0, offset);
    return {
      stop: () => {
        try {
          source.stop();
        } catch {
          // stopping an already-ended source throws in some browsers
        }
        source.disconnect();
      },
    };
  }

  private require(label: string): AudioBuffer {
    const buffer = this.buffers.get(label);
    if (!buffer) throw new PlayerError(`stimulus for label ${label} is not loaded`);
    return buffer;
  }
}
