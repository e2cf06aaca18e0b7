/**
 * Sustained seat tone on the Web Audio API, with a visual-only fallback
 * when audio is unavailable (no context, or autoplay not yet unlocked).
 */

export interface OscillatorLike {
  frequency: { setValueAtTime(value: number, when: number): void };
  type: string;
  connect(dest: unknown): void;
  start(): void;
  stop(): void;
}

export interface GainLike {
  gain: {
    value: number;
    setTargetAtTime(value: number, when: number, timeConstant: number): void;
  };
  connect(dest: unknown): void;
}

export interface AudioContextLike {
  currentTime: number;
  destination: unknown;
  createOscillator(): OscillatorLike;
  createGain(): GainLike;
}

export class SeatTone {
  readonly audioAvailable: boolean;
  private osc: OscillatorLike | null = null;
  private gain: GainLike | null = null;
  private ctx: AudioContextLike | null = null;

  constructor(ctx: AudioContextLike | null) {
    this.ctx = ctx;
    this.audioAvailable = ctx !== null;
  }

  /** Current frequency, or null while silent. Mirrors the last retune. */
  currentHz: number | null = null;

  retune(freqHz: number | null): void {
    this.currentHz = freqHz;
    if (!this.ctx) return; // visual-only fallback: badge shows the pitch
    if (freqHz === null) {
      this.silence();
      return;
    }
    if (!this.osc) {
      this.gain = this.ctx.createGain();
      this.gain.gain.value = 0.15;
      this.gain.connect(this.ctx.destination);
      this.osc = this.ctx.createOscillator();
      this.osc.type = "triangle"; // organ-ish, easier on the ears than sine
      this.osc.connect(this.gain);
      this.osc.start();
    }
    this.osc.frequency.setValueAtTime(freqHz, this.ctx.currentTime);
  }

  silence(): void {
    this.currentHz = null;
    if (this.osc) {
      this.osc.stop();
      this.osc = null;
      this.gain = null;
    }
  }
}
