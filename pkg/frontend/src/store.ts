/**
 * Rehearsal-room state: a pure reducer over the session broadcast stream.
 *
 * The store is deliberately stateless about the score — it holds only
 * what the last broadcasts said (current phase, current pitches, the
 * gesture being performed). It can never display a future measure
 * because it never receives one.
 */

import type {
  ConductorPhase,
  GestureInfo,
  MotionPlan,
  PartInfo,
  ServerMessage,
} from "./protocol.js";
import { midiToHz } from "./tuning.js";

export interface SeatState {
  part_id: string;
  display_name: string;
  simulated: boolean;
  /** From the latest pitch_announce / pitch_state broadcast only. */
  midi: number | null;
  freqHz: number | null;
  /** Raise-hand latch: set on click, cleared by the next downbeat. */
  handRaised: boolean;
  /** The adjustment nod aimed at this seat, until the next downbeat. */
  pendingInstruction: string | null;
}

export interface ActiveGesture {
  gesture: GestureInfo;
  motionPlan: MotionPlan;
  durationMs: number;
  startedAtMs: number;
}

export class SessionStore {
  phase: ConductorPhase = { phase: "idle" };
  seats = new Map<string, SeatState>();
  activeGesture: ActiveGesture | null = null;
  banner: string | null = null;
  lastError: string | null = null;

  private now: () => number;

  constructor(now: () => number = () => Date.now()) {
    this.now = now;
  }

  seat(partId: string): SeatState | undefined {
    return this.seats.get(partId);
  }

  /** True while the conductor is mid-gesture ("conductor busy"). */
  get busy(): boolean {
    return this.phase.phase !== "sustain";
  }

  /** Called by the UI when the local player clicks raise-hand. */
  markHandRaised(partId: string): void {
    const seat = this.seats.get(partId);
    if (seat) seat.handRaised = true;
  }

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "hello":
        this.phase = msg.state;
        for (const part of msg.parts) this.ensureSeat(part);
        break;
      case "state_changed":
        this.phase = msg.state;
        break;
      case "pitch_announce": {
        const seat = this.seats.get(msg.part);
        if (seat) {
          seat.midi = msg.midi;
          seat.freqHz = msg.freq_hz;
        }
        break;
      }
      case "pitch_state":
        for (const [partId, midi] of Object.entries(msg.pitches)) {
          const seat = this.seats.get(partId);
          if (!seat) continue;
          seat.midi = midi;
          seat.freqHz = midi === null ? null : midiToHz(midi);
        }
        break;
      case "gesture":
        this.activeGesture = {
          gesture: msg.gesture,
          motionPlan: msg.motion_plan,
          durationMs: msg.duration_ms,
          startedAtMs: this.now(),
        };
        if (msg.gesture.type.startsWith("nod_") && msg.gesture.part) {
          const seat = this.seats.get(msg.gesture.part);
          if (seat) seat.pendingInstruction = msg.gesture.type;
        }
        if (msg.gesture.type === "downbeat") {
          // The downbeat resolves everything: hands come down, pending
          // instructions are now in effect.
          for (const seat of this.seats.values()) {
            seat.handRaised = false;
            seat.pendingInstruction = null;
          }
        }
        break;
      case "end_of_piece":
        this.banner = "piece complete";
        break;
      case "error":
        this.lastError = msg.reason;
        break;
    }
  }

  private ensureSeat(part: PartInfo): void {
    if (this.seats.has(part.part_id)) return;
    this.seats.set(part.part_id, {
      part_id: part.part_id,
      display_name: part.display_name,
      simulated: part.simulated,
      midi: null,
      freqHz: null,
      handRaised: false,
      pendingInstruction: null,
    });
  }
}
