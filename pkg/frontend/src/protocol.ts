/**
 * Wire protocol for the conductor session bus.
 *
 * One WebSocket, JSON messages both ways. Every server broadcast carries
 * a gapless `seq`; on reconnect the client resumes with `?since=` so no
 * broadcast is ever missed. The score is never on the wire — clients
 * only learn the current chord.
 */

export interface PartInfo {
  part_id: string;
  display_name: string;
  simulated: boolean;
}

export interface ConductorPhase {
  phase: string;
  measure?: number;
  step?: number;
}

export interface MotionSegment {
  pan: number;
  tilt: number;
  speed: number;
  hold_ms: number;
}

export interface MotionPlan {
  gesture_id: string;
  segments: MotionSegment[];
}

export interface GestureInfo {
  type: string;
  gesture_id: string;
  part?: string;
}

export type ServerMessage =
  | { type: "hello"; seq: number; parts: PartInfo[]; state: ConductorPhase }
  | { type: "state_changed"; seq: number; state: ConductorPhase }
  | {
      type: "gesture";
      seq: number;
      gesture: GestureInfo;
      motion_plan: MotionPlan;
      duration_ms: number;
    }
  | { type: "pitch_announce"; seq: number; part: string; midi: number; freq_hz: number }
  | { type: "pitch_state"; seq: number; pitches: Record<string, number | null> }
  | { type: "end_of_piece"; seq: number }
  | { type: "error"; seq: number; reason: string };

export type ClientMessage =
  | { type: "start" }
  | { type: "abort" }
  | { type: "raise_hand"; part: string };

/** Minimal socket surface so tests can inject a fake. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ProtocolClientOptions {
  url: string;
  makeSocket: SocketFactory;
  onMessage: (msg: ServerMessage) => void;
  onStatus?: (status: "connecting" | "open" | "reconnecting") => void;
  reconnectDelayMs?: number;
}

/**
 * Session bus client: parses broadcasts, tracks the seq high-water mark,
 * reconnects with resume-from-seq, and queues outbound messages while
 * disconnected so a raise-hand click is never silently dropped.
 */
export class ProtocolClient {
  private socket: SocketLike | null = null;
  private lastSeq = 0;
  private outbox: ClientMessage[] = [];
  private open = false;
  private closed = false;

  constructor(private readonly opts: ProtocolClientOptions) {}

  connect(): void {
    this.closed = false;
    this.opts.onStatus?.("connecting");
    this.dial();
  }

  private dial(): void {
    const sep = this.opts.url.includes("?") ? "&" : "?";
    const socket = this.opts.makeSocket(`${this.opts.url}${sep}since=${this.lastSeq}`);
    this.socket = socket;
    socket.onopen = () => {
      this.open = true;
      this.opts.onStatus?.("open");
      for (const msg of this.outbox.splice(0)) {
        socket.send(JSON.stringify(msg));
      }
    };
    socket.onmessage = (ev) => {
      let msg: ServerMessage;
      try {
        msg = JSON.parse(String(ev.data)) as ServerMessage;
      } catch {
        console.warn("unparseable server message", ev.data);
        return;
      }
      if (typeof msg.seq === "number" && msg.seq > this.lastSeq) {
        this.lastSeq = msg.seq;
      }
      this.opts.onMessage(msg);
    };
    socket.onclose = () => {
      this.open = false;
      this.socket = null;
      if (this.closed) return;
      this.opts.onStatus?.("reconnecting");
      setTimeout(() => {
        if (!this.closed) this.dial();
      }, this.opts.reconnectDelayMs ?? 1000);
    };
  }

  get isOpen(): boolean {
    return this.open;
  }

  get seq(): number {
    return this.lastSeq;
  }

  /** Pending outbound messages (visible so the UI can show "reconnecting"). */
  get pending(): readonly ClientMessage[] {
    return this.outbox;
  }

  send(msg: ClientMessage): void {
    if (this.open && this.socket) {
      this.socket.send(JSON.stringify(msg));
    } else {
      this.outbox.push(msg);
    }
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
    this.open = false;
  }
}
