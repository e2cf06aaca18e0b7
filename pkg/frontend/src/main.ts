/**
 * Browser entry point: wires the protocol client, session store, avatar
 * renderer, and per-seat tones into the rehearsal-room page.
 *
 * Pick your seat from the occupancy row; simulated seats are played by
 * the server's bots. Teach mode (gesture captions) defaults to off.
 */

import { buildTimeline, describeGesture, NEUTRAL_POSE, type Pose } from "./avatar.js";
import { SeatTone, type AudioContextLike } from "./audio.js";
import { ProtocolClient, type ServerMessage } from "./protocol.js";
import { SessionStore } from "./store.js";
import { formatHz, midiToName } from "./tuning.js";

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/ws`;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const store = new SessionStore();
  let mySeat: string | null = null;
  let teachMode = false;
  let tone: SeatTone | null = null;
  let avatarPose: Pose = NEUTRAL_POSE;
  let animation: { start: number; sample: (t: number) => Pose; end: Pose } | null = null;

  const head = el<HTMLDivElement>("avatar-head");
  const caption = el<HTMLDivElement>("caption");
  const seatsRow = el<HTMLDivElement>("seats");
  const phaseLabel = el<HTMLSpanElement>("phase");
  const status = el<HTMLSpanElement>("status");
  const banner = el<HTMLDivElement>("banner");

  function renderSeats(): void {
    seatsRow.replaceChildren();
    for (const seat of store.seats.values()) {
      const card = document.createElement("div");
      card.className = "seat";
      if (seat.part_id === mySeat) card.classList.add("mine");
      const pitch =
        seat.midi === null
          ? "—"
          : `${midiToName(seat.midi)} (${formatHz(seat.freqHz ?? 0)})`;
      card.innerHTML = `
        <h3>${seat.display_name}${seat.simulated ? " 🤖" : ""}</h3>
        <div class="pitch">${pitch}</div>
        <div class="flags">${seat.handRaised ? "✋" : ""}${
          seat.pendingInstruction ? " ♪" : ""
        }</div>`;
      if (!seat.simulated) {
        card.onclick = () => {
          mySeat = seat.part_id;
          unlockAudio();
          renderSeats();
        };
      } else {
        card.classList.add("disabled");
      }
      seatsRow.appendChild(card);
    }
    phaseLabel.textContent = store.phase.phase;
    banner.textContent = store.banner ?? "";
  }

  function unlockAudio(): void {
    if (tone) return;
    const Ctx =
      (window as unknown as { AudioContext?: new () => AudioContextLike }).AudioContext;
    tone = new SeatTone(Ctx ? new Ctx() : null);
    if (!tone.audioAvailable) status.textContent = "audio unavailable — visual only";
  }

  function retuneMySeat(): void {
    if (!tone || !mySeat) return;
    tone.retune(store.seat(mySeat)?.freqHz ?? null);
  }

  function onMessage(msg: ServerMessage): void {
    store.apply(msg);
    if (msg.type === "gesture") {
      const meaning = describeGesture(msg.gesture);
      if (meaning === null) {
        console.warn("unknown gesture type", msg.gesture.type);
        animation = null;
        avatarPose = NEUTRAL_POSE;
      } else {
        const timeline = buildTimeline(msg.motion_plan, msg.duration_ms, avatarPose);
        animation = {
          start: performance.now(),
          sample: (t) => timeline.poseAt(t),
          end: timeline.endPose,
        };
        caption.textContent = teachMode ? meaning : "";
      }
    }
    if (msg.type === "pitch_announce" || msg.type === "pitch_state") retuneMySeat();
    if (msg.type === "end_of_piece") tone?.silence();
    renderSeats();
  }

  const client = new ProtocolClient({
    url: wsUrl(),
    makeSocket: (url) => new WebSocket(url) as unknown as import("./protocol.js").SocketLike,
    onMessage,
    onStatus: (s) => {
      status.textContent = s === "open" ? "" : s;
    },
  });
  client.connect();

  el<HTMLButtonElement>("start").onclick = () => client.send({ type: "start" });
  el<HTMLButtonElement>("raise").onclick = () => {
    if (!mySeat) return;
    if (store.busy) {
      status.textContent = "conductor busy";
      return;
    }
    store.markHandRaised(mySeat);
    client.send({ type: "raise_hand", part: mySeat });
    renderSeats();
  };
  el<HTMLInputElement>("teach").onchange = (ev) => {
    teachMode = (ev.target as HTMLInputElement).checked;
    if (!teachMode) caption.textContent = "";
  };

  function frame(now: number): void {
    if (animation) {
      const t = now - animation.start;
      avatarPose = animation.sample(t);
      if (t > 1e7) animation = null;
    }
    head.style.transform = `rotateY(${avatarPose.pan}deg) rotateX(${-avatarPose.tilt}deg)`;
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

if (typeof document !== "undefined" && document.getElementById("avatar-head")) {
  boot();
}
