"""Session recording, replay, and the closed-loop simulation harness.

A session log is a JSON-lines file: header object first, then one
SessionEvent per line with a strictly increasing ``seq``. The log is
self-contained (the header embeds the score), so replay needs nothing
else, and a file truncated at any line boundary still replays up to
that line.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import threading
from collections import deque
from dataclasses import dataclass, field

from . import fsm
from .clock import VirtualClock
from .ensemble import AgentConfig, Ensemble, schedule_request
from .errors import CorruptLog, DivergenceDetected, IllegalEvent, StorageError
from .gestures import (
    DEFAULT_CODEBOOK,
    DEFAULT_KINEMATICS,
    CodebookConfig,
    Kinematics,
    compile_gesture,
    duration_of,
)
from .score import Bearing, Score, score_from_dict, score_to_dict, serialize_score

LOG_FORMAT = "camconductor-session/1"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t_ms: float
    payload: dict

    def to_json_line(self) -> str:
        return json.dumps({"seq": self.seq, "t_ms": self.t_ms, "payload": self.payload})


def make_header(score: Score, configs: dict | None = None) -> dict:
    text = serialize_score(score)
    return {
        "format": LOG_FORMAT,
        "score": score_to_dict(score),
        "score_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "configs": configs or {},
        "started_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


class Recorder:
    """Base recorder: atomic seq assignment, in-memory event list."""

    def __init__(self, header: dict):
        self.header = header
        self.events: list[SessionEvent] = []
        self._lock = threading.Lock()
        self._seq = 0
        self._closed = False

    def record(self, t_ms: float, payload: dict) -> SessionEvent:
        with self._lock:
            if self._closed:
                raise StorageError("session log is closed")
            self._seq += 1
            event = SessionEvent(seq=self._seq, t_ms=t_ms, payload=payload)
            self.events.append(event)
            self._write(event)
            return event

    def _write(self, event: SessionEvent) -> None:
        pass

    def close(self) -> None:
        with self._lock:
            self._closed = True


class FileRecorder(Recorder):
    """Appends JSON lines to a file, header first, flushing every event."""

    def __init__(self, path, header: dict):
        super().__init__(header)
        try:
            self._fh = open(path, "w", encoding="utf-8")
            self._fh.write(json.dumps(header) + "\n")
            self._fh.flush()
        except OSError as exc:
            raise StorageError(f"cannot open session log {path}: {exc}") from exc

    def _write(self, event: SessionEvent) -> None:
        try:
            self._fh.write(event.to_json_line() + "\n")
            self._fh.flush()
        except (OSError, ValueError) as exc:
            raise StorageError(f"session log write failed: {exc}") from exc

    def close(self) -> None:
        super().close()
        try:
            self._fh.close()
        except OSError:
            pass


@dataclass
class SessionLog:
    header: dict
    events: list[SessionEvent]

    @property
    def score(self) -> Score:
        return score_from_dict(self.header["score"])


def load_log(path) -> SessionLog:
    """Parse and validate a session log file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [line for line in fh.read().splitlines() if line.strip()]
    except OSError as exc:
        raise CorruptLog(f"cannot read log {path}: {exc}") from exc
    if not lines:
        raise CorruptLog("log is empty (missing header)")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptLog(f"header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != LOG_FORMAT:
        raise CorruptLog(f"unrecognized log format {header.get('format')!r}")
    if "score" not in header:
        raise CorruptLog("header missing embedded score")

    events: list[SessionEvent] = []
    prev_seq = 0
    prev_t = float("-inf")
    for i, line in enumerate(lines[1:], start=2):
        try:
            doc = json.loads(line)
            event = SessionEvent(seq=doc["seq"], t_ms=doc["t_ms"], payload=doc["payload"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptLog(f"line {i} is not a session event: {exc}") from exc
        if event.seq <= prev_seq:
            raise CorruptLog(f"line {i}: seq {event.seq} not increasing")
        if event.t_ms < prev_t:
            raise CorruptLog(f"line {i}: t_ms {event.t_ms} goes backwards")
        prev_seq, prev_t = event.seq, event.t_ms
        events.append(event)
    return SessionLog(header=header, events=events)


def replay(log: SessionLog) -> list[tuple[int, dict]]:
    """Re-drive the logged conductor events through the state machine.

    Returns the reconstructed (seq, state) trajectory at every logged
    state change; raises DivergenceDetected at the first logged state
    the replay does not reproduce.
    """
    score = log.score
    ids = fsm.GestureIds()
    state: fsm.ConductorState = fsm.Idle()
    trajectory: list[tuple[int, dict]] = []
    prev_seq = 0
    for event in log.events:
        # The recorder writes gapless seqs, so a mid-log hole means a
        # deleted line; truncated tails are fine (no gap appears).
        if event.seq != prev_seq + 1:
            raise DivergenceDetected(
                event.seq, f"seq gap after {prev_seq}: a log line is missing"
            )
        prev_seq = event.seq
        kind = event.payload.get("kind")
        if kind == "conductor_event":
            conductor_event = fsm.event_from_dict(event.payload["event"])
            try:
                state, _ = fsm.step(state, conductor_event, score, ids)
            except IllegalEvent as exc:
                raise DivergenceDetected(event.seq, str(exc)) from exc
        elif kind == "emission" and event.payload.get("emit") == "state_changed":
            logged = event.payload["state"]
            replayed = fsm.state_to_dict(state)
            if replayed != logged:
                raise DivergenceDetected(
                    event.seq, f"log says {logged}, replay says {replayed}"
                )
            trajectory.append((event.seq, replayed))
    return trajectory


# --- closed-loop simulation ----------------------------------------------

@dataclass
class SimulationResult:
    summary: fsm.SessionSummary
    sustain_trace: list[tuple[int, dict]]  # (measure_idx, pitches at entry)
    events: list[SessionEvent]
    header: dict

    def to_dict(self) -> dict:
        return {
            "summary": self.summary.to_dict(),
            "sustains": [
                {"measure": m, "pitches": p} for m, p in self.sustain_trace
            ],
            "events": len(self.events),
        }


def simulate_session(
    score: Score,
    agent_configs: list[AgentConfig] | None = None,
    codebook: CodebookConfig = DEFAULT_CODEBOOK,
    kinematics: Kinematics = DEFAULT_KINEMATICS,
    recorder: Recorder | None = None,
    max_steps: int = 100_000,
) -> SimulationResult:
    """Run the full loop on a virtual clock: conductor, gesture compiler,
    analytic motion timing, and simulated musicians.

    Deterministic under the agents' seeds; finishes in milliseconds of
    wall time regardless of the score's nominal duration.
    """
    if agent_configs is None:
        agent_configs = [AgentConfig(part_id=pid) for pid in score.part_ids()]
    ensemble = Ensemble(agent_configs)
    seats = score.seat_map()
    center = Bearing(0.0, 0.0)
    clock = VirtualClock()
    ids = fsm.GestureIds()
    state: fsm.ConductorState = fsm.Idle()
    if recorder is None:
        recorder = Recorder(make_header(score))

    motion_queue: deque = deque()
    cursor = Bearing(0.0, 0.0)
    next_request: tuple[str, float] | None = None
    sustain_trace: list[tuple[int, dict]] = []
    measures_traversed = 0

    def process_event(event: fsm.ConductorEvent) -> None:
        nonlocal state, next_request, measures_traversed
        recorder.record(clock.now_ms(), {"kind": "conductor_event", "event": event.to_dict()})
        new_state, output = fsm.step(state, event, score, ids)
        state = new_state
        for emission in output:
            recorder.record(clock.now_ms(), {"kind": "emission", **emission.to_dict()})
            if isinstance(emission, fsm.PitchAnnounce):
                ensemble.initialize_pitch(emission.part_id, emission.midi)
            elif isinstance(emission, fsm.GestureRequest):
                motion_queue.append(emission.gesture)
            elif isinstance(emission, fsm.StateChanged) and isinstance(
                emission.state, fsm.Sustain
            ):
                measures_traversed += 1
                pitches = ensemble.pitches()
                recorder.record(
                    clock.now_ms(), {"kind": "pitch_state", "pitches": pitches}
                )
                sustain_trace.append((emission.state.measure, dict(pitches)))
                part, t = schedule_request(ensemble, clock.now_ms())
                next_request = (part, t)

    def run_motions() -> None:
        nonlocal cursor
        while motion_queue:
            gesture = motion_queue.popleft()
            plan = compile_gesture(gesture, seats, center, codebook)
            dur = duration_of(plan, kinematics, start=cursor)
            last = plan.segments[-1]
            cursor = Bearing(last.target_pan, last.target_tilt)
            clock.advance_to(clock.now_ms() + dur)
            recorder.record(
                clock.now_ms(),
                {"kind": "camera_pose", "pan": cursor.pan, "tilt": cursor.tilt, "moving": False},
            )
            ensemble.observe_gesture(gesture)
            process_event(fsm.MotionDone(gesture_id=gesture.gesture_id))

    process_event(fsm.Start())
    run_motions()

    steps = 0
    while not (isinstance(state, fsm.EndOfPiece) and not motion_queue):
        steps += 1
        if steps > max_steps:
            raise RuntimeError("simulation did not terminate")
        if next_request is None:
            raise RuntimeError(f"stuck in {state!r} with no scheduled request")
        part, t = next_request
        next_request = None
        clock.advance_to(max(t, clock.now_ms()))
        process_event(fsm.RequestSignal(part_id=part, timestamp_ms=clock.now_ms()))
        run_motions()

    summary = fsm.SessionSummary(
        measures_traversed=measures_traversed,
        duration_ms=clock.now_ms(),
        end_state=state,
    )
    recorder.close()
    return SimulationResult(
        summary=summary,
        sustain_trace=sustain_trace,
        events=recorder.events,
        header=recorder.header,
    )
