"""Deterministic conductor state machine.

The conductor announces the opening chord, lets the ensemble sustain it,
and reacts to a request signal by walking every part through its who/how
gesture pair, then cueing the collective downbeat. The machine is
time-free: pacing lives entirely in gesture durations and musician
patience.

States carry a ``pending`` count of outstanding motions so step() stays
a pure function; ``pending`` is excluded from state equality, so a
StateChanged emission marks a real phase change only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Union

from .errors import IllegalEvent
from .gestures import (
    DOWNBEAT,
    END_OF_PIECE,
    Gesture,
    eye_contact,
    gesture_for_adjustment,
)
from .harmony import plan_transition
from .score import Score


# --- states ---------------------------------------------------------------

@dataclass(frozen=True)
class Idle:
    phase = "idle"


@dataclass(frozen=True)
class Announce:
    phase = "announce"
    pending: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Sustain:
    phase = "sustain"
    measure: int = 0


@dataclass(frozen=True)
class Instruct:
    phase = "instruct"
    measure: int = 0
    step: int = 0
    pending: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DownbeatCue:
    phase = "downbeat_cue"
    measure: int = 0  # the measure being cued in
    pending: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EndOfPiece:
    phase = "end_of_piece"
    pending: int = field(default=0, compare=False)


ConductorState = Union[Idle, Announce, Sustain, Instruct, DownbeatCue, EndOfPiece]


def state_to_dict(state: ConductorState) -> dict:
    d = {"phase": state.phase}
    if isinstance(state, (Sustain, Instruct, DownbeatCue)):
        d["measure"] = state.measure
    if isinstance(state, Instruct):
        d["step"] = state.step
    return d


# --- events ---------------------------------------------------------------

@dataclass(frozen=True)
class Start:
    type = "start"

    def to_dict(self) -> dict:
        return {"type": "start"}


@dataclass(frozen=True)
class RequestSignal:
    part_id: str
    timestamp_ms: float = 0.0
    type = "request_signal"

    def to_dict(self) -> dict:
        return {"type": "request_signal", "part": self.part_id, "t": self.timestamp_ms}


@dataclass(frozen=True)
class MotionDone:
    gesture_id: str
    type = "motion_done"

    def to_dict(self) -> dict:
        return {"type": "motion_done", "gesture_id": self.gesture_id}


@dataclass(frozen=True)
class Abort:
    type = "abort"

    def to_dict(self) -> dict:
        return {"type": "abort"}


ConductorEvent = Union[Start, RequestSignal, MotionDone, Abort]


def event_from_dict(d: dict) -> ConductorEvent:
    t = d["type"]
    if t == "start":
        return Start()
    if t == "request_signal":
        return RequestSignal(part_id=d["part"], timestamp_ms=d.get("t", 0.0))
    if t == "motion_done":
        return MotionDone(gesture_id=d["gesture_id"])
    if t == "abort":
        return Abort()
    raise ValueError(f"unknown conductor event type {t!r}")


# --- emissions ------------------------------------------------------------

@dataclass(frozen=True)
class PitchAnnounce:
    part_id: str
    midi: int

    def to_dict(self) -> dict:
        return {"emit": "pitch_announce", "part": self.part_id, "midi": self.midi}


@dataclass(frozen=True)
class GestureRequest:
    gesture: Gesture

    def to_dict(self) -> dict:
        return {"emit": "gesture_request", "gesture": self.gesture.to_dict()}


@dataclass(frozen=True)
class StateChanged:
    state: ConductorState

    def to_dict(self) -> dict:
        return {"emit": "state_changed", "state": state_to_dict(self.state)}


Emission = Union[PitchAnnounce, GestureRequest, StateChanged]
ConductorOutput = list


class GestureIds:
    """Session-unique gesture id allocator (g1, g2, ...)."""

    def __init__(self):
        self._counter = itertools.count(1)

    def next_id(self) -> str:
        return f"g{next(self._counter)}"


def _instruction_gestures(score: Score, measure: int, step: int, ids: GestureIds) -> list[Gesture]:
    """Gesture pair for one instruction: eye contact, then the nod unless no-change."""
    instructions = plan_transition(
        score.measures[measure], score.measures[measure + 1], score.parts
    )
    instr = instructions[step]
    gestures = [eye_contact(instr.part_id).with_id(ids.next_id())]
    nod = gesture_for_adjustment(instr.adjustment, instr.part_id)
    if nod is not None:
        gestures.append(nod.with_id(ids.next_id()))
    return gestures


def step(
    state: ConductorState,
    event: ConductorEvent,
    score: Score,
    ids: GestureIds,
) -> tuple[ConductorState, ConductorOutput]:
    """Pure transition function; same (state, event, score, id stream) in,
    same (state, emissions) out."""

    if isinstance(event, Abort):
        new = Idle()
        return new, [StateChanged(new)]

    if isinstance(state, Idle):
        if isinstance(event, Start):
            out: list = [
                PitchAnnounce(part.part_id, score.measures[0][i])
                for i, part in enumerate(score.parts)
            ]
            out.append(GestureRequest(DOWNBEAT.with_id(ids.next_id())))
            new = Announce(pending=1)
            out.append(StateChanged(new))
            return new, out
        raise IllegalEvent(state, event)

    if isinstance(event, Start):
        raise IllegalEvent(state, event)

    if isinstance(state, Announce):
        if isinstance(event, MotionDone):
            if state.pending > 1:
                return replace(state, pending=state.pending - 1), []
            new = Sustain(0)
            return new, [StateChanged(new)]
        if isinstance(event, RequestSignal):
            # Piece has not started sounding yet; absorb.
            return state, []
        raise IllegalEvent(state, event)

    if isinstance(state, Sustain):
        if isinstance(event, RequestSignal):
            if state.measure == len(score.measures) - 1:
                new = EndOfPiece(pending=1)
                return new, [
                    GestureRequest(END_OF_PIECE.with_id(ids.next_id())),
                    StateChanged(new),
                ]
            gestures = _instruction_gestures(score, state.measure, 0, ids)
            new = Instruct(measure=state.measure, step=0, pending=len(gestures))
            out = [GestureRequest(g) for g in gestures]
            out.append(StateChanged(new))
            return new, out
        raise IllegalEvent(state, event)

    if isinstance(state, Instruct):
        if isinstance(event, RequestSignal):
            return state, []  # already reacting; a queued complaint would double-advance
        if isinstance(event, MotionDone):
            if state.pending > 1:
                return replace(state, pending=state.pending - 1), []
            if state.step < len(score.parts) - 1:
                gestures = _instruction_gestures(score, state.measure, state.step + 1, ids)
                new = Instruct(
                    measure=state.measure, step=state.step + 1, pending=len(gestures)
                )
                out = [GestureRequest(g) for g in gestures]
                out.append(StateChanged(new))
                return new, out
            new = DownbeatCue(measure=state.measure + 1, pending=1)
            return new, [
                GestureRequest(DOWNBEAT.with_id(ids.next_id())),
                StateChanged(new),
            ]
        raise IllegalEvent(state, event)

    if isinstance(state, DownbeatCue):
        if isinstance(event, RequestSignal):
            return state, []
        if isinstance(event, MotionDone):
            if state.pending > 1:
                return replace(state, pending=state.pending - 1), []
            new = Sustain(state.measure)
            return new, [StateChanged(new)]
        raise IllegalEvent(state, event)

    if isinstance(state, EndOfPiece):
        if isinstance(event, MotionDone) and state.pending > 0:
            return replace(state, pending=state.pending - 1), []
        if isinstance(event, RequestSignal):
            return state, []
        raise IllegalEvent(state, event)

    raise IllegalEvent(state, event)  # pragma: no cover


@dataclass
class SessionSummary:
    measures_traversed: int
    duration_ms: float
    end_state: ConductorState

    def to_dict(self) -> dict:
        return {
            "measures_traversed": self.measures_traversed,
            "duration_ms": self.duration_ms,
            "end_state": state_to_dict(self.end_state),
        }


def run_session(score: Score, event_source, output_sink=None) -> SessionSummary:
    """Drive step() over a time-ordered event iterable until the piece
    ends, the session aborts, or the source runs dry.

    ``event_source`` yields ConductorEvent or (ConductorEvent, t_ms)
    pairs; every emission is forwarded to ``output_sink`` (a callable).
    """
    ids = GestureIds()
    state: ConductorState = Idle()
    measures = 0
    last_t = 0.0
    started = False

    for item in event_source:
        if isinstance(item, tuple):
            event, t_ms = item
            last_t = t_ms
        else:
            event = item
        started = True
        state, output = step(state, event, score, ids)
        for emission in output:
            if isinstance(emission, StateChanged) and isinstance(emission.state, Sustain):
                measures += 1
            if output_sink is not None:
                output_sink(emission)
        if isinstance(state, EndOfPiece) and state.pending == 0:
            break
        if isinstance(state, Idle) and started:
            break

    return SessionSummary(measures_traversed=measures, duration_ms=last_t, end_state=state)
