"""Who/how instruction planning and the elapsed-time preference statistic.

A measure transition becomes one instruction per part, in score part
order: the part that should adjust and which of the five adjustments it
should make. The preference statistic aggregates, per chord class, how
long the ensemble sustained that chord before someone raised a hand.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import MalformedLog, PitchRangeError, UnreachableTransition
from .score import MIDI_MAX, MIDI_MIN, Part, delta


class Adjustment(enum.Enum):
    UP_HALF = "up_half"
    UP_WHOLE = "up_whole"
    DOWN_HALF = "down_half"
    DOWN_WHOLE = "down_whole"
    NO_CHANGE = "no_change"


# Bijection between the five adjustments and {-2..+2}.
SEMITONES = {
    Adjustment.UP_HALF: 1,
    Adjustment.UP_WHOLE: 2,
    Adjustment.DOWN_HALF: -1,
    Adjustment.DOWN_WHOLE: -2,
    Adjustment.NO_CHANGE: 0,
}
ADJUSTMENT_FOR_DELTA = {v: k for k, v in SEMITONES.items()}


@dataclass(frozen=True)
class Instruction:
    part_id: str
    adjustment: Adjustment


def plan_transition(
    current: tuple[int, ...],
    nxt: tuple[int, ...],
    parts: tuple[Part, ...],
) -> list[Instruction]:
    """One Instruction per part, in score part order.

    NO_CHANGE parts are kept: the conductor still makes eye contact with
    them, so every part receives an explicit message.
    """
    if not (len(current) == len(nxt) == len(parts)):
        raise ValueError("current, next and parts must have equal length")
    instructions = []
    for i, part in enumerate(parts):
        d = delta(current[i], nxt[i])
        adjustment = ADJUSTMENT_FOR_DELTA.get(d)
        if adjustment is None:
            raise UnreachableTransition(i, part.part_id, d)
        instructions.append(Instruction(part_id=part.part_id, adjustment=adjustment))
    return instructions


def apply_instruction(midi: int, adjustment: Adjustment) -> int:
    result = midi + SEMITONES[adjustment]
    if not MIDI_MIN <= result <= MIDI_MAX:
        raise PitchRangeError(f"adjusted pitch {result} leaves {MIDI_MIN}-{MIDI_MAX}")
    return result


def chord_class(measure: tuple[int, ...]) -> tuple[int, ...]:
    """Octave-free identity of a chord: sorted pitch-class multiset."""
    return tuple(sorted(p % 12 for p in measure))


@dataclass
class PreferenceRecord:
    chord: tuple[int, ...]
    samples_ms: list[float] = field(default_factory=list)

    @property
    def mean_ms(self) -> float:
        if not self.samples_ms:
            raise ValueError("mean undefined for empty sample list")
        return sum(self.samples_ms) / len(self.samples_ms)


def update_preferences(events, measures) -> dict[tuple[int, ...], PreferenceRecord]:
    """Aggregate sustain durations per chord class from a session log.

    A sustain interval opens when the conductor enters a sustain state
    (the downbeat or announce motion just completed) and its duration is
    the time until the first request signal seen inside it. Intervals
    still open at end of log (nobody raised a hand) are excluded.

    ``events`` is a time-ordered iterable of SessionEvent; ``measures``
    the score's measure list, used to key each interval by chord class.
    """
    records: dict[tuple[int, ...], PreferenceRecord] = {}
    open_interval: tuple[int, float] | None = None  # (measure_idx, t_open)
    last_t = float("-inf")

    for ev in events:
        if ev.t_ms < last_t:
            raise MalformedLog(f"event seq {ev.seq} goes back in time ({ev.t_ms} < {last_t})")
        last_t = ev.t_ms
        payload = ev.payload
        kind = payload.get("kind")
        if kind == "emission" and payload.get("emit") == "state_changed":
            state = payload["state"]
            if state.get("phase") == "sustain":
                idx = state["measure"]
                if not 0 <= idx < len(measures):
                    raise MalformedLog(f"sustain of unknown measure {idx}")
                open_interval = (idx, ev.t_ms)
            else:
                open_interval = None
        elif kind == "conductor_event" and payload["event"].get("type") == "request_signal":
            if open_interval is not None:
                idx, t_open = open_interval
                t_signal = payload["event"].get("t", ev.t_ms)
                key = chord_class(measures[idx])
                record = records.setdefault(key, PreferenceRecord(chord=key))
                record.samples_ms.append(t_signal - t_open)
                open_interval = None
    return records


def preferences_to_dict(records: dict[tuple[int, ...], PreferenceRecord]) -> dict:
    """JSON-shaped preference report: {"[0, 4, 7]": {...}}."""
    return {
        str(list(key)): {
            "samples_ms": rec.samples_ms,
            "mean_ms": rec.mean_ms,
        }
        for key, rec in sorted(records.items())
    }
