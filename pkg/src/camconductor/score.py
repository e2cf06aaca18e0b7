"""Hidden score of sustained chords: parsing, validation, serialization.

A score is an ordered part list plus ordered measures, one MIDI pitch per
part per measure. Consecutive measures must be reachable through the five
allowed adjustments (at most a whole step per part), but that check is a
separate pass so tools can load and repair broken scores.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import SchemaError, ScoreSyntaxError

MIDI_MIN = 0
MIDI_MAX = 127

PAN_MIN, PAN_MAX = -170.0, 170.0
TILT_MIN, TILT_MAX = -30.0, 90.0

# Semitone deltas reachable in a single measure transition.
REACHABLE_DELTAS = frozenset({-2, -1, 0, 1, 2})


def check_midi(value, context: str = "pitch") -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"{context}: expected integer MIDI number, got {value!r}")
    if not MIDI_MIN <= value <= MIDI_MAX:
        raise SchemaError(f"{context}: MIDI number {value} outside {MIDI_MIN}-{MIDI_MAX}")
    return value


@dataclass(frozen=True)
class Bearing:
    """Pan/tilt angles in degrees, relative to camera home."""

    pan: float
    tilt: float

    def clamped(self) -> "Bearing":
        return Bearing(
            pan=min(max(self.pan, PAN_MIN), PAN_MAX),
            tilt=min(max(self.tilt, TILT_MIN), TILT_MAX),
        )


@dataclass(frozen=True)
class Part:
    part_id: str
    display_name: str
    seat_bearing: Bearing


@dataclass(frozen=True)
class Score:
    """Immutable after construction; safe to share across threads."""

    parts: tuple[Part, ...]
    measures: tuple[tuple[int, ...], ...]

    def part_ids(self) -> list[str]:
        return [p.part_id for p in self.parts]

    def part_index(self, part_id: str) -> int:
        for i, p in enumerate(self.parts):
            if p.part_id == part_id:
                return i
        raise KeyError(part_id)

    def seat_map(self) -> dict[str, Bearing]:
        return {p.part_id: p.seat_bearing for p in self.parts}


@dataclass(frozen=True)
class Violation:
    """One unreachable measure transition: measure i -> i+1 for one part."""

    measure_index: int
    part_index: int
    part_id: str
    semitones: int


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def delta(from_midi: int, to_midi: int) -> int:
    """Signed semitone distance from one pitch to another."""
    return to_midi - from_midi


def parse_score(text: str) -> Score:
    """Parse the JSON score document. Does not check reachability."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScoreSyntaxError(f"score is not valid JSON: {exc}") from exc
    return score_from_dict(doc)


def score_from_dict(doc) -> Score:
    if not isinstance(doc, dict):
        raise SchemaError("score document must be a JSON object")
    for key in ("parts", "measures"):
        if key not in doc:
            raise SchemaError(f"score document missing {key!r}")

    raw_parts = doc["parts"]
    if not isinstance(raw_parts, list) or not raw_parts:
        raise SchemaError("'parts' must be a non-empty list")
    parts = []
    seen_ids = set()
    for i, rp in enumerate(raw_parts):
        if not isinstance(rp, dict):
            raise SchemaError(f"parts[{i}] must be an object")
        try:
            part_id = rp["part_id"]
            bearing = rp["seat_bearing"]
        except KeyError as exc:
            raise SchemaError(f"parts[{i}] missing {exc.args[0]!r}") from exc
        if not isinstance(part_id, str) or not part_id:
            raise SchemaError(f"parts[{i}].part_id must be a non-empty string")
        if part_id in seen_ids:
            raise SchemaError(f"duplicate part_id {part_id!r}")
        seen_ids.add(part_id)
        if not isinstance(bearing, dict) or "pan" not in bearing or "tilt" not in bearing:
            raise SchemaError(f"parts[{i}].seat_bearing must have 'pan' and 'tilt'")
        try:
            pan = float(bearing["pan"])
            tilt = float(bearing["tilt"])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"parts[{i}].seat_bearing angles must be numbers") from exc
        parts.append(
            Part(
                part_id=part_id,
                display_name=str(rp.get("display_name", part_id)),
                seat_bearing=Bearing(pan, tilt).clamped(),
            )
        )

    raw_measures = doc["measures"]
    if not isinstance(raw_measures, list) or not raw_measures:
        raise SchemaError("'measures' must be a non-empty list")
    measures = []
    for mi, rm in enumerate(raw_measures):
        if not isinstance(rm, list):
            raise SchemaError(f"measures[{mi}] must be a list of MIDI numbers")
        if len(rm) != len(parts):
            raise SchemaError(
                f"measures[{mi}] has {len(rm)} pitches for {len(parts)} parts"
            )
        measures.append(
            tuple(check_midi(p, f"measures[{mi}][{pi}]") for pi, p in enumerate(rm))
        )

    return Score(parts=tuple(parts), measures=tuple(measures))


def score_to_dict(score: Score) -> dict:
    return {
        "parts": [
            {
                "part_id": p.part_id,
                "display_name": p.display_name,
                "seat_bearing": {"pan": p.seat_bearing.pan, "tilt": p.seat_bearing.tilt},
            }
            for p in score.parts
        ],
        "measures": [list(m) for m in score.measures],
    }


def serialize_score(score: Score) -> str:
    return json.dumps(score_to_dict(score), indent=2)


def validate_score(score: Score) -> ValidationReport:
    """Flag every consecutive-measure pitch move outside -2..+2 semitones."""
    report = ValidationReport()
    for i in range(len(score.measures) - 1):
        current, nxt = score.measures[i], score.measures[i + 1]
        for p, part in enumerate(score.parts):
            d = delta(current[p], nxt[p])
            if d not in REACHABLE_DELTAS:
                report.violations.append(
                    Violation(
                        measure_index=i,
                        part_index=p,
                        part_id=part.part_id,
                        semitones=d,
                    )
                )
    return report
