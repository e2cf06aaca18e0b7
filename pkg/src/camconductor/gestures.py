"""Gesture codebook: abstract cues compiled to timed pan/tilt motion plans.

Direction of a nod encodes up vs. down, repetition count encodes half
vs. whole step (one nod = half, two = whole): repetition stays readable
from across a room where subtle amplitude differences would not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import BearingOutOfRange, UnknownPart
from .score import PAN_MAX, PAN_MIN, TILT_MAX, TILT_MIN, Bearing

GESTURE_TYPES = (
    "eye_contact",
    "nod_up_half",
    "nod_up_whole",
    "nod_down_half",
    "nod_down_whole",
    "downbeat",
    "end_of_piece",
)

# Gesture type -> (tilt excursion sign, repetition count); nods only.
NOD_SHAPE = {
    "nod_up_half": (+1, 1),
    "nod_up_whole": (+1, 2),
    "nod_down_half": (-1, 1),
    "nod_down_whole": (-1, 2),
}


@dataclass(frozen=True)
class Gesture:
    """One codebook symbol; ``part_id`` is None for ensemble-wide cues."""

    type: str
    part_id: str | None = None
    gesture_id: str = ""

    def __post_init__(self):
        if self.type not in GESTURE_TYPES:
            raise ValueError(f"unknown gesture type {self.type!r}")
        directed = self.type not in ("downbeat", "end_of_piece")
        if directed and self.part_id is None:
            raise ValueError(f"{self.type} requires a part_id")
        if not directed and self.part_id is not None:
            raise ValueError(f"{self.type} is not part-directed")

    def with_id(self, gesture_id: str) -> "Gesture":
        return replace(self, gesture_id=gesture_id)

    def to_dict(self) -> dict:
        d = {"type": self.type, "gesture_id": self.gesture_id}
        if self.part_id is not None:
            d["part"] = self.part_id
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gesture":
        return cls(type=d["type"], part_id=d.get("part"), gesture_id=d.get("gesture_id", ""))


def eye_contact(part_id: str) -> Gesture:
    return Gesture("eye_contact", part_id)


def gesture_for_adjustment(adjustment, part_id: str) -> Gesture | None:
    """Nod gesture for an adjustment; None for no-change (eye contact only)."""
    from .harmony import Adjustment

    mapping = {
        Adjustment.UP_HALF: "nod_up_half",
        Adjustment.UP_WHOLE: "nod_up_whole",
        Adjustment.DOWN_HALF: "nod_down_half",
        Adjustment.DOWN_WHOLE: "nod_down_whole",
    }
    gtype = mapping.get(adjustment)
    if gtype is None:
        return None
    return Gesture(gtype, part_id)


DOWNBEAT = Gesture("downbeat")
END_OF_PIECE = Gesture("end_of_piece")


@dataclass(frozen=True)
class MotionSegment:
    target_pan: float
    target_tilt: float
    speed: float  # normalized (0, 1]
    hold_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "pan": self.target_pan,
            "tilt": self.target_tilt,
            "speed": self.speed,
            "hold_ms": self.hold_ms,
        }


@dataclass(frozen=True)
class MotionPlan:
    gesture_id: str
    segments: tuple[MotionSegment, ...]

    def to_dict(self) -> dict:
        return {
            "gesture_id": self.gesture_id,
            "segments": [s.to_dict() for s in self.segments],
        }


@dataclass(frozen=True)
class CodebookConfig:
    """Tunable amplitudes and speeds; defaults calibrated for a desk demo."""

    eye_contact_speed: float = 0.6
    eye_contact_hold_ms: float = 1000.0
    nod_tilt_deg: float = 12.0
    nod_speed: float = 0.9
    nod_hold_ms: float = 200.0
    downbeat_lift_deg: float = 15.0
    downbeat_bow_deg: float = -20.0
    downbeat_speed: float = 1.0
    shake_pan_deg: float = 20.0
    shake_cycles: int = 2
    shake_speed: float = 1.0
    # Smallest excursion still readable; clamping below this fails.
    min_excursion_deg: float = 1.0

    @classmethod
    def from_file(cls, path) -> "CodebookConfig":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(**doc)

    def to_dict(self) -> dict:
        from dataclasses import asdict

        return asdict(self)


DEFAULT_CODEBOOK = CodebookConfig()


@dataclass(frozen=True)
class Kinematics:
    """Max angular rates at speed 1.0, degrees per second."""

    pan_deg_per_s: float = 120.0
    tilt_deg_per_s: float = 80.0


DEFAULT_KINEMATICS = Kinematics()


def _clamp_tilt(base: float, excursion: float, min_excursion: float) -> float:
    target = base + excursion
    clamped = min(max(target, TILT_MIN), TILT_MAX)
    if abs(clamped - base) < min_excursion:
        raise BearingOutOfRange(
            f"tilt excursion from {base} collapses to {clamped - base:.1f} deg after clamping"
        )
    return clamped


def _clamp_pan(base: float, excursion: float, min_excursion: float) -> float:
    target = base + excursion
    clamped = min(max(target, PAN_MIN), PAN_MAX)
    if abs(clamped - base) < min_excursion:
        raise BearingOutOfRange(
            f"pan excursion from {base} collapses to {clamped - base:.1f} deg after clamping"
        )
    return clamped


def compile_gesture(
    gesture: Gesture,
    seats: dict[str, Bearing],
    center: Bearing = Bearing(0.0, 0.0),
    config: CodebookConfig = DEFAULT_CODEBOOK,
) -> MotionPlan:
    """Deterministic gesture -> motion plan compilation."""
    cfg = config
    if gesture.part_id is not None and gesture.part_id not in seats:
        raise UnknownPart(f"no seat bearing for part {gesture.part_id!r}")

    segments: list[MotionSegment] = []
    if gesture.type == "eye_contact":
        seat = seats[gesture.part_id]
        segments.append(
            MotionSegment(seat.pan, seat.tilt, cfg.eye_contact_speed, cfg.eye_contact_hold_ms)
        )
    elif gesture.type in NOD_SHAPE:
        sign, repetitions = NOD_SHAPE[gesture.type]
        seat = seats[gesture.part_id]
        peak = _clamp_tilt(seat.tilt, sign * cfg.nod_tilt_deg, cfg.min_excursion_deg)
        for _ in range(repetitions):
            segments.append(MotionSegment(seat.pan, peak, cfg.nod_speed, 0.0))
            segments.append(MotionSegment(seat.pan, seat.tilt, cfg.nod_speed, cfg.nod_hold_ms))
    elif gesture.type == "downbeat":
        lift = _clamp_tilt(center.tilt, cfg.downbeat_lift_deg, cfg.min_excursion_deg)
        bow = _clamp_tilt(center.tilt, cfg.downbeat_bow_deg, cfg.min_excursion_deg)
        segments = [
            MotionSegment(center.pan, center.tilt, cfg.downbeat_speed, 0.0),
            MotionSegment(center.pan, lift, cfg.downbeat_speed, 0.0),
            MotionSegment(center.pan, bow, cfg.downbeat_speed, 0.0),
            MotionSegment(center.pan, center.tilt, cfg.downbeat_speed, 0.0),
        ]
    elif gesture.type == "end_of_piece":
        left = _clamp_pan(center.pan, -cfg.shake_pan_deg, cfg.min_excursion_deg)
        right = _clamp_pan(center.pan, cfg.shake_pan_deg, cfg.min_excursion_deg)
        segments = [MotionSegment(center.pan, center.tilt, cfg.shake_speed, 0.0)]
        for _ in range(cfg.shake_cycles):
            segments.append(MotionSegment(left, center.tilt, cfg.shake_speed, 0.0))
            segments.append(MotionSegment(right, center.tilt, cfg.shake_speed, 0.0))
        segments.append(MotionSegment(center.pan, center.tilt, cfg.shake_speed, 0.0))
    else:  # pragma: no cover - GESTURE_TYPES is closed
        raise ValueError(gesture.type)

    return MotionPlan(gesture_id=gesture.gesture_id, segments=tuple(segments))


def duration_of(
    plan: MotionPlan,
    kinematics: Kinematics = DEFAULT_KINEMATICS,
    start: Bearing | None = None,
) -> float:
    """Total plan duration in milliseconds.

    Per segment the travel time is the larger of pan time and tilt time
    at rate * speed, plus the post-arrival hold. ``start`` is where the
    camera sits before the first segment; defaults to the first target
    (zero initial travel).
    """
    if kinematics.pan_deg_per_s <= 0 or kinematics.tilt_deg_per_s <= 0:
        raise ValueError("kinematic rates must be positive")
    if not plan.segments:
        return 0.0
    pos = start or Bearing(plan.segments[0].target_pan, plan.segments[0].target_tilt)
    total_ms = 0.0
    for seg in plan.segments:
        pan_t = abs(seg.target_pan - pos.pan) / (kinematics.pan_deg_per_s * seg.speed)
        tilt_t = abs(seg.target_tilt - pos.tilt) / (kinematics.tilt_deg_per_s * seg.speed)
        total_ms += max(pan_t, tilt_t) * 1000.0 + seg.hold_ms
        pos = Bearing(seg.target_pan, seg.target_tilt)
    return total_ms
