"""Raised-hand cue detection over ingested COCO pose keypoints.

Keypoints come from any external pose estimator (one JSON line per
frame); this module only decides, per seat, whether a hand is up and
debounces that into at most one request signal per raise.

The threshold is wrist-above-nose rather than wrist-above-shoulder:
playing postures routinely put wrists at shoulder height, and the cue
must stand apart from natural playing motion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import OutOfOrderFrame
from .fsm import RequestSignal

# COCO body keypoint indices used here.
KP_NOSE = 0
KP_LEFT_SHOULDER = 5
KP_RIGHT_SHOULDER = 6
KP_LEFT_WRIST = 9
KP_RIGHT_WRIST = 10
NUM_KEYPOINTS = 17


@dataclass(frozen=True)
class PersonPose:
    """17 (x, y, confidence) triples in COCO order; y grows downward."""

    keypoints: tuple[tuple[float, float, float], ...]
    bbox_center_x: float

    def __post_init__(self):
        if len(self.keypoints) != NUM_KEYPOINTS:
            raise ValueError(f"expected {NUM_KEYPOINTS} keypoints, got {len(self.keypoints)}")


@dataclass(frozen=True)
class KeypointFrame:
    timestamp_ms: float
    persons: tuple[PersonPose, ...]

    @classmethod
    def from_json_line(cls, line: str) -> "KeypointFrame":
        doc = json.loads(line)
        persons = tuple(
            PersonPose(
                keypoints=tuple((kp[0], kp[1], kp[2]) for kp in p["kp"]),
                bbox_center_x=p["bbox_cx"],
            )
            for p in doc["persons"]
        )
        return cls(timestamp_ms=doc["t"], persons=persons)


@dataclass(frozen=True)
class SeatBand:
    part_id: str
    x_min: float
    x_max: float

    @property
    def center(self) -> float:
        return (self.x_min + self.x_max) / 2.0

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max


class SeatMap:
    """Non-overlapping horizontal bands mapping image x to parts."""

    def __init__(self, bands: list[SeatBand]):
        ordered = sorted(bands, key=lambda b: b.x_min)
        for band in ordered:
            if not (0.0 <= band.x_min < band.x_max <= 1.0):
                raise ValueError(f"band {band.part_id!r} outside [0, 1] or empty")
        for a, b in zip(ordered, ordered[1:]):
            if b.x_min < a.x_max:
                raise ValueError(f"bands {a.part_id!r} and {b.part_id!r} overlap")
        self.bands = ordered

    @classmethod
    def evenly_spaced(cls, part_ids: list[str]) -> "SeatMap":
        n = len(part_ids)
        return cls(
            [SeatBand(pid, i / n, (i + 1) / n) for i, pid in enumerate(part_ids)]
        )

    def part_ids(self) -> list[str]:
        return [b.part_id for b in self.bands]


@dataclass(frozen=True)
class DetectorConfig:
    confidence_threshold: float = 0.5
    debounce_frames: int = 5
    release_frames: int = 10
    # Nose-to-shoulder distance scaled to a rough body height.
    height_proxy_factor: float = 6.0
    # Wrist must clear the nose by this fraction of body height.
    clearance_fraction: float = 0.05


@dataclass
class _PartState:
    consecutive_raised: int = 0
    consecutive_lowered: int = 0
    latched: bool = False


@dataclass
class DetectorState:
    parts: dict[str, _PartState] = field(default_factory=dict)
    last_timestamp_ms: float = float("-inf")

    def part(self, part_id: str) -> _PartState:
        return self.parts.setdefault(part_id, _PartState())


def assign_parts(frame: KeypointFrame, seats: SeatMap) -> dict[str, PersonPose]:
    """Map each person to the seat band under them.

    Persons outside every band are dropped; if two land in one band the
    one nearer the band center wins.
    """
    assigned: dict[str, PersonPose] = {}
    for person in frame.persons:
        for band in seats.bands:
            if band.contains(person.bbox_center_x):
                incumbent = assigned.get(band.part_id)
                if incumbent is None or (
                    abs(person.bbox_center_x - band.center)
                    < abs(incumbent.bbox_center_x - band.center)
                ):
                    assigned[band.part_id] = person
                break
    return assigned


def is_hand_raised(pose: PersonPose, config: DetectorConfig = DetectorConfig()) -> bool:
    nose = pose.keypoints[KP_NOSE]
    if nose[2] < config.confidence_threshold:
        return False
    shoulder_y = (pose.keypoints[KP_LEFT_SHOULDER][1] + pose.keypoints[KP_RIGHT_SHOULDER][1]) / 2.0
    person_height = abs(nose[1] - shoulder_y) * config.height_proxy_factor
    threshold_y = nose[1] - config.clearance_fraction * person_height
    for wrist_idx in (KP_LEFT_WRIST, KP_RIGHT_WRIST):
        wrist = pose.keypoints[wrist_idx]
        if wrist[2] >= config.confidence_threshold and wrist[1] < threshold_y:
            return True
    return False


def step_detector(
    state: DetectorState,
    frame: KeypointFrame,
    seats: SeatMap,
    config: DetectorConfig = DetectorConfig(),
) -> list[RequestSignal]:
    """Advance debounce/latch counters for one frame.

    Mutates ``state``; returns the request signals emitted by this frame
    (at most one per part).
    """
    if frame.timestamp_ms < state.last_timestamp_ms:
        raise OutOfOrderFrame(
            f"frame at {frame.timestamp_ms} after {state.last_timestamp_ms}"
        )
    state.last_timestamp_ms = frame.timestamp_ms

    assigned = assign_parts(frame, seats)
    signals: list[RequestSignal] = []
    for part_id in seats.part_ids():
        ps = state.part(part_id)
        pose = assigned.get(part_id)
        raised = pose is not None and is_hand_raised(pose, config)
        if raised:
            ps.consecutive_raised += 1
            ps.consecutive_lowered = 0
            if not ps.latched and ps.consecutive_raised >= config.debounce_frames:
                ps.latched = True
                signals.append(RequestSignal(part_id=part_id, timestamp_ms=frame.timestamp_ms))
        else:
            ps.consecutive_raised = 0
            if ps.latched:
                ps.consecutive_lowered += 1
                if ps.consecutive_lowered >= config.release_frames:
                    ps.latched = False
                    ps.consecutive_lowered = 0
    return signals
