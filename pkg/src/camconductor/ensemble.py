"""Simulated musicians: hold a pitch, decode gestures, lose patience.

Agents receive gestures symbolically (the codebook symbol, not video of
the camera); ``error_rate`` stands in for misreading a cue. Each agent
owns a seeded RNG so whole sessions replay bit-for-bit.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import UnknownPart
from .gestures import NOD_SHAPE, Gesture
from .harmony import Adjustment, apply_instruction

_NOD_ADJUSTMENT = {
    "nod_up_half": Adjustment.UP_HALF,
    "nod_up_whole": Adjustment.UP_WHOLE,
    "nod_down_half": Adjustment.DOWN_HALF,
    "nod_down_whole": Adjustment.DOWN_WHOLE,
}


@dataclass(frozen=True)
class AgentConfig:
    part_id: str
    patience_ms: tuple[float, float] = (2000.0, 8000.0)
    error_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.patience_ms
        if lo > hi or lo < 0:
            raise ValueError(f"bad patience range {self.patience_ms}")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"error_rate {self.error_rate} outside [0, 1]")


def agent_configs_from_file(path) -> list[AgentConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return [
        AgentConfig(
            part_id=a["part_id"],
            patience_ms=tuple(a.get("patience_ms", (2000.0, 8000.0))),
            error_rate=a.get("error_rate", 0.0),
            seed=a.get("seed", 0),
        )
        for a in doc["agents"]
    ]


@dataclass
class PartState:
    midi: int | None = None
    pending: Adjustment | None = None
    sounding: bool = False


class Ensemble:
    """Holds per-part pitch state and decodes the gesture stream."""

    def __init__(self, configs: list[AgentConfig]):
        self.configs = {c.part_id: c for c in configs}
        self.state = {c.part_id: PartState() for c in configs}
        self._rng = {c.part_id: random.Random(c.seed) for c in configs}

    def initialize_pitch(self, part_id: str, midi: int) -> None:
        if part_id not in self.state:
            raise UnknownPart(part_id)
        ps = self.state[part_id]
        ps.midi = midi
        ps.sounding = True
        ps.pending = None

    def pitches(self) -> dict[str, int | None]:
        return {pid: ps.midi for pid, ps in self.state.items()}

    def observe_gesture(self, gesture: Gesture) -> None:
        if gesture.type == "eye_contact":
            if gesture.part_id in self.state:
                # Tentatively "stay put"; a following nod overwrites this.
                self.state[gesture.part_id].pending = Adjustment.NO_CHANGE
        elif gesture.type in NOD_SHAPE:
            if gesture.part_id not in self.state:
                return
            intended = _NOD_ADJUSTMENT[gesture.type]
            config = self.configs[gesture.part_id]
            rng = self._rng[gesture.part_id]
            decoded = intended
            if config.error_rate > 0 and rng.random() < config.error_rate:
                others = [a for a in Adjustment if a is not intended]
                decoded = rng.choice(others)
            self.state[gesture.part_id].pending = decoded
        elif gesture.type == "downbeat":
            for ps in self.state.values():
                if ps.pending is not None and ps.midi is not None:
                    ps.midi = apply_instruction(ps.midi, ps.pending)
                ps.pending = None
        elif gesture.type == "end_of_piece":
            for ps in self.state.values():
                ps.sounding = False

    def draw_patience(self, part_id: str) -> float:
        lo, hi = self.configs[part_id].patience_ms
        return self._rng[part_id].uniform(lo, hi)


def schedule_request(ensemble: Ensemble, now_ms: float) -> tuple[str, float]:
    """Pick which agent raises a hand next and when.

    Every agent draws a patience duration; the least patient wins (ties
    go to the earlier part). Deterministic under fixed seeds.
    """
    winner = None
    winner_t = None
    for part_id in ensemble.configs:
        t = now_ms + ensemble.draw_patience(part_id)
        if winner_t is None or t < winner_t:
            winner, winner_t = part_id, t
    if winner is None:
        raise ValueError("no agents configured")
    return winner, winner_t
