"""Wall and virtual clocks.

Everything time-dependent (driver polling, simulation, agent patience)
takes a clock so tests and simulations run faster than real time.
"""

from __future__ import annotations

import time


class Clock:
    """Wall clock; milliseconds since construction."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now_ms(self) -> float:
        return (time.monotonic() - self._t0) * 1000.0

    def sleep_ms(self, ms: float) -> None:
        if ms > 0:
            time.sleep(ms / 1000.0)


class VirtualClock(Clock):
    """Time advances only when someone sleeps; sleeping is instantaneous."""

    def __init__(self, start_ms: float = 0.0):
        self._now = start_ms

    def now_ms(self) -> float:
        return self._now

    def sleep_ms(self, ms: float) -> None:
        if ms < 0:
            raise ValueError("cannot sleep backwards")
        self._now += ms

    def advance_to(self, t_ms: float) -> None:
        if t_ms < self._now:
            raise ValueError(f"cannot go back in time: {t_ms} < {self._now}")
        self._now = t_ms
