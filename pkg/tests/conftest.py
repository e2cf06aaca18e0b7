import json
import random

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") == "call" and "test_acceptance" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, outcome in lines:
            terminalreporter.write_line(f"  {outcome}: {name}")

from camconductor.score import Bearing, Part, Score, parse_score


TRIO_DOC = {
    "parts": [
        {"part_id": "vln", "display_name": "Violin", "seat_bearing": {"pan": -30.0, "tilt": 0.0}},
        {"part_id": "vla", "display_name": "Viola", "seat_bearing": {"pan": 0.0, "tilt": 0.0}},
        {"part_id": "vc", "display_name": "Cello", "seat_bearing": {"pan": 25.0, "tilt": 0.0}},
    ],
    # C major voiced C4/E4/G3, then F major C4/F4/A3: the viola moves up a
    # half step, the cello up a whole step, the violin stays.
    "measures": [[60, 64, 55], [60, 65, 57]],
}


@pytest.fixture
def trio_score() -> Score:
    return parse_score(json.dumps(TRIO_DOC))


@pytest.fixture
def trio_doc() -> dict:
    return json.loads(json.dumps(TRIO_DOC))


def random_valid_score(rng: random.Random, n_parts=None, n_measures=None) -> Score:
    """Random score whose every transition stays within -2..+2 semitones."""
    n_parts = n_parts or rng.randint(3, 5)
    n_measures = n_measures or rng.randint(2, 16)
    parts = tuple(
        Part(
            part_id=f"p{i}",
            display_name=f"Part {i}",
            seat_bearing=Bearing(rng.uniform(-60, 60), rng.uniform(-10, 20)),
        )
        for i in range(n_parts)
    )
    measures = [tuple(rng.randint(48, 72) for _ in range(n_parts))]
    for _ in range(n_measures - 1):
        measures.append(
            tuple(p + rng.randint(-2, 2) for p in measures[-1])
        )
    return Score(parts=parts, measures=tuple(measures))
