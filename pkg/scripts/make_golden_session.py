#!/usr/bin/env python3
"""Regenerate tests/data/golden_session.jsonl.

The golden log is a fully deterministic simulated run of the two-measure
trio score (fixed agent seeds, virtual clock); replaying it must always
reproduce the exact state trajectory.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))

from camconductor.ensemble import AgentConfig
from camconductor.score import parse_score
from camconductor.session import FileRecorder, make_header, simulate_session
from conftest import TRIO_DOC

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "golden_session.jsonl"


def main():
    score = parse_score(json.dumps(TRIO_DOC))
    agents = [
        AgentConfig("vln", patience_ms=(3000, 9000), seed=1),
        AgentConfig("vla", patience_ms=(1000, 2000), seed=2),
        AgentConfig("vc", patience_ms=(3000, 9000), seed=3),
    ]
    header = make_header(score, {"purpose": "golden replay fixture"})
    header["started_at"] = "2026-01-01T00:00:00+00:00"  # frozen for reproducibility
    OUT.parent.mkdir(parents=True, exist_ok=True)
    recorder = FileRecorder(OUT, header)
    result = simulate_session(score, agents, recorder=recorder)
    print(f"wrote {OUT} ({len(result.events)} events, "
          f"end={result.summary.end_state.phase})")


if __name__ == "__main__":
    main()
