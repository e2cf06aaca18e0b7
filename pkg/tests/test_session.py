import json
import random
import threading

import pytest

from camconductor.ensemble import AgentConfig
from camconductor.errors import CorruptLog, DivergenceDetected, StorageError
from camconductor.session import (
    FileRecorder,
    Recorder,
    load_log,
    make_header,
    replay,
    simulate_session,
)
from conftest import random_valid_score


def trio_agents(seed=1):
    return [
        AgentConfig("vln", patience_ms=(3000, 9000), seed=seed),
        AgentConfig("vla", patience_ms=(1000, 2000), seed=seed + 1),
        AgentConfig("vc", patience_ms=(3000, 9000), seed=seed + 2),
    ]


class TestRecorder:
    def test_first_event_is_seq_one(self, trio_score):
        recorder = Recorder(make_header(trio_score))
        event = recorder.record(0.0, {"kind": "pitch_state", "pitches": {}})
        assert event.seq == 1

    def test_concurrent_posters_get_distinct_consecutive_seqs(self, trio_score):
        recorder = Recorder(make_header(trio_score))

        def post():
            for _ in range(200):
                recorder.record(0.0, {"kind": "pitch_state", "pitches": {}})

        threads = [threading.Thread(target=post) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        seqs = [e.seq for e in recorder.events]
        assert seqs == list(range(1, 801))

    def test_write_after_close_raises(self, trio_score):
        recorder = Recorder(make_header(trio_score))
        recorder.close()
        with pytest.raises(StorageError):
            recorder.record(0.0, {"kind": "pitch_state", "pitches": {}})

    def test_file_recorder_writes_header_first(self, trio_score, tmp_path):
        path = tmp_path / "session.jsonl"
        recorder = FileRecorder(path, make_header(trio_score))
        recorder.record(1.0, {"kind": "pitch_state", "pitches": {}})
        recorder.close()
        lines = path.read_text().splitlines()
        assert json.loads(lines[0])["format"] == "camconductor-session/1"
        assert json.loads(lines[1])["seq"] == 1


def record_trio_session(trio_score, tmp_path, name="golden.jsonl"):
    path = tmp_path / name
    recorder = FileRecorder(path, make_header(trio_score))
    result = simulate_session(trio_score, trio_agents(), recorder=recorder)
    return path, result


class TestLoadLog:
    def test_roundtrip(self, trio_score, tmp_path):
        path, result = record_trio_session(trio_score, tmp_path)
        log = load_log(path)
        assert log.score == trio_score
        assert [e.seq for e in log.events] == [e.seq for e in result.events]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(CorruptLog):
            load_log(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"format": "something-else"}\n')
        with pytest.raises(CorruptLog):
            load_log(path)

    def test_non_monotone_seq(self, trio_score, tmp_path):
        path, _ = record_trio_session(trio_score, tmp_path)
        lines = path.read_text().splitlines()
        lines.append(lines[1])  # replays an old seq at the end
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptLog):
            load_log(path)

    def test_truncation_at_any_line_boundary_still_loads(self, trio_score, tmp_path):
        path, _ = record_trio_session(trio_score, tmp_path)
        lines = path.read_text().splitlines()
        for cut in range(1, len(lines) + 1):
            truncated = tmp_path / "cut.jsonl"
            truncated.write_text("\n".join(lines[:cut]) + "\n")
            log = load_log(truncated)
            assert len(log.events) == cut - 1


class TestReplay:
    def test_zero_divergence_on_simulated_session(self, trio_score, tmp_path):
        path, _ = record_trio_session(trio_score, tmp_path)
        trajectory = replay(load_log(path))
        assert trajectory[-1][1] == {"phase": "end_of_piece"}

    def test_deleted_motion_done_detected(self, trio_score, tmp_path):
        path, _ = record_trio_session(trio_score, tmp_path)
        lines = path.read_text().splitlines()
        idx = next(
            i for i, line in enumerate(lines)
            if "motion_done" in line
        )
        deleted_seq = json.loads(lines[idx])["seq"]
        del lines[idx]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DivergenceDetected) as exc_info:
            replay(load_log(path))
        # Detected at or just after the deleted line.
        assert exc_info.value.seq >= deleted_seq

    def test_any_single_motion_done_deletion_detected(self, trio_score, tmp_path):
        # Detection is promised at the next logged transition, so the
        # final absorbed motion (no transition after it) is out of scope.
        path, _ = record_trio_session(trio_score, tmp_path)
        lines = path.read_text().splitlines()
        motion_lines = [
            i for i, line in enumerate(lines)
            if "motion_done" in line
            and any("state_changed" in later for later in lines[i + 1:])
        ]
        for idx in motion_lines:
            mutated = list(lines)
            del mutated[idx]
            target = tmp_path / "mutated.jsonl"
            target.write_text("\n".join(mutated) + "\n")
            with pytest.raises(DivergenceDetected):
                replay(load_log(target))


class TestSimulateSession:
    def test_trio_session_reaches_end(self, trio_score):
        result = simulate_session(trio_score, trio_agents())
        assert result.summary.measures_traversed == 2
        assert result.summary.end_state.phase == "end_of_piece"
        assert result.sustain_trace == [
            (0, {"vln": 60, "vla": 64, "vc": 55}),
            (1, {"vln": 60, "vla": 65, "vc": 57}),
        ]

    def test_deterministic_under_seeds(self, trio_score):
        a = simulate_session(trio_score, trio_agents(seed=9))
        b = simulate_session(trio_score, trio_agents(seed=9))
        assert [e.payload for e in a.events] == [e.payload for e in b.events]
        assert a.summary.duration_ms == b.summary.duration_ms

    def test_closed_loop_pitch_safety_random_scores(self):
        rng = random.Random(3)
        for _ in range(10):
            score = random_valid_score(rng)
            configs = [
                AgentConfig(p.part_id, patience_ms=(1000, 4000), seed=rng.randrange(10**6))
                for p in score.parts
            ]
            result = simulate_session(score, configs)
            assert result.summary.end_state.phase == "end_of_piece"
            for measure_idx, pitches in result.sustain_trace:
                expected = {
                    p.part_id: score.measures[measure_idx][i]
                    for i, p in enumerate(score.parts)
                }
                assert pitches == expected
