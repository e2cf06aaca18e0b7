"""Command line entry points.

Exit codes: 0 success, 2 validation failure, 3 runtime fault.
"""

from __future__ import annotations

import json
import sys

import click

from . import visca
from .clock import Clock
from .driver import DriverConfig, PtzDriver, SimulatedCameraTransport, UdpTransport
from .ensemble import agent_configs_from_file
from .errors import CamConductorError, DivergenceDetected
from .gestures import (
    DEFAULT_CODEBOOK,
    DEFAULT_KINEMATICS,
    CodebookConfig,
    Gesture,
    compile_gesture,
)
from .harmony import preferences_to_dict, update_preferences
from .score import Bearing, parse_score, validate_score
from .session import FileRecorder, load_log, make_header, replay, simulate_session

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAULT = 3


def _load_score(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_score(fh.read())


def _load_codebook(path) -> CodebookConfig:
    return CodebookConfig.from_file(path) if path else DEFAULT_CODEBOOK


@click.group()
def main():
    """Machine conductor for the guided-harmony game."""


@main.command()
@click.argument("score_path", type=click.Path(exists=True))
def validate(score_path):
    """Check a score's measure-to-measure reachability."""
    try:
        score = _load_score(score_path)
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    report = validate_score(score)
    if report.valid:
        click.echo(f"ok: {len(score.parts)} parts, {len(score.measures)} measures")
        sys.exit(EXIT_OK)
    for v in report.violations:
        click.echo(
            f"measure {v.measure_index}->{v.measure_index + 1}, part {v.part_id}: "
            f"{v.semitones:+d} semitones is unreachable"
        )
    sys.exit(EXIT_INVALID)


@main.command()
@click.argument("score_path", type=click.Path(exists=True))
@click.option("--agents", "agents_path", type=click.Path(exists=True), help="Agent config JSON.")
@click.option("--seed", type=int, default=None, help="Override every agent's seed.")
@click.option("--log", "log_path", type=click.Path(), help="Write the session log here.")
@click.option("--codebook", "codebook_path", type=click.Path(exists=True))
def simulate(score_path, agents_path, seed, log_path, codebook_path):
    """Run a full session against simulated musicians on a virtual clock."""
    try:
        score = _load_score(score_path)
        report = validate_score(score)
        if not report.valid:
            click.echo(f"score invalid ({len(report.violations)} bad transitions)", err=True)
            sys.exit(EXIT_INVALID)
        configs = agent_configs_from_file(agents_path) if agents_path else None
        if configs is not None and seed is not None:
            from dataclasses import replace

            configs = [replace(c, seed=seed + i) for i, c in enumerate(configs)]
        recorder = FileRecorder(log_path, make_header(score)) if log_path else None
        result = simulate_session(
            score, configs, codebook=_load_codebook(codebook_path), recorder=recorder
        )
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAULT)
    click.echo(json.dumps(result.to_dict(), indent=2))
    sys.exit(EXIT_OK)


@main.command()
@click.argument("score_path", type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8000", help="host:port to listen on.")
@click.option("--agents", "agents_path", type=click.Path(exists=True), help="Simulated seats.")
@click.option("--speed", type=float, default=1.0, help="Time scale; 10 = 10x faster.")
@click.option("--log", "log_path", type=click.Path(), help="Write the session log here.")
@click.option("--codebook", "codebook_path", type=click.Path(exists=True))
def serve(score_path, bind, agents_path, speed, log_path, codebook_path):
    """Serve a live session (WebSocket JSON protocol) for UIs and detectors."""
    import uvicorn

    from .server import create_app

    try:
        score = _load_score(score_path)
        report = validate_score(score)
        if not report.valid:
            click.echo(f"score invalid ({len(report.violations)} bad transitions)", err=True)
            sys.exit(EXIT_INVALID)
        configs = agent_configs_from_file(agents_path) if agents_path else None
        app = create_app(
            score,
            agent_configs=configs,
            codebook=_load_codebook(codebook_path),
            speed=speed,
            log_path=log_path,
        )
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAULT)
    host, _, port = bind.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


@main.command()
@click.option("--gesture", "gesture_name", required=True,
              type=click.Choice(["eye_contact", "nod_up_half", "nod_up_whole",
                                 "nod_down_half", "nod_down_whole", "downbeat",
                                 "end_of_piece"]))
@click.option("--part", default=None, help="Target part for directed gestures.")
@click.option("--score", "score_path", type=click.Path(exists=True),
              help="Score providing seat bearings (required for directed gestures).")
@click.option("--host", default=None, help="Camera IP; omit for the simulated camera.")
@click.option("--port", type=int, default=52381)
@click.option("--ip-header/--no-ip-header", default=False,
              help="Wrap frames in the Sony-over-IP payload header.")
@click.option("--codebook", "codebook_path", type=click.Path(exists=True))
def drive(gesture_name, part, score_path, host, port, ip_header, codebook_path):
    """Execute one gesture on a camera (real over UDP, or simulated)."""
    try:
        seats = {}
        if score_path:
            seats = _load_score(score_path).seat_map()
        if part is not None and part not in seats:
            seats.setdefault(part, Bearing(0.0, 0.0))
        gesture = Gesture(gesture_name, part_id=part, gesture_id="manual")
        plan = compile_gesture(gesture, seats, Bearing(0.0, 0.0), _load_codebook(codebook_path))
        clock = Clock()
        if host:
            transport = UdpTransport(host, port, ip_header=ip_header)
        else:
            transport = SimulatedCameraTransport(clock, DEFAULT_KINEMATICS)
        driver = PtzDriver(transport, clock, DriverConfig())
        poses = []
        driver.execute(plan, on_pose=lambda p: poses.append(p))
        click.echo(json.dumps({"gesture": gesture.to_dict(), "pose_samples": len(poses),
                               "final": poses[-1].to_dict() if poses else None}))
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAULT)
    sys.exit(EXIT_OK)


@main.command(name="replay")
@click.argument("log_path", type=click.Path(exists=True))
def replay_cmd(log_path):
    """Re-drive a session log through the conductor; fail on divergence."""
    try:
        log = load_log(log_path)
        trajectory = replay(log)
    except DivergenceDetected as exc:
        click.echo(f"divergence: {exc}", err=True)
        sys.exit(EXIT_FAULT)
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    click.echo(f"ok: {len(trajectory)} state changes replayed with zero divergences")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("log_paths", type=click.Path(exists=True), nargs=-1, required=True)
def prefs(log_paths):
    """Chord preference report: mean sustain time per chord class."""
    merged = {}
    try:
        for path in log_paths:
            log = load_log(path)
            for key, record in update_preferences(log.events, log.score.measures).items():
                merged.setdefault(key, record.__class__(chord=key)).samples_ms.extend(
                    record.samples_ms
                )
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    click.echo(json.dumps(preferences_to_dict(merged), indent=2))
    sys.exit(EXIT_OK)


# VISCA helpers occasionally handy when pointing at new hardware.
@main.command()
@click.option("--pan", type=float, required=True)
@click.option("--tilt", type=float, required=True)
@click.option("--speed", type=float, default=1.0)
def frame(pan, tilt, speed):
    """Print the absolute-position frame for a pan/tilt target."""
    try:
        data = visca.encode_absolute_position(pan, tilt, speed)
    except CamConductorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    click.echo(data.hex(" "))


if __name__ == "__main__":
    main()
