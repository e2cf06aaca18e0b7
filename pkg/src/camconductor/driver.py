"""PTZ camera driver: runs motion plans over a transport, reports MotionDone.

Two transports share one interface: UDP carrying raw VISCA frames (with
the Sony-over-IP payload header available behind a flag) and an
in-memory simulated camera that integrates commanded motion analytically
against a clock. The driver is the only writer on its transport; plans
execute serially.
"""

from __future__ import annotations

import socket
import struct
import threading
from dataclasses import dataclass

from . import visca
from .clock import Clock
from .errors import MotionTimeout, TransportError
from .gestures import DEFAULT_KINEMATICS, Kinematics, MotionPlan
from .score import Bearing


@dataclass(frozen=True)
class CameraPose:
    pan: float
    tilt: float
    moving: bool

    def to_dict(self) -> dict:
        return {"pan": self.pan, "tilt": self.tilt, "moving": self.moving}


@dataclass(frozen=True)
class DriverConfig:
    kinematics: Kinematics = DEFAULT_KINEMATICS
    poll_interval_ms: float = 50.0
    arrival_deg: float = 1.0
    timeout_factor: float = 2.0
    min_timeout_ms: float = 500.0


class SimulatedCameraTransport:
    """In-memory camera: same byte protocol, analytic motion model."""

    def __init__(self, clock: Clock, kinematics: Kinematics = DEFAULT_KINEMATICS,
                 start: Bearing = Bearing(0.0, 0.0)):
        self.clock = clock
        self.kinematics = kinematics
        self._from = start
        self._target = start
        self._move_start_ms = clock.now_ms()
        self._pan_rate = kinematics.pan_deg_per_s
        self._tilt_rate = kinematics.tilt_deg_per_s
        self._pending_reply: bytes | None = None

    def _pose_at(self, t_ms: float) -> tuple[Bearing, bool]:
        dt = max(0.0, t_ms - self._move_start_ms) / 1000.0
        moving = False

        def axis(frm, to, rate):
            nonlocal moving
            dist = to - frm
            travel = rate * dt
            if abs(dist) <= travel:
                return to
            moving = True
            return frm + (travel if dist > 0 else -travel)

        pan = axis(self._from.pan, self._target.pan, self._pan_rate)
        tilt = axis(self._from.tilt, self._target.tilt, self._tilt_rate)
        return Bearing(pan, tilt), moving

    def pose(self) -> CameraPose:
        bearing, moving = self._pose_at(self.clock.now_ms())
        return CameraPose(bearing.pan, bearing.tilt, moving)

    def send(self, frame: bytes) -> None:
        command = visca.decode(frame)
        now = self.clock.now_ms()
        if isinstance(command, visca.AbsolutePosition):
            here, _ = self._pose_at(now)
            self._from = here
            self._target = Bearing(command.pan_degrees, command.tilt_degrees)
            self._move_start_ms = now
            self._pan_rate = self.kinematics.pan_deg_per_s * command.pan_speed / visca.PAN_SPEED_MAX
            self._tilt_rate = (
                self.kinematics.tilt_deg_per_s * command.tilt_speed / visca.TILT_SPEED_MAX
            )
        elif isinstance(command, visca.Stop):
            here, _ = self._pose_at(now)
            self._from = here
            self._target = here
            self._move_start_ms = now
        elif isinstance(command, visca.Home):
            here, _ = self._pose_at(now)
            self._from = here
            self._target = Bearing(0.0, 0.0)
            self._move_start_ms = now
        elif isinstance(command, visca.PositionInquiry):
            here, _ = self._pose_at(now)
            self._pending_reply = visca.encode_position_reply(here.pan, here.tilt)

    def recv(self, timeout_ms: float) -> bytes:
        if self._pending_reply is None:
            raise TransportError("no reply pending; send a position inquiry first")
        reply, self._pending_reply = self._pending_reply, None
        return reply

    def close(self) -> None:
        pass


# Sony VISCA-over-IP payload header: type, length, sequence number.
_IP_HEADER = struct.Struct(">HHI")
_IP_TYPE_COMMAND = 0x0100
_IP_TYPE_INQUIRY = 0x0110


class UdpTransport:
    """Raw VISCA frames over UDP, default port 52381."""

    def __init__(self, host: str, port: int = 52381, ip_header: bool = False,
                 recv_timeout_ms: float = 1000.0):
        self.address = (host, port)
        self.ip_header = ip_header
        self._seq = 0
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.settimeout(recv_timeout_ms / 1000.0)

    def send(self, frame: bytes) -> None:
        payload = frame
        if self.ip_header:
            self._seq += 1
            kind = _IP_TYPE_INQUIRY if frame[1] == 0x09 else _IP_TYPE_COMMAND
            payload = _IP_HEADER.pack(kind, len(frame), self._seq) + frame
        try:
            self._sock.sendto(payload, self.address)
        except OSError as exc:
            raise TransportError(f"UDP send to {self.address} failed: {exc}") from exc

    def recv(self, timeout_ms: float) -> bytes:
        try:
            self._sock.settimeout(timeout_ms / 1000.0)
            data, _ = self._sock.recvfrom(64)
        except socket.timeout as exc:
            raise TransportError("no reply from camera") from exc
        except OSError as exc:
            raise TransportError(f"UDP receive failed: {exc}") from exc
        if self.ip_header and len(data) > _IP_HEADER.size:
            data = data[_IP_HEADER.size:]
        return data

    def close(self) -> None:
        self._sock.close()


class PtzDriver:
    """Owns one transport; executes motion plans serially.

    ``execute`` streams CameraPose samples to ``on_pose`` and emits
    exactly one MotionDone per plan via the returned gesture id.
    """

    def __init__(self, transport, clock: Clock, config: DriverConfig = DriverConfig()):
        self.transport = transport
        self.clock = clock
        self.config = config
        self._lock = threading.Lock()
        self._believed = Bearing(0.0, 0.0)

    def _poll_pose(self) -> Bearing:
        self.transport.send(visca.encode_position_inquiry())
        reply = self.transport.recv(self.config.poll_interval_ms * 4)
        pan, tilt = visca.decode_position_reply(reply)
        return Bearing(pan, tilt)

    def execute(self, plan: MotionPlan, on_pose=None) -> str:
        """Run the plan to completion; returns the plan's gesture id."""
        cfg = self.config
        with self._lock:
            for seg in plan.segments:
                self.transport.send(
                    visca.encode_absolute_position(seg.target_pan, seg.target_tilt, seg.speed)
                )
                pan_t = abs(seg.target_pan - self._believed.pan) / (
                    cfg.kinematics.pan_deg_per_s * seg.speed
                )
                tilt_t = abs(seg.target_tilt - self._believed.tilt) / (
                    cfg.kinematics.tilt_deg_per_s * seg.speed
                )
                expected_ms = max(pan_t, tilt_t) * 1000.0
                deadline = self.clock.now_ms() + max(
                    cfg.timeout_factor * expected_ms, cfg.min_timeout_ms
                )
                while True:
                    pose = self._poll_pose()
                    arrived = (
                        abs(pose.pan - seg.target_pan) <= cfg.arrival_deg
                        and abs(pose.tilt - seg.target_tilt) <= cfg.arrival_deg
                    )
                    if on_pose is not None:
                        on_pose(CameraPose(pose.pan, pose.tilt, not arrived))
                    if arrived:
                        break
                    if self.clock.now_ms() >= deadline:
                        raise MotionTimeout(
                            f"no arrival at ({seg.target_pan}, {seg.target_tilt}) "
                            f"within {cfg.timeout_factor}x expected duration"
                        )
                    self.clock.sleep_ms(cfg.poll_interval_ms)
                self._believed = Bearing(seg.target_pan, seg.target_tilt)
                self.clock.sleep_ms(seg.hold_ms)
        return plan.gesture_id

    def stop(self) -> None:
        self.transport.send(visca.encode_stop())
