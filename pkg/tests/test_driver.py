import pytest

from camconductor import visca
from camconductor.clock import VirtualClock
from camconductor.driver import (
    CameraPose,
    DriverConfig,
    PtzDriver,
    SimulatedCameraTransport,
)
from camconductor.errors import MotionTimeout, TransportError
from camconductor.gestures import (
    DEFAULT_CODEBOOK,
    DEFAULT_KINEMATICS,
    Gesture,
    MotionPlan,
    MotionSegment,
    compile_gesture,
)
from camconductor.score import Bearing


def make_driver(clock=None):
    clock = clock or VirtualClock()
    transport = SimulatedCameraTransport(clock, DEFAULT_KINEMATICS)
    return PtzDriver(transport, clock, DriverConfig()), transport, clock


class TestSimulatedCamera:
    def test_kinematic_bound(self):
        # |pose(t+dt) - pose(t)| <= rate * speed * dt, sampled along a move.
        clock = VirtualClock()
        cam = SimulatedCameraTransport(clock, DEFAULT_KINEMATICS)
        cam.send(visca.encode_absolute_position(90.0, 40.0, 0.5))
        prev = cam.pose()
        for _ in range(100):
            clock.sleep_ms(20)
            pose = cam.pose()
            assert abs(pose.pan - prev.pan) <= DEFAULT_KINEMATICS.pan_deg_per_s * 0.5 * 0.020 + 1e-6
            assert abs(pose.tilt - prev.tilt) <= DEFAULT_KINEMATICS.tilt_deg_per_s * 0.5 * 0.020 + 1e-6
            prev = pose
        assert prev.pan == pytest.approx(90.0)
        assert prev.tilt == pytest.approx(40.0)

    def test_stop_freezes_pose(self):
        clock = VirtualClock()
        cam = SimulatedCameraTransport(clock, DEFAULT_KINEMATICS)
        cam.send(visca.encode_absolute_position(100.0, 0.0, 1.0))
        clock.sleep_ms(100)
        cam.send(visca.encode_stop())
        frozen = cam.pose()
        clock.sleep_ms(5000)
        assert cam.pose() == frozen

    def test_inquiry_reply(self):
        clock = VirtualClock()
        cam = SimulatedCameraTransport(clock, DEFAULT_KINEMATICS)
        cam.send(visca.encode_position_inquiry())
        pan, tilt = visca.decode_position_reply(cam.recv(100))
        assert (pan, tilt) == (0.0, 0.0)


class TestExecute:
    def test_hold_only_plan(self):
        driver, _, clock = make_driver()
        plan = MotionPlan("g1", (MotionSegment(0.0, 0.0, 1.0, 1000.0),))
        done = driver.execute(plan)
        assert done == "g1"
        # Already at target: one poll, then the hold.
        assert clock.now_ms() == pytest.approx(1000.0, abs=DriverConfig().poll_interval_ms)

    def test_downbeat_pose_trace_order(self):
        driver, _, clock = make_driver()
        plan = compile_gesture(Gesture("downbeat", gesture_id="g2"), {}, Bearing(0.0, 0.0))
        tilts = []
        driver.execute(plan, on_pose=lambda p: tilts.append(p.tilt))
        lifted = tilts.index(max(tilts))
        bowed = tilts.index(min(tilts))
        assert max(tilts) == pytest.approx(15.0, abs=1.0)
        assert min(tilts) == pytest.approx(-20.0, abs=1.0)
        assert lifted < bowed  # lift happens before bow

    def test_motion_done_exactly_once(self):
        driver, _, _ = make_driver()
        plan = compile_gesture(
            Gesture("eye_contact", "vln", gesture_id="g3"),
            {"vln": Bearing(-30.0, 0.0)},
            Bearing(0.0, 0.0),
        )
        assert [driver.execute(plan)] == ["g3"]

    def test_transport_error_surfaces(self):
        class BrokenTransport:
            def send(self, frame):
                raise TransportError("unplugged")

            def recv(self, timeout_ms):
                raise TransportError("unplugged")

        clock = VirtualClock()
        driver = PtzDriver(BrokenTransport(), clock, DriverConfig())
        plan = MotionPlan("g4", (MotionSegment(10.0, 0.0, 1.0, 0.0),))
        with pytest.raises(TransportError):
            driver.execute(plan)

    def test_timeout_when_camera_never_arrives(self):
        class StuckTransport:
            """Accepts commands but always reports the home position."""

            def send(self, frame):
                pass

            def recv(self, timeout_ms):
                return visca.encode_position_reply(0.0, 0.0)

        clock = VirtualClock()
        driver = PtzDriver(StuckTransport(), clock, DriverConfig())
        plan = MotionPlan("g5", (MotionSegment(90.0, 0.0, 1.0, 0.0),))
        with pytest.raises(MotionTimeout):
            driver.execute(plan)
