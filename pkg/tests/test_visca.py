import random

import pytest
from hypothesis import given, strategies as st

from camconductor import visca
from camconductor.errors import ViscaDecodeError, ViscaRangeError


class TestEncodeAbsolutePosition:
    def test_home_full_speed(self):
        # Hand-derived from the Sony absolute-position command layout:
        # 81 01 06 02 VV WW 0Y 0Y 0Y 0Y 0Z 0Z 0Z 0Z FF.
        frame = visca.encode_absolute_position(0.0, 0.0, 1.0)
        assert frame == bytes.fromhex("81 01 06 02 18 14 00 00 00 00 00 00 00 00 ff".replace(" ", ""))

    def test_negative_pan_twos_complement(self):
        # round(30 * 14.4) = 432; 0x10000 - 432 = 0xFE50 -> nibbles 0F 0E 05 00.
        frame = visca.encode_absolute_position(-30.0, 0.0, 1.0)
        assert frame[6:10] == bytes([0x0F, 0x0E, 0x05, 0x00])
        assert frame == bytes.fromhex("8101060218140f0e050000000000ff")

    def test_speed_zero_rejected(self):
        with pytest.raises(ViscaRangeError):
            visca.encode_absolute_position(0.0, 0.0, 0.0)

    def test_speed_scaling_minimum_one(self):
        frame = visca.encode_absolute_position(0.0, 0.0, 0.001)
        assert frame[4] == 0x01
        assert frame[5] == 0x01

    def test_frame_invariants(self):
        frame = visca.encode_absolute_position(100.0, -20.0, 0.5)
        assert frame[0] == 0x81
        assert frame[-1] == 0xFF
        assert len(frame) <= 16


class TestEncodeStop:
    def test_default_speeds(self):
        assert visca.encode_stop() == bytes.fromhex("8101060118140303ff")

    def test_idempotent(self):
        assert visca.encode_stop() == visca.encode_stop()

    def test_roundtrip(self):
        assert visca.decode(visca.encode_stop()) == visca.Stop()


class TestDecode:
    def test_rejects_bad_header(self):
        with pytest.raises(ViscaDecodeError):
            visca.decode(bytes([0x82, 0x01, 0xFF]))

    def test_rejects_unterminated(self):
        with pytest.raises(ViscaDecodeError):
            visca.decode(bytes([0x81, 0x01, 0x06]))

    def test_home_and_inquiry(self):
        assert visca.decode(visca.encode_home()) == visca.Home()
        assert visca.decode(visca.encode_position_inquiry()) == visca.PositionInquiry()

    def test_absolute_roundtrip(self):
        cmd = visca.AbsolutePosition(pan_units=-432, tilt_units=100, pan_speed=9, tilt_speed=4)
        assert visca.decode(visca.encode(cmd)) == cmd


def random_command(rng: random.Random) -> visca.Command:
    kind = rng.randrange(4)
    if kind == 0:
        return visca.AbsolutePosition(
            pan_units=rng.randint(-0x8000, 0x7FFF),
            tilt_units=rng.randint(-0x8000, 0x7FFF),
            pan_speed=rng.randint(1, visca.PAN_SPEED_MAX),
            tilt_speed=rng.randint(1, visca.TILT_SPEED_MAX),
        )
    if kind == 1:
        return visca.Stop(
            pan_speed=rng.randint(1, visca.PAN_SPEED_MAX),
            tilt_speed=rng.randint(1, visca.TILT_SPEED_MAX),
        )
    if kind == 2:
        return visca.Home()
    return visca.PositionInquiry()


def test_codec_roundtrip_fuzz():
    rng = random.Random(2024)
    for _ in range(1000):
        cmd = random_command(rng)
        frame = visca.encode(cmd)
        assert frame[0] == 0x81 and frame[-1] == 0xFF and len(frame) <= 16
        assert visca.decode(frame) == cmd


@given(st.floats(-170, 170), st.floats(-30, 90))
def test_position_reply_roundtrip(pan, tilt):
    got_pan, got_tilt = visca.decode_position_reply(visca.encode_position_reply(pan, tilt))
    # Quantization error bounded by half a wire unit.
    assert abs(got_pan - pan) <= 0.5 / visca.UNITS_PER_DEGREE + 1e-9
    assert abs(got_tilt - tilt) <= 0.5 / visca.UNITS_PER_DEGREE + 1e-9
