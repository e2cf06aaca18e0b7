"""VISCA frame codec for the pan/tilt subset the conductor needs.

Only camera 1 is addressed (header byte 0x81). Supported commands:
absolute position, pan-tilt drive stop, home, and the position inquiry
with its reply. Positions travel as 4-nibble two's-complement words at
14.4 units per degree, the common VISCA scaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ViscaDecodeError, ViscaRangeError

UNITS_PER_DEGREE = 14.4
PAN_SPEED_MAX = 0x18
TILT_SPEED_MAX = 0x14

HEADER = 0x81
TERMINATOR = 0xFF
MAX_FRAME_LEN = 16


@dataclass(frozen=True)
class AbsolutePosition:
    pan_units: int  # signed, two's-complement on the wire
    tilt_units: int
    pan_speed: int  # 0x01-0x18
    tilt_speed: int  # 0x01-0x14

    @property
    def pan_degrees(self) -> float:
        return self.pan_units / UNITS_PER_DEGREE

    @property
    def tilt_degrees(self) -> float:
        return self.tilt_units / UNITS_PER_DEGREE


@dataclass(frozen=True)
class Stop:
    pan_speed: int = PAN_SPEED_MAX
    tilt_speed: int = TILT_SPEED_MAX


@dataclass(frozen=True)
class Home:
    pass


@dataclass(frozen=True)
class PositionInquiry:
    pass


Command = Union[AbsolutePosition, Stop, Home, PositionInquiry]


def _speed_byte(speed: float, max_byte: int) -> int:
    if not 0.0 < speed <= 1.0:
        raise ViscaRangeError(f"speed {speed} outside (0, 1]")
    return max(1, round(speed * max_byte))


def _to_units(degrees: float) -> int:
    return round(degrees * UNITS_PER_DEGREE)


def _word_nibbles(value: int) -> bytes:
    """16-bit two's-complement word expanded to four 0x0N bytes."""
    word = value & 0xFFFF
    return bytes(((word >> shift) & 0x0F) for shift in (12, 8, 4, 0))


def _nibbles_word(chunk: bytes) -> int:
    if any(b & 0xF0 for b in chunk):
        raise ViscaDecodeError(f"position nibbles have high bits set: {chunk.hex()}")
    word = (chunk[0] << 12) | (chunk[1] << 8) | (chunk[2] << 4) | chunk[3]
    return word - 0x10000 if word & 0x8000 else word


def _check_speed_byte(b: int, max_byte: int, which: str) -> int:
    if not 0x01 <= b <= max_byte:
        raise ViscaRangeError(f"{which} speed byte {b:#04x} outside 0x01-{max_byte:#04x}")
    return b


def encode_absolute_position(pan_deg: float, tilt_deg: float, speed: float) -> bytes:
    """81 01 06 02 VV WW 0Y 0Y 0Y 0Y 0Z 0Z 0Z 0Z FF."""
    pan_units = _to_units(pan_deg)
    tilt_units = _to_units(tilt_deg)
    if not -0x8000 <= pan_units <= 0x7FFF or not -0x8000 <= tilt_units <= 0x7FFF:
        raise ViscaRangeError(f"position ({pan_deg}, {tilt_deg}) overflows the wire word")
    return bytes(
        [
            HEADER,
            0x01,
            0x06,
            0x02,
            _speed_byte(speed, PAN_SPEED_MAX),
            _speed_byte(speed, TILT_SPEED_MAX),
            *_word_nibbles(pan_units),
            *_word_nibbles(tilt_units),
            TERMINATOR,
        ]
    )


def encode_stop(pan_speed: int = PAN_SPEED_MAX, tilt_speed: int = TILT_SPEED_MAX) -> bytes:
    """Pan-tilt drive with both direction nibbles 0x03 (stop)."""
    return bytes(
        [
            HEADER,
            0x01,
            0x06,
            0x01,
            _check_speed_byte(pan_speed, PAN_SPEED_MAX, "pan"),
            _check_speed_byte(tilt_speed, TILT_SPEED_MAX, "tilt"),
            0x03,
            0x03,
            TERMINATOR,
        ]
    )


def encode_home() -> bytes:
    return bytes([HEADER, 0x01, 0x06, 0x04, TERMINATOR])


def encode_position_inquiry() -> bytes:
    return bytes([HEADER, 0x09, 0x06, 0x12, TERMINATOR])


def encode(command: Command) -> bytes:
    if isinstance(command, AbsolutePosition):
        return bytes(
            [
                HEADER,
                0x01,
                0x06,
                0x02,
                _check_speed_byte(command.pan_speed, PAN_SPEED_MAX, "pan"),
                _check_speed_byte(command.tilt_speed, TILT_SPEED_MAX, "tilt"),
                *_word_nibbles(command.pan_units),
                *_word_nibbles(command.tilt_units),
                TERMINATOR,
            ]
        )
    if isinstance(command, Stop):
        return encode_stop(command.pan_speed, command.tilt_speed)
    if isinstance(command, Home):
        return encode_home()
    if isinstance(command, PositionInquiry):
        return encode_position_inquiry()
    raise TypeError(f"not a VISCA command: {command!r}")


def decode(frame: bytes) -> Command:
    if len(frame) < 3 or len(frame) > MAX_FRAME_LEN:
        raise ViscaDecodeError(f"frame length {len(frame)} outside 3-{MAX_FRAME_LEN}")
    if frame[0] != HEADER:
        raise ViscaDecodeError(f"expected header {HEADER:#04x}, got {frame[0]:#04x}")
    if frame[-1] != TERMINATOR:
        raise ViscaDecodeError("frame not terminated with 0xFF")
    body = frame[1:-1]
    if body[:3] == bytes([0x01, 0x06, 0x02]) and len(body) == 13:
        return AbsolutePosition(
            pan_units=_nibbles_word(body[5:9]),
            tilt_units=_nibbles_word(body[9:13]),
            pan_speed=_check_speed_byte(body[3], PAN_SPEED_MAX, "pan"),
            tilt_speed=_check_speed_byte(body[4], TILT_SPEED_MAX, "tilt"),
        )
    if body[:3] == bytes([0x01, 0x06, 0x01]) and len(body) == 7:
        if body[5:7] != bytes([0x03, 0x03]):
            raise ViscaDecodeError("only the stop drive direction (03 03) is supported")
        return Stop(
            pan_speed=_check_speed_byte(body[3], PAN_SPEED_MAX, "pan"),
            tilt_speed=_check_speed_byte(body[4], TILT_SPEED_MAX, "tilt"),
        )
    if body == bytes([0x01, 0x06, 0x04]):
        return Home()
    if body == bytes([0x09, 0x06, 0x12]):
        return PositionInquiry()
    raise ViscaDecodeError(f"unrecognized frame {frame.hex(' ')}")


# --- position inquiry reply (camera -> controller, header 0x90 0x50) ------

def encode_position_reply(pan_deg: float, tilt_deg: float) -> bytes:
    pan_units = _to_units(pan_deg)
    tilt_units = _to_units(tilt_deg)
    return bytes([0x90, 0x50, *_word_nibbles(pan_units), *_word_nibbles(tilt_units), TERMINATOR])


def decode_position_reply(frame: bytes) -> tuple[float, float]:
    """Returns (pan_deg, tilt_deg)."""
    if len(frame) != 11 or frame[0] != 0x90 or frame[1] != 0x50 or frame[-1] != TERMINATOR:
        raise ViscaDecodeError(f"not a position inquiry reply: {frame.hex(' ')}")
    pan_units = _nibbles_word(frame[2:6])
    tilt_units = _nibbles_word(frame[6:10])
    return pan_units / UNITS_PER_DEGREE, tilt_units / UNITS_PER_DEGREE
