"""Exception types shared across the engine."""


class CamConductorError(Exception):
    """Base class for all engine errors."""


class ScoreSyntaxError(CamConductorError):
    """Score document is not valid JSON."""


class SchemaError(CamConductorError):
    """Score document parsed but violates the schema."""


class UnreachableTransition(CamConductorError):
    """A measure-to-measure pitch move falls outside the five adjustments."""

    def __init__(self, part_index: int, part_id: str, semitones: int):
        self.part_index = part_index
        self.part_id = part_id
        self.semitones = semitones
        super().__init__(
            f"part {part_id!r} (index {part_index}) would move {semitones:+d} "
            "semitones; allowed range is -2..+2"
        )


class PitchRangeError(CamConductorError):
    """A pitch operation left the 0-127 MIDI range."""


class MalformedLog(CamConductorError):
    """Session log events are out of order or structurally impossible."""


class IllegalEvent(CamConductorError):
    """Event is not legal in the current conductor state."""

    def __init__(self, state, event):
        self.state = state
        self.event = event
        super().__init__(f"event {event!r} is illegal in state {state!r}")


class UnknownPart(CamConductorError):
    """A part id does not exist in the active score/seat map."""


class BearingOutOfRange(CamConductorError):
    """A gesture cannot be realized within camera limits even after clamping."""


class ViscaRangeError(CamConductorError):
    """Angle or speed outside what the wire format can encode."""


class ViscaDecodeError(CamConductorError):
    """Byte sequence is not a recognized frame."""


class TransportError(CamConductorError):
    """Camera transport send/receive failure."""


class MotionTimeout(CamConductorError):
    """Camera did not reach its target within the allowed window."""


class OutOfOrderFrame(CamConductorError):
    """Keypoint frames arrived with a decreasing timestamp."""


class StorageError(CamConductorError):
    """Session log write failed; the session must abort loudly."""


class CorruptLog(CamConductorError):
    """Session log fails header or invariant validation."""


class DivergenceDetected(CamConductorError):
    """Replay produced a different trajectory than the log records."""

    def __init__(self, seq: int, message: str = ""):
        self.seq = seq
        super().__init__(f"divergence at seq {seq}" + (f": {message}" if message else ""))
