"""Exception types shared across the package."""


class WristlabError(Exception):
    """Base class for errors raised by wristlab."""


class SensorRangeError(WristlabError):
    """ADC count outside the converter range (disconnected or misread pot)."""


class MonotonicityError(WristlabError):
    """Routine timestamps must strictly increase."""


class NotPlayableError(WristlabError):
    """Routine has fewer than two samples; nothing to interpolate."""


class NonUniformGridError(WristlabError):
    """Analysis needs a uniform time grid; resample the routine first."""


class RoutineFormatError(WristlabError):
    """Malformed routine file. Carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


class LibraryError(WristlabError):
    """Routine library refused an operation (bad name, collision, missing file)."""
