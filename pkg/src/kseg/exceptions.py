"""Exception types shared across the package."""


class InfeasibleSegmentationError(ValueError):
    """Requested segment count cannot be satisfied on this signal."""


class PeakSelectionError(RuntimeError):
    """Window scoring could not supply enough separated change points."""

    def __init__(self, found: int, requested: int):
        self.found = found
        self.requested = requested
        super().__init__(
            f"only {found} of {requested} change points selectable "
            f"after peak suppression"
        )


class SignalFormatError(ValueError):
    """Signal file could not be parsed; carries the offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
