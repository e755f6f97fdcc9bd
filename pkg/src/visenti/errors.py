"""Exception types shared across the toolkit."""


class VisentiError(Exception):
    """Base class for all toolkit errors."""


class ParseError(VisentiError):
    """A file could not be parsed. Carries the path and 1-based line number."""

    def __init__(self, path, line, message):
        location = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{location}: {message}")
        self.path = str(path)
        self.line = line
        self.message = message


class DataError(VisentiError):
    """Well-formed input with invalid content (bad label, bad score range)."""


class ConfigError(VisentiError):
    """Invalid or incomplete configuration."""


class ShapeError(VisentiError):
    """Tensor dimensions inconsistent with the model or operation."""


class NoSeedsError(VisentiError):
    """Threshold extraction produced neither positive nor negative seeds."""


class UnscorableError(VisentiError):
    """Candidate word cannot be scored (no embedding available)."""


class DistanceError(VisentiError):
    """Distance undefined for the given vectors (zero vector under cosine)."""
