"""Exception types shared across the package.

Callers that want a single catch-all can use :class:`EvimaxError`; the CLI
maps :class:`ConfigError` to exit code 2 and everything else to exit code 1.
"""


class EvimaxError(Exception):
    """Base class for all package-specific errors."""


class FrameError(EvimaxError):
    """A subset or mass function does not belong to the expected frame."""


class InvalidFocalError(EvimaxError):
    """Focal element unusable for a simple mass function."""


class TotalConflictError(EvimaxError):
    """Dempster combination with conflict K = 1 (empty renormalizer)."""


class EmptyMessageError(EvimaxError):
    """Message polarity requested for a message with no tokens."""


class NoMessagesError(EvimaxError):
    """User opinion requested over an empty message list."""


class NoIndicatorsError(EvimaxError):
    """Edge BBA fusion over an empty indicator list."""


class ParseError(EvimaxError):
    """A data file could not be parsed; carries file path and line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class ReferentialError(EvimaxError):
    """An edge or record references a node that does not exist."""


class UnknownNodeError(EvimaxError, KeyError):
    """A node id is not present in the graph."""


class ConfigError(EvimaxError):
    """Invalid configuration for a simulation, generator, or CLI run."""


class GenerationError(EvimaxError):
    """Synthetic network generation cannot satisfy its parameters."""


class UndefinedMetricError(EvimaxError):
    """A metric is undefined for the given inputs (e.g. empty truth set)."""


class EmptySeedSetError(EvimaxError):
    """A report was requested for an empty seed set."""
