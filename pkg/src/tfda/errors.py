class TfdaError(Exception):
    """Base class for all errors raised by tfda."""


class FieldFormatError(TfdaError, ValueError):
    """A field file does not match its declared format."""


class DegenerateFieldError(TfdaError, ValueError):
    """The field violates a non-degeneracy precondition (constant, critical plateaus, ...)."""


class TracingError(TfdaError, RuntimeError):
    """A level-set trace failed to close."""


class TopologyError(TfdaError, RuntimeError):
    """The field's Reeb graph is not that of a structurally stable torus Hamiltonian."""


class InternalConsistencyError(TfdaError, AssertionError):
    """An invariant that should hold by construction was violated."""


class CotSyntaxError(TfdaError, ValueError):
    """A COT string does not parse."""

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (token {index})"
        super().__init__(message)
        self.index = index


class InsufficientDataError(TfdaError, ValueError):
    """Too few samples for the requested statistic."""
