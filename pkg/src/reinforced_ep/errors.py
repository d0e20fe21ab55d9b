"""Exception hierarchy shared by all modules."""


class ReinforcedEPError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ReinforcedEPError, ValueError):
    """An argument lies outside its admissible range."""


class StateError(ReinforcedEPError, RuntimeError):
    """An operation is not allowed in the current state of a run."""


class ConsistencyError(ReinforcedEPError, ValueError):
    """Inputs are individually valid but mutually inconsistent."""


class RegimeError(ParameterError):
    """The operation does not apply to the regime selected by ``p``."""
