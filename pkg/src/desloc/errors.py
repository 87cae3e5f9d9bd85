"""Exception hierarchy shared by every module."""


class DESError(Exception):
    """Base class for all errors raised by desloc."""


class ControllabilityConflict(DESError):
    """An event is controllable in one generator and uncontrollable in another."""


class NondeterminismError(DESError):
    """A (state, event) pair would get two successors."""


class InputError(DESError):
    """Malformed generator text, bad state ids, unknown events."""


class SelfloopCollision(DESError):
    pass


class ContainmentError(DESError):
    """A supervisor transition has no counterpart in the plant."""


class ConfigurationError(DESError):
    """Agent alphabets do not partition the plant alphabet."""


class ConstructionError(DESError):
    """An internal consistency check failed; indicates a bug, never user error."""


class BudgetExceeded(DESError):
    """Bounded enumeration would exceed its string budget."""
