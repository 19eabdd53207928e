"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """A caller-supplied argument is out of range or malformed."""


class ContractViolationError(RuntimeError):
    """An internal contract failed (non-unitary matrix, nondeterministic ideal outcome, ...)."""


class DivergentEnergyError(InvalidArgumentError):
    """Energy lower bound requested at epsilon = 0, where it diverges."""


class SchemaViolationError(ValueError):
    """An input file does not conform to the documented schema."""
