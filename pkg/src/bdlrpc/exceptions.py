"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid or inconsistent parameters."""


class ConsistencyError(ValueError):
    """Input data violates a structural requirement (e.g. entry outside V_{alpha,d})."""


class ConstructionError(RuntimeError):
    """A rejection sampler ran out of its retry budget."""
