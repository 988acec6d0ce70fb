"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or argument shapes."""


class PreconditionError(ValueError):
    """An input violated a documented precondition (e.g. non-Hermitian H)."""


class NumericalIntegrityError(RuntimeError):
    """A state left its physical manifold beyond tolerance during a run."""
