"""Exception types raised across the package."""


class LifRbfError(Exception):
    """Base class for package errors."""


class InvalidInputError(LifRbfError, ValueError):
    """Arguments violate a documented precondition."""


class UnsupportedOperationError(LifRbfError, NotImplementedError):
    """The operation is not defined for this kind of object."""


class InfeasibleError(LifRbfError):
    """Constraint system cannot be satisfied by the model."""


class NotFittedError(LifRbfError, RuntimeError):
    """A model was used before its weights were fitted."""


class ConfigError(LifRbfError):
    """Experiment configuration is malformed or inconsistent."""
