"""Exception types raised by the ipl package."""


class IplError(Exception):
    """Base class for all package errors."""


class DomainError(IplError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class MomentDivergenceError(IplError, ArithmeticError):
    """The requested moment does not exist (order >= alpha)."""


class DegenerateSampleError(IplError, ValueError):
    """The sample cannot identify the model parameters."""


class ConfigError(IplError, ValueError):
    """Invalid simulation study configuration."""
