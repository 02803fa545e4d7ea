"""Exception types shared across the package."""


class LowResError(Exception):
    """Base class for all package errors."""


class ConfigError(LowResError, ValueError):
    """Invalid modulation/quantizer/fading/engine configuration."""


class DegenerateInput(LowResError, ValueError):
    """A zero sample or channel, whose phase is undefined."""


class DomainError(LowResError, ValueError):
    """Argument outside the domain of a density or formula."""


class QuadratureError(LowResError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class InsufficientData(LowResError, ValueError):
    """Too few usable points for a fit."""
