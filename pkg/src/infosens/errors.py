"""Exception types shared across the package."""


class InfosensError(Exception):
    """Base class for all package errors."""


class NotPositiveDefinite(InfosensError):
    """A matrix required to be SPD failed its Cholesky factorization."""


class DimMismatch(InfosensError):
    """Operands have incompatible dimensions or overlapping index sets."""


class DegenerateDowndate(InfosensError):
    """Leave-one-out removal hit the numerical floor omega <= 1e-12."""


class BadGrid(InfosensError):
    """Invalid center grid request for an RBF feature map."""


class NegativeInput(InfosensError):
    """A quantity required to be nonnegative was negative."""


class ConfigError(InfosensError):
    """Invalid experiment configuration."""


class InsufficientGrid(InfosensError):
    """The N grid does not span enough range for a slope fit."""
