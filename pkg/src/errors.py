"""Exception hierarchy shared by every subpackage."""
from typing import Optional


class ProdsysError(Exception):
    """Base class for all prodsys errors."""


class LinalgError(ProdsysError, ValueError):
    """Malformed matrix input (shape, finiteness, size)."""


class NotPositiveError(LinalgError):
    """A Gram or Choi matrix is not positive semidefinite beyond tolerance."""

    def __init__(self, message: str, min_eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotContractiveError(ProdsysError, ValueError):
    """An operator required to be a contraction has norm above 1."""


class IsometryError(ProdsysError):
    """A linking map or embedding failed its isometry check."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class CpValidationError(ProdsysError):
    """A semigroup failed sampled complete positivity or contractivity."""

    def __init__(self, message: str, t: Optional[float] = None, min_eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.t = t
        self.min_eigenvalue = min_eigenvalue


class IntertwiningError(ProdsysError):
    """Powers data violates phi_t(X) U_t = U_t X."""


class ZeroUnitError(ProdsysError):
    """A unit family vanished identically."""


class UnitRootError(ProdsysError):
    """Newton square root of a unit seed failed or was ambiguous."""


class CovarianceError(ProdsysError):
    """Covariance could not be extracted from lifted inner products."""


class ConfigError(ProdsysError):
    """Experiment configuration could not be parsed or resolved."""
