"""Covariance kernels, centering and index estimates."""
import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..dyadic import DyadicTime
from ..errors import LinalgError, NotContractiveError, NotPositiveError
from ..inclusion import GridUnit, InclusionSystem
from ..limits import CONV_TOL, MAX_DEPTH, MIN_LEVELS, CovarianceResult, covariance_with_results
from ..linalg_core import Tolerance, as_matrix, hermitian_part, spectral_norm

logger = logging.getLogger(__name__)

ACCURACY_FACTOR = 100.0


class CovKernel(BaseModel):
    """gamma[i, j] = gamma(unit_i, unit_j) over a finite unit set.

    accuracy is an estimate of the absolute error of each entry; it is zero for
    closed-form kernels.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    labels: List[str]
    gamma: np.ndarray
    accuracy: float = 0.0
    results: List[List[List[CovarianceResult]]] = Field(default_factory=list)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"Unknown unit label: {label}") from None


def _floor(kernel: CovKernel, tol: Tolerance) -> float:
    scale = float(np.max(np.abs(kernel.gamma))) if kernel.gamma.size else 0.0
    return max(tol.check_eps * max(1.0, scale), ACCURACY_FACTOR * kernel.accuracy)


def validate_kernel(kernel: CovKernel, tol: Tolerance = Tolerance()) -> CovKernel:
    """Check Hermitian symmetry and conditional positive definiteness.

    Raises:
        LinalgError: If gamma is not square or not Hermitian
        NotPositiveError: If gamma is not conditionally positive definite
    """
    g = as_matrix(kernel.gamma, "gamma")
    if g.shape != (len(kernel.labels), len(kernel.labels)):
        raise LinalgError(f"Kernel of shape {g.shape} does not match {len(kernel.labels)} labels")
    floor = _floor(kernel, tol)
    asym = spectral_norm(g - g.conj().T) if g.size else 0.0
    if asym > floor:
        raise LinalgError(f"Covariance kernel is not Hermitian (residual {asym:.3e})")
    if kernel.labels:
        spectrum = centered_spectrum(kernel, kernel.labels[0])
        if spectrum.size and spectrum[-1] < -floor:
            raise NotPositiveError(
                f"Covariance kernel is not conditionally positive definite (min eigenvalue {spectrum[-1]:.3e})",
                min_eigenvalue=float(spectrum[-1]),
            )
    return kernel


def cov_kernel(
    sys: InclusionSystem,
    units: Sequence[GridUnit],
    t_probe: Sequence[DyadicTime],
    tol: Tolerance = Tolerance(),
    max_depth: int = MAX_DEPTH,
    conv_tol: float = CONV_TOL,
    min_levels: int = MIN_LEVELS,
) -> CovKernel:
    """Pairwise covariances of a unit set, validated.

    Raises:
        CovarianceError: If a pairwise covariance cannot be computed
    """
    n = len(units)
    gamma = np.zeros((n, n), dtype=np.complex128)
    results: List[List[CovarianceResult]] = [[] for _ in range(n * n)]
    accuracy = 0.0
    for i, u in enumerate(units):
        for j, v in enumerate(units):
            value, runs = covariance_with_results(
                sys, u, v, t_probe, tol, max_depth=max_depth, conv_tol=conv_tol, min_levels=min_levels
            )
            gamma[i, j] = value
            results[i * n + j] = runs
            for run in runs:
                last = run.residual_history[-1] if run.residual_history else 0.0
                error = last * max(1.0, abs(run.value)) / (abs(run.value) * float(run.t))
                accuracy = max(accuracy, error)
    kernel = CovKernel(
        labels=[u.label for u in units],
        gamma=gamma,
        accuracy=accuracy,
        results=[results[i * n:(i + 1) * n] for i in range(n)],
    )
    validate_kernel(kernel, tol)
    kernel.gamma = hermitian_part(gamma)
    logger.info(f"{sys.name}: covariance kernel over {n} unit(s), accuracy {accuracy:.2e}")
    return kernel


def centered(kernel: CovKernel, ref: str, tol: Optional[Tolerance] = None) -> np.ndarray:
    """L[i, j] = gamma(i, j) - gamma(i, ref) - gamma(ref, j) + gamma(ref, ref).

    With tol given the result is checked to be positive semidefinite.

    Raises:
        NotPositiveError: If tol is given and L has an eigenvalue below the floor
    """
    r = kernel.index_of(ref)
    g = kernel.gamma
    lmat = g - g[:, [r]] - g[[r], :] + g[r, r]
    if tol is not None:
        _require_psd(lmat, _floor(kernel, tol))
    return lmat


def _require_psd(lmat: np.ndarray, floor: float):
    if lmat.size == 0:
        return
    lowest = float(np.linalg.eigvalsh(hermitian_part(lmat))[0])
    if lowest < -floor:
        raise NotPositiveError(f"Centered kernel is not positive semidefinite (min eigenvalue {lowest:.3e})", lowest)


def centered_spectrum(kernel: CovKernel, ref: str) -> np.ndarray:
    """Eigenvalues of the centered kernel in descending order."""
    lmat = centered(kernel, ref)
    if lmat.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(hermitian_part(lmat))[::-1]


def gauge_centered(kernel: CovKernel, gauge, tol: Tolerance = Tolerance()) -> np.ndarray:
    """L[i, j] = gamma(i, j) - conj(a_i) - a_j for a gauge a over the labels.

    Raises:
        NotPositiveError: If the gauge does not make L positive semidefinite
    """
    a = np.asarray(gauge, dtype=np.complex128).reshape(-1)
    if a.size != len(kernel.labels):
        raise LinalgError(f"Gauge has {a.size} entries for {len(kernel.labels)} labels")
    lmat = kernel.gamma - a.conj()[:, None] - a[None, :]
    _require_psd(lmat, _floor(kernel, tol))
    return lmat


def canonical_gauge(kernel: CovKernel, ref: str) -> np.ndarray:
    """a(x) = gamma(ref, x) - gamma(ref, ref) / 2."""
    r = kernel.index_of(ref)
    return kernel.gamma[r, :] - kernel.gamma[r, r] / 2


def rank_above_floor(lmat: np.ndarray, kernel: CovKernel, tol: Tolerance = Tolerance()) -> int:
    if lmat.size == 0:
        return 0
    spectrum = np.linalg.eigvalsh(hermitian_part(lmat))
    threshold = max(tol.rank_eps * max(1.0, float(np.max(np.abs(spectrum)))), _floor(kernel, tol))
    return int(np.count_nonzero(spectrum > threshold))


def index_estimate(kernel: CovKernel, tol: Tolerance = Tolerance(), ref: Optional[str] = None) -> int:
    """Rank of the centered kernel; a lower bound for the index.

    Eigenvalues count when they exceed both rank_eps relative to the spectrum
    and the kernel's own accuracy floor.
    """
    if not kernel.labels:
        return 0
    lmat = centered(kernel, ref or kernel.labels[0], tol)
    return rank_above_floor(lmat, kernel, tol)


def defect_p(gamma_u0: complex, gamma_v0: complex, tol: Tolerance = Tolerance()) -> float:
    """p = -(gamma(u0, u0) + gamma(v0, v0)), the extra index dimension when p > 0.

    Raises:
        ValueError: If p has a non-negligible imaginary part
        NotContractiveError: If p is significantly negative
    """
    p = -(complex(gamma_u0) + complex(gamma_v0))
    if abs(p.imag) > tol.check_eps * max(1.0, abs(p)):
        raise ValueError(f"Self-covariances must be real, got p = {p}")
    if p.real < -tol.check_eps:
        raise NotContractiveError(f"p = {p.real:.6g} < 0: ||u0_t|| ||v0_t|| exceeds 1")
    return max(p.real, 0.0)


def predicted_amalgam_index(ind_e: int, ind_f: int, p: float, tol: Tolerance = Tolerance()) -> int:
    """index(E) + index(F), plus one when the amalgamating units are not normalized."""
    if p < -tol.check_eps:
        raise ValueError(f"p must be nonnegative, got {p}")
    return ind_e + ind_f + (0 if p <= tol.check_eps else 1)
