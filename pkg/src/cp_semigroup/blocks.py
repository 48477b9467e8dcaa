"""Block CP semigroups on B(H (+) K) and the Powers-problem corner."""
import logging
import math
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import CpValidationError, IntertwiningError, LinalgError, NotContractiveError
from ..linalg_core import (
    Tolerance,
    as_matrix,
    hermitian_part,
    matexp,
    psd_floor,
    spectral_norm,
    superop_left_right,
    unvec,
    vec,
)
from .choi import choi
from .semigroup import CpSemigroup, apply, hamiltonian_generator

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 1.0
DEFAULT_DEPTH = 4


def sample_times(horizon: float, depth: int) -> List[float]:
    return [horizon * math.ldexp(1.0, -k) for k in range(depth + 1)]


class CpValidation(BaseModel):
    """Outcome of sampled CP, Hermiticity and contractivity checks."""

    passed: bool
    times: List[float]
    min_choi_eigenvalue: float
    worst_t: float
    max_hermiticity_residual: float
    max_contractivity_excess: float


def validate_cp(
    sg: CpSemigroup,
    horizon: float = DEFAULT_HORIZON,
    depth: int = DEFAULT_DEPTH,
    tol: Tolerance = Tolerance(),
) -> CpValidation:
    """Check CP, Hermiticity preservation and tau_t(I) <= I at t = horizon * 2**-k."""
    n = sg.dim_h
    times = sample_times(horizon, depth)
    min_eig, worst_t = math.inf, times[0]
    herm, excess = 0.0, -math.inf
    cp_ok = True
    for t in times:
        c = choi(sg, t).entries
        lam = np.linalg.eigvalsh(c)
        if lam[0] < min_eig:
            min_eig, worst_t = float(lam[0]), t
        if lam[0] < psd_floor(lam, tol):
            cp_ok = False
        # tau(X)* = tau(X*) on matrix units.
        p = sg.propagator(t)
        for i in range(n):
            for j in range(n):
                image = unvec(p[:, i + n * j], n)
                mirror = unvec(p[:, j + n * i], n)
                herm = max(herm, float(np.max(np.abs(image.conj().T - mirror))))
        top = float(np.max(np.linalg.eigvalsh(hermitian_part(apply(sg, t, np.eye(n))))))
        excess = max(excess, top - 1.0)
    passed = cp_ok and herm <= tol.check_eps and excess <= tol.residual_eps
    if not passed:
        logger.warning(
            f"{sg.name}: CP validation failed (min Choi eigenvalue {min_eig:.3e} at t={worst_t:g}, "
            f"contractivity excess {excess:.3e})"
        )
    return CpValidation(
        passed=passed,
        times=times,
        min_choi_eigenvalue=min_eig,
        worst_t=worst_t,
        max_hermiticity_residual=herm,
        max_contractivity_excess=excess,
    )


def _dim_of(generator: np.ndarray, name: str) -> int:
    n = int(round(math.sqrt(generator.shape[0])))
    if generator.shape != (n * n, n * n):
        raise LinalgError(f"{name} must be a square superoperator on n x n matrices, got {generator.shape}")
    return n


def block_cp_semigroup(
    l_phi,
    l_psi,
    l_eta,
    horizon: float = DEFAULT_HORIZON,
    depth: int = DEFAULT_DEPTH,
    tol: Tolerance = Tolerance(),
    name: str = "block",
) -> CpSemigroup:
    """Assemble [[phi(X), eta(Y)], [eta(Z*)*, psi(W)]] on B(H (+) K).

    Args:
        l_phi: Generator on B(H)
        l_psi: Generator on B(K)
        l_eta: Generator on the corner B(K, H), acting on column-stacked dim_h x dim_k blocks
        horizon: Largest sampled time for validation
        depth: Number of halvings sampled
        tol: Tolerance settings
        name: Label used in logs

    Returns:
        Validated CpSemigroup on dim_h + dim_k

    Raises:
        CpValidationError: If a sampled tau_t is not CP or not contractive
    """
    l_phi = as_matrix(l_phi, "l_phi")
    l_psi = as_matrix(l_psi, "l_psi")
    l_eta = as_matrix(l_eta, "l_eta")
    m = _dim_of(l_phi, "l_phi")
    k = _dim_of(l_psi, "l_psi")
    if l_eta.shape != (m * k, m * k):
        raise LinalgError(f"l_eta must be {m * k}x{m * k}, got {l_eta.shape}")
    n = m + k

    def action(x: np.ndarray) -> np.ndarray:
        x11, x12 = x[:m, :m], x[:m, m:]
        x21, x22 = x[m:, :m], x[m:, m:]
        y11 = unvec(l_phi @ vec(x11), m)
        y12 = unvec(l_eta @ vec(x12), m, k)
        y21 = unvec(l_eta @ vec(x21.conj().T), m, k).conj().T
        y22 = unvec(l_psi @ vec(x22), k)
        return np.block([[y11, y12], [y21, y22]])

    generator = np.zeros((n * n, n * n), dtype=np.complex128)
    for j in range(n):
        for i in range(n):
            e_ij = np.zeros((n, n), dtype=np.complex128)
            e_ij[i, j] = 1.0
            generator[:, i + n * j] = vec(action(e_ij))

    sg = CpSemigroup(n, generator, name=name)
    report = validate_cp(sg, horizon, depth, tol)
    if not report.passed:
        raise CpValidationError(
            f"{name}: not completely positive/contractive at t={report.worst_t:g} "
            f"(min Choi eigenvalue {report.min_choi_eigenvalue:.3e})",
            t=report.worst_t,
            min_eigenvalue=report.min_choi_eigenvalue,
        )
    return sg


class PowersData(BaseModel):
    """phi_t = Ad(exp(it h_phi)), U_t = exp(t a); psi_t = Ad(exp(it h_psi)), V_t = exp(t b)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    h_phi: np.ndarray
    a: np.ndarray
    h_psi: np.ndarray
    b: np.ndarray

    @property
    def dim_h(self) -> int:
        return self.h_phi.shape[0]

    @property
    def dim_k(self) -> int:
        return self.h_psi.shape[0]

    def phi(self) -> CpSemigroup:
        return CpSemigroup(self.dim_h, hamiltonian_generator(self.h_phi), name="phi")

    def psi(self) -> CpSemigroup:
        return CpSemigroup(self.dim_k, hamiltonian_generator(self.h_psi), name="psi")

    def u(self, t: float) -> np.ndarray:
        return matexp(float(t) * self.a)

    def v(self, t: float) -> np.ndarray:
        return matexp(float(t) * self.b)

    def corner_generator(self) -> np.ndarray:
        """Y -> a Y + Y b*."""
        return superop_left_right(self.a, np.eye(self.dim_k)) + superop_left_right(
            np.eye(self.dim_h), self.b.conj().T
        )


def _check_intertwiner(sg: CpSemigroup, gen: np.ndarray, label: str, times: List[float], tol: Tolerance):
    n = sg.dim_h
    for t in times:
        u_t = matexp(t * gen)
        if spectral_norm(u_t) > 1.0 + tol.residual_eps:
            raise NotContractiveError(f"exp(t {label}) is not contractive at t={t:g} (norm {spectral_norm(u_t):.6g})")
        worst = 0.0
        for i in range(n):
            for j in range(n):
                e_ij = np.zeros((n, n), dtype=np.complex128)
                e_ij[i, j] = 1.0
                worst = max(worst, spectral_norm(apply(sg, t, e_ij) @ u_t - u_t @ e_ij))
        if worst > tol.check_eps:
            raise IntertwiningError(f"{sg.name}_t(X) {label}_t != {label}_t X at t={t:g} (residual {worst:.3e})")


def powers_corner(
    h_phi,
    a,
    h_psi,
    b,
    horizon: float = DEFAULT_HORIZON,
    depth: int = DEFAULT_DEPTH,
    tol: Tolerance = Tolerance(),
) -> CpSemigroup:
    """Powers-problem semigroup with corner Y -> U_t Y V_t*.

    Raises:
        NotContractiveError: If exp(t a) or exp(t b) is not contractive at a sampled t
        IntertwiningError: If phi_t(X) U_t != U_t X (or the psi/V analogue)
        CpValidationError: If the assembled block semigroup is not CP
    """
    h_phi = as_matrix(h_phi, "h_phi")
    a = as_matrix(a, "a")
    h_psi = as_matrix(h_psi, "h_psi")
    b = as_matrix(b, "b")
    if a.shape != h_phi.shape or b.shape != h_psi.shape:
        raise LinalgError("Powers data: a must match h_phi and b must match h_psi")
    data = PowersData(h_phi=h_phi, a=a, h_psi=h_psi, b=b)
    times = sample_times(horizon, depth)
    _check_intertwiner(data.phi(), a, "U", times, tol)
    _check_intertwiner(data.psi(), b, "V", times, tol)
    sg = block_cp_semigroup(
        hamiltonian_generator(h_phi),
        hamiltonian_generator(h_psi),
        data.corner_generator(),
        horizon=horizon,
        depth=depth,
        tol=tol,
        name="powers",
    )
    sg.powers = data
    logger.info(f"Built Powers semigroup on C^{data.dim_h} (+) C^{data.dim_k}")
    return sg
