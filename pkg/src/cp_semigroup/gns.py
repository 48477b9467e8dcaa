"""GNS fibers of a CP semigroup and their linking isometries."""
import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..dyadic import DyadicTime
from ..errors import IsometryError, LinalgError
from ..linalg_core import Tolerance, as_matrix, as_vector, gram_quotient, isometry_residual, kron, pinv_factor
from .choi import choi
from .semigroup import CpSemigroup

logger = logging.getLogger(__name__)


class GnsFiber(BaseModel):
    """Quotient of H* (x) H by the null space of the form <h1, tau_t(|g1><g2|) h2>."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: DyadicTime
    dim: int
    dim_h: int
    q: np.ndarray

    def vector(self, g: int, h: int) -> np.ndarray:
        """Class of e_g (x) e_h."""
        return self.q[:, g * self.dim_h + h]

    def gram(self) -> np.ndarray:
        return self.q.conj().T @ self.q


def gns_gram(sg: CpSemigroup, t: DyadicTime) -> np.ndarray:
    """G_t[(g,h),(g',h')] = tau_t(|g><g'|)[h,h'] with pair index g*n + h."""
    # In this index order the form coincides with the Choi matrix.
    return choi(sg, float(t)).entries


def gns_fiber(sg: CpSemigroup, t: DyadicTime, tol: Tolerance = Tolerance()) -> GnsFiber:
    """Spectral quotient of the Gram form at time t.

    Raises:
        NotPositiveError: If the Gram form is not PSD (non-CP input)
    """
    r, q = gram_quotient(gns_gram(sg, t), tol)
    logger.debug(f"{sg.name}: GNS fiber at t={t} has dim {r}")
    return GnsFiber(t=t, dim=r, dim_h=sg.dim_h, q=q)


def gns_vector(fiber: GnsFiber, w, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Fiber vector x with <q e_(g,h), x> = w[g*n + h]."""
    w = as_vector(w, "w")
    if w.size != fiber.q.shape[1]:
        raise LinalgError(f"Functional has {w.size} entries, expected {fiber.q.shape[1]}")
    x = pinv_factor(fiber.q).conj().T @ w
    residual = float(np.linalg.norm(fiber.q.conj().T @ x - w))
    if residual > tol.check_eps * max(1.0, float(np.linalg.norm(w))):
        raise LinalgError(f"Functional is not supported on the fiber at t={fiber.t} (residual {residual:.3e})")
    return x


def _split_map(n: int, basis: Optional[np.ndarray], tol: Tolerance = Tolerance()) -> np.ndarray:
    # g (x) h -> sum_k (g (x) f_k) (x) (f_k (x) h), as an n**4 x n**2 matrix.
    # The H* slot is conjugate linear, so f_k enters there conjugated.
    eye = np.eye(n)
    if basis is None:
        w = eye
    else:
        w = as_matrix(basis, "basis")
        if w.shape != (n, n):
            raise LinalgError(f"Basis must be {n}x{n}, got {w.shape}")
        if isometry_residual(w) > tol.check_eps:
            raise LinalgError("Basis columns are not orthonormal")
    raw = np.zeros((n, n, n, n, n, n), dtype=np.complex128)
    for k in range(n):
        f_k = w[:, k]
        raw += np.einsum("gG,m,M,hH->gmMhGH", eye, f_k, f_k.conj(), eye)
    return raw.reshape(n**4, n**2)


def gns_beta(
    sg: CpSemigroup,
    s: DyadicTime,
    t: DyadicTime,
    tol: Tolerance = Tolerance(),
    basis: Optional[np.ndarray] = None,
    fibers: Optional[Tuple[GnsFiber, GnsFiber, GnsFiber]] = None,
) -> np.ndarray:
    """Matrix of beta_{s,t}: fiber(s+t) -> fiber(s) (x) fiber(t).

    Args:
        sg: CP semigroup
        s: First time
        t: Second time
        tol: Tolerance settings
        basis: Optional unitary whose columns form the orthonormal basis summed over
        fibers: Precomputed fibers at (s, t, s+t)

    Returns:
        Isometry of shape (dim_s * dim_t, dim_{s+t})

    Raises:
        IsometryError: If beta* beta deviates from I beyond tolerance
    """
    if fibers is None:
        fibers = (gns_fiber(sg, s, tol), gns_fiber(sg, t, tol), gns_fiber(sg, s + t, tol))
    f_s, f_t, f_st = fibers
    m = kron(f_s.q, f_t.q) @ _split_map(sg.dim_h, basis, tol)
    beta = m @ pinv_factor(f_st.q)
    residual = isometry_residual(beta)
    if residual > tol.check_eps:
        raise IsometryError(
            f"{sg.name}: beta_({s},{t}) is not isometric (residual {residual:.3e}); check rank_eps",
            residual,
        )
    return beta
