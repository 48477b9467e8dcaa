"""Choi matrices and Kraus factorizations."""
import logging
from typing import Callable, List

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..linalg_core import Tolerance, as_matrix, gram_quotient, hermitian_part, unvec
from .semigroup import CpSemigroup

logger = logging.getLogger(__name__)


class ChoiMatrix(BaseModel):
    """Block matrix [tau(|e_i><e_j|)]_{i,j}."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim_h: int
    entries: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.dim_h
        return self.entries[i * n:(i + 1) * n, j * n:(j + 1) * n]


def choi_from_map(fn: Callable[[np.ndarray], np.ndarray], dim_h: int) -> ChoiMatrix:
    """Choi matrix of an arbitrary linear map on dim_h x dim_h matrices."""
    n = dim_h
    entries = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            e_ij = np.zeros((n, n), dtype=np.complex128)
            e_ij[i, j] = 1.0
            entries[i * n:(i + 1) * n, j * n:(j + 1) * n] = as_matrix(fn(e_ij))
    return ChoiMatrix(dim_h=n, entries=hermitian_part(entries))


def choi(sg: CpSemigroup, t: float) -> ChoiMatrix:
    """Choi matrix of tau_t, read off the columns of the propagator."""
    n = sg.dim_h
    p = sg.propagator(t)
    entries = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            entries[i * n:(i + 1) * n, j * n:(j + 1) * n] = unvec(p[:, i + n * j], n)
    return ChoiMatrix(dim_h=n, entries=hermitian_part(entries))


def kraus(c: ChoiMatrix, tol: Tolerance = Tolerance()) -> List[np.ndarray]:
    """Kraus operators from the spectral factor of the Choi matrix.

    Raises:
        NotPositiveError: If the Choi matrix is not PSD
    """
    n = c.dim_h
    _, q = gram_quotient(c.entries, tol)
    # Column m of q* is sqrt(lam_m) w_m with w_m[i*n + a] = K_m[a, i].
    ops = [col.reshape(n, n).T for col in q.conj()]
    logger.debug(f"Kraus decomposition with {len(ops)} operator(s)")
    return ops


def kraus_apply(ops: List[np.ndarray], x) -> np.ndarray:
    x = as_matrix(x, "x")
    out = np.zeros_like(x)
    for k in ops:
        out = out + k @ x @ k.conj().T
    return out
