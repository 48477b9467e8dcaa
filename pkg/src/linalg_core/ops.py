"""Dense complex linear algebra primitives."""
import logging
from typing import Tuple

import numpy as np
import scipy.linalg

from ..errors import LinalgError, NotPositiveError
from .tolerance import Tolerance

logger = logging.getLogger(__name__)

# Largest matrix side kron is allowed to produce.
MAX_DIM = 1 << 14


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise LinalgError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LinalgError(f"{name} has non-finite entries")
    return arr


def as_vector(x, name: str = "vector") -> np.ndarray:
    arr = np.asarray(x, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise LinalgError(f"{name} has non-finite entries")
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product; index (i, k) of the result means (row of a, row of b)."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise LinalgError(f"Tensor product of {a.shape} and {b.shape} exceeds {MAX_DIM}")
    return np.kron(a, b)


def matexp(a) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a Pade core)."""
    a = as_matrix(a, "generator")
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"matexp needs a square matrix, got shape {a.shape}")
    return scipy.linalg.expm(a)


def numerical_rank(a, tol: Tolerance = Tolerance()) -> int:
    """Number of singular values above rank_eps times the largest one."""
    a = as_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_eps * s[0]))


def hermitian_part(g) -> np.ndarray:
    g = as_matrix(g)
    return (g + g.conj().T) / 2


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    # Largest-modulus entry of each column made real positive.
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return vectors / phases


def psd_floor(eigenvalues: np.ndarray, tol: Tolerance) -> float:
    """Most negative eigenvalue still accepted as round-off."""
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return -tol.residual_eps * max(1.0, scale)


def gram_quotient(g, tol: Tolerance = Tolerance()) -> Tuple[int, np.ndarray]:
    """Spectral factor q (r x n) with q* q = g on the retained spectrum.

    The Gram matrix is symmetrized first. Eigenvalues above rank_eps times the
    largest are kept in descending order; eigenvectors are phase-normalized so
    the coordinates are reproducible.

    Args:
        g: Hermitian positive semidefinite n x n matrix
        tol: Tolerance settings

    Returns:
        Tuple (r, q) with r the numerical rank and q = diag(sqrt(lam)) U*

    Raises:
        NotPositiveError: If g has an eigenvalue below the PSD floor
    """
    g = hermitian_part(g)
    n = g.shape[0]
    if g.shape[1] != n:
        raise LinalgError(f"Gram matrix must be square, got shape {g.shape}")
    if n == 0:
        return 0, np.zeros((0, 0), dtype=np.complex128)
    lam, vecs = np.linalg.eigh(g)
    lam = lam[::-1]
    vecs = vecs[:, ::-1]
    if lam[-1] < psd_floor(lam, tol):
        raise NotPositiveError(
            f"Gram matrix is not positive semidefinite (min eigenvalue {lam[-1]:.3e})",
            min_eigenvalue=float(lam[-1]),
        )
    if lam[0] <= 0.0:
        return 0, np.zeros((0, n), dtype=np.complex128)
    keep = lam > tol.rank_eps * lam[0]
    lam = lam[keep]
    vecs = _fix_phase(vecs[:, keep])
    q = np.sqrt(lam)[:, None] * vecs.conj().T
    return int(lam.size), q


def pinv_factor(q: np.ndarray) -> np.ndarray:
    """Pseudoinverse of a spectral factor (rows are orthogonal)."""
    q = as_matrix(q)
    if q.shape[0] == 0:
        return np.zeros((q.shape[1], 0), dtype=np.complex128)
    norms = np.sum(np.abs(q) ** 2, axis=1)
    return q.conj().T / norms


def spectral_norm(a) -> float:
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def contraction_check(d, tol: Tolerance = Tolerance()) -> bool:
    """True iff the largest singular value is at most 1 + residual_eps."""
    return spectral_norm(d) <= 1.0 + tol.residual_eps


def isometry_residual(v) -> float:
    """Operator norm of v* v - I."""
    v = as_matrix(v)
    return spectral_norm(v.conj().T @ v - np.eye(v.shape[1]))


def is_isometry(v, tol: Tolerance = Tolerance()) -> bool:
    return isometry_residual(v) <= tol.check_eps


def vec(x) -> np.ndarray:
    """Column-stacking vectorization."""
    return as_matrix(x).reshape(-1, order="F")


def unvec(v, rows: int, cols: int = None) -> np.ndarray:
    cols = rows if cols is None else cols
    v = np.asarray(v, dtype=np.complex128)
    if v.size != rows * cols:
        raise LinalgError(f"Cannot unstack {v.size} entries into {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def superop_left_right(a, b) -> np.ndarray:
    """Matrix of X -> a X b acting on column-stacked X."""
    return kron(as_matrix(b).T, as_matrix(a))
