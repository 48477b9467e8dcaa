"""CP semigroups on matrix algebras in superoperator form."""
import hashlib
import logging
import threading
from typing import TYPE_CHECKING, Dict, Optional

import numpy as np

from ..errors import LinalgError, NotContractiveError
from ..linalg_core import as_matrix, matexp, superop_left_right, unvec, vec

if TYPE_CHECKING:
    from .blocks import PowersData

logger = logging.getLogger(__name__)


class CpSemigroup:
    """Semigroup tau_t = exp(t L) acting on column-stacked dim_h x dim_h matrices."""

    def __init__(self, dim_h: int, generator, name: str = "cp"):
        """Initialize the semigroup.

        Args:
            dim_h: Dimension of the underlying Hilbert space
            generator: dim_h**2 x dim_h**2 superoperator matrix
            name: Label used in logs and reports
        """
        generator = as_matrix(generator, "generator")
        if generator.shape != (dim_h * dim_h, dim_h * dim_h):
            raise LinalgError(
                f"Generator for dim_h={dim_h} must be {dim_h**2}x{dim_h**2}, got {generator.shape}"
            )
        self.dim_h = dim_h
        self.generator = generator
        self.name = name
        self.powers: Optional["PowersData"] = None
        self._propagators: Dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def digest(self) -> str:
        """Stable content hash of the generator."""
        h = hashlib.sha256()
        h.update(str(self.dim_h).encode())
        h.update(np.ascontiguousarray(self.generator).tobytes())
        return h.hexdigest()[:16]

    def propagator(self, t: float) -> np.ndarray:
        """Superoperator matrix of tau_t (memoized)."""
        t = float(t)
        if t < 0:
            raise ValueError(f"Semigroup time must be nonnegative, got {t}")
        cached = self._propagators.get(t)
        if cached is not None:
            return cached
        p = matexp(t * self.generator)
        logger.debug(f"{self.name}: propagator at t={t:g}")
        with self._lock:
            self._propagators.setdefault(t, p)
        return self._propagators[t]

    def __repr__(self) -> str:
        return f"CpSemigroup(name={self.name!r}, dim_h={self.dim_h})"


def apply(sg: CpSemigroup, t: float, x) -> np.ndarray:
    """Evaluate tau_t(x)."""
    x = as_matrix(x, "x")
    if x.shape != (sg.dim_h, sg.dim_h):
        raise LinalgError(f"Argument must be {sg.dim_h}x{sg.dim_h}, got {x.shape}")
    return unvec(sg.propagator(t) @ vec(x), sg.dim_h)


def identity_semigroup(dim_h: int) -> CpSemigroup:
    return CpSemigroup(dim_h, np.zeros((dim_h**2, dim_h**2)), name=f"identity_{dim_h}")


def example_tt(alpha: float = 1.0) -> CpSemigroup:
    """T_t(X) = exp(-alpha t) [[a + t d, b], [c, d]] on 2x2 matrices.

    Generator -alpha id + K . K* with K = |e0><e1|. Contractive only for alpha >= 1.
    """
    if alpha < 1.0:
        raise NotContractiveError(f"example_Tt needs alpha >= 1 for contractivity, got {alpha}")
    k = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    generator = -alpha * np.eye(4) + superop_left_right(k, k.conj().T)
    return CpSemigroup(2, generator, name=f"Tt(alpha={alpha:g})")


def hamiltonian_generator(h) -> np.ndarray:
    """Generator of X -> exp(ith) X exp(-ith)."""
    h = as_matrix(h, "h")
    eye = np.eye(h.shape[0])
    return superop_left_right(1j * h, eye) + superop_left_right(eye, -1j * h)


