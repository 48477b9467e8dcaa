"""Amalgamation of Hilbert spaces through a contraction."""
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import IsometryError, LinalgError, NotContractiveError
from ..linalg_core import (
    Tolerance,
    as_matrix,
    contraction_check,
    gram_quotient,
    isometry_residual,
    kron,
    pinv_factor,
    spectral_norm,
)

logger = logging.getLogger(__name__)


class AmalgamatedSpace(BaseModel):
    """The space H (+)_D K in spectral quotient coordinates."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim_g: int
    embed_left: np.ndarray
    embed_right: np.ndarray
    d: np.ndarray

    @property
    def dim_h(self) -> int:
        return self.embed_left.shape[1]

    @property
    def dim_k(self) -> int:
        return self.embed_right.shape[1]

    @property
    def factor(self) -> np.ndarray:
        """Quotient map (u; v) -> [u; v]."""
        return np.hstack([self.embed_left, self.embed_right])

    def dilation(self) -> np.ndarray:
        """D~ = [[I, d], [d*, I]]."""
        return _dilation(self.d)

    def classes(self, u, v) -> np.ndarray:
        """Coordinates of the class [u; v]."""
        return self.embed_left @ np.asarray(u, dtype=np.complex128) + self.embed_right @ np.asarray(
            v, dtype=np.complex128
        )

    def components(self, g) -> tuple:
        """(u + d v, d* u + v) for any representative of the class g."""
        g = np.asarray(g, dtype=np.complex128)
        return self.embed_left.conj().T @ g, self.embed_right.conj().T @ g

    def lift(self, u, v) -> np.ndarray:
        """Class whose components are (u, v); inverse of components()."""
        target = np.concatenate([np.asarray(u, dtype=np.complex128), np.asarray(v, dtype=np.complex128)])
        return pinv_factor(self.factor).conj().T @ target


def _dilation(d: np.ndarray) -> np.ndarray:
    h, k = d.shape
    return np.block([[np.eye(h), d], [d.conj().T, np.eye(k)]])


def amalgamate(dim_h: int, dim_k: int, d, tol: Tolerance = Tolerance()) -> AmalgamatedSpace:
    """Build H (+)_D K from the Gram matrix D~.

    Args:
        dim_h: Dimension of H
        dim_k: Dimension of K
        d: Contraction K -> H, shape (dim_h, dim_k)
        tol: Tolerance settings

    Returns:
        AmalgamatedSpace with isometric embeddings of H and K

    Raises:
        LinalgError: If d has the wrong shape
        NotContractiveError: If ||d|| > 1
    """
    d = as_matrix(d, "d")
    if d.shape != (dim_h, dim_k):
        raise LinalgError(f"Contraction has shape {d.shape}, expected {(dim_h, dim_k)}")
    if not contraction_check(d, tol):
        raise NotContractiveError(f"Amalgamation needs a contraction, got norm {spectral_norm(d):.6g}")
    r, q = gram_quotient(_dilation(d), tol)
    return AmalgamatedSpace(dim_g=r, embed_left=q[:, :dim_h], embed_right=q[:, dim_h:], d=d)


def recover_contraction(embed_left, embed_right, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Return d = L* R for two isometries into the same space."""
    embed_left = as_matrix(embed_left, "embed_left")
    embed_right = as_matrix(embed_right, "embed_right")
    if embed_left.shape[0] != embed_right.shape[0]:
        raise LinalgError("Embeddings map into spaces of different dimension")
    for name, e in (("embed_left", embed_left), ("embed_right", embed_right)):
        residual = isometry_residual(e)
        if residual > tol.check_eps:
            raise IsometryError(f"{name} is not an isometry (residual {residual:.3e})", residual)
    return embed_left.conj().T @ embed_right


def tensor_amalgamation(left: AmalgamatedSpace, right: AmalgamatedSpace, tol: Tolerance = Tolerance()) -> AmalgamatedSpace:
    """(E_s (x) E_t) (+) (F_s (x) F_t) amalgamated over d_s (x) d_t."""
    d = kron(left.d, right.d)
    return amalgamate(d.shape[0], d.shape[1], d, tol)


def embed_tensor(pair, tol: Tolerance = Tolerance(), source: AmalgamatedSpace = None) -> np.ndarray:
    """Isometry i: source classes -> G_s (x) G_t.

    Sends [u1 (x) u2; v1 (x) v2] to L u1 (x) L u2 + R v1 (x) R v2.
    """
    left, right = pair
    if source is None:
        source = tensor_amalgamation(left, right, tol)
    raw = np.hstack([kron(left.embed_left, right.embed_left), kron(left.embed_right, right.embed_right)])
    if raw.shape[1] != source.factor.shape[1]:
        raise LinalgError("Source amalgamation does not match the tensor dimensions")
    i_map = raw @ pinv_factor(source.factor)
    residual = isometry_residual(i_map)
    if residual > tol.check_eps:
        raise IsometryError(f"embed_tensor is not isometric (residual {residual:.3e})", residual)
    return i_map
