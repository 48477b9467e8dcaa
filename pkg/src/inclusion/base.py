"""Base inclusion-system interface."""
import logging
import threading
from abc import ABC, abstractmethod
from typing import Dict, Protocol, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..dyadic import DyadicTime
from ..errors import LinalgError
from ..linalg_core import Tolerance, as_vector, kron

logger = logging.getLogger(__name__)


class FiberLike(Protocol):
    t: DyadicTime
    dim: int
    q: np.ndarray


class Fiber(BaseModel):
    """Fiber E_t: its dimension and the coordinate factor it was built from."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: DyadicTime
    dim: int
    q: np.ndarray


class InclusionSystem(ABC):
    """Fibers E_t and isometries beta_{s,t}: E_{s+t} -> E_s (x) E_t over dyadic times.

    Fibers and linking maps are memoized; insertion is serialized by a lock.
    """

    def __init__(self, name: str, tol: Tolerance = Tolerance()):
        self.name = name
        self.tol = tol
        self._fibers: Dict[DyadicTime, FiberLike] = {}
        self._betas: Dict[Tuple[DyadicTime, DyadicTime], np.ndarray] = {}
        self._lock = threading.Lock()

    @abstractmethod
    def _build_fiber(self, t: DyadicTime) -> FiberLike:
        """Construct the fiber at time t.

        Args:
            t: Dyadic time

        Returns:
            Fiber-like value with dim and coordinate factor
        """
        pass

    @abstractmethod
    def _build_beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        """Construct the matrix of beta_{s,t}.

        Args:
            s: First time
            t: Second time

        Returns:
            Matrix of shape (dim(s) * dim(t), dim(s + t))
        """
        pass

    def fiber(self, t: DyadicTime) -> FiberLike:
        cached = self._fibers.get(t)
        if cached is None:
            built = self._build_fiber(t)
            with self._lock:
                cached = self._fibers.setdefault(t, built)
        return cached

    def dim(self, t: DyadicTime) -> int:
        return self.fiber(t).dim

    def beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        key = (s, t)
        cached = self._betas.get(key)
        if cached is None:
            built = self._build_beta(s, t)
            with self._lock:
                cached = self._betas.setdefault(key, built)
        return cached

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


def product(sys: InclusionSystem, s: DyadicTime, t: DyadicTime, x, y) -> np.ndarray:
    """m(x, y) = beta_{s,t}* (x (x) y)."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.size != sys.dim(s) or y.size != sys.dim(t):
        raise LinalgError(
            f"{sys.name}: product expects vectors of sizes ({sys.dim(s)}, {sys.dim(t)}), got ({x.size}, {y.size})"
        )
    return sys.beta(s, t).conj().T @ kron(x, y).reshape(-1)
