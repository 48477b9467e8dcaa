"""Concrete inclusion systems."""
import hashlib
import logging
import math
import threading
from typing import Dict, Optional

import numpy as np
import scipy.linalg

from ..amalgam import AmalgamatedSpace, amalgamate, embed_tensor, tensor_amalgamation
from ..cp_semigroup import CpSemigroup, GnsFiber, gns_beta, gns_fiber
from ..dyadic import DyadicTime
from ..errors import IsometryError, NotContractiveError
from ..linalg_core import Tolerance, contraction_check, isometry_residual, pinv_factor, spectral_norm
from ..storage import FiberCache
from .base import Fiber, FiberLike, InclusionSystem
from .morphisms import MorphismFamily

logger = logging.getLogger(__name__)


class TrivialSystem(InclusionSystem):
    """E_t = C with beta_{s,t} = 1."""

    def __init__(self, name: str = "trivial", tol: Tolerance = Tolerance()):
        super().__init__(name, tol)

    def _build_fiber(self, t: DyadicTime) -> Fiber:
        return Fiber(t=t, dim=1, q=np.eye(1, dtype=np.complex128))

    def _build_beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        return np.eye(1, dtype=np.complex128)


class Example2System(InclusionSystem):
    """E_t = C^2 with beta e0 = e0 (x) e0 and
    beta e1 = (sqrt(s) e1 (x) e0 + sqrt(t) e0 (x) e1) / sqrt(s + t).
    """

    def __init__(self, name: str = "example2", tol: Tolerance = Tolerance()):
        super().__init__(name, tol)

    def _build_fiber(self, t: DyadicTime) -> Fiber:
        return Fiber(t=t, dim=2, q=np.eye(2, dtype=np.complex128))

    def _build_beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        fs, ft = float(s), float(t)
        total = math.sqrt(fs + ft)
        beta = np.zeros((4, 2), dtype=np.complex128)
        beta[0, 0] = 1.0
        # Tensor index i*2 + j for e_i (x) e_j.
        beta[1, 1] = math.sqrt(ft) / total
        beta[2, 1] = math.sqrt(fs) / total
        return beta


class CpInclusionSystem(InclusionSystem):
    """Inclusion system of GNS fibers of a CP semigroup."""

    def __init__(
        self,
        sg: CpSemigroup,
        tol: Tolerance = Tolerance(),
        cache: Optional[FiberCache] = None,
        name: Optional[str] = None,
    ):
        """Initialize the system.

        Args:
            sg: CP semigroup providing the Gram forms
            tol: Tolerance settings
            cache: Optional on-disk fiber cache
            name: Label used in logs and reports
        """
        super().__init__(name or sg.name, tol)
        self.sg = sg
        self.cache = cache

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.sg.digest.encode())
        h.update(f"{self.tol.rank_eps!r}:{self.tol.residual_eps!r}".encode())
        return h.hexdigest()[:16]

    def _build_fiber(self, t: DyadicTime) -> GnsFiber:
        if self.cache is not None:
            hit = self.cache.load(self.digest, t)
            if hit is not None:
                return GnsFiber(t=t, dim=hit["dim"], dim_h=self.sg.dim_h, q=hit["q"])
        fiber = gns_fiber(self.sg, t, self.tol)
        if self.cache is not None:
            self.cache.save(self.digest, t, fiber.dim, fiber.q)
        return fiber

    def _build_beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        return gns_beta(self.sg, s, t, self.tol, fibers=(self.fiber(s), self.fiber(t), self.fiber(s + t)))

    def vector(self, t: DyadicTime, g: int, h: int) -> np.ndarray:
        """Class of e_g (x) e_h in the fiber at t."""
        return self.fiber(t).q[:, g * self.sg.dim_h + h]


class ScaledSystem(InclusionSystem):
    """Same fibers as the base system with every beta multiplied by a factor."""

    def __init__(self, base: InclusionSystem, factor: float, name: Optional[str] = None):
        super().__init__(name or f"{base.name}*{factor:g}", base.tol)
        self.base = base
        self.factor = factor

    def _build_fiber(self, t: DyadicTime) -> FiberLike:
        return self.base.fiber(t)

    def _build_beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        return self.factor * self.base.beta(s, t)


class AmalgamatedSystem(InclusionSystem):
    """G_t = E_t (+)_{D_t} F_t with delta_{s,t} = i_{s,t} (beta (+)_D gamma)."""

    def __init__(
        self,
        e: InclusionSystem,
        f: InclusionSystem,
        d: MorphismFamily,
        tol: Tolerance = Tolerance(),
        name: Optional[str] = None,
    ):
        """Initialize the amalgamation.

        Args:
            e: Left system E
            f: Right system F
            d: Contractive weak morphism F -> E
            tol: Tolerance settings
            name: Label used in logs and reports

        Raises:
            NotContractiveError: If d is not contractive at a time of its support
        """
        super().__init__(name or f"{e.name}+{f.name}", tol)
        self.e = e
        self.f = f
        self.morphism = d
        self._spaces: Dict[DyadicTime, AmalgamatedSpace] = {}
        self._space_lock = threading.Lock()
        if d.support is not None:
            for t in sorted(d.support):
                if not contraction_check(d(t), tol):
                    raise NotContractiveError(
                        f"{self.name}: D is not contractive at t={t} (norm {spectral_norm(d(t)):.6g})"
                    )

    def space(self, t: DyadicTime) -> AmalgamatedSpace:
        cached = self._spaces.get(t)
        if cached is None:
            d_t = self.morphism(t)
            try:
                built = amalgamate(self.e.dim(t), self.f.dim(t), d_t, self.tol)
            except NotContractiveError as e:
                raise NotContractiveError(f"{self.name}: D is not contractive at t={t}: {e}") from e
            with self._space_lock:
                cached = self._spaces.setdefault(t, built)
        return cached

    def _build_fiber(self, t: DyadicTime) -> Fiber:
        sp = self.space(t)
        return Fiber(t=t, dim=sp.dim_g, q=sp.factor)

    def sum_map(self, s: DyadicTime, t: DyadicTime, source: Optional[AmalgamatedSpace] = None) -> np.ndarray:
        """beta (+)_D gamma: G_{s+t} -> (E_s (x) E_t) (+)_{D_s (x) D_t} (F_s (x) F_t)."""
        if source is None:
            source = tensor_amalgamation(self.space(s), self.space(t), self.tol)
        blocks = scipy.linalg.block_diag(self.e.beta(s, t), self.f.beta(s, t))
        return source.factor @ blocks @ pinv_factor(self.space(s + t).factor)

    def _build_beta(self, s: DyadicTime, t: DyadicTime) -> np.ndarray:
        left, right = self.space(s), self.space(t)
        source = tensor_amalgamation(left, right, self.tol)
        i_map = embed_tensor((left, right), self.tol, source)
        summed = self.sum_map(s, t, source)
        residual = isometry_residual(summed)
        if residual > self.tol.check_eps:
            raise IsometryError(
                f"{self.name}: beta (+)_D gamma at ({s},{t}) is not isometric (residual {residual:.3e}); "
                "is D a weak morphism?",
                residual,
            )
        return i_map @ summed


def trivial_system(name: str = "trivial") -> TrivialSystem:
    return TrivialSystem(name)


def example2_system(name: str = "example2") -> Example2System:
    return Example2System(name)


def from_cp(
    sg: CpSemigroup, tol: Tolerance = Tolerance(), cache: Optional[FiberCache] = None, name: Optional[str] = None
) -> CpInclusionSystem:
    return CpInclusionSystem(sg, tol, cache, name)


def scaled_system(base: InclusionSystem, factor: float) -> ScaledSystem:
    return ScaledSystem(base, factor)


def amalgamate_systems(
    e: InclusionSystem, f: InclusionSystem, d: MorphismFamily, tol: Tolerance = Tolerance(), name: Optional[str] = None
) -> AmalgamatedSystem:
    """Amalgamated inclusion system G = E (+)_D F for D: F -> E."""
    g = AmalgamatedSystem(e, f, d, tol, name)
    logger.info(f"Amalgamated {e.name} and {f.name} through {d.name}")
    return g
