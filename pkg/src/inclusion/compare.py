"""Comparison of two inclusion systems through spanning frames.

A frame for a system is a function t -> matrix whose columns are fiber vectors
spanning the fiber at t. Two systems are isomorphic on the sampled grid when
the Gram matrices of corresponding frames agree and the linking maps have the
same matrix elements against them.
"""
import logging
import math
from typing import Callable, Iterable, Tuple

import numpy as np

from ..dyadic import DyadicTime
from ..linalg_core import Tolerance, kron, spectral_norm
from .base import InclusionSystem
from .checks import CheckReport, _finish
from .units import intertwiner_unit

logger = logging.getLogger(__name__)

Frame = Callable[[DyadicTime], np.ndarray]


def _beta_elements(sys: InclusionSystem, frame: Frame, s: DyadicTime, t: DyadicTime) -> np.ndarray:
    return kron(frame(s), frame(t)).conj().T @ sys.beta(s, t) @ frame(s + t)


def match_discrepancy(
    a_sys: InclusionSystem,
    a_frame: Frame,
    b_sys: InclusionSystem,
    b_frame: Frame,
    times: Iterable[DyadicTime],
    tol: Tolerance = Tolerance(),
) -> CheckReport:
    """Largest Gram and linking-map discrepancy between corresponding frames.

    Gram matrices are compared at every sampled time; linking maps at every
    pair (s, t) of sampled times whose sum is also sampled.
    """
    times = sorted(set(times))
    gram, beta = 0.0, 0.0
    for t in times:
        fa, fb = a_frame(t), b_frame(t)
        gram = max(gram, spectral_norm(fa.conj().T @ fa - fb.conj().T @ fb))
    pairs = [(s, t) for s in times for t in times if s + t in times]
    for s, t in pairs:
        beta = max(beta, spectral_norm(_beta_elements(a_sys, a_frame, s, t) - _beta_elements(b_sys, b_frame, s, t)))
    report = CheckReport(
        name="inclusion.match_discrepancy",
        subject=f"{a_sys.name} ~ {b_sys.name}",
        passed=False,
        threshold=tol.check_eps,
        residuals={"gram": gram, "beta": beta},
        details={
            "times": [t.to_pair() for t in times],
            "pairs": [[s.to_pair(), t.to_pair()] for s, t in pairs],
            "dims": {str(t): [a_sys.dim(t), b_sys.dim(t)] for t in times},
        },
    )
    return _finish(report)


def standard_frame(sys: InclusionSystem) -> Frame:
    """Identity frame on fibers given in orthonormal coordinates."""
    return lambda t: np.eye(sys.dim(t), dtype=np.complex128)


def tt_frame(tt_sys, alpha: float = 1.0) -> Frame:
    """Normalized classes of e_0 (x) e_0 and e_1 (x) e_0 in the GNS fibers of T_t.

    They correspond to e_0 and e_1 of Example 2.
    """

    def frame(t: DyadicTime) -> np.ndarray:
        ft = float(t)
        scale = math.exp(alpha * ft / 2)
        return np.column_stack([scale * tt_sys.vector(t, 0, 0), scale / math.sqrt(ft) * tt_sys.vector(t, 1, 0)])

    return frame


def powers_frames(tau_sys, g_sys, tol: Tolerance = Tolerance()) -> Tuple[Frame, Frame]:
    """Frames matching the Powers semigroup with its amalgamated model.

    On the CP side the columns are the GNS classes of e_g (x) e_h with g, h both
    in H or both in K. On the amalgamated side they are the embedded GNS classes
    of the diagonal blocks, in the same order.
    """
    data = tau_sys.sg.powers
    if data is None:
        raise ValueError(f"{tau_sys.name} was not built by powers_corner")
    m, n = data.dim_h, data.dim_k
    size = m + n
    columns = [g * size + h for g in range(m) for h in range(m)]
    columns += [(m + g) * size + (m + h) for g in range(n) for h in range(n)]

    def tau_frame(t: DyadicTime) -> np.ndarray:
        return tau_sys.fiber(t).q[:, columns]

    def g_frame(t: DyadicTime) -> np.ndarray:
        sp = g_sys.space(t)
        return np.hstack([sp.embed_left @ g_sys.e.fiber(t).q, sp.embed_right @ g_sys.f.fiber(t).q])

    return tau_frame, g_frame


def powers_units(e_sys, f_sys, data, horizon: DyadicTime, depth: int):
    """Units t -> [vec U_t] of E and t -> [vec V_t] of F defining the corner morphism."""
    u0 = intertwiner_unit(e_sys, data.a, horizon, depth, label="u0")
    v0 = intertwiner_unit(f_sys, data.b, horizon, depth, label="v0")
    return u0, v0
