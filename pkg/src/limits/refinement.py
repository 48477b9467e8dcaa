"""Lifted inner products and covariances by uniform dyadic refinement.

For a uniform partition of t into 2**k blocks the inner product of the lifted
units is the 2**k-th power of the block inner product. The net over partitions
is approximated by letting k grow until the relative Cauchy criterion holds.
"""
import cmath
import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..dyadic import DyadicTime
from ..errors import CovarianceError
from ..inclusion import GridUnit, InclusionSystem, deepen_unit
from ..linalg_core import Tolerance

logger = logging.getLogger(__name__)

CONV_TOL = 1e-7
MIN_LEVELS = 4
MAX_DEPTH = 20
PROBE_TOL = 1e-6


class CovarianceResult(BaseModel):
    """Outcome of a refinement sequence for <u_t, v_t> in the generated system."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: complex
    block_value: complex = 0j
    log_value: Optional[complex] = None
    converged: bool
    levels_used: int
    residual_history: List[float] = Field(default_factory=list)
    t: Optional[DyadicTime] = None


def _level(u: GridUnit, t: DyadicTime) -> int:
    j = u.horizon.level_of(t)
    if j < 0:
        raise ValueError(f"t={t} is not a grid time of unit {u.label} (horizon {u.horizon})")
    return j


def block_inner(u: GridUnit, v: GridUnit, t: DyadicTime, k: int) -> complex:
    """<u_{t/2^k}, v_{t/2^k}>."""
    if u.horizon != v.horizon:
        raise ValueError(f"Units {u.label} and {v.label} have different horizons")
    level = _level(u, t) + k
    if level > min(u.depth, v.depth):
        raise ValueError(
            f"Insufficient depth: level {level} needed, units {u.label}/{v.label} have {u.depth}/{v.depth}"
        )
    return complex(np.vdot(u.seeds[level], v.seeds[level]))


def partition_inner(sys: InclusionSystem, u: GridUnit, v: GridUnit, t: DyadicTime, k: int) -> complex:
    """<u_s, v_s> for the uniform partition of t into 2**k blocks."""
    w = block_inner(u, v, t, k)
    for _ in range(k):
        w = w * w
    return w


def _ensure_depth(sys: InclusionSystem, u: GridUnit, level: int, tol: Tolerance) -> GridUnit:
    if level <= u.depth:
        return u
    logger.debug(f"{sys.name}: deepening {u.label} from {u.depth} to {level}")
    return deepen_unit(sys, u, level, tol)


def lifted_inner(
    sys: InclusionSystem,
    u: GridUnit,
    v: GridUnit,
    t: DyadicTime,
    tol: Tolerance = Tolerance(),
    max_depth: int = MAX_DEPTH,
    conv_tol: float = CONV_TOL,
    min_levels: int = MIN_LEVELS,
) -> CovarianceResult:
    """Limit of partition_inner over k = 0, 1, ..., max_depth.

    Stops at the first level (after min_levels) where
    |value_k - value_{k-1}| <= conv_tol * max(1, |value_k|). Units shallower
    than needed are deepened with unit square roots. Without convergence the
    last value is returned with converged=False.
    """
    base = _level(u, t)
    history: List[float] = []
    previous: Optional[complex] = None
    value, w, converged, k = 0j, 0j, False, 0
    for k in range(max_depth + 1):
        u = _ensure_depth(sys, u, base + k, tol)
        v = _ensure_depth(sys, v, base + k, tol)
        w = block_inner(u, v, t, k)
        value = partition_inner(sys, u, v, t, k)
        if previous is not None:
            history.append(abs(value - previous) / max(1.0, abs(value)))
            if k + 1 >= min_levels and history[-1] <= conv_tol:
                converged = True
                break
        previous = value
    log_value = None
    if abs(w) > 0.0:
        log_value = (1 << k) * cmath.log(w)
    if not converged:
        logger.warning(
            f"{sys.name}: <{u.label}, {v.label}> at t={t} did not converge by depth {max_depth} "
            f"(last residual {history[-1] if history else float('nan'):.3e})"
        )
    return CovarianceResult(
        value=value,
        block_value=w,
        log_value=log_value,
        converged=converged,
        levels_used=k + 1,
        residual_history=history,
        t=t,
    )


def depth_estimate(history: List[float], max_depth: int, conv_tol: float) -> Optional[int]:
    """Depth at which the residual history would drop below conv_tol.

    Extrapolates the decay rate of the last two residuals. Returns None when
    the residuals are not decreasing.
    """
    if not history or history[-1] <= conv_tol:
        return max_depth
    if len(history) < 2 or history[-1] >= history[-2] or history[-1] <= 0.0:
        return None
    rate = history[-2] / history[-1]
    return max_depth + math.ceil(math.log(history[-1] / conv_tol) / math.log(rate))


def _covariance_at(sys, u, v, t, tol, max_depth, conv_tol, min_levels) -> Tuple[complex, CovarianceResult]:
    result = lifted_inner(sys, u, v, t, tol, max_depth, conv_tol, min_levels)
    if not result.converged:
        history = result.residual_history
        needed = depth_estimate(history, max_depth, conv_tol)
        hint = (
            f"residuals decay too slowly; roughly depth {needed} is needed (raise max_depth or --depth)"
            if needed is not None
            else "residuals are not decreasing"
        )
        raise CovarianceError(
            f"<{u.label}, {v.label}> did not converge at t={t} within depth {max_depth} "
            f"(last residual {history[-1] if history else float('nan'):.3e}, conv_tol {conv_tol:g}); {hint}"
        )
    if abs(result.value) <= tol.residual_eps or result.log_value is None:
        raise CovarianceError(f"<{u.label}, {v.label}> vanishes at t={t}; covariance is undefined")
    # Finest block inner product sits near 1; the principal branch is taken there.
    if abs(cmath.phase(result.block_value)) >= math.pi - conv_tol:
        raise CovarianceError(f"<{u.label}, {v.label}> at t={t}: block inner product on the branch cut")
    return result.log_value / float(t), result


def covariance(
    sys: InclusionSystem,
    u: GridUnit,
    v: GridUnit,
    t_probe: Iterable[DyadicTime],
    tol: Tolerance = Tolerance(),
    max_depth: int = MAX_DEPTH,
    conv_tol: float = CONV_TOL,
    min_levels: int = MIN_LEVELS,
    probe_tol: float = PROBE_TOL,
) -> complex:
    """gamma(u, v) = log <u_t, v_t> / t, asserted independent of the probe time.

    Raises:
        CovarianceError: On non-convergence, a vanishing inner product, a value on
            the branch cut, or disagreement between probe times
    """
    value, _ = covariance_with_results(sys, u, v, t_probe, tol, max_depth, conv_tol, min_levels, probe_tol)
    return value


def covariance_with_results(
    sys: InclusionSystem,
    u: GridUnit,
    v: GridUnit,
    t_probe: Iterable[DyadicTime],
    tol: Tolerance = Tolerance(),
    max_depth: int = MAX_DEPTH,
    conv_tol: float = CONV_TOL,
    min_levels: int = MIN_LEVELS,
    probe_tol: float = PROBE_TOL,
) -> Tuple[complex, List[CovarianceResult]]:
    """covariance() together with the refinement results at each probe time."""
    probes = sorted(set(t_probe))
    if not probes:
        raise CovarianceError("At least one probe time is required")
    values, results = [], []
    for t in probes:
        gamma, result = _covariance_at(sys, u, v, t, tol, max_depth, conv_tol, min_levels)
        values.append(gamma)
        results.append(result)
    spread = max(abs(g - values[0]) for g in values)
    if spread > probe_tol * max(1.0, abs(values[0])):
        raise CovarianceError(
            f"gamma({u.label}, {v.label}) depends on the probe time: "
            + ", ".join(f"t={t}: {g:.8g}" for t, g in zip(probes, values))
        )
    gamma = complex(np.mean(values))
    logger.debug(f"gamma({u.label}, {v.label}) = {gamma:.8g} over {len(probes)} probe(s)")
    return gamma, results
