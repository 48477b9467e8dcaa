"""Units on dyadic grids: construction, checks, pullbacks and amalgamation."""
import cmath
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..cp_semigroup import gns_vector
from ..dyadic import DyadicTime
from ..errors import LinalgError, NotContractiveError, UnitRootError, ZeroUnitError
from ..linalg_core import Tolerance, as_vector, kron, matexp, vec
from .base import InclusionSystem, product
from .checks import CheckReport, _finish
from .morphisms import MorphismFamily, left_embedding, right_embedding

logger = logging.getLogger(__name__)

NEWTON_MAX_ITER = 50


class GridUnit(BaseModel):
    """Seeds u_{h/2^k}, k = 0..depth, of a unit with horizon h."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    horizon: DyadicTime
    seeds: List[np.ndarray]
    growth_bound: float = 0.0
    label: str = "u"

    @field_validator("seeds", mode="before")
    @classmethod
    def _finite_seeds(cls, seeds):
        if not seeds:
            raise ValueError("A grid unit needs at least one seed")
        return [as_vector(s, "seed") for s in seeds]

    @property
    def depth(self) -> int:
        return len(self.seeds) - 1

    def time(self, k: int) -> DyadicTime:
        return self.horizon.halve(k)

    def times(self) -> List[DyadicTime]:
        return [self.time(k) for k in range(self.depth + 1)]

    def at(self, t: DyadicTime) -> np.ndarray:
        j = self.horizon.level_of(t)
        if j < 0 or j > self.depth:
            raise ValueError(f"Unit {self.label} has no seed at t={t}")
        return self.seeds[j]


def observed_growth(seeds: Sequence[np.ndarray], times: Sequence[DyadicTime], floor: float = 0.0) -> float:
    """Smallest k >= floor with ||seed|| <= exp(t k) at every sampled time."""
    k = floor
    for seed, t in zip(seeds, times):
        norm = float(np.linalg.norm(seed))
        if norm > 0:
            k = max(k, math.log(norm) / float(t))
    return k


def seeds_unit(seeds, horizon: DyadicTime, growth_bound: Optional[float] = None, label: str = "u") -> GridUnit:
    seeds = [as_vector(s, "seed") for s in seeds]
    if growth_bound is None:
        growth_bound = observed_growth(seeds, [horizon.halve(k) for k in range(len(seeds))], -math.inf)
    return GridUnit(horizon=horizon, seeds=seeds, growth_bound=growth_bound, label=label)


def exponential_unit(a: complex, horizon: DyadicTime, depth: int, label: str = "exp") -> GridUnit:
    """u_t = exp(a t) on the trivial system."""
    seeds = [np.array([cmath.exp(a * float(horizon.halve(k)))]) for k in range(depth + 1)]
    return GridUnit(horizon=horizon, seeds=seeds, growth_bound=complex(a).real, label=label)


def example2_unit(a: complex, b: complex, horizon: DyadicTime, depth: int, label: str = "u") -> GridUnit:
    """Closed-form unit u_t = exp(a t) (1, b sqrt(t)) of Example 2."""
    seeds = []
    for k in range(depth + 1):
        t = float(horizon.halve(k))
        seeds.append(cmath.exp(a * t) * np.array([1.0, b * math.sqrt(t)], dtype=np.complex128))
    growth = complex(a).real + abs(b) ** 2 / 2
    return GridUnit(horizon=horizon, seeds=seeds, growth_bound=growth, label=label)


def intertwiner_unit(sys, a, horizon: DyadicTime, depth: int, label: str = "u") -> GridUnit:
    """Unit t -> [vec(exp(t a))] of a CP system whose maps intertwine exp(t a).

    The seed at t is the fiber vector x with <e_(g,h), x> = exp(t a)[h, g].
    """
    a = np.asarray(a, dtype=np.complex128)
    seeds, times = [], []
    for k in range(depth + 1):
        t = horizon.halve(k)
        seeds.append(gns_vector(sys.fiber(t), vec(matexp(float(t) * a)), sys.tol))
        times.append(t)
    return GridUnit(horizon=horizon, seeds=seeds, growth_bound=observed_growth(seeds, times), label=label)


def unit_at(sys: InclusionSystem, u: GridUnit, t: DyadicTime) -> np.ndarray:
    """u_t at any multiple t of the finest grid time, by unit products of seeds."""
    level = u.horizon.level_of(t)
    if 0 <= level <= u.depth:
        return u.seeds[level]
    finest = u.time(u.depth)
    if (t.as_fraction() / finest.as_fraction()).denominator != 1:
        raise ValueError(f"t={t} is not a multiple of the finest grid time {finest} of {u.label}")
    remaining = t.as_fraction()
    acc, acc_t = None, None
    while remaining > 0:
        j = 0
        while u.time(j).as_fraction() > remaining:
            j += 1
        piece = u.time(j)
        if acc is None:
            acc, acc_t = u.seeds[j], piece
        else:
            acc = product(sys, acc_t, piece, acc, u.seeds[j])
            acc_t = acc_t + piece
        remaining -= piece.as_fraction()
    return acc


def _unit_report(name: str, sys: InclusionSystem, u: GridUnit, tol: Tolerance) -> CheckReport:
    return CheckReport(
        name=name,
        subject=f"{u.label} in {sys.name}",
        passed=False,
        threshold=tol.check_eps,
        details={"horizon": u.horizon.to_pair(), "depth": u.depth, "growth_bound": u.growth_bound},
    )


def _growth_and_zero(report: CheckReport, u: GridUnit, tol: Tolerance):
    norms = [float(np.linalg.norm(s)) for s in u.seeds]
    excess = 0.0
    for k, norm in enumerate(norms):
        bound = math.exp(float(u.time(k)) * u.growth_bound) * (1.0 + tol.residual_eps)
        excess = max(excess, norm - bound)
    report.residuals["growth"] = excess
    if norms[0] <= tol.residual_eps:
        report.failures.append("seed at the horizon vanishes (a unit must be nonzero)")


def check_unit(sys: InclusionSystem, u: GridUnit, tol: Tolerance = Tolerance()) -> CheckReport:
    """Consistency seeds[k] = beta*(seeds[k+1] (x) seeds[k+1]) plus the exponential bound."""
    report = _unit_report("inclusion.check_unit", sys, u, tol)
    worst = 0.0
    for k in range(u.depth):
        half = u.time(k + 1)
        image = product(sys, half, half, u.seeds[k + 1], u.seeds[k + 1])
        scale = max(1.0, float(np.linalg.norm(u.seeds[k])))
        worst = max(worst, float(np.linalg.norm(u.seeds[k] - image)) / scale)
    report.residuals["consistency"] = worst
    _growth_and_zero(report, u, tol)
    return _finish(report)


def check_strong_unit(sys: InclusionSystem, u: GridUnit, tol: Tolerance = Tolerance()) -> CheckReport:
    """Residual of beta u_{2s} = u_s (x) u_s along the grid."""
    report = _unit_report("inclusion.check_strong_unit", sys, u, tol)
    worst = 0.0
    for k in range(u.depth):
        half = u.time(k + 1)
        lifted = sys.beta(half, half) @ u.seeds[k]
        target = kron(u.seeds[k + 1], u.seeds[k + 1]).reshape(-1)
        scale = max(1.0, float(np.linalg.norm(u.seeds[k])))
        worst = max(worst, float(np.linalg.norm(lifted - target)) / scale)
    report.residuals["strong_consistency"] = worst
    _growth_and_zero(report, u, tol)
    return _finish(report)


def pullback_unit(a: MorphismFamily, v: GridUnit, tol: Tolerance = Tolerance(), label: Optional[str] = None) -> GridUnit:
    """Seeds a(t)* v_t; a unit whenever a satisfies the strong identity.

    Raises:
        ZeroUnitError: If every pulled-back seed vanishes
    """
    seeds = [a(t).conj().T @ seed for t, seed in zip(v.times(), v.seeds)]
    if max(float(np.linalg.norm(s)) for s in seeds) <= tol.residual_eps:
        raise ZeroUnitError(f"Pullback of {v.label} through {a.name} vanishes identically")
    return GridUnit(
        horizon=v.horizon,
        seeds=seeds,
        growth_bound=a.growth_bound + v.growth_bound,
        label=label or f"{a.name}*{v.label}",
    )


def rank_one_morphism(
    u0: GridUnit,
    v0: GridUnit,
    tol: Tolerance = Tolerance(),
    e: Optional[InclusionSystem] = None,
    f: Optional[InclusionSystem] = None,
) -> MorphismFamily:
    """D_t = |u0_t><v0_t| : F_t -> E_t.

    Without the systems the family lives on the common grid. With them it is
    defined at every multiple of the finest grid time, the units being extended
    by products of their seeds.

    Raises:
        NotContractiveError: If ||u0_t|| ||v0_t|| > 1 at a grid time
    """
    if u0.horizon != v0.horizon:
        raise ValueError(f"Units {u0.label} and {v0.label} have different horizons")
    depth = min(u0.depth, v0.depth)
    grid = [u0.time(k) for k in range(depth + 1)]
    for k, t in enumerate(grid):
        norm = float(np.linalg.norm(u0.seeds[k]) * np.linalg.norm(v0.seeds[k]))
        if norm > 1.0 + tol.residual_eps:
            raise NotContractiveError(f"||{u0.label}_t|| ||{v0.label}_t|| = {norm:.6g} > 1 at t={t}")
    name = f"|{u0.label}><{v0.label}|"
    growth = u0.growth_bound + v0.growth_bound
    if e is None or f is None:
        return MorphismFamily(
            a=lambda t: np.outer(u0.at(t), v0.at(t).conj()), growth_bound=growth, support=frozenset(grid), name=name
        )
    memo: Dict[DyadicTime, np.ndarray] = {}

    def a(t: DyadicTime) -> np.ndarray:
        if t not in memo:
            memo[t] = np.outer(unit_at(e, u0, t), unit_at(f, v0, t).conj())
        return memo[t]

    return MorphismFamily(a=a, growth_bound=growth, name=name)


def embed_unit_left(g, u: GridUnit) -> GridUnit:
    """[u; 0] in G."""
    seeds = [g.space(t).embed_left @ seed for t, seed in zip(u.times(), u.seeds)]
    return GridUnit(horizon=u.horizon, seeds=seeds, growth_bound=u.growth_bound, label=f"[{u.label};0]")


def embed_unit_right(g, v: GridUnit) -> GridUnit:
    """[0; v] in G."""
    seeds = [g.space(t).embed_right @ seed for t, seed in zip(v.times(), v.seeds)]
    return GridUnit(horizon=v.horizon, seeds=seeds, growth_bound=v.growth_bound, label=f"[0;{v.label}]")


def decompose_unit(
    g, g_unit: GridUnit, tol: Tolerance = Tolerance(), allow_zero: bool = False
) -> Tuple[Optional[GridUnit], Optional[GridUnit]]:
    """Units (u + D v) of E and (D* u + v) of F for a unit [u; v] of G.

    Both are pullbacks through the strong embeddings E -> G and F -> G.

    Raises:
        ZeroUnitError: If a component vanishes and allow_zero is False
    """
    parts = []
    for morphism, side in ((left_embedding(g), "left"), (right_embedding(g), "right")):
        try:
            parts.append(pullback_unit(morphism, g_unit, tol, label=f"{g_unit.label}.{side}"))
        except ZeroUnitError:
            if not allow_zero:
                raise
            parts.append(None)
    return parts[0], parts[1]


def compose_unit(g, u: GridUnit, v: GridUnit, label: Optional[str] = None) -> GridUnit:
    """The unit of G whose decomposition is (u, v)."""
    if u.horizon != v.horizon:
        raise ValueError("Component units must share a horizon")
    depth = min(u.depth, v.depth)
    times = [u.time(k) for k in range(depth + 1)]
    seeds = [g.space(t).lift(u.seeds[k], v.seeds[k]) for k, t in enumerate(times)]
    return GridUnit(
        horizon=u.horizon,
        seeds=seeds,
        growth_bound=observed_growth(seeds, times, max(u.growth_bound, v.growth_bound)),
        label=label or f"<{u.label},{v.label}>",
    )


def _initial_root(sys: InclusionSystem, half: DyadicTime, x: np.ndarray, tol: Tolerance) -> np.ndarray:
    n = sys.dim(half)
    if x.size == n:
        pivot = 0 if abs(x[0]) > tol.residual_eps * np.linalg.norm(x) else int(np.argmax(np.abs(x)))
        phase = cmath.exp(-0.5j * cmath.phase(x[pivot]))
        return x * phase / math.sqrt(float(np.linalg.norm(x)))
    # Leading singular pair of beta x viewed as an n x n matrix.
    z = (sys.beta(half, half) @ x).reshape(n, n)
    u, s, _ = np.linalg.svd(z)
    return math.sqrt(s[0]) * u[:, 0]


def unit_square_root(sys: InclusionSystem, t: DyadicTime, x, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Solve product(t/2, t/2, y, y) = x by Newton iteration.

    Newton starts from x rescaled to norm sqrt(||x||) with the phase of its
    pivot entry halved, so on vacuum-like coordinates the root follows the
    principal square root. The sign is fixed against that starting point.

    Raises:
        UnitRootError: If x = 0, Newton does not converge, or the branch is ambiguous
    """
    x = as_vector(x, "x")
    if x.size != sys.dim(t):
        raise LinalgError(f"Vector has size {x.size}, fiber at t={t} has dim {sys.dim(t)}")
    norm_x = float(np.linalg.norm(x))
    if norm_x <= tol.residual_eps:
        raise UnitRootError(f"Cannot take the unit square root of zero at t={t}")
    half = t.halve()
    n = sys.dim(half)
    adj = sys.beta(half, half).conj().T
    eye = np.eye(n)
    start = _initial_root(sys, half, x, tol)
    y = start
    target = tol.residual_eps * max(1.0, norm_x)
    steps = 0
    for steps in range(NEWTON_MAX_ITER):
        residual = adj @ kron(y, y).reshape(-1) - x
        if float(np.linalg.norm(residual)) <= target:
            break
        col = y.reshape(-1, 1)
        jac = adj @ (kron(eye, col) + kron(col, eye))
        step, *_ = np.linalg.lstsq(jac, -residual, rcond=None)
        y = y + step
    else:
        # The final step has not been checked yet.
        residual = adj @ kron(y, y).reshape(-1) - x
        if float(np.linalg.norm(residual)) > target:
            raise UnitRootError(
                f"Newton square root did not converge at t={t} (residual {float(np.linalg.norm(residual)):.3e})"
            )
        steps = NEWTON_MAX_ITER
    # Of the two roots +-y keep the one on the side of the initial guess.
    alignment = float(np.vdot(start, y).real)
    if abs(alignment) <= tol.check_eps * float(np.linalg.norm(start) * np.linalg.norm(y)):
        raise UnitRootError(f"Square root branch is ambiguous at t={t}")
    logger.debug(f"{sys.name}: square root at t={t} converged in {steps} step(s)")
    return y if alignment > 0 else -y


def deepen_unit(sys: InclusionSystem, u: GridUnit, depth: int, tol: Tolerance = Tolerance()) -> GridUnit:
    """Extend seeds to the requested depth by repeated square roots."""
    if depth <= u.depth:
        return u
    seeds = list(u.seeds)
    for k in range(u.depth, depth):
        seeds.append(unit_square_root(sys, u.time(k), seeds[k], tol))
    return GridUnit(horizon=u.horizon, seeds=seeds, growth_bound=u.growth_bound, label=u.label)
