"""Axiom and morphism checks returning structured reports."""
import logging
import math
from itertools import product as cartesian
from typing import Any, Dict, Iterable, List

import numpy as np
from pydantic import BaseModel, Field

from ..dyadic import DyadicTime
from ..linalg_core import Tolerance, isometry_residual, kron, spectral_norm
from .base import InclusionSystem
from .morphisms import MorphismFamily

logger = logging.getLogger(__name__)


class CheckReport(BaseModel):
    """Residuals of one check; passes iff every residual is within threshold."""

    name: str
    subject: str
    passed: bool
    threshold: float
    residuals: Dict[str, float] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)


def _finish(report: CheckReport) -> CheckReport:
    for key, value in report.residuals.items():
        if not math.isfinite(value) or value > report.threshold:
            report.failures.append(f"{key} residual {value:.3e} exceeds {report.threshold:.1e}")
    report.passed = not report.failures
    log = logger.info if report.passed else logger.warning
    log(f"{report.name}[{report.subject}]: {'pass' if report.passed else 'FAIL'} {report.residuals}")
    return report


def check_axioms(sys: InclusionSystem, times: Iterable[DyadicTime], tol: Tolerance = Tolerance()) -> CheckReport:
    """Max isometry residual over pairs and coassociativity residual over triples."""
    times = sorted(set(times))
    iso, coassoc = 0.0, 0.0
    for s, t in cartesian(times, times):
        iso = max(iso, isometry_residual(sys.beta(s, t)))
    for r, s, t in cartesian(times, times, times):
        left = kron(sys.beta(r, s), np.eye(sys.dim(t))) @ sys.beta(r + s, t)
        right = kron(np.eye(sys.dim(r)), sys.beta(s, t)) @ sys.beta(r, s + t)
        coassoc = max(coassoc, spectral_norm(left - right))
    report = CheckReport(
        name="inclusion.check_axioms",
        subject=sys.name,
        passed=False,
        threshold=tol.check_eps,
        residuals={"isometry": iso, "coassociativity": coassoc},
        details={"times": [t.to_pair() for t in times], "dims": {str(t): sys.dim(t) for t in times}},
    )
    return _finish(report)


def _admissible_pairs(a: MorphismFamily, times: List[DyadicTime]):
    for s, t in cartesian(times, times):
        if a.defined_at(s) and a.defined_at(t) and a.defined_at(s + t):
            yield s, t


def _growth_residual(a: MorphismFamily, times: List[DyadicTime], tol: Tolerance) -> float:
    worst = 0.0
    for t in times:
        if a.defined_at(t):
            bound = math.exp(float(t) * a.growth_bound) * (1.0 + tol.residual_eps)
            worst = max(worst, spectral_norm(a(t)) - bound)
    return max(worst, 0.0)


def _morphism_check(name: str, e, f, a, times, tol, strong: bool) -> CheckReport:
    times = sorted(set(times))
    grid = sorted(set(times) | {s + t for s, t in cartesian(times, times)})
    worst, pairs = 0.0, 0
    for s, t in _admissible_pairs(a, times):
        beta, gamma = e.beta(s, t), f.beta(s, t)
        if strong:
            residual = spectral_norm(gamma @ a(s + t) - kron(a(s), a(t)) @ beta)
        else:
            residual = spectral_norm(a(s + t) - gamma.conj().T @ kron(a(s), a(t)) @ beta)
        worst = max(worst, residual)
        pairs += 1
    report = CheckReport(
        name=name,
        subject=f"{a.name}: {e.name} -> {f.name}",
        passed=False,
        threshold=tol.check_eps,
        residuals={"identity": worst, "growth": _growth_residual(a, grid, tol)},
        details={"pairs": pairs},
    )
    if pairs == 0:
        report.failures.append("no sampled pair (s, t) lies in the morphism's support")
    return _finish(report)


def check_weak_morphism(
    e: InclusionSystem, f: InclusionSystem, a: MorphismFamily, times: Iterable[DyadicTime], tol: Tolerance = Tolerance()
) -> CheckReport:
    """Residual of A_{s+t} = gamma* (A_s (x) A_t) beta over sampled pairs."""
    return _morphism_check("inclusion.check_weak_morphism", e, f, a, times, tol, strong=False)


def check_strong_morphism(
    e: InclusionSystem, f: InclusionSystem, a: MorphismFamily, times: Iterable[DyadicTime], tol: Tolerance = Tolerance()
) -> CheckReport:
    """Residual of gamma A_{s+t} = (A_s (x) A_t) beta over sampled pairs."""
    return _morphism_check("inclusion.check_strong_morphism", e, f, a, times, tol, strong=True)
