"""Experiment runner behind the check, index and powers commands."""
import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from ..cp_semigroup import CpSemigroup, example_tt, identity_semigroup, powers_corner
from ..cp_semigroup.blocks import DEFAULT_DEPTH, DEFAULT_HORIZON
from ..dyadic import DyadicTime
from ..errors import ConfigError, ProdsysError
from ..index_theory import centered_spectrum, cov_kernel, defect_p, index_estimate, predicted_amalgam_index
from ..inclusion import (
    CheckReport,
    GridUnit,
    InclusionSystem,
    MorphismFamily,
    ScaledSystem,
    amalgamate_systems,
    check_axioms,
    check_strong_morphism,
    check_strong_unit,
    check_unit,
    check_weak_morphism,
    compose_unit,
    embed_unit_left,
    embed_unit_right,
    example2_unit,
    exponential_unit,
    from_cp,
    get_inclusion_system,
    identity_morphism,
    intertwiner_unit,
    left_embedding,
    match_discrepancy,
    powers_frames,
    powers_units,
    rank_one_morphism,
    right_embedding,
    scaled_morphism,
    seeds_unit,
    standard_frame,
    tt_frame,
)
from ..limits import CONV_TOL, MAX_DEPTH, MIN_LEVELS, covariance
from ..settings import Settings, tolerance_from
from ..storage import FiberCache
from .config import ExperimentConfig, decode_matrix, decode_scalar, decode_vector, to_time
from .report import CheckEntry, Report

logger = logging.getLogger(__name__)


def _entry(report: CheckReport) -> CheckEntry:
    return CheckEntry(
        operation=report.name,
        subject=report.subject,
        passed=report.passed,
        threshold=report.threshold,
        residuals=report.residuals,
        failures=report.failures,
        details=report.details,
    )


def _first_set(*values):
    """First value that is not None; explicit zeros count as set."""
    return next(v for v in values if v is not None)


def _common_depth(horizon: DyadicTime, times: List[DyadicTime]) -> int:
    """Smallest j such that every time is a multiple of horizon / 2**j."""
    for j in range(64):
        finest = horizon.halve(j).as_fraction()
        if all((t.as_fraction() / finest).denominator == 1 for t in times):
            return j
    raise ConfigError("Times are not commensurable with the horizon")


class ExperimentRunner:
    """Builds systems, units and morphisms of an experiment on demand."""

    def __init__(
        self,
        config: ExperimentConfig,
        settings: Optional[Settings] = None,
        base: Optional[Dict] = None,
        depth: Optional[int] = None,
        tol: Optional[float] = None,
    ):
        """Initialize the runner.

        Args:
            config: Parsed experiment
            settings: Environment settings (cache location and switch)
            base: Parsed config.yaml
            depth: Command-line override of max_depth
            tol: Command-line override of residual_eps
        """
        base = base or {}
        settings = settings or Settings()
        self.config = config
        self.tol = tolerance_from(base, config.tolerance)
        if tol is not None:
            self.tol = self.tol.merged(residual_eps=tol)
        limits = base.get('limits') or {}
        validation = base.get('validation') or {}
        self.max_depth = _first_set(depth, config.max_depth, limits.get('max_depth'), MAX_DEPTH)
        self.conv_tol = _first_set(config.conv_tol, limits.get('conv_tol'), CONV_TOL)
        self.min_levels = limits.get('min_levels', MIN_LEVELS)
        self.validation_horizon = float(validation.get('horizon', DEFAULT_HORIZON))
        self.validation_depth = int(validation.get('depth', DEFAULT_DEPTH))
        self.horizon = to_time(config.horizon)
        self.probe_times = [to_time(p) for p in config.probe_times] or [self.horizon]
        levels = [self.horizon.level_of(t) for t in self.probe_times]
        if min(levels) < 0:
            raise ConfigError(f"probe_times must be horizon / 2**j, got {[str(t) for t in self.probe_times]}")
        self.unit_depth = max(levels) + self.max_depth
        self.cache = FiberCache(settings.cache_path) if settings.cache_enabled else None
        self.digest = config.digest()
        self._systems: Dict[str, InclusionSystem] = {}
        self._units: Dict[str, GridUnit] = {}
        self._morphisms: Dict[str, MorphismFamily] = {}
        self._resolving: set = set()

    def _resolve(self, kind: str, name: str, memo: Dict, build: Callable):
        if name in memo:
            return memo[name]
        key = f"{kind}:{name}"
        if key in self._resolving:
            raise ConfigError(f"Circular reference through {kind} '{name}'")
        self._resolving.add(key)
        try:
            memo[name] = build(name)
        finally:
            self._resolving.discard(key)
        return memo[name]

    def system(self, name: str) -> InclusionSystem:
        return self._resolve('system', name, self._systems, self._build_system)

    def unit(self, name: str) -> GridUnit:
        return self._resolve('unit', name, self._units, self._build_unit)

    def morphism(self, name: str) -> MorphismFamily:
        return self._resolve('morphism', name, self._morphisms, self._build_morphism)

    def _semigroup(self, spec) -> CpSemigroup:
        if spec.kind == 'powers':
            return powers_corner(
                decode_matrix(spec.h_phi),
                decode_matrix(spec.a),
                decode_matrix(spec.h_psi),
                decode_matrix(spec.b),
                horizon=self.validation_horizon,
                depth=self.validation_depth,
                tol=self.tol,
            )
        if spec.preset == 'tt':
            return example_tt(spec.alpha)
        if spec.preset == 'identity':
            return identity_semigroup(spec.dim_h)
        return CpSemigroup(spec.dim_h, decode_matrix(spec.generator), name=spec.name)

    def _build_system(self, name: str) -> InclusionSystem:
        spec = next(s for s in self.config.systems if s.name == name)
        if spec.kind in ('trivial', 'example2'):
            sys = get_inclusion_system(spec.kind, name=name)
        elif spec.kind in ('cp', 'powers'):
            sys = from_cp(self._semigroup(spec), self.tol, self.cache, name)
        else:
            sys = amalgamate_systems(
                self.system(spec.e), self.system(spec.f), self.morphism(spec.morphism), self.tol, name
            )
        if spec.beta_scale is not None:
            sys = ScaledSystem(sys, spec.beta_scale, name=name)
        logger.debug(f"Built system {name} ({spec.kind})")
        return sys

    def _build_unit(self, name: str) -> GridUnit:
        spec = next(u for u in self.config.units if u.name == name)
        horizon = to_time(spec.horizon) if spec.horizon else self.horizon
        depth = self.unit_depth
        if spec.kind == 'exponential':
            return exponential_unit(decode_scalar(spec.a), horizon, depth, label=name)
        if spec.kind == 'example2':
            return example2_unit(decode_scalar(spec.a), decode_scalar(spec.b), horizon, depth, label=name)
        if spec.kind == 'intertwiner':
            return intertwiner_unit(self.system(spec.system), decode_matrix(spec.generator), horizon, depth, label=name)
        if spec.kind == 'seeds':
            return seeds_unit([decode_vector(s) for s in spec.seeds], horizon, label=name)
        g = self.system(spec.system)
        if spec.kind == 'embed_left':
            unit = embed_unit_left(g, self.unit(spec.unit))
        elif spec.kind == 'embed_right':
            unit = embed_unit_right(g, self.unit(spec.unit))
        else:
            unit = compose_unit(g, self.unit(spec.left), self.unit(spec.right))
        return unit.model_copy(update={'label': name})

    def _unit_system(self, unit_name: str) -> InclusionSystem:
        spec = next(u for u in self.config.units if u.name == unit_name)
        return self.system(spec.system)

    def _build_morphism(self, name: str) -> MorphismFamily:
        spec = next(m for m in self.config.morphisms if m.name == name)
        if spec.kind == 'identity':
            family = identity_morphism(self.system(spec.system))
        elif spec.kind == 'zero':
            source, target = self.system(spec.source), self.system(spec.target)
            family = MorphismFamily(a=lambda t: np.zeros((target.dim(t), source.dim(t))), growth_bound=0.0)
        elif spec.kind == 'scaled':
            family = scaled_morphism(self.morphism(spec.base), decode_scalar(spec.factor), spec.growth_bound)
        elif spec.kind == 'rank_one':
            family = rank_one_morphism(
                self.unit(spec.u0),
                self.unit(spec.v0),
                self.tol,
                e=self._unit_system(spec.u0),
                f=self._unit_system(spec.v0),
            )
        elif spec.kind == 'embed_left':
            family = left_embedding(self.system(spec.system))
        elif spec.kind == 'embed_right':
            family = right_embedding(self.system(spec.system))
        else:
            family = self.morphism(spec.base).adjoint()
        return family.model_copy(update={'name': name})

    def _report(self, command: str) -> Report:
        return Report(command=command, config_name=self.config.name, config_digest=self.digest)

    def _guarded(self, report: Report, operation: str, run: Callable[[], CheckReport]):
        try:
            report.checks.append(_entry(run()))
        except ProdsysError as e:
            logger.error(f"{operation} failed: {e}")
            report.errors.append(f"{operation}: {e}")

    def cmd_check(self) -> Report:
        """Axiom, unit, morphism and correspondence checks."""
        report = self._report('check')
        checks = self.config.checks
        if checks is None:
            raise ConfigError("The check command needs a 'checks' section")
        times = [to_time(p) for p in checks.times] or self.probe_times
        for name in checks.axioms:
            self._guarded(report, 'inclusion.check_axioms', lambda: check_axioms(self.system(name), times, self.tol))
        for name in checks.units:
            self._guarded(
                report, 'inclusion.check_unit', lambda: check_unit(self._unit_system(name), self.unit(name), self.tol)
            )
        for name in checks.strong_units:
            self._guarded(
                report,
                'inclusion.check_strong_unit',
                lambda: check_strong_unit(self._unit_system(name), self.unit(name), self.tol),
            )
        for mc in checks.weak_morphisms:
            self._guarded(
                report,
                'inclusion.check_weak_morphism',
                lambda: check_weak_morphism(self.system(mc.e), self.system(mc.f), self.morphism(mc.morphism), times, self.tol),
            )
        for mc in checks.strong_morphisms:
            self._guarded(
                report,
                'inclusion.check_strong_morphism',
                lambda: check_strong_morphism(
                    self.system(mc.e), self.system(mc.f), self.morphism(mc.morphism), times, self.tol
                ),
            )
        for ms in checks.match:
            self._guarded(report, 'inclusion.match_discrepancy', lambda: self._match_example2_tt(ms.a, ms.b, times))
        return report.finalize()

    def _match_example2_tt(self, a: str, b: str, times: List[DyadicTime]) -> CheckReport:
        spec = next(s for s in self.config.systems if s.name == b)
        ex2, tt = self.system(a), self.system(b)
        return match_discrepancy(ex2, standard_frame(ex2), tt, tt_frame(tt, spec.alpha), times, self.tol)

    def cmd_index(self) -> Report:
        """Covariance kernel, centered spectrum, index estimate and prediction."""
        report = self._report('index')
        spec = self.config.index
        if spec is None:
            raise ConfigError("The index command needs an 'index' section")
        try:
            sys = self.system(spec.system)
            units = [self.unit(name) for name in spec.units]
            kernel = cov_kernel(
                sys,
                units,
                self.probe_times,
                self.tol,
                max_depth=self.max_depth,
                conv_tol=self.conv_tol,
                min_levels=self.min_levels,
            )
        except ProdsysError as e:
            logger.error(f"index_theory.cov_kernel failed: {e}")
            report.errors.append(f"index_theory.cov_kernel: {e}")
            return report.finalize()
        report.covariance = {
            'labels': kernel.labels,
            'gamma': kernel.gamma,
            'accuracy': kernel.accuracy,
            'probe_times': [t.to_pair() for t in self.probe_times],
        }
        for i, row in enumerate(kernel.results):
            for j, runs in enumerate(row):
                for run in runs:
                    report.histories[f"{kernel.labels[i]},{kernel.labels[j]}@{run.t}"] = run.residual_history
        estimate = index_estimate(kernel, self.tol)
        report.index = {
            'estimate': estimate,
            'reference': kernel.labels[0] if kernel.labels else None,
            'centered_spectrum': centered_spectrum(kernel, kernel.labels[0]) if kernel.labels else [],
        }
        match = True
        if spec.expected is not None:
            report.index['expected'] = spec.expected
            match = match and estimate == spec.expected
        if spec.prediction is not None:
            try:
                predicted, p = self._predict(spec.prediction)
            except ProdsysError as e:
                logger.error(f"index_theory.predicted_amalgam_index failed: {e}")
                report.errors.append(f"index_theory.predicted_amalgam_index: {e}")
                return report.finalize()
            report.index.update({'prediction': predicted, 'p': p})
            match = match and estimate == predicted
        report.index['match'] = match
        return report.finalize()

    def _predict(self, p) -> tuple:
        kwargs = dict(max_depth=self.max_depth, conv_tol=self.conv_tol, min_levels=self.min_levels)
        u0, v0 = self.unit(p.u0), self.unit(p.v0)
        gamma_u0 = covariance(self.system(p.e), u0, u0, self.probe_times, self.tol, **kwargs)
        gamma_v0 = covariance(self.system(p.f), v0, v0, self.probe_times, self.tol, **kwargs)
        defect = defect_p(gamma_u0, gamma_v0, self.tol)
        return predicted_amalgam_index(p.ind_e, p.ind_f, defect, self.tol), defect

    def cmd_powers(self) -> Report:
        """Compare the GNS system of the Powers semigroup with the amalgamated product."""
        report = self._report('powers')
        spec = self.config.powers
        if spec is None:
            raise ConfigError("The powers command needs a 'powers' section")
        times = sorted({to_time(p) for p in spec.times})
        try:
            sg = powers_corner(
                decode_matrix(spec.h_phi),
                decode_matrix(spec.a),
                decode_matrix(spec.h_psi),
                decode_matrix(spec.b),
                horizon=self.validation_horizon,
                depth=self.validation_depth,
                tol=self.tol,
            )
        except ProdsysError as e:
            logger.error(f"cp_semigroup.powers_corner rejected the data: {e}")
            report.errors.append(f"cp_semigroup.powers_corner: {e}")
            return report.finalize()
        data = sg.powers
        tau = from_cp(sg, self.tol, self.cache, name='tau')
        e_sys = from_cp(data.phi(), self.tol, self.cache, name='E')
        f_sys = from_cp(data.psi(), self.tol, self.cache, name='F')
        horizon = times[-1]
        try:
            u0, v0 = powers_units(e_sys, f_sys, data, horizon, _common_depth(horizon, times))
            d = rank_one_morphism(u0, v0, self.tol, e=e_sys, f=f_sys)
            g = amalgamate_systems(e_sys, f_sys, d, self.tol, name='G')
        except ProdsysError as e:
            logger.error(f"inclusion.amalgamate_systems failed: {e}")
            report.errors.append(f"inclusion.amalgamate_systems: {e}")
            return report.finalize()
        tau_frame, g_frame = powers_frames(tau, g, self.tol)
        self._guarded(report, 'inclusion.check_axioms', lambda: check_axioms(tau, times, self.tol))
        self._guarded(report, 'inclusion.check_axioms', lambda: check_axioms(g, times, self.tol))
        self._guarded(
            report, 'inclusion.match_discrepancy', lambda: match_discrepancy(tau, tau_frame, g, g_frame, times, self.tol)
        )
        discrepancy = [c for c in report.checks if c.operation == 'inclusion.match_discrepancy']
        report.powers = {
            'dims': {str(t): [tau.dim(t), g.dim(t)] for t in times},
            'max_discrepancy': max(max(c.residuals.values()) for c in discrepancy) if discrepancy else None,
            'times': [t.to_pair() for t in times],
        }
        return report.finalize()

    def run(self, command: str) -> Report:
        commands = {'check': self.cmd_check, 'index': self.cmd_index, 'powers': self.cmd_powers}
        if command not in commands:
            raise ValueError(f"Unsupported command: {command}")
        return commands[command]()
