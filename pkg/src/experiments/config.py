"""Experiment configuration schema (JSON)."""
import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError, field_validator, model_validator

from ..dyadic import DyadicTime
from ..errors import ConfigError

logger = logging.getLogger(__name__)

Number = Union[float, Tuple[float, float]]
Vector = List[Number]
Matrix = List[List[Number]]
Pair = Tuple[int, int]


def decode_scalar(value: Number) -> complex:
    """A real number or an [re, im] pair."""
    if isinstance(value, (tuple, list)):
        return complex(value[0], value[1])
    return complex(value)


def decode_vector(values: Vector) -> np.ndarray:
    return np.array([decode_scalar(v) for v in values], dtype=np.complex128)


def decode_matrix(rows: Matrix) -> np.ndarray:
    return np.array([[decode_scalar(v) for v in row] for row in rows], dtype=np.complex128).reshape(len(rows), -1)


def to_time(pair: Pair) -> DyadicTime:
    return DyadicTime.from_pair(pair)


def _rectangular(rows: Optional[Matrix], field: str) -> Optional[Matrix]:
    if rows is not None:
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise ValueError(f"{field} is not rectangular (row lengths {sorted(widths)})")
    return rows


class SystemSpec(BaseModel):
    """An inclusion system; kind selects which fields are used."""
    name: str
    kind: Literal['trivial', 'example2', 'cp', 'powers', 'amalgam']
    preset: Optional[Literal['tt', 'identity']] = None
    alpha: float = 1.0
    dim_h: Optional[int] = None
    generator: Optional[Matrix] = None
    h_phi: Optional[Matrix] = None
    a: Optional[Matrix] = None
    h_psi: Optional[Matrix] = None
    b: Optional[Matrix] = None
    e: Optional[str] = None
    f: Optional[str] = None
    morphism: Optional[str] = None
    beta_scale: Optional[float] = None

    @field_validator('generator', 'h_phi', 'a', 'h_psi', 'b')
    @classmethod
    def _matrices(cls, rows, info):
        return _rectangular(rows, info.field_name)

    @model_validator(mode='after')
    def _required(self):
        if self.kind == 'cp' and self.preset is None and (self.generator is None or self.dim_h is None):
            raise ValueError("cp systems need a preset or both dim_h and generator")
        if self.kind == 'cp' and self.preset == 'identity' and self.dim_h is None:
            raise ValueError("the identity preset needs dim_h")
        if self.kind == 'powers' and None in (self.h_phi, self.a, self.h_psi, self.b):
            raise ValueError("powers systems need h_phi, a, h_psi and b")
        if self.kind == 'amalgam' and None in (self.e, self.f, self.morphism):
            raise ValueError("amalgam systems need e, f and morphism")
        return self


class UnitSpec(BaseModel):
    """A grid unit of a named system."""
    name: str
    kind: Literal['exponential', 'example2', 'intertwiner', 'embed_left', 'embed_right', 'compose', 'seeds']
    system: str
    a: Number = 0.0
    b: Number = 0.0
    generator: Optional[Matrix] = None
    unit: Optional[str] = None
    left: Optional[str] = None
    right: Optional[str] = None
    seeds: Optional[List[Vector]] = None
    horizon: Optional[Pair] = None

    @model_validator(mode='after')
    def _required(self):
        if self.kind == 'intertwiner' and self.generator is None:
            raise ValueError("intertwiner units need a generator")
        if self.kind in ('embed_left', 'embed_right') and self.unit is None:
            raise ValueError(f"{self.kind} units need the component unit")
        if self.kind == 'compose' and (self.left is None or self.right is None):
            raise ValueError("compose units need left and right")
        if self.kind == 'seeds' and not self.seeds:
            raise ValueError("seeds units need at least one seed")
        return self


class MorphismSpec(BaseModel):
    """A morphism family; rank_one maps the system of v0 to the system of u0."""
    name: str
    kind: Literal['identity', 'zero', 'scaled', 'rank_one', 'embed_left', 'embed_right', 'adjoint']
    system: Optional[str] = None
    source: Optional[str] = None
    target: Optional[str] = None
    base: Optional[str] = None
    factor: Number = 1.0
    growth_bound: float = 0.0
    u0: Optional[str] = None
    v0: Optional[str] = None

    @model_validator(mode='after')
    def _required(self):
        needs = {
            'identity': ('system',),
            'zero': ('source', 'target'),
            'scaled': ('base',),
            'rank_one': ('u0', 'v0'),
            'embed_left': ('system',),
            'embed_right': ('system',),
            'adjoint': ('base',),
        }[self.kind]
        missing = [n for n in needs if getattr(self, n) is None]
        if missing:
            raise ValueError(f"{self.kind} morphisms need {', '.join(missing)}")
        return self


class MorphismCheck(BaseModel):
    e: str
    f: str
    morphism: str


class MatchSpec(BaseModel):
    kind: Literal['example2_tt'] = 'example2_tt'
    a: str
    b: str


class CheckSpec(BaseModel):
    times: List[Pair] = []
    axioms: List[str] = []
    units: List[str] = []
    strong_units: List[str] = []
    weak_morphisms: List[MorphismCheck] = []
    strong_morphisms: List[MorphismCheck] = []
    match: List[MatchSpec] = []


class PredictionSpec(BaseModel):
    """Inputs of the amalgamation index formula."""
    e: str
    f: str
    u0: str
    v0: str
    ind_e: int = 0
    ind_f: int = 0


class IndexSpec(BaseModel):
    system: str
    units: List[str]
    expected: Optional[int] = None
    prediction: Optional[PredictionSpec] = None


class PowersSpec(BaseModel):
    h_phi: Matrix
    a: Matrix
    h_psi: Matrix
    b: Matrix
    times: List[Pair] = [(1, 2), (1, 1), (1, 0)]

    @field_validator('h_phi', 'a', 'h_psi', 'b')
    @classmethod
    def _matrices(cls, rows, info):
        return _rectangular(rows, info.field_name)


class ExperimentConfig(BaseModel):
    """Top-level experiment file."""
    name: str
    horizon: Pair = (1, 0)
    probe_times: List[Pair] = []
    max_depth: Optional[int] = None
    conv_tol: Optional[float] = None
    tolerance: Dict[str, float] = {}
    systems: List[SystemSpec] = []
    units: List[UnitSpec] = []
    morphisms: List[MorphismSpec] = []
    checks: Optional[CheckSpec] = None
    index: Optional[IndexSpec] = None
    powers: Optional[PowersSpec] = None

    @field_validator('horizon', 'probe_times')
    @classmethod
    def _dyadic(cls, value):
        for m, k in ([value] if isinstance(value, tuple) else value):
            if m <= 0 or k < 0:
                raise ValueError(f"dyadic times are [m, k] with m > 0 and k >= 0, got [{m}, {k}]")
        return value

    @model_validator(mode='after')
    def _references(self):
        systems = {s.name for s in self.systems}
        units = {u.name for u in self.units}
        morphisms = {m.name for m in self.morphisms}
        for kind, names in (('system', [s.name for s in self.systems]), ('unit', [u.name for u in self.units]),
                            ('morphism', [m.name for m in self.morphisms])):
            duplicates = sorted({n for n in names if names.count(n) > 1})
            if duplicates:
                raise ValueError(f"duplicate {kind} names: {duplicates}")

        def need(name: Optional[str], pool, what: str, where: str):
            if name is not None and name not in pool:
                raise ValueError(f"{where} references unknown {what} '{name}'")

        for s in self.systems:
            need(s.e, systems, 'system', f"system {s.name}")
            need(s.f, systems, 'system', f"system {s.name}")
            need(s.morphism, morphisms, 'morphism', f"system {s.name}")
        for u in self.units:
            need(u.system, systems, 'system', f"unit {u.name}")
            for ref in (u.unit, u.left, u.right):
                need(ref, units, 'unit', f"unit {u.name}")
        for m in self.morphisms:
            for ref in (m.system, m.source, m.target):
                need(ref, systems, 'system', f"morphism {m.name}")
            need(m.base, morphisms, 'morphism', f"morphism {m.name}")
            need(m.u0, units, 'unit', f"morphism {m.name}")
            need(m.v0, units, 'unit', f"morphism {m.name}")
        if self.checks is not None:
            for name in self.checks.axioms:
                need(name, systems, 'system', "checks.axioms")
            for name in self.checks.units + self.checks.strong_units:
                need(name, units, 'unit', "checks.units")
            for mc in self.checks.weak_morphisms + self.checks.strong_morphisms:
                need(mc.e, systems, 'system', "checks.morphisms")
                need(mc.f, systems, 'system', "checks.morphisms")
                need(mc.morphism, morphisms, 'morphism', "checks.morphisms")
            for ms in self.checks.match:
                need(ms.a, systems, 'system', "checks.match")
                need(ms.b, systems, 'system', "checks.match")
        if self.index is not None:
            need(self.index.system, systems, 'system', "index")
            for name in self.index.units:
                need(name, units, 'unit', "index.units")
            p = self.index.prediction
            if p is not None:
                need(p.e, systems, 'system', "index.prediction")
                need(p.f, systems, 'system', "index.prediction")
                need(p.u0, units, 'unit', "index.prediction")
                need(p.v0, units, 'unit', "index.prediction")
        return self

    def digest(self) -> str:
        payload = json.dumps(self.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


def _field_path(loc) -> str:
    return '.'.join(str(part) for part in loc) or '<root>'


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse and validate an experiment config.

    Raises:
        ConfigError: With line/column for JSON syntax errors and the field path
            for schema errors
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        problems = '; '.join(f"{_field_path(err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"{source}: {problems}") from e


def load_experiment(path: str) -> ExperimentConfig:
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        text = file.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"Failed to read {path}: {e}") from e
    config = parse_config(text, source=str(path))
    logger.info(f"Loaded experiment '{config.name}' from {path}")
    return config
