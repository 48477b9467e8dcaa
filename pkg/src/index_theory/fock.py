"""Exponential units of symmetric Fock systems and their automorphisms.

A unit t -> exp(q t) e(x 1_[0,t]) is stored as the pair (q, x); its covariance
with (q', x') is conj(q) + q' + <x, x'>.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..errors import LinalgError
from ..linalg_core import Tolerance, as_matrix, as_vector, isometry_residual, numerical_rank
from .kernel import CovKernel

logger = logging.getLogger(__name__)


class ExpUnit(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    q: complex
    x: np.ndarray

    @field_validator("q", mode="before")
    @classmethod
    def _scalar(cls, q):
        return complex(q)

    @field_validator("x", mode="before")
    @classmethod
    def _vector(cls, x):
        return as_vector(x, "x")


class Automorphism(BaseModel):
    """Gauge automorphism [q, z, U] of the Fock system with U unitary."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    q: float
    z: np.ndarray
    u: np.ndarray

    @field_validator("z", mode="before")
    @classmethod
    def _vector(cls, z):
        return as_vector(z, "z")

    @field_validator("u", mode="before")
    @classmethod
    def _matrix(cls, u):
        return as_matrix(u, "u")

    @model_validator(mode="after")
    def _unitary(self):
        n = self.z.size
        if self.u.shape != (n, n):
            raise ValueError(f"U must be {n}x{n}, got {self.u.shape}")
        residual = isometry_residual(self.u)
        if residual > Tolerance().check_eps:
            raise ValueError(f"U is not unitary (residual {residual:.3e})")
        return self

    @classmethod
    def identity(cls, dim: int) -> "Automorphism":
        return cls(q=0.0, z=np.zeros(dim), u=np.eye(dim))


def exp_cov(a: ExpUnit, b: ExpUnit) -> complex:
    if a.x.size != b.x.size:
        raise LinalgError(f"Exponential units live in different spaces ({a.x.size} vs {b.x.size})")
    return complex(np.conj(a.q) + b.q + np.vdot(a.x, b.x))


def exp_kernel(units: Sequence[ExpUnit], labels: Optional[List[str]] = None) -> CovKernel:
    """Closed-form covariance kernel of exponential units."""
    labels = labels or [f"e{i}" for i in range(len(units))]
    gamma = np.array([[exp_cov(a, b) for b in units] for a in units], dtype=np.complex128).reshape(
        len(units), len(units)
    )
    return CovKernel(labels=labels, gamma=gamma, accuracy=0.0)


def fock_generated_index(a_set: Sequence, tol: Tolerance = Tolerance()) -> int:
    """dim span(A - x0) for the first element x0 of A."""
    vectors = [as_vector(x, "x") for x in a_set]
    if not vectors:
        raise ValueError("fock_generated_index needs a nonempty set")
    base = vectors[0]
    diffs = np.column_stack([x - base for x in vectors]) if len(vectors) > 1 else np.zeros((base.size, 0))
    if diffs.size == 0:
        return 0
    return numerical_rank(diffs.conj().T @ diffs, tol)


def apply_automorphism(phi: Automorphism, u: ExpUnit) -> ExpUnit:
    """Image of (q, x): (q - i q_phi - ||z||^2/2 - <z, U x>, z + U x)."""
    if u.x.size != phi.z.size:
        raise LinalgError(f"Automorphism acts on C^{phi.z.size}, unit lives in C^{u.x.size}")
    ux = phi.u @ u.x
    q = u.q - 1j * phi.q - np.vdot(phi.z, phi.z).real / 2 - np.vdot(phi.z, ux)
    return ExpUnit(q=complex(q), x=phi.z + ux)


def adjoint(phi: Automorphism) -> Automorphism:
    """[-q, -U* z, U*]."""
    u_star = phi.u.conj().T
    return Automorphism(q=-phi.q, z=-(u_star @ phi.z), u=u_star)
