"""Morphism families between inclusion systems."""
import logging
from typing import Any, Callable, FrozenSet, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..dyadic import DyadicTime

logger = logging.getLogger(__name__)


class MorphismFamily(BaseModel):
    """Family A_t with ||A_t|| <= exp(t * growth_bound).

    When support is set the family is only defined at those times.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: Callable[[DyadicTime], Any]
    growth_bound: float = 0.0
    support: Optional[FrozenSet[DyadicTime]] = None
    name: str = "A"

    def defined_at(self, t: DyadicTime) -> bool:
        return self.support is None or t in self.support

    def __call__(self, t: DyadicTime) -> np.ndarray:
        if not self.defined_at(t):
            raise ValueError(f"Morphism {self.name} is not defined at t={t}")
        return np.asarray(self.a(t), dtype=np.complex128)

    def adjoint(self) -> "MorphismFamily":
        """The family A_t*; adjoints of weak morphisms are weak morphisms."""
        base = self
        return MorphismFamily(
            a=lambda t: base(t).conj().T,
            growth_bound=self.growth_bound,
            support=self.support,
            name=f"{self.name}*",
        )


def identity_morphism(sys) -> MorphismFamily:
    return MorphismFamily(a=lambda t: np.eye(sys.dim(t)), growth_bound=0.0, name=f"id_{sys.name}")


def scaled_morphism(a: MorphismFamily, factor: complex, growth_bound: float) -> MorphismFamily:
    return MorphismFamily(
        a=lambda t: factor * a(t), growth_bound=growth_bound, support=a.support, name=f"{factor}*{a.name}"
    )


def left_embedding(g) -> MorphismFamily:
    """Strong morphism E -> G, u -> [u; 0]."""
    return MorphismFamily(
        a=lambda t: g.space(t).embed_left, growth_bound=0.0, support=g.morphism.support, name=f"{g.name}.left"
    )


def right_embedding(g) -> MorphismFamily:
    """Strong morphism F -> G, v -> [0; v]."""
    return MorphismFamily(
        a=lambda t: g.space(t).embed_right, growth_bound=0.0, support=g.morphism.support, name=f"{g.name}.right"
    )
