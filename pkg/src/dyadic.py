"""Dyadic rational times m * 2**-k with exact arithmetic."""
from fractions import Fraction
from functools import total_ordering
from typing import List, Sequence

from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveInt, model_validator


@total_ordering
class DyadicTime(BaseModel):
    """Positive dyadic time m / 2**k kept in canonical form (m odd or k == 0)."""

    model_config = ConfigDict(frozen=True)

    m: PositiveInt
    k: NonNegativeInt = 0

    @model_validator(mode="before")
    @classmethod
    def _canonical(cls, data):
        if isinstance(data, dict) and "m" in data:
            m = int(data["m"])
            k = int(data.get("k", 0))
            while k > 0 and m > 0 and m % 2 == 0:
                m //= 2
                k -= 1
            return {"m": m, "k": k}
        return data

    @classmethod
    def of(cls, m: int, k: int = 0) -> "DyadicTime":
        return cls(m=m, k=k)

    @classmethod
    def from_pair(cls, pair: Sequence[int]) -> "DyadicTime":
        """Parse the ``[m, k]`` wire form."""
        if len(pair) != 2:
            raise ValueError(f"Dyadic time must be an [m, k] pair, got {list(pair)}")
        return cls(m=int(pair[0]), k=int(pair[1]))

    @classmethod
    def from_fraction(cls, value: Fraction) -> "DyadicTime":
        den = value.denominator
        k = den.bit_length() - 1
        if value <= 0 or den != 1 << k:
            raise ValueError(f"{value} is not a positive dyadic rational")
        return cls(m=value.numerator, k=k)

    def to_pair(self) -> List[int]:
        return [self.m, self.k]

    def as_fraction(self) -> Fraction:
        return Fraction(self.m, 1 << self.k)

    def __float__(self) -> float:
        return self.m / (1 << self.k)

    def __add__(self, other: "DyadicTime") -> "DyadicTime":
        k = max(self.k, other.k)
        m = (self.m << (k - self.k)) + (other.m << (k - other.k))
        return DyadicTime(m=m, k=k)

    def halve(self, times: int = 1) -> "DyadicTime":
        return DyadicTime(m=self.m, k=self.k + times)

    def double(self) -> "DyadicTime":
        return self + self

    def level_of(self, finer: "DyadicTime") -> int:
        """Return j with finer == self / 2**j, or -1 when no such j exists."""
        ratio = self.as_fraction() / finer.as_fraction()
        if ratio.denominator != 1:
            return -1
        n = ratio.numerator
        if n & (n - 1):
            return -1
        return n.bit_length() - 1

    def __lt__(self, other: "DyadicTime") -> bool:
        return self.as_fraction() < other.as_fraction()

    def __str__(self) -> str:
        return f"{self.m}/2^{self.k}" if self.k else str(self.m)


def dyadic_grid(horizon: DyadicTime, depth: int) -> List[DyadicTime]:
    """Times horizon / 2**j for j = 0..depth."""
    return [horizon.halve(j) for j in range(depth + 1)]
