from fractions import Fraction

from src.dyadic import DyadicTime
from src.inclusion import amalgamate_systems, exponential_unit, rank_one_morphism, trivial_system
from src.linalg_core import Tolerance

ONE = DyadicTime.of(1)
HALF = DyadicTime.of(1, 1)
QUARTER = DyadicTime.of(1, 2)
GRID = [QUARTER, HALF, ONE]


def scalar_amalgam(lam: float, mu: float, depth: int = 10, tol: Tolerance = Tolerance()):
    """Trivial E and F amalgamated through D_t = exp(-(lam + mu) t)."""
    e, f = trivial_system("E"), trivial_system("F")
    u0 = exponential_unit(-lam, ONE, depth, label="u0")
    v0 = exponential_unit(-mu, ONE, depth, label="v0")
    d = rank_one_morphism(u0, v0, tol, e=e, f=f)
    g = amalgamate_systems(e, f, d, tol, name="G")
    return e, f, g, u0, v0


def exact_rank(rows) -> int:
    """Rank over the rationals by Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                factor = m[r][c] / m[rank][c]
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank
