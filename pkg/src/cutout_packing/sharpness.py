"""Two sets showing the limit theorems are sharp.

* T, the attractor of x/2 and x/3 + 2/3: its packing constant is strictly
  smaller than p_t times its Minkowski content.
* S, the rearranged middle-third Cantor set: eps**s N(S, eps) oscillates,
  following L(a) along eps = a 3**-n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .constants import L_of_a, content_selfsimilar, moran_dimension, p_const
from .descriptors import HALF_THIRD, TERNARY_REARRANGED, build
from .geometry import CutOutSet
from .packing import pack_cutout
from .renewal import RenewalProfile, build_profile

CANTOR_DIM = math.log(2) / math.log(3)


@dataclass
class HalfThirdReport:
    t: float
    moran_residual: float
    counts: dict  # j -> N(T, 1/j)
    profile: RenewalProfile
    delta6: tuple  # (lo, hi) bracket for delta(T, 6)
    case: int
    content: float
    p_t: float

    @property
    def constant_interval(self) -> tuple[float, float]:
        return self.profile.constant_interval

    @property
    def content_bound(self) -> float:
        return self.p_t * self.content

    @property
    def verdict(self) -> bool:
        return self.constant_interval[1] < self.content_bound


def half_third_report(resolution: float = 1e-12) -> HalfThirdReport:
    system = build(HALF_THIRD)
    t = moran_dimension(system)
    profile = build_profile(system, resolution)
    counts = {j: profile.counter(Fraction(1, j)) for j in range(1, 7)}
    jump = next(j for j in profile.jumps if j.count == 6)
    case = 1 if jump.value == profile.delta else 2
    return HalfThirdReport(
        t, abs(2**-t + 3**-t - 1), counts, profile, (jump.lo, jump.hi), case,
        content_selfsimilar(system), p_const(t),
    )


def first_piece_integral(t: float) -> float:
    """Integral of 2 e^{-xt} over [0, log 2] plus e^{-xt} over [log 2, log 3]; equals 1/t."""
    return (2 * (1 - 2**-t) + (2**-t - 3**-t)) / t


def cantor_a_grid(points: int = 48) -> list[Fraction]:
    return [1 + Fraction(2 * i, points) for i in range(1, points + 1)]


@dataclass
class CantorReport:
    rows: list  # (a, n, eps, N, normalized)
    formula: dict  # a -> L(a)

    @property
    def empirical_min(self) -> float:
        return min(r[4] for r in self.rows)

    @property
    def empirical_max(self) -> float:
        return max(r[4] for r in self.rows)

    @property
    def formula_min(self) -> float:
        return min(self.formula.values())

    @property
    def formula_max(self) -> float:
        return max(self.formula.values())


def cantor_report(levels=range(7, 13), points: int = 48) -> CantorReport:
    """eps**s N(S, eps) at eps = a 3**-n over the a-grid, next to L(a)."""
    cut = CutOutSet(build(TERNARY_REARRANGED))
    grid = cantor_a_grid(points)
    rows = []
    for n in levels:
        for a in grid:
            eps = a / 3**n
            res = pack_cutout(cut, eps, CANTOR_DIM)
            rows.append((a, n, eps, res.count, res.normalized))
    return CantorReport(rows, {a: L_of_a(a) for a in grid})


def cantor_peak(n: int) -> float:
    """eps**s N(S, eps) at eps = 3**(1-n), which tends to L(3) = 2."""
    cut = CutOutSet(build(TERNARY_REARRANGED))
    return pack_cutout(cut, Fraction(1, 3 ** (n - 1)), CANTOR_DIM).normalized
