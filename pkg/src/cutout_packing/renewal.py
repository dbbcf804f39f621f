"""Renewal-theoretic packing constants for self-similar sets on the line.

For an attractor whose first-level pieces are at least ``delta`` apart the
packing function splits as N(eps) = sum_i N(eps / r_i) once eps <= delta.
Above delta the defect

    L(eps) = N(eps) - sum_i N(eps / r_i)        (N = 0 beyond the diameter)

is a step function, and with Z(a) = exp(-a d) N(exp(-a)) the renewal equation
Z = z + Z * mu has forcing z(a) = exp(-a d) L(exp(-a)).  For non-lattice
ratios Z(a) tends to (integral of z) / sum r_i**d log(1/r_i).

Jumps of N on (delta, 1] are located by bisection with exact rational
arithmetic when the system is rational; each jump is kept as a bracket and
the constant is reported with the interval those brackets imply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ._numerics import simplest_between
from .constants import is_dependent, moran_dimension, renewal_mean
from .errors import DependentSystem, InputError, SandwichNotClosed
from .geometry import SelfSimilarSystem
from .packing import pack_exact_attractor

DEFAULT_RESOLUTION = 1e-12


def metric_separation(system: SelfSimilarSystem):
    """Distance between consecutive first-level images: the smallest gap."""
    return min(system.gaps)


class CountFunction:
    """Memoized N(A, eps) using the self-similar recursion below the separation."""

    def __init__(self, system: SelfSimilarSystem, max_depth: int = 24):
        self.system = system
        self.max_depth = max_depth
        self.delta = metric_separation(system)
        self.cache: dict = {}

    def _key(self, eps):
        if self.system.exact:
            return Fraction(eps)
        return float(f"{float(eps):.13g}")

    def __call__(self, eps) -> int:
        key = self._key(eps)
        if key > 1:
            return 0
        if key <= 0:
            raise InputError("eps must be positive")
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if key <= self.delta:
            value = sum(self(key / r) for r in self.system.ratios)
        else:
            value = pack_exact_attractor(self.system, key, self.max_depth, floor=0.0).count
        self.cache[key] = value
        return value


def count_function(system: SelfSimilarSystem, eps, max_depth: int = 24, counter: CountFunction | None = None) -> int:
    """N(A, eps) for eps in (0, 1]."""
    if not 0 < eps <= 1:
        raise InputError("count_function needs eps in (0, 1]")
    counter = counter or CountFunction(system, max_depth)
    return counter(eps)


@dataclass
class Jump:
    """N(A, .) drops below ``count`` somewhere in [lo, hi); ``value`` is the best estimate."""

    count: int
    lo: object
    hi: object
    value: object


def _robust_count(counter: CountFunction, eps, lo, hi):
    """Count at eps, nudging eps inside (lo, hi) if the sandwich stays open."""
    for attempt in range(8):
        try:
            return eps, counter(eps)
        except SandwichNotClosed:
            shift = (hi - lo) * (attempt + 1) / 37
            eps = lo + (eps - lo + shift) % (hi - lo)
    return eps, counter(eps)


def jump_scan(system: SelfSimilarSystem, lo, hi, resolution: float = DEFAULT_RESOLUTION,
              counter: CountFunction | None = None) -> tuple[list[Jump], list[tuple]]:
    """Locate every jump of N(A, .) on (lo, hi].

    Returns (jumps, pieces) where pieces are (eps_lo, eps_hi, count) with
    N = count on (eps_lo, eps_hi], resolved up to the jump brackets.
    """
    counter = counter or CountFunction(system)
    exact = system.exact
    lo = Fraction(lo) if exact else float(lo)
    hi = Fraction(hi) if exact else float(hi)
    if not 0 < lo < hi:
        raise InputError("jump_scan needs 0 < lo < hi")
    res = Fraction(resolution) if exact else resolution
    left = lo + res / 2
    left, n_left = _robust_count(counter, left, lo, lo + res)
    n_right = counter(hi)
    # jumps sitting exactly at lo (e.g. N(delta) > N(delta+)) are kept for the table
    jumps: list[Jump] = [Jump(n, lo, left, lo) for n in range(counter(lo), n_left, -1)]
    stack = [(left, hi, n_left, n_right)]
    while stack:
        a, b, na, nb = stack.pop()
        if na == nb:
            continue
        if b - a <= res:
            for n in range(na, nb, -1):
                jumps.append(Jump(n, a, b, a))
            continue
        mid, nm = _robust_count(counter, (a + b) / 2, a, b)
        stack.append((a, mid, na, nm))
        stack.append((mid, b, nm, nb))
    jumps.sort(key=lambda j: (j.lo, -j.count))
    if exact:
        for j in jumps:
            q = simplest_between(j.lo, j.hi)
            if q < j.hi and counter(q) >= j.count:
                j.lo = j.value = q
    pieces = []
    start = lo
    current = n_left
    for j in sorted(jumps, key=lambda j: j.value):
        if j.value <= lo:
            continue
        if j.count <= current and pieces and pieces[-1][1] == j.value:
            continue
        pieces.append((start, j.value, current))
        start = j.value
        current = counter(j.hi)
    pieces.append((start, hi, current))
    pieces = [p for p in pieces if p[1] > p[0]]
    return jumps, pieces


@dataclass
class RenewalProfile:
    system: SelfSimilarSystem
    d: float
    delta: object
    jumps: list
    pieces: list  # (eps_lo, eps_hi, N) on (delta, 1]
    z_pieces: list = field(default_factory=list)  # (a_lo, a_hi, coefficient)
    mu_mean: float = 0.0
    integral: float = 0.0
    integral_radius: float = 0.0
    counter: CountFunction | None = None

    @property
    def constant(self) -> float:
        return self.integral / self.mu_mean

    @property
    def constant_interval(self) -> tuple[float, float]:
        r = self.integral_radius / self.mu_mean
        return self.constant - r, self.constant + r

    def count_on_pieces(self, eps) -> int:
        if eps > 1:
            return 0
        for lo, hi, n in self.pieces:
            if lo < eps <= hi:
                return n
        raise InputError(f"eps={eps!r} outside the scanned range")


def build_profile(system: SelfSimilarSystem, resolution: float = DEFAULT_RESOLUTION,
                  max_depth: int = 24) -> RenewalProfile:
    """Jump scan on (delta, 1] plus the z pieces and the packing constant."""
    counter = CountFunction(system, max_depth)
    delta = counter.delta
    d = moran_dimension(system)
    jumps, pieces = jump_scan(system, delta, 1, resolution, counter)
    profile = RenewalProfile(system, d, delta, jumps, pieces, counter=counter)
    profile.mu_mean = renewal_mean(system, d)
    z_function(profile)
    return profile


def _defect(profile: RenewalProfile, eps) -> int:
    return profile.count_on_pieces(eps) - sum(
        profile.count_on_pieces(eps / r) for r in profile.system.ratios
    )


def z_function(profile: RenewalProfile) -> list:
    """z(a) = c exp(-a d) on pieces; also fills the integral and its radius."""
    system, d, delta = profile.system, profile.d, profile.delta
    marks = {delta: (delta, delta), 1: (1, 1)}
    sources = [(j.value, j.lo, j.hi) for j in profile.jumps if j.value > delta] + [(1, 1, 1)]
    for value, lo, hi in sources:
        for scale in (1,) + tuple(system.ratios):
            x = value * scale
            if delta < x <= 1:
                old_lo, old_hi = marks.get(x, (x, x))
                marks[x] = (min(old_lo, lo * scale), max(old_hi, hi * scale))
    points = sorted(marks)
    z_pieces, parts, radius = [], [], 0.0
    coeffs = []
    for e1, e2 in zip(points, points[1:]):
        c = _defect(profile, (e1 + e2) / 2)
        coeffs.append(c)
        z_pieces.append((-math.log(float(e2)), -math.log(float(e1)), c))
        parts.append(c * (float(e2) ** d - float(e1) ** d) / d)
    for idx, x in enumerate(points):
        lo, hi = marks[x]
        if lo == hi:
            continue
        left = coeffs[idx - 1] if idx > 0 else 0
        right = coeffs[idx] if idx < len(coeffs) else 0
        radius += (abs(left) + abs(right)) * abs(float(hi) ** d - float(lo) ** d) / d
    profile.z_pieces = z_pieces
    profile.integral = math.fsum(parts)
    profile.integral_radius = radius
    return z_pieces


def z_value(profile: RenewalProfile, a: float) -> float:
    for a1, a2, c in profile.z_pieces:
        if a1 <= a < a2:
            return c * math.exp(-a * profile.d)
    return 0.0


def packing_constant(profile: RenewalProfile) -> float:
    """(integral of z) / sum r_i**d log(1/r_i)."""
    if is_dependent(profile.system):
        raise DependentSystem("lattice case: the packing limit need not exist")
    return profile.constant


def Z_value(profile: RenewalProfile, a: float) -> float:
    """Z(a) = exp(-a d) N(A, exp(-a))."""
    eps = math.exp(-a)
    if profile.system.exact:
        eps = Fraction(eps)
    return math.exp(-a * profile.d) * profile.counter(eps)
