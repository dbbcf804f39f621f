"""Gap-length sequences (l_j) and the combinatorial functions built on them.

A gap sequence is non-increasing, positive and summable.  Three closed-form
models are provided plus an explicit list:

* ``PowerLaw``        l_j = L * j**(-1/d)
* ``BlockGeometric``  l_j = b * rho**k  for m**(k-1) <= j <= m**k - 1
* ``Explicit``        a finite list with a leftover tail mass
* ``FromSystem``      gaps of a self-similar attractor, enumerated lazily

Exact rational arithmetic is used whenever the model parameters are
``Fraction``/``int``; otherwise everything is double precision.  Power-law
tails are evaluated with a rigorous two-sided bracket, and every comparison
against an epsilon that the bracket cannot decide raises ``Indeterminate``
rather than returning a possibly wrong integer.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._numerics import _ULP, is_exact, neumaier_prefix, power_tail
from .errors import EpsilonTooLarge, Indeterminate, IndexBeyondExplicit, InputError

EXPLICIT_WINDOW = 4096
EXPLICIT_REFINE_CAP = 10**7


class GapSequence:
    """Base class; subclasses implement ``length``, ``tail_bracket`` and friends."""

    exact = False
    size: int | None = None  # number of indexable terms, None when infinite

    # -- required by subclasses -------------------------------------------
    def length(self, j: int):
        raise NotImplementedError

    def tail_bracket(self, n: int):
        """(lo, hi) enclosing the tail sum from index n on."""
        raise NotImplementedError

    # -- shared behaviour -------------------------------------------------
    def _check_index(self, j: int) -> None:
        if j < 1:
            raise InputError(f"index must be >= 1, got {j}")
        if self.size is not None and j > self.size:
            raise IndexBeyondExplicit(f"index {j} beyond {self.size} stored gaps")

    def tail_sum(self, n: int):
        lo, hi = self.tail_bracket(n)
        return lo if lo == hi else (lo + hi) / 2

    @property
    def total(self):
        return self.tail_sum(1)

    def lengths(self, start: int, stop: int):
        """l_start .. l_{stop-1} as a list."""
        return [self.length(j) for j in range(start, stop)]

    def window_sum(self, n: int, k: int):
        """p(n, k) = l_n + ... + l_{n+k-1}."""
        if n < 1 or k < 1:
            raise InputError("window needs n >= 1 and k >= 1")
        self._check_index(n + k - 1)
        if self.exact:
            return sum(self.lengths(n, n + k), Fraction(0))
        if k <= EXPLICIT_WINDOW:
            return math.fsum(self.lengths(n, n + k))
        return self._window_estimate(n, k)[0]

    def _window_estimate(self, n: int, k: int):
        lo_a, hi_a = self.tail_bracket(n)
        lo_b, hi_b = self.tail_bracket(n + k)
        est = (lo_a + hi_a) / 2 - (lo_b + hi_b) / 2
        err = (hi_a - lo_a) / 2 + (hi_b - lo_b) / 2 + 4 * _ULP * (hi_a + hi_b)
        return est, err

    def window_at_least(self, n: int, k: int, eps) -> bool:
        """Decide p(n, k) >= eps, refusing to guess on a knife edge."""
        if self.exact or k <= EXPLICIT_WINDOW:
            return self.window_sum(n, k) >= eps
        self._check_index(n + k - 1)
        est, err = self._window_estimate(n, k)
        if est - err >= eps:
            return True
        if est + err < eps:
            return False
        if k <= EXPLICIT_REFINE_CAP:
            return self._chunked_sum(n, k) >= eps
        raise Indeterminate(f"p({n},{k}) too close to eps={eps!r} to decide")

    def _chunked_sum(self, n: int, k: int) -> float:
        parts = []
        for start in range(n, n + k, 1 << 20):
            stop = min(n + k, start + (1 << 20))
            parts.append(math.fsum(self.lengths(start, stop)))
        return math.fsum(parts)

    def tail_at_most(self, n: int, eps) -> bool:
        """Decide tail_sum(n) <= eps."""
        lo, hi = self.tail_bracket(n)
        if hi <= eps:
            return True
        if lo > eps:
            return False
        raise Indeterminate(f"tail_sum({n}) too close to eps={eps!r} to decide")

    def partial_sum(self, n: int):
        """l_1 + ... + l_n (0 for n = 0)."""
        if n <= 0:
            return Fraction(0) if self.exact else 0.0
        if self.exact or n <= EXPLICIT_WINDOW:
            return self.window_sum(1, n)
        return self.total - self.tail_sum(n + 1)

    def run_end(self, j: int) -> int:
        """Last index i >= j with l_i == l_j (j itself when unknown)."""
        return j


class PowerLaw(GapSequence):
    """l_j = L * j**(-1/d) with 0 < d < 1."""

    def __init__(self, L: float, d: float):
        if not L > 0:
            raise InputError("PowerLaw needs L > 0")
        if not 0 < d < 1:
            raise InputError("PowerLaw needs 0 < d < 1")
        self.L = float(L)
        self.d = float(d)
        self.exponent = 1.0 / self.d

    def __repr__(self):
        return f"PowerLaw(L={self.L!r}, d={self.d!r})"

    def length(self, j: int) -> float:
        self._check_index(j)
        return self.L * float(j) ** -self.exponent

    def lengths(self, start: int, stop: int):
        idx = np.arange(start, stop, dtype=float)
        return list(self.L * idx**-self.exponent)

    def tail_bracket(self, n: int):
        if n < 1:
            raise InputError("tail index must be >= 1")
        value, err = power_tail(self.exponent, n)
        value *= self.L
        err *= self.L
        return max(value - err, 0.0), value + err


class BlockGeometric(GapSequence):
    """l_j = b * rho**k on the block m**(k-1) <= j <= m**k - 1."""

    def __init__(self, rho, m: int, b=1):
        if not 0 < rho < 1:
            raise InputError("BlockGeometric needs 0 < rho < 1")
        if int(m) != m or m < 2:
            raise InputError("BlockGeometric needs an integer m >= 2")
        if not b > 0:
            raise InputError("BlockGeometric needs b > 0")
        if not rho * m < 1:
            raise InputError("BlockGeometric needs rho * m < 1 for a finite total")
        self.exact = is_exact(rho, b)
        if self.exact:
            rho, b = Fraction(rho), Fraction(b)
        else:
            rho, b = float(rho), float(b)
        self.rho = rho
        self.m = int(m)
        self.b = b

    def __repr__(self):
        return f"BlockGeometric(rho={self.rho!r}, m={self.m}, b={self.b!r})"

    def block(self, j: int) -> int:
        """Block index k with m**(k-1) <= j < m**k."""
        if self.m == 2:
            return j.bit_length()
        k, top = 1, self.m
        while top <= j:
            k += 1
            top *= self.m
        return k

    def block_value(self, k: int):
        return self.b * self.rho**k

    def length(self, j: int):
        self._check_index(j)
        return self.block_value(self.block(j))

    def run_end(self, j: int) -> int:
        return self.m ** self.block(j) - 1

    def _after_block(self, k: int):
        """Sum of all blocks strictly after block k."""
        rm = self.rho * self.m
        return self.b * (self.m - 1) / self.m * rm ** (k + 1) / (1 - rm)

    def tail_sum(self, n: int):
        if n < 1:
            raise InputError("tail index must be >= 1")
        k = self.block(n)
        return (self.m**k - n) * self.block_value(k) + self._after_block(k)

    def tail_bracket(self, n: int):
        value = self.tail_sum(n)
        if self.exact:
            return value, value
        slack = 8 * _ULP * value
        return value - slack, value + slack

    def window_sum(self, n: int, k: int):
        if n < 1 or k < 1:
            raise InputError("window needs n >= 1 and k >= 1")
        parts = []
        j, last = n, n + k - 1
        while j <= last:
            end = min(self.run_end(j), last)
            parts.append((end - j + 1) * self.length(j))
            j = end + 1
        return sum(parts, Fraction(0)) if self.exact else math.fsum(parts)

    def window_at_least(self, n: int, k: int, eps) -> bool:
        return self.window_sum(n, k) >= eps

    def tail_at_most(self, n: int, eps) -> bool:
        if self.exact:
            return self.tail_sum(n) <= eps
        return super().tail_at_most(n, eps)


class Explicit(GapSequence):
    """A finite non-increasing list of gaps plus a leftover tail mass."""

    def __init__(self, lengths, tail=0):
        values = list(lengths)
        if not values:
            raise InputError("Explicit sequence needs at least one gap")
        if any(not v > 0 for v in values):
            raise InputError("gap lengths must be positive")
        if any(b > a for a, b in zip(values, values[1:])):
            raise InputError("gap lengths must be non-increasing")
        if tail < 0:
            raise InputError("tail mass must be nonnegative")
        self.exact = is_exact(tail, *values)
        if self.exact:
            values = [Fraction(v) for v in values]
            tail = Fraction(tail)
            prefix = [Fraction(0)]
            for v in values:
                prefix.append(prefix[-1] + v)
            suffix = [tail]
            for v in reversed(values):
                suffix.append(suffix[-1] + v)
        else:
            values = [float(v) for v in values]
            tail = float(tail)
            prefix = neumaier_prefix(values)
            suffix = [tail + s for s in neumaier_prefix(reversed(values))]
        self.values = values
        self.tail = tail
        self.size = len(values)
        self._prefix = prefix
        self._suffix = suffix[::-1]  # _suffix[i] = sum of values[i:] + tail
        self._runs = None

    def __repr__(self):
        return f"Explicit(n={self.size}, tail={self.tail!r})"

    def length(self, j: int):
        self._check_index(j)
        return self.values[j - 1]

    def lengths(self, start: int, stop: int):
        self._check_index(stop - 1)
        return self.values[start - 1 : stop - 1]

    def tail_sum(self, n: int):
        if n < 1:
            raise InputError("tail index must be >= 1")
        return self._suffix[min(n, self.size + 1) - 1]

    def tail_bracket(self, n: int):
        value = self.tail_sum(n)
        if self.exact:
            return value, value
        slack = 4 * _ULP * value
        return value - slack, value + slack

    def tail_at_most(self, n: int, eps) -> bool:
        return self.tail_sum(n) <= eps

    def window_sum(self, n: int, k: int):
        if n < 1 or k < 1:
            raise InputError("window needs n >= 1 and k >= 1")
        self._check_index(n + k - 1)
        if self.exact or k > EXPLICIT_WINDOW:
            return self._prefix[n + k - 1] - self._prefix[n - 1]
        return math.fsum(self.values[n - 1 : n + k - 1])

    def window_at_least(self, n: int, k: int, eps) -> bool:
        return self.window_sum(n, k) >= eps

    def partial_sum(self, n: int):
        self._check_index(max(n, 1))
        return self._prefix[max(n, 0)]

    def run_end(self, j: int) -> int:
        if self._runs is None:
            ends = [0] * self.size
            ends[-1] = self.size
            for i in range(self.size - 2, -1, -1):
                ends[i] = ends[i + 1] if self.values[i] == self.values[i + 1] else i + 1
            self._runs = ends
        self._check_index(j)
        return self._runs[j - 1]


class FromSystem(GapSequence):
    """Gap lengths of a self-similar attractor, sorted non-increasing.

    The gaps are enumerated on demand; the enumeration doubles whenever an
    index past the current horizon is requested.
    """

    def __init__(self, system, initial: int = 1024, cap: int = 1 << 24):
        self.system = system
        self.cap = cap
        self.exact = system.exact
        self._expansion = None
        self._grow(initial)

    def __repr__(self):
        return f"FromSystem({self.system!r})"

    def _grow(self, count: int) -> None:
        from .geometry import gap_multiset

        count = min(max(count, 1), self.cap)
        self._expansion = gap_multiset(self.system, count)

    def _ensure(self, j: int) -> Explicit:
        while j > self._expansion.size:
            if self._expansion.size >= self.cap:
                raise IndexBeyondExplicit(f"gap index {j} beyond enumeration cap {self.cap}")
            self._grow(2 * max(j, self._expansion.size))
        return self._expansion

    def length(self, j: int):
        if j < 1:
            raise InputError("index must be >= 1")
        return self._ensure(j).length(j)

    def lengths(self, start: int, stop: int):
        return self._ensure(stop - 1).lengths(start, stop)

    def tail_sum(self, n: int):
        return self._ensure(n).tail_sum(n)

    def tail_bracket(self, n: int):
        return self._ensure(n).tail_bracket(n)

    def tail_at_most(self, n: int, eps) -> bool:
        return self.tail_sum(n) <= eps

    def window_sum(self, n: int, k: int):
        return self._ensure(n + k - 1).window_sum(n, k)

    def window_at_least(self, n: int, k: int, eps) -> bool:
        return self.window_sum(n, k) >= eps

    def partial_sum(self, n: int):
        return self._ensure(max(n, 1)).partial_sum(n)

    def run_end(self, j: int) -> int:
        return self._ensure(j).run_end(j)


# -- functional API ---------------------------------------------------------


def length(seq: GapSequence, j: int):
    return seq.length(j)


def tail_sum(seq: GapSequence, n: int):
    return seq.tail_sum(n)


def window_sum(seq: GapSequence, n: int, k: int):
    return seq.window_sum(n, k)


def _last_true(pred, lo: int, limit: int | None) -> int:
    """Largest n >= lo with pred(n), given pred(lo) and pred monotone decreasing."""
    hi = lo + 1
    while limit is None or hi <= limit:
        if not pred(hi):
            break
        lo, hi = hi, 2 * hi
    else:
        if pred(limit):
            return limit
        hi = limit
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def last_window_start(seq: GapSequence, k: int, eps) -> int:
    """F(k, eps): the largest n with p(n, k) >= eps."""
    if k < 1:
        raise InputError("window size must be >= 1")
    if not eps > 0:
        raise InputError("eps must be positive")
    limit = None if seq.size is None else seq.size - k + 1
    if limit is not None and limit < 1:
        raise IndexBeyondExplicit(f"no window of {k} gaps in {seq.size} stored gaps")
    if not seq.window_at_least(1, k, eps):
        raise EpsilonTooLarge(f"eps={eps!r} exceeds p(1,{k})")
    return _last_true(lambda n: seq.window_at_least(n, k, eps), 1, limit)


def first_small_tail(seq: GapSequence, eps) -> int:
    """K(eps): the smallest n with tail_sum(n) <= eps."""
    if not eps > 0:
        raise InputError("eps must be positive")
    if seq.tail_at_most(1, eps):
        return 1
    limit = None if seq.size is None else seq.size + 1
    if limit is not None and not seq.tail_at_most(limit, eps):
        raise IndexBeyondExplicit("stored tail mass exceeds eps; horizon unknown")
    return _last_true(lambda n: not seq.tail_at_most(n, eps), 1, limit) + 1


def growth_gauges(eps: float, d: float) -> tuple[int, int]:
    """The (u, v) window-size gauges used by the block constructions.

    u = floor(eps**(d / (2(d-1)))) and v = floor(min(u, eps**(-d/2))).
    """
    eps = float(eps)
    u = math.floor(eps ** (d / (2.0 * (d - 1.0))))
    v = math.floor(min(u, eps ** (-d / 2.0)))
    return u, v
