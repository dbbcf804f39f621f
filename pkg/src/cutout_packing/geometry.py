"""Point sets behind the packing problems.

* ``CutOutSet``: the monotone rearrangement of a gap sequence, i.e. the
  points y_1 = origin, y_{k+1} = y_k + l_k together with their supremum.
* ``SelfSimilarSystem``: similitudes on [0, 1] with images laid left to right.
* ``PreFractal``: the depth-k interval union of a system.

Tube volumes of cut-out sets depend only on the gap sequence, so
``tube_volume`` and ``content_curve`` take a sequence, not a point set.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._numerics import is_exact, neumaier_prefix
from .errors import DepthCapExceeded, EpsilonTooLarge, InputError
from .sequences import Explicit, GapSequence, last_window_start

DEFAULT_INTERVAL_CAP = 1 << 24


@dataclass
class CutOutSet:
    seq: GapSequence
    origin: float = 0

    @property
    def sup(self):
        return self.origin + self.seq.total

    @property
    def diameter(self):
        return self.seq.total

    def point(self, k: int):
        """y_k, the k-th point from the left."""
        return self.origin + self.seq.partial_sum(k - 1)

    def tail_point(self, k: int):
        """y_k computed from the right end; accurate for large k."""
        return self.sup - self.seq.tail_sum(k)

    def materialize(self, up_to: int):
        return materialize(self, up_to)


def materialize(cut: CutOutSet, up_to: int):
    """[y_1, ..., y_up_to, sup] as a list (exact) or float array."""
    if up_to < 1:
        raise InputError("materialize needs up_to >= 1")
    seq = cut.seq
    gaps = seq.lengths(1, up_to)
    if seq.exact:
        pts = [Fraction(cut.origin)]
        for g in gaps:
            pts.append(pts[-1] + g)
        sup = cut.sup
        if sup > pts[-1]:
            pts.append(sup)
        return pts
    pts = np.asarray(neumaier_prefix(gaps), dtype=float) + float(cut.origin)
    sup = float(cut.sup)
    if sup > pts[-1]:
        pts = np.append(pts, sup)
    return pts


def tube_volume(seq: GapSequence, eps, strict: bool = False):
    """Length of the closed eps-neighbourhood of the cut-out set.

    With n chosen so that l_{n+1}/2 <= eps <= l_n/2 the neighbourhood has
    length tail_sum(n+1) + 2(n+1)eps.  For eps > l_1/2 the same formula with
    n = 0 applies; ``strict`` turns that regime into ``EpsilonTooLarge``.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if seq.length(1) < 2 * eps:
        if strict:
            raise EpsilonTooLarge(f"eps={eps!r} > l_1/2")
        n = 0
    else:
        n = last_window_start(seq, 1, 2 * eps)
    return seq.tail_sum(n + 1) + 2 * (n + 1) * eps


def content_curve(seq: GapSequence, d: float, eps_grid):
    """[(eps, tube_volume / eps**(1-d))] over the grid."""
    out = []
    for eps in eps_grid:
        vol = tube_volume(seq, eps)
        out.append((eps, float(vol) / float(eps) ** (1.0 - d)))
    return out


@dataclass(frozen=True)
class SelfSimilarSystem:
    """Contractions x -> r_i x + c_i on [0, 1], left to right, gaps b_i between."""

    ratios: tuple
    gaps: tuple
    exact: bool = field(init=False)
    offsets: tuple = field(init=False)

    def __post_init__(self):
        ratios, gaps = tuple(self.ratios), tuple(self.gaps)
        if len(ratios) < 2:
            raise InputError("a system needs at least two maps")
        if len(gaps) != len(ratios) - 1:
            raise InputError("need exactly one gap between consecutive images")
        if any(not 0 < r < 1 for r in ratios):
            raise InputError("ratios must lie in (0, 1)")
        if any(not b > 0 for b in gaps):
            raise InputError("gaps must be positive (disjoint images)")
        exact = is_exact(*ratios, *gaps)
        if exact:
            ratios = tuple(Fraction(r) for r in ratios)
            gaps = tuple(Fraction(b) for b in gaps)
            if sum(ratios) + sum(gaps) != 1:
                raise InputError("ratios and gaps must sum to 1")
        else:
            ratios = tuple(float(r) for r in ratios)
            gaps = tuple(float(b) for b in gaps)
            if abs(math.fsum(ratios + gaps) - 1.0) > 1e-12:
                raise InputError("ratios and gaps must sum to 1")
        offsets, pos = [], Fraction(0) if exact else 0.0
        for i, r in enumerate(ratios):
            offsets.append(pos)
            pos = pos + r + (gaps[i] if i < len(gaps) else 0)
        object.__setattr__(self, "ratios", ratios)
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "offsets", tuple(offsets))

    @property
    def size(self) -> int:
        return len(self.ratios)

    def image(self, i: int, x):
        return self.ratios[i] * x + self.offsets[i]


@dataclass
class PreFractal:
    depth: int
    starts: object  # sorted left endpoints
    lengths: object

    @property
    def intervals(self):
        return [(a, a + w) for a, w in zip(self.starts, self.lengths)]

    def endpoints(self):
        pts = []
        for a, w in zip(self.starts, self.lengths):
            pts.append(a)
            pts.append(a + w)
        return pts


def prefractal(system: SelfSimilarSystem, depth: int, cap: int = DEFAULT_INTERVAL_CAP) -> PreFractal:
    """Depth-k interval union, built by mapping [0, 1] k times."""
    if depth < 0:
        raise InputError("depth must be nonnegative")
    if system.size**depth > cap:
        raise DepthCapExceeded(f"{system.size}**{depth} intervals exceed cap {cap}")
    dtype = object if system.exact else float
    one = Fraction(1) if system.exact else 1.0
    zero = Fraction(0) if system.exact else 0.0
    starts = np.array([zero], dtype=dtype)
    widths = np.array([one], dtype=dtype)
    r = np.array(system.ratios, dtype=dtype)
    c = np.array(system.offsets, dtype=dtype)
    for _ in range(depth):
        starts = (starts[:, None] + widths[:, None] * c[None, :]).ravel()
        widths = (widths[:, None] * r[None, :]).ravel()
    if system.exact:
        return PreFractal(depth, list(starts), list(widths))
    return PreFractal(depth, starts, widths)


def gap_multiset(system: SelfSimilarSystem, count_at_least: int, cap: int = DEFAULT_INTERVAL_CAP) -> Explicit:
    """The attractor's gaps in non-increasing order, at least ``count_at_least`` of them.

    Intervals of equal length are grouped by their exponent vector, so the
    work grows with the number of distinct lengths, not with M**depth.  The
    unenumerated remainder becomes the tail mass.
    """
    if count_at_least < 1:
        raise InputError("count_at_least must be >= 1")
    M = system.size
    one = Fraction(1) if system.exact else 1.0
    bmax = max(system.gaps)

    def span(key):
        out = one
        for r, a in zip(system.ratios, key):
            out = out * r**a
        return out

    root = (0,) * M
    intervals = [(-one, root)]
    pending = {root: 1}
    gap_heap: list = []
    emitted: list = []
    tie = 0
    while len(emitted) < count_at_least:
        next_interval = -intervals[0][0] if intervals else 0
        while gap_heap and -gap_heap[0][0] >= next_interval * bmax and len(emitted) < count_at_least:
            g, _, mult = heapq.heappop(gap_heap)
            if len(emitted) + mult > cap:
                raise DepthCapExceeded(f"more than {cap} gaps requested")
            emitted.extend([-g] * mult)
        if len(emitted) >= count_at_least or not intervals:
            break
        neg_len, key = heapq.heappop(intervals)
        lam = -neg_len
        mult = pending.pop(key)
        for b in system.gaps:
            tie += 1
            heapq.heappush(gap_heap, (-(lam * b), tie, mult))
        for i in range(M):
            child = key[:i] + (key[i] + 1,) + key[i + 1 :]
            if child in pending:
                pending[child] += mult
            else:
                pending[child] = mult
                heapq.heappush(intervals, (-span(child), child))
    if system.exact:
        tail = 1 - sum(emitted, Fraction(0))
    else:
        tail = max(1.0 - math.fsum(emitted), 0.0)
    return Explicit(emitted, tail)
