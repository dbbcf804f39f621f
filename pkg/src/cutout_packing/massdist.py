"""Mass distribution: split the gaps into as many parts as possible, each of mass >= eps.

For a finite instance the optimum is found by branch-and-bound.  The
infinite problem is only bracketed: the block construction and a top-up
construction give certified lower bounds, and the tail estimate

    N <= F(1, eps) + tail_sum(F(1, eps) + 1) / eps

gives the upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._numerics import is_exact
from .errors import IndexBeyondExplicit, InputError, InstanceTooLarge, SeparationViolated
from .sequences import GapSequence, growth_gauges, last_window_start

EXACT_LIMIT = 24
MODES = ("tail-as-item", "tail-fluid")


@dataclass
class MassInstance:
    weights: list
    tail: object
    eps: object

    def __post_init__(self):
        self.weights = list(self.weights)
        if any(not w > 0 for w in self.weights):
            raise InputError("weights must be positive")
        if any(b > a for a, b in zip(self.weights, self.weights[1:])):
            raise InputError("weights must be non-increasing")
        if self.tail < 0:
            raise InputError("tail must be nonnegative")
        if not self.eps > 0:
            raise InputError("eps must be positive")

    @property
    def total(self):
        return sum(self.weights) + self.tail


@dataclass
class MassBracket:
    lower: int
    upper: int
    greedy: int
    topup: int
    tailbound: int


def _fluid_fill(open_sums, fluid, eps) -> int:
    """Parts completed when ``fluid`` mass is poured into the smallest deficits."""
    count = 0
    for deficit in sorted(eps - s for s in open_sums):
        if deficit > fluid:
            return count
        fluid -= deficit
        count += 1
    if eps > 0:
        whole = fluid / eps
        count += math.floor(whole) if not isinstance(whole, float) else math.floor(whole * (1 + 1e-15))
    return count


def exact_cover_count(inst: MassInstance, mode: str = "tail-as-item") -> int:
    """Maximum number of disjoint parts with mass >= eps.

    Items go largest first into an open part, a fresh part, or nowhere;
    a part closes the moment it reaches eps.  A branch is cut when closed
    parts plus floor((open mass + remaining mass) / eps) cannot beat the
    incumbent.
    """
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}")
    items = list(inst.weights)
    fluid = 0
    if mode == "tail-as-item":
        if inst.tail > 0:
            items.append(inst.tail)
            items.sort(reverse=True)
    else:
        fluid = inst.tail
    if len(items) > EXACT_LIMIT:
        raise InstanceTooLarge(f"{len(items)} weights exceed the exact limit {EXACT_LIMIT}")
    eps = inst.eps
    exact = is_exact(eps, fluid, *items)
    suffix = [0] * (len(items) + 1)
    for i in range(len(items) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + items[i]
    slack = 0 if exact else 1e-12 * float(eps)
    best = 0
    seen: set = set()

    def bound(i, closed, open_sums):
        return closed + math.floor((sum(open_sums) + suffix[i] + fluid) / eps + (0 if exact else 1e-12))

    def search(i, closed, open_sums):
        nonlocal best
        if i == len(items):
            best = max(best, closed + _fluid_fill(open_sums, fluid, eps))
            return
        if bound(i, closed, open_sums) <= best:
            return
        key = (i, closed, open_sums)
        if key in seen:
            return
        seen.add(key)
        w = items[i]
        tried = set()
        for idx, s in enumerate(open_sums):
            if s in tried:
                continue
            tried.add(s)
            rest = open_sums[:idx] + open_sums[idx + 1 :]
            if s + w >= eps - slack:
                search(i + 1, closed + 1, rest)
            else:
                search(i + 1, closed, tuple(sorted(rest + (s + w,))))
        if w >= eps - slack:
            search(i + 1, closed + 1, open_sums)
        else:
            search(i + 1, closed, tuple(sorted(open_sums + (w,))))
        search(i + 1, closed, open_sums)

    search(0, 0, ())
    return best


def greedy_mass_blocks(seq: GapSequence, eps, d: float, L_low: float, strict: bool = True) -> int:
    """Block construction: h_k parts of k consecutive gaps each, k = 1..v.

    h_k = floor((k**d - (k-1)**d) / k * (L_low/eps)**d).  Each block's last
    window is checked against eps; everything left over joins the final
    part.  Returns the number of parts, sum of h_k.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    _, v = growth_gauges(eps, d)
    scale = (L_low / float(eps)) ** d
    offset, count = 0, 0

    def window_ok(start, k):
        try:
            return seq.window_at_least(start, k, eps)
        except IndexBeyondExplicit:
            return False

    for k in range(1, v + 1):
        h = math.floor((k**d - (k - 1) ** d) / k * scale)
        if h <= 0:
            continue
        if not window_ok(offset + (h - 1) * k + 1, k):
            if strict:
                raise SeparationViolated(f"block {k}: a part of {k} gaps falls short of eps")
            ok = 0
            while ok < h and window_ok(offset + ok * k + 1, k):
                ok += 1
            count += ok
            break
        count += h
        offset += k * h
    if count == 0 and seq.total >= eps:
        return 1
    return count


def tail_upper_bound(seq: GapSequence, eps) -> int:
    """floor(F(1, eps) + tail_sum(F(1, eps) + 1) / eps), with F = 0 when l_1 < eps."""
    if not eps > 0:
        raise InputError("eps must be positive")
    F = last_window_start(seq, 1, eps) if seq.length(1) >= eps else 0
    tail = seq.tail_sum(F + 1)
    if isinstance(tail, Fraction) or (isinstance(tail, int) and not isinstance(eps, float)):
        return F + math.floor(Fraction(tail) / Fraction(eps))
    return F + math.floor(float(tail) / float(eps) * (1 + 1e-12))


def topup_lower_bound(seq: GapSequence, eps) -> int:
    """Singletons for l_j >= eps, then gaps F+1..M-1 each topped up by runs from the tail.

    Gap j needs eps - l_j more mass; filling it with consecutive gaps from
    index M on overshoots by less than l_M.  So M - 1 parts exist whenever
    sum_{F<j<M} (eps - l_j + l_M) <= tail_sum(M).  Needs an infinite sequence.
    """
    if seq.size is not None:
        raise InputError("the top-up bound needs an infinite sequence")
    F = last_window_start(seq, 1, eps) if seq.length(1) >= eps else 0
    margin = 0 if seq.exact else 1e-12

    def feasible(M):
        front = M - 1 - F
        if front == 0:
            return True
        need = front * eps - seq.window_sum(F + 1, front) + front * seq.length(M)
        return need * (1 + margin) <= seq.tail_sum(M) * (1 - margin)

    lo, hi = F + 1, 2 * (F + 1)
    while feasible(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return max(lo - 1, 1 if seq.total >= eps else 0)


def bracket(seq: GapSequence, eps, d: float, L_low: float) -> MassBracket:
    """[lower, upper] for the infinite mass distribution count."""
    greedy = greedy_mass_blocks(seq, eps, d, L_low, strict=False)
    topup = topup_lower_bound(seq, eps) if seq.size is None else 0
    upper = tail_upper_bound(seq, eps)
    return MassBracket(max(greedy, topup), upper, greedy, topup, upper)
