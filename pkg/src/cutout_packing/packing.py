"""Best packing on the line.

N(A, eps) is the largest number of points of A with all pairwise distances
at least eps.  On a closed subset of the line the greedy rule (take the
leftmost point, then always the smallest point at distance >= eps) is
optimal, so everything here reduces to running that greedy efficiently:

* on an explicit sorted point list,
* on a cut-out set, either materialized up to the tail horizon K(eps) + 1 or
  walked implicitly through window sums when that horizon is huge,
* on a self-similar attractor, by descending the map tree and sandwiching
  the answer between the pre-fractal endpoint set and the interval union.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EpsilonTooLarge, Indeterminate, InputError, NTooLarge, SandwichNotClosed, SeparationViolated
from .geometry import CutOutSet, PreFractal, SelfSimilarSystem, materialize
from .sequences import GapSequence, first_small_tail, growth_gauges, last_window_start

MATERIALIZE_CAP = 1 << 21
EXACT_MATERIALIZE_CAP = 1 << 12
PAIRWISE_CAP = 2000
ATTRACTOR_EPS_FLOOR = 1e-7


@dataclass
class PackingResult:
    epsilon: object
    count: int
    configuration: list | None = None
    d: float | None = None

    @property
    def normalized(self) -> float | None:
        if self.d is None:
            return None
        return self.count * float(self.epsilon) ** self.d


def _search(points, x) -> int:
    if isinstance(points, np.ndarray):
        return int(np.searchsorted(points, x, side="left"))
    return bisect.bisect_left(points, x)


def greedy_pack(points, eps, keep: bool = True) -> PackingResult:
    """Leftmost-first greedy on a sorted point list; the count is N(points, eps)."""
    if len(points) == 0:
        raise InputError("greedy_pack needs at least one point")
    if not eps > 0:
        raise InputError("eps must be positive")
    chosen = [points[0]]
    idx = 0
    n = len(points)
    while True:
        idx = _search(points, chosen[-1] + eps)
        if idx >= n:
            break
        chosen.append(points[idx])
    return PackingResult(eps, len(chosen), chosen if keep else None)


def best_radius(points, N: int):
    """delta(points, N): the largest possible minimum gap among N of the points."""
    pts = np.asarray(points, dtype=float) if not isinstance(points, list) else points
    if N < 2:
        raise InputError("best_radius needs N >= 2")
    if N > len(pts):
        raise NTooLarge(f"N={N} exceeds {len(pts)} points")
    if N == 2:
        return pts[-1] - pts[0]
    if len(pts) <= PAIRWISE_CAP:
        exact = isinstance(pts, list) and any(isinstance(x, Fraction) for x in pts)
        arr = np.asarray(pts, dtype=object if exact else float)
        diffs = sorted({d for d in (arr[None, :] - arr[:, None])[np.triu_indices(len(arr), 1)]})
        lo, hi = 0, len(diffs) - 1  # diffs[lo] always feasible (smallest distance)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if greedy_pack(pts, diffs[mid], keep=False).count >= N:
                lo = mid
            else:
                hi = mid - 1
        return diffs[lo]
    lo, hi = 0.0, float(pts[-1] - pts[0])
    while hi - lo > 1e-12 * max(hi, 1.0):
        mid = (lo + hi) / 2
        if greedy_pack(pts, mid, keep=False).count >= N:
            lo = mid
        else:
            hi = mid
    config = greedy_pack(pts, lo).configuration[:N]
    return min(b - a for a, b in zip(config, config[1:]))


# -- cut-out sets ------------------------------------------------------------


def _smallest_window(seq: GapSequence, i: int, eps, guess: int) -> int:
    """Smallest k with p(i, k) >= eps, galloping from ``guess``."""
    k = max(guess, 1)
    if seq.window_at_least(i, k, eps):
        lo, hi = 0, k  # p(i, lo) < eps convention with p(i, 0) = 0
        if k > 1 and not seq.window_at_least(i, k - 1, eps):
            return k
    else:
        lo, step = k, 1
        while True:
            hi = lo + step
            if seq.window_at_least(i, hi, eps):
                break
            lo, step = hi, 2 * step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if seq.window_at_least(i, mid, eps):
            hi = mid
        else:
            lo = mid
    return hi


def implicit_cutout_count(seq: GapSequence, eps) -> int:
    """Greedy count on the full cut-out set without materializing it.

    Works in index space: from y_i the next greedy point is y_{i+k} for the
    smallest window p(i, k) >= eps.  Runs of equal gaps are crossed in one
    arithmetic step.
    """
    count, i = 1, 1
    if seq.length(1) >= eps:
        f1 = last_window_start(seq, 1, eps)
        count, i = f1 + 1, f1 + 1
    k = 1
    while True:
        lo, hi = seq.tail_bracket(i)
        if hi < eps:
            return count
        if not lo > eps:
            if seq.exact and lo == eps:
                return count + 1  # only the supremum is far enough
            raise Indeterminate(f"tail beyond y_{i} too close to eps={eps!r}")
        gap = seq.length(i)
        end = seq.run_end(i)
        if end > i:
            step = math.ceil(eps / gap)
            while step > 1 and (step - 1) * gap >= eps:
                step -= 1
            while step * gap < eps:
                step += 1
            jumps = (end - i + 1) // step
            if jumps:
                count += jumps
                i += jumps * step
                k = step
                continue
        k = _smallest_window(seq, i, eps, k)
        count += 1
        i += k


def pack_cutout(cut: CutOutSet, eps, d: float | None = None, materialize_cap: int = MATERIALIZE_CAP) -> PackingResult:
    """N(cut, eps) for the full infinite cut-out set.

    Points beyond the tail horizon K(eps) all lie within eps of the
    supremum, so the set is truncated at J = K(eps) + 1 plus the supremum.
    When J is too large to hold in memory the same greedy runs implicitly.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if eps > cut.diameter:
        raise EpsilonTooLarge(f"eps={eps!r} exceeds the diameter")
    horizon = first_small_tail(cut.seq, eps) + 1
    if cut.seq.exact:
        materialize_cap = min(materialize_cap, EXACT_MATERIALIZE_CAP)
    if horizon <= materialize_cap and (cut.seq.size is None or horizon <= cut.seq.size):
        pts = materialize(cut, horizon)
        res = greedy_pack(pts, eps)
        res.d = d
        return res
    return PackingResult(eps, implicit_cutout_count(cut.seq, eps), None, d)


def greedy_blocks(seq: GapSequence, eps, d: float, L: float, strict: bool = True) -> PackingResult:
    """The block configuration: h_k points spaced k gaps apart, for k = 1..v.

    h_k = floor((k**d - (k-1)**d) / k * (L/eps)**d) and block k starts where
    block k-1 ended, so the configuration has 1 + sum(h_k) points.  Spacing
    is checked afterwards; ``strict`` raises on the first short window,
    otherwise the construction is cut back to its valid prefix.
    """
    _, v = growth_gauges(eps, d)
    if v < 1:
        raise InputError("eps too large for the block construction")
    scale = (L / float(eps)) ** d
    offset, points = 0, [1]
    for k in range(1, v + 1):
        h = math.floor((k**d - (k - 1) ** d) / k * scale)
        if h <= 0:
            continue
        last_start = offset + (h - 1) * k + 1
        if not seq.window_at_least(last_start, k, eps):
            if strict:
                raise SeparationViolated(f"block {k}: window at {last_start} shorter than eps")
            ok = 0
            while ok < h and seq.window_at_least(offset + ok * k + 1, k, eps):
                ok += 1
            points.extend(offset + n * k + 1 for n in range(1, ok + 1))
            break
        points.extend(offset + n * k + 1 for n in range(1, h + 1))
        offset += k * h
    return PackingResult(eps, len(points), points, d)


# -- attractors --------------------------------------------------------------


def pack_intervals(pre: PreFractal, eps) -> tuple[PackingResult, PackingResult]:
    """(lower, upper) greedy counts: endpoints of ``pre`` and its interval union."""
    if not eps > 0:
        raise InputError("eps must be positive")
    ends = sorted(pre.endpoints())
    lower = greedy_pack(ends, eps)
    starts = list(pre.starts)
    stops = [a + w for a, w in zip(pre.starts, pre.lengths)]
    x = starts[0]
    chosen = [x]
    while True:
        target = x + eps
        idx = bisect.bisect_right(starts, target) - 1
        if idx >= 0 and target <= stops[idx]:
            x = target
        elif idx + 1 < len(starts):
            x = starts[idx + 1]
        else:
            break
        chosen.append(x)
    return lower, PackingResult(eps, len(chosen), chosen)


def next_attractor_point(system: SelfSimilarSystem, x, depth: int, continuous: bool):
    """Smallest point >= x of the depth-``depth`` pre-fractal's endpoint set
    (or of its interval union when ``continuous``); None past the right end."""
    if x > 1:
        return None
    if x <= 0:
        return 0 * x
    scale, shift = 1, 0 * x
    for _ in range(depth):
        for r, c in zip(system.ratios, system.offsets):
            if x <= c:
                return shift + scale * c
            if x <= c + r:
                if x == c + r:
                    return shift + scale * x
                shift = shift + scale * c
                scale = scale * r
                x = (x - c) / r
                break
    if continuous or x == 0 or x == 1:
        return shift + scale * x
    return shift + scale


def attractor_greedy(system: SelfSimilarSystem, eps, depth: int, continuous: bool) -> list:
    x = 0 * eps
    chosen = [x]
    while True:
        y = next_attractor_point(system, x + eps, depth, continuous)
        if y is None:
            return chosen
        chosen.append(y)
        x = y


def pack_exact_attractor(system: SelfSimilarSystem, eps, max_depth: int = 24,
                         floor: float = ATTRACTOR_EPS_FLOOR, start_depth: int = 1) -> PackingResult:
    """N(A, eps) for the attractor, deepening until the sandwich closes."""
    if not eps > 0:
        raise InputError("eps must be positive")
    if eps < floor:
        raise InputError(f"eps={eps!r} below the attractor floor {floor}")
    if system.exact:
        eps = Fraction(eps)
    lower = upper = None
    for depth in range(start_depth, max_depth + 1):
        lo = attractor_greedy(system, eps, depth, continuous=False)
        hi = attractor_greedy(system, eps, depth, continuous=True)
        lower, upper = len(lo), len(hi)
        if lower == upper:
            return PackingResult(eps, lower, lo)
    raise SandwichNotClosed(max_depth, lower, upper)
