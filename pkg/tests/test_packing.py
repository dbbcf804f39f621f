import math
import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutout_packing.constants import series_A
from cutout_packing.errors import EpsilonTooLarge, NTooLarge, SandwichNotClosed, SeparationViolated
from cutout_packing.geometry import CutOutSet, materialize, prefractal
from cutout_packing.lp_cert import power_certificate
from cutout_packing.packing import (
    best_radius,
    greedy_blocks,
    greedy_pack,
    implicit_cutout_count,
    pack_cutout,
    pack_exact_attractor,
    pack_intervals,
)
from cutout_packing.sequences import Explicit, PowerLaw, first_small_tail


def brute_count(points, eps):
    for size in range(len(points), 0, -1):
        for subset in combinations(points, size):
            if all(b - a >= eps for a, b in zip(subset, subset[1:])):
                return size
    return 0


def chain_count(points, eps):
    """Longest eps-separated chain by quadratic dynamic programming."""
    best = []
    for i, x in enumerate(points):
        best.append(1 + max((best[j] for j in range(i) if x - points[j] >= eps), default=0))
    return max(best)


def brute_radius(points, n):
    return max(min(b - a for a, b in zip(c, c[1:])) for c in combinations(points, n))


def test_greedy_pack_small_example():
    res = greedy_pack([0, 0.5, 0.75, 0.875, 1], 0.5)
    assert res.count == 3 == brute_count([0, 0.5, 0.75, 0.875, 1], 0.5)
    assert res.configuration == [0, 0.5, 1]


def test_greedy_pack_trivial_cases():
    assert greedy_pack([0.1, 0.4, 0.7], 5.0).count == 1
    assert greedy_pack([0, 1], 1).count == 2


def test_greedy_matches_brute_force_random():
    rng = random.Random(20240611)
    for _ in range(500):
        pts = sorted(rng.sample(range(60), rng.randint(1, 10)))
        eps = rng.randint(1, 20)
        assert greedy_pack(pts, eps).count == brute_count(pts, eps)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=12, unique=True), st.floats(1e-3, 1.0))
def test_greedy_configuration_is_separated(points, eps):
    points = sorted(points)
    res = greedy_pack(points, eps)
    gaps = np.diff(res.configuration)
    assert np.all(gaps >= eps)
    assert res.count == brute_count(points, eps)


def test_best_radius_examples():
    assert best_radius([0, 0.5, 0.75, 1], 3) == 0.5 == brute_radius([0, 0.5, 0.75, 1], 3)
    assert best_radius([0, 0.2, 0.9], 2) == 0.9
    assert best_radius([0, Fraction(1, 3), Fraction(2, 3), 1], 4) == Fraction(1, 3)
    with pytest.raises(NTooLarge):
        best_radius([0, 1], 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1000), min_size=3, max_size=10, unique=True), st.integers(2, 10))
def test_best_radius_is_generalized_inverse(points, n):
    points = sorted(points)
    if n > len(points):
        return
    radius = best_radius(points, n)
    assert radius == brute_radius(points, n)
    assert greedy_pack(points, radius).count >= n
    assert greedy_pack(points, radius + 0.5).count < n


def test_best_radius_bisection_branch():
    rng = np.random.default_rng(3)
    pts = np.sort(rng.random(3000))
    radius = best_radius(pts, 40)
    assert greedy_pack(pts, radius).count >= 40
    assert greedy_pack(pts, radius * (1 + 1e-9)).count < 40


def test_gamma_half_at_one_packs_two():
    assert pack_cutout(CutOutSet(PowerLaw(1, 0.5)), 1.0).count == 2


def test_ternary_at_one_third(ternary_set):
    pts = materialize(ternary_set, 64)
    assert pack_cutout(ternary_set, Fraction(1, 3)).count == brute_count(pts[:12] + [pts[-1]], Fraction(1, 3)) == 4


def test_pack_at_diameter(ternary_set):
    assert pack_cutout(ternary_set, 1).count == 2
    with pytest.raises(EpsilonTooLarge):
        pack_cutout(ternary_set, Fraction(3, 2))


@pytest.mark.parametrize("eps", [1e-2, 3e-3, 1e-3, 2e-4])
def test_truncation_stability(eps):
    seq = PowerLaw(1, 0.5)
    cut = CutOutSet(seq)
    J = first_small_tail(seq, eps) + 1
    counts = {greedy_pack(materialize(cut, m), eps, keep=False).count for m in (J, J + 10, 2 * J)}
    assert counts == {pack_cutout(cut, eps).count}


@pytest.mark.parametrize("eps", [Fraction(1, 3**6), Fraction(2, 3**6), Fraction(5, 3**7), Fraction(1, 2**9)])
def test_implicit_count_agrees_with_materialized(ternary_set, eps):
    J = first_small_tail(ternary_set.seq, eps) + 1
    assert implicit_cutout_count(ternary_set.seq, eps) == greedy_pack(materialize(ternary_set, J), eps).count


@pytest.mark.parametrize("eps", [1e-2, 1e-3, 1e-4])
def test_implicit_count_agrees_for_floats(eps):
    seq = PowerLaw(1, 0.5)
    J = first_small_tail(seq, eps) + 1
    assert implicit_cutout_count(seq, eps) == greedy_pack(materialize(CutOutSet(seq), J), eps).count


@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_count_below_lp_bound(eps):
    seq = PowerLaw(1, 0.5)
    cert = power_certificate(1, 0.5, eps, first_small_tail(seq, eps))
    assert pack_cutout(CutOutSet(seq), eps).count - 3 <= cert.primal_objective


def test_pack_intervals_cantor(middle_third):
    pre = prefractal(middle_third, 3)
    lower, upper = pack_intervals(pre, Fraction(1, 3))
    assert lower.count == upper.count == chain_count(sorted(set(pre.endpoints())), Fraction(1, 3)) == 4


def test_pack_intervals_depth_zero(half_third):
    # the lower count only sees the endpoints {0, 1}; the interval union holds {0, 1/2, 1}
    lower, upper = pack_intervals(prefractal(half_third, 0), Fraction(1, 2))
    assert (lower.count, upper.count) == (2, 3)
    assert upper.configuration == [0, Fraction(1, 2), 1]


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
@pytest.mark.parametrize("eps", [Fraction(1, 5), Fraction(1, 7), Fraction(2, 11), Fraction(1, 20)])
def test_sandwich_validity(half_third, depth, eps):
    pre = prefractal(half_third, depth)
    lower, upper = pack_intervals(pre, eps)
    assert lower.count <= upper.count
    assert lower.count == chain_count(sorted(set(pre.endpoints())), eps)


def test_attractor_known_counts(half_third):
    assert pack_exact_attractor(half_third, Fraction(1, 6)).count == 7
    assert pack_exact_attractor(half_third, Fraction(1, 5)).count == 5
    assert pack_exact_attractor(half_third, Fraction(1, 4)).count == 5
    assert pack_exact_attractor(half_third, 1).count == 2


def test_attractor_sandwich_can_stay_open(half_third):
    with pytest.raises(SandwichNotClosed) as info:
        pack_exact_attractor(half_third, Fraction(1, 6) + Fraction(1, 10**9), max_depth=2)
    assert info.value.lower < info.value.upper


def test_greedy_blocks_below_optimum():
    seq = PowerLaw(1, 0.5)
    for eps in (1e-3, 1e-4, 1e-5):
        blocks = greedy_blocks(seq, eps, 0.5, 1.0, strict=False)
        assert blocks.count <= pack_cutout(CutOutSet(seq), eps).count


def test_greedy_blocks_configuration_is_separated():
    seq = PowerLaw(1, 0.5)
    eps = 1e-4
    res = greedy_blocks(seq, eps, 0.5, 1.0, strict=False)
    cut = CutOutSet(seq)
    pts = np.array([float(cut.point(i)) for i in res.configuration])
    assert np.all(np.diff(pts) >= eps * (1 - 1e-12))


def test_greedy_blocks_single_block():
    # v = 1 when eps**(-d/2) < 2
    seq = PowerLaw(1, 0.5)
    eps = 0.2
    assert greedy_blocks(seq, eps, 0.5, 1.0).count == 1 + math.floor((1 / eps) ** 0.5)


def test_greedy_blocks_strict_raises_when_short():
    seq = PowerLaw(1, 0.5)
    with pytest.raises(SeparationViolated):
        greedy_blocks(seq, 1e-4, 0.5, 1.3)


def test_greedy_blocks_near_limit():
    count = greedy_blocks(PowerLaw(1, 0.5), 1e-4, 0.5, 1.0, strict=False).count
    assert count * 1e-4**0.5 == pytest.approx(series_A(0.5).midpoint, rel=0.15)
