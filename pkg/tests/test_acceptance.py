"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line (visible with -v or -s)."""

import math
import sys
import time
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np
import pytest

from cutout_packing.constants import (
    digamma_difference,
    digamma_integral,
    moran_dimension,
    p_const,
    series_A,
)
from cutout_packing.descriptors import HALF_THIRD, build
from cutout_packing.geometry import CutOutSet, tube_volume
from cutout_packing.lp_cert import build_cantor_certificate, power_certificate
from cutout_packing.massdist import MassInstance, bracket, exact_cover_count, greedy_mass_blocks, tail_upper_bound
from cutout_packing.packing import greedy_pack, pack_cutout
from cutout_packing.sequences import BlockGeometric, Explicit, FromSystem, PowerLaw, first_small_tail
from cutout_packing.sharpness import CANTOR_DIM, cantor_peak, cantor_report, half_third_report

GAMMA_DIMS = (0.4, 0.5, 0.6)
DECADES = (2, 3, 4, 5, 6)


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


# -- shared computations (criterion 7 reuses them) --------------------------------


@pytest.fixture(scope="module")
def gamma_curves():
    def compute():
        curves = {}
        for d in GAMMA_DIMS:
            cut = CutOutSet(PowerLaw(1, d))
            curves[d] = [(10.0**-k, pack_cutout(cut, 10.0**-k, d).count) for k in DECADES]
        return curves

    return timed(compute)


@pytest.fixture(scope="module")
def cantor_data():
    def compute():
        peaks = {n: cantor_peak(n) for n in (18, 19, 20)}
        return peaks, cantor_report(range(7, 13))

    return timed(compute)


@pytest.fixture(scope="module")
def half_third_data():
    return timed(half_third_report)


# -- criteria ---------------------------------------------------------------------


def test_criterion_1_main_theorem(capsys, gamma_curves):
    curves, elapsed = gamma_curves
    close, monotone, parts = True, True, []
    for d, curve in curves.items():
        A = series_A(d, 1e-10)
        assert A.tail_bound <= 1e-10
        deviations = [abs(n * eps**d - A.value) / A.value for eps, n in curve]
        close &= deviations[-1] <= 0.10
        monotone &= all(b < a for a, b in zip(deviations, deviations[1:]))
        parts.append(f"d={d}: " + " ".join(f"{x:.2%}" for x in deviations))
    ok = close and monotone and elapsed < 60
    report(capsys, 1, ok, f"within 10% at 1e-6: {close}; monotone: {monotone}; {elapsed:.1f}s; " + "; ".join(parts))


def test_criterion_2_lp_certificates(capsys):
    def compute():
        power, failures = 0, []
        for L in (0.5, 1, 2):
            for d in (0.2, 0.3, 0.4, 0.5, 0.6):
                seq = PowerLaw(L, d)
                cut = CutOutSet(seq)
                for eps in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4):
                    if eps >= L or (K := first_small_tail(seq, eps)) > 20000:
                        continue
                    cert = power_certificate(L, d, eps, K)
                    count = pack_cutout(cut, eps, d).count
                    power += 1
                    if not (cert.max_residual <= 1e-9 * cert.scale and cert.gap <= 1e-9 * cert.primal_objective
                            and count <= cert.packing_bound):
                        failures.append(("power", L, d, eps))
        cantor = 0
        cut = CutOutSet(BlockGeometric(Fraction(1, 3), 2, 1))
        for a in (Fraction(5, 4), Fraction(3, 2), 2, Fraction(5, 2), 3):
            for n in range(4, 9):
                cert = build_cantor_certificate(a, n)
                count = pack_cutout(cut, Fraction(a) / 3**n).count
                cantor += 1
                if not (cert.max_residual <= 1e-9 * cert.scale and cert.gap <= 1e-9 * cert.primal_objective
                        and count <= cert.packing_bound):
                    failures.append(("cantor", a, n))
        return power, cantor, failures

    (power, cantor, failures), elapsed = timed(compute)
    ok = power >= 50 and cantor >= 20 and not failures and elapsed < 10
    report(capsys, 2, ok, f"{power} power-law and {cantor} Cantor certificates, failures {failures}, {elapsed:.1f}s")


@lru_cache(maxsize=None)
def _combos(n, k):
    return np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def _larger_packing_exists(points, eps, count):
    """Exhaustive over all (count+1)-subsets; feasibility is closed under taking subsets."""
    n = len(points)
    if count >= n:
        return False
    chosen = points[_combos(n, count + 1)]
    return bool(np.any(np.min(np.diff(chosen, axis=1), axis=1) >= eps))


def test_criterion_3_greedy_optimal(capsys):
    def compute():
        rng = np.random.default_rng(20240611)
        wrong = 0
        for i in range(10**4):
            n = int(rng.integers(1, 19))
            if i % 5 == 0:  # integer grids give exact ties at distance eps
                points = np.sort(rng.integers(0, 30, n)).astype(float)
                eps = float(rng.integers(1, 7))
            else:
                points = np.sort(rng.uniform(0, 1, n))
                eps = float(rng.uniform(0.005, 0.4))
            res = greedy_pack(list(points), eps)
            valid = all(b - a >= eps for a, b in zip(res.configuration, res.configuration[1:]))
            if not valid or _larger_packing_exists(points, eps, res.count):
                wrong += 1
        return wrong

    wrong, elapsed = timed(compute)
    report(capsys, 3, wrong == 0 and elapsed < 30, f"{wrong} of 10000 differ from the brute-force optimum, {elapsed:.1f}s")


def test_criterion_4_cantor(capsys, cantor_data):
    (peaks, rep), elapsed = cantor_data
    peaks_ok = all(abs(v - 2) <= 0.02 * 2 for v in peaks.values())
    rel = abs(rep.empirical_min - rep.formula_min) / rep.formula_min
    ok = peaks_ok and rel <= 0.03 and rep.formula_min <= 1.95 and elapsed < 120
    peak_text = ", ".join(f"n={n}: {v:.6f}" for n, v in peaks.items())
    report(capsys, 4, ok, f"peaks {peak_text}; empirical min {rep.empirical_min:.5f} vs L(a) min "
                          f"{rep.formula_min:.5f} ({rel:.2%}); {elapsed:.1f}s")


def test_criterion_5_sharpness(capsys, half_third_data):
    rep, elapsed = half_third_data
    counts_ok = all(rep.counts[j] == j + 1 for j in (1, 2, 3, 4, 6)) and rep.counts[5] == 5
    lo, hi = rep.constant_interval
    ok = (rep.moran_residual <= 1e-12 and counts_ok and hi < 1.53 and rep.content_bound > 1.56
          and rep.verdict and elapsed < 120)
    report(capsys, 5, ok, f"t={rep.t:.12f} residual {rep.moran_residual:.1e}; counts {rep.counts}; case {rep.case}; "
                          f"constant in [{lo:.10f}, {hi:.10f}]; p_t*content {rep.content_bound:.5f}; {elapsed:.1f}s")


def test_criterion_6_digamma_limit(capsys):
    def compute():
        worst = max(abs(digamma_difference(s) - digamma_integral(s)) for s in np.arange(1, 10) / 10)
        p = {d: p_const(d) for d in (0.9, 0.99, 0.999)}
        return worst, p

    (worst, p), elapsed = timed(compute)
    near = all(0.95 <= p[d] <= 1.05 and abs(p[d] - 1) < abs(p[0.9] - 1) for d in (0.99, 0.999))
    ok = worst <= 1e-8 and near and elapsed < 5
    report(capsys, 6, ok, f"identity error {worst:.1e}; p_0.9={p[0.9]:.5f} p_0.99={p[0.99]:.5f} "
                          f"p_0.999={p[0.999]:.5f}; {elapsed:.1f}s")


def _growth_ok(seq, d, pairs):
    contents = [float(tube_volume(seq, e)) / float(e) ** (1 - d) for e, _ in pairs]
    contents += [float(tube_volume(seq, e / 2)) / float(e / 2) ** (1 - d) for e, _ in pairs]
    lo = min(contents) / 4 - 1e-6
    hi = 2 ** (d - 1) * max(contents) + 1e-6
    return all(lo <= n * float(e) ** d <= hi for e, n in pairs)


def test_criterion_7_growth_bracket(capsys, gamma_curves, cantor_data, half_third_data):
    def compute():
        checks = {}
        for d, curve in gamma_curves[0].items():
            checks[f"gamma {d}"] = _growth_ok(PowerLaw(1, d), d, curve)
        peaks, rep = cantor_data[0]
        pairs = [(eps, n) for _, _, eps, n, _ in rep.rows]
        pairs += [(Fraction(1, 3 ** (n - 1)), v / float(Fraction(1, 3 ** (n - 1))) ** CANTOR_DIM)
                  for n, v in peaks.items()]
        checks["S"] = _growth_ok(BlockGeometric(Fraction(1, 3), 2, 1), CANTOR_DIM, pairs)
        t_rep = half_third_data[0]
        system = build(HALF_THIRD)
        checks["T"] = _growth_ok(FromSystem(system), moran_dimension(system),
                                 [(Fraction(1, j), n) for j, n in t_rep.counts.items()])
        return checks

    checks, elapsed = timed(compute)
    report(capsys, 7, all(checks.values()), f"{checks}; {elapsed:.1f}s")


def test_criterion_8_mass_distribution(capsys):
    def compute():
        rng = np.random.default_rng(8)
        broken = 0
        for _ in range(500):
            L, d = float(rng.uniform(0.3, 2)), float(rng.uniform(0.2, 0.8))
            n = int(rng.integers(2, 15))
            source = PowerLaw(L, d)
            lengths = [source.length(j) for j in range(1, n + 1)]
            tail = source.tail_sum(n + 1)
            seq = Explicit(lengths, tail)
            eps = float(rng.uniform(lengths[-1], (sum(lengths) + tail) / 2))
            inst = MassInstance(lengths, tail, eps)
            chain = (greedy_mass_blocks(seq, eps, d, L, strict=False), exact_cover_count(inst, "tail-as-item"),
                     exact_cover_count(inst, "tail-fluid"), tail_upper_bound(seq, eps))
            broken += any(a > b for a, b in zip(chain, chain[1:]))
        b = bracket(PowerLaw(1, 0.5), 1e-4, 0.5, 1)
        return broken, b

    (broken, b), elapsed = timed(compute)
    A = series_A(0.5).value
    low, high = b.lower * 1e-2, b.upper * 1e-2
    envelope = 0.9 * A <= low <= high <= 1.1 * 2
    ok = broken == 0 and envelope and elapsed < 60
    report(capsys, 8, ok, f"chain broken in {broken} of 500; bracket*eps^0.5 = [{low:.3f}, {high:.3f}] "
                          f"vs [{0.9 * A:.3f}, 2.2]; {elapsed:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
