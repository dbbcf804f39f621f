"""Closed-form constants and the series behind them.

The packing limit for a power-law cut-out set is L**d * A_d with

    A_d = sum_{k>=1} (k**d - (k-1)**d) / k.

The terms decay like d k**(d-2), far too slowly to sum directly to 1e-10.
Writing k**d - (k-1)**d = sum_m c_m k**(d-m) with positive binomial
coefficients c_m turns the tail into a rapidly convergent combination of
Hurwitz zeta values, each evaluated with a rigorous Euler-Maclaurin bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._numerics import power_tail
from .errors import DependentSystem, InputError, NonPositiveArgument

EULER_GAMMA = 0.57721566490153286060651209
_HEAD_TERMS = 64


@dataclass(frozen=True)
class SeriesValue:
    """A lower estimate ``value`` with the true sum in [value, value + tail_bound]."""

    value: float
    tail_bound: float
    terms_used: int

    @property
    def midpoint(self) -> float:
        return self.value + self.tail_bound / 2


def _check_dim(d: float) -> float:
    d = float(d)
    if not 0 < d < 1:
        raise InputError(f"dimension must lie in (0, 1), got {d}")
    return d


def term_A(d: float, k: int) -> float:
    return (k**d - (k - 1) ** d) / k


def partial_series_A(d: float, terms: int) -> SeriesValue:
    """Plain partial sum of A_d with the mean-value tail bound d (K-1)**(d-1) / (1-d)."""
    d = _check_dim(d)
    if terms < 2:
        raise InputError("need at least two terms for the tail bound")
    head = math.fsum(term_A(d, k) for k in range(1, terms + 1))
    return SeriesValue(head, d * (terms - 1) ** (d - 1) / (1 - d), terms)


def series_A(d: float, tol: float = 1e-10) -> SeriesValue:
    """A_d with a certified enclosure of width at most ``tol`` (when reachable)."""
    d = _check_dim(d)
    if not tol > 0:
        raise InputError("tol must be positive")
    K = _HEAD_TERMS
    head = math.fsum(term_A(d, k) for k in range(1, K))
    parts, err = [], 0.0
    coeff, m = d, 1
    while True:
        value, e = power_tail(m + 1 - d, K)
        parts.append(coeff * value)
        err += coeff * e
        # remaining coefficients are <= d/m, zeta(s, K) <= K**-s (1 + K/(s-1))
        nxt = m + 1
        rest = d / nxt * K ** (d - 1 - nxt) * (1 + K / (nxt - d)) / (1 - 1 / K)
        if rest < tol * 1e-3 or m > 60:
            err += rest
            break
        coeff *= (m - d) / (m + 1)
        m += 1
    total = head + math.fsum(parts)
    err += 16 * 2.0**-52 * total
    return SeriesValue(total - err, 2 * err, K - 1 + m)


def p_const(d: float, tol: float = 1e-10) -> float:
    """p_d = A_d (1-d) / 2**(1-d)."""
    d = _check_dim(d)
    return series_A(d, tol).midpoint * (1 - d) / 2 ** (1 - d)


def content_cutout(L: float, d: float) -> float:
    """Minkowski content 2**(1-d) L**d / (1-d) of a power-law cut-out set."""
    d = _check_dim(d)
    if not L > 0:
        raise InputError("L must be positive")
    return 2 ** (1 - d) * L**d / (1 - d)


def growth_constants(d: float) -> tuple[float, float]:
    """(C1, C2) with C1 content/4 <= N eps**d <= C2 content on the line."""
    d = _check_dim(d)
    return 0.25, 2 ** (d - 1)


def massdist_bounds(L_low: float, L_high: float, d: float, tol: float = 1e-10) -> tuple[float, float]:
    """First-order bounds for the mass distribution count times eps**d."""
    d = _check_dim(d)
    if not 0 < L_low <= L_high:
        raise InputError("need 0 < L_low <= L_high")
    lower = L_low**d * series_A(d, tol).value
    upper = L_high**d + d / (1 - d) * L_high * L_low ** (d - 1)
    return lower, upper


# -- digamma and the limit p_d -> 1 ------------------------------------------

_ASYMPTOTIC = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760)


def digamma(x: float) -> float:
    """psi(x) by upward recurrence to x >= 8, then the asymptotic series."""
    x = float(x)
    if not x > 0:
        raise NonPositiveArgument(f"digamma needs x > 0, got {x}")
    shift = []
    while x < 8:
        shift.append(1 / x)
        x += 1
    inv2 = 1 / (x * x)
    series, power = 0.0, inv2
    for c in _ASYMPTOTIC:
        series += c * power
        power *= inv2
    return math.log(x) - 0.5 / x - series - math.fsum(shift)


def harmonic_range(lo: int, hi: int) -> float:
    """sum_{p=lo}^{hi} 1/p (0 when hi < lo)."""
    if hi < lo:
        return 0.0
    if hi - lo < 4096:
        return math.fsum(1 / p for p in range(lo, hi + 1))
    return digamma(hi + 1) - digamma(lo)


def digamma_difference(s: float) -> float:
    """(psi((s+1)/2) - psi(s/2)) / 2."""
    return 0.5 * (digamma((s + 1) / 2) - digamma(s / 2))


def adaptive_simpson(f, a: float, b: float, tol: float, depth: int = 60) -> float:
    def simpson(fa, fm, fb, h):
        return h / 6 * (fa + 4 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        if depth <= 0 or abs(left + right - whole) <= 15 * tol:
            return left + right + (left + right - whole) / 15
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    fa, fb, fm = f(a), f(b), f((a + b) / 2)
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, depth)


def digamma_integral(s: float, tol: float = 1e-11, cut: float = 16.0) -> float:
    """Integral of 1/((x+1) x**s) over [1, inf).

    Simpson on [1, cut]; beyond ``cut`` the integrand expands as an
    alternating series in 1/x whose terms integrate in closed form.
    """
    if not 0 < s < 1:
        raise InputError("s must lie in (0, 1)")
    body = adaptive_simpson(lambda x: 1 / ((x + 1) * x**s), 1.0, cut, tol / 2)
    tail, k = 0.0, 0
    while True:
        term = cut ** (-s - k) / (s + k)
        tail += term if k % 2 == 0 else -term
        k += 1
        if cut ** (-s - k) / (s + k) < tol / 4:
            break
    return body + tail


def reflection_sum(s: float, terms: int = 200000) -> float:
    """g(s) = sum_{n>=1} 1/((n+1) n**s), head plus an Euler-Maclaurin tail."""
    head = math.fsum(1 / ((n + 1) * n**s) for n in range(1, terms))
    # 1/((n+1) n**s) = n**-(s+1) - n**-(s+2) + ... for the tail
    tail, sign = 0.0, 1.0
    for j in range(1, 12):
        tail += sign * power_tail(s + j, terms)[0]
        sign = -sign
    return head + tail


def summation_by_parts(a, b) -> tuple[float, float]:
    """(sum s_n, sum t_n) for s_n = a_n (b_n - b_{n-1}), t_n = b_n (a_n - a_{n+1}).

    ``a`` holds a_1..a_N and ``b`` holds b_0..b_N; the last t_N is a_N b_N.
    The two sums agree whenever a_1 = 0 or b_0 = 0.
    """
    N = len(a)
    if len(b) != N + 1:
        raise InputError("b must have one more entry (b_0) than a")
    s = [a[n] * (b[n + 1] - b[n]) for n in range(N)]
    t = [b[n + 1] * (a[n] - a[n + 1]) for n in range(N - 1)] + [a[-1] * b[-1]]
    return math.fsum(s), math.fsum(t)


# -- self-similar systems -----------------------------------------------------


def moran_dimension(system, tol: float = 1e-14) -> float:
    """Root of sum r_i**d = 1 by bisection on (0, 1]."""
    ratios = [float(r) for r in system.ratios]
    if math.fsum(ratios) >= 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if math.fsum(r**mid for r in ratios) > 1.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _prime_exponents(n: int) -> dict:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _log_vector(r: Fraction) -> dict:
    vec = _prime_exponents(r.numerator)
    for p, e in _prime_exponents(r.denominator).items():
        vec[p] = vec.get(p, 0) - e
    return vec


def is_dependent(system, max_denominator: int = 10**6, rel_tol: float = 1e-14) -> bool:
    """True when every log r_i is a rational multiple of log r_1.

    Rational ratios are decided exactly through prime exponent vectors
    (log r_i / log r_j is rational iff the vectors are parallel).  Float
    ratios fall back to continued-fraction approximation.
    """
    ratios = system.ratios
    if system.exact:
        base = _log_vector(ratios[0])
        for r in ratios[1:]:
            vec = _log_vector(r)
            primes = set(base) | set(vec)
            # parallel iff all 2x2 minors vanish
            pairs = [(base.get(p, 0), vec.get(p, 0)) for p in primes]
            if any(a1 * b2 - a2 * b1 for (a1, b1) in pairs for (a2, b2) in pairs):
                return False
        return True
    base = math.log(ratios[0])
    for r in ratios[1:]:
        x = math.log(r) / base
        q = Fraction(x).limit_denominator(max_denominator)
        if abs(x - q) > rel_tol * max(1.0, abs(x)):
            return False
    return True


def renewal_mean(system, d: float) -> float:
    """sum r_i**d log(1/r_i)."""
    return math.fsum(float(r) ** d * -math.log(float(r)) for r in system.ratios)


def content_selfsimilar(system) -> float:
    """Minkowski content of an independent self-similar set on the line."""
    if is_dependent(system):
        raise DependentSystem("log-ratios are commensurable; the content does not exist")
    d = moran_dimension(system)
    gaps = math.fsum(float(b) ** d for b in system.gaps)
    return 2 ** (1 - d) / (d * (1 - d)) * gaps / renewal_mean(system, d)


# -- the rearranged Cantor set --------------------------------------------------


def cantor_thresholds(a, count: int) -> list[int]:
    """p_k = ceil(a 3**(k-1)) for k = 0..count-1."""
    a = Fraction(a)
    if not 1 < a <= 3:
        raise InputError("a must lie in (1, 3]")
    return [math.ceil(a * Fraction(3) ** (k - 1)) for k in range(count)]


def L_of_a(a, tol: float = 1e-13) -> float:
    """Limit of N(S, a 3**-n) (a 3**-n)**s along n, for a in (1, 3]."""
    af = Fraction(a)
    if not 1 < af <= 3:
        raise InputError("a must lie in (1, 3]")
    terms, k = [], 1
    while True:
        terms.append(Fraction(2 ** (k - 1), math.ceil(af * Fraction(3) ** (k - 1))))
        if 3 * (2 / 3) ** k / float(af) < tol:
            break
        k += 1
    return 2 ** (math.log(float(af), 3) - 1) * (1 + float(sum(terms)))


def L_of_a_upper(a: float) -> float:
    x = math.log(float(a), 3)
    return 2 ** (x - 1) * (1 + 3 ** (1 - x))
