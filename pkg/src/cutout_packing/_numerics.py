"""Small numerical helpers shared across modules."""

from __future__ import annotations

import math
from fractions import Fraction

# Bernoulli numbers B_2, B_4, ..., B_12
_BERNOULLI_EVEN = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
)
_EM_START = 32
_ULP = 2.0**-52


def rising(s: float, q: int) -> float:
    """Pochhammer symbol s (s+1) ... (s+q-1)."""
    out = 1.0
    for i in range(q):
        out *= s + i
    return out


def power_tail(s: float, n: int) -> tuple[float, float]:
    """Return (value, error bound) for the sum of j**-s over j >= n, s > 1.

    Terms below ``_EM_START`` are summed directly; the rest uses
    Euler-Maclaurin, whose remainder for a completely monotone summand is
    bounded by the first omitted correction.
    """
    if s <= 1.0:
        raise ValueError("power_tail needs s > 1")
    if n < 1:
        raise ValueError("power_tail needs n >= 1")
    m = max(n, _EM_START)
    head = [float(j) ** -s for j in range(n, m)]
    fm = float(m)
    parts = [fm ** (1.0 - s) / (s - 1.0), 0.5 * fm**-s]
    for k, bern in enumerate(_BERNOULLI_EVEN[:-1], start=1):
        q = 2 * k - 1
        coeff = float(bern) / math.factorial(2 * k)
        parts.append(coeff * rising(s, q) * fm ** (-s - q))
    last = float(_BERNOULLI_EVEN[-1]) / math.factorial(2 * len(_BERNOULLI_EVEN))
    remainder = abs(last * rising(s, 2 * len(_BERNOULLI_EVEN) - 1)) * fm ** (
        -s - 2 * len(_BERNOULLI_EVEN) + 1
    )
    value = math.fsum(head + parts)
    err = remainder + 8 * _ULP * abs(value) + 1e-300
    return value, err


def neumaier_prefix(values) -> list[float]:
    """Compensated running sums [0, v1, v1+v2, ...]."""
    out = [0.0]
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out.append(total + comp)
    return out


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        lo, hi = hi, lo
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # both in (fl, fl+1): recurse on reciprocals of the fractional parts
    inner = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def to_number(value, exact: bool):
    """Coerce to Fraction when exact arithmetic is requested, else float."""
    if exact:
        return value if isinstance(value, Fraction) else Fraction(value)
    return float(value)


def is_exact(*values) -> bool:
    return all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values)
