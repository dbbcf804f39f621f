"""Linear-programming certificates for packing upper bounds.

A packing with minimum gap eps on a cut-out set splits into adjacent
distances, each a window sum of k consecutive gaps.  If f_k counts the
distances that use k gaps, every row

    sum_{j<=k} j f_j <= b_k

holds, and N - 3 <= sum_k f_k.  Relaxing f to reals gives a staircase LP.
Its optimum is certified by a primal/dual pair with equal objectives:

* primal f_k = (b_k - b_{k-1}) / k saturates every row,
* dual g_k = 1/k - 1/(k+1) (and 1/K in the last row) makes every dual row
  k * sum_{p>=k} g_p equal to one.

Power-law programs are verified densely.  The Cantor programs have up to
~1e8 columns, so they are stored as unit-slope segments; within a segment
every residual is affine in the index, and checking segment ends suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._numerics import neumaier_prefix
from .constants import cantor_thresholds, harmonic_range
from .errors import CertificateInvalid, InputError
from .sequences import BlockGeometric

DEFAULT_TOL = 1e-9


@dataclass
class PrimalProgram:
    """maximize sum f subject to sum_{j<=k} j f_j <= rhs[k-1], f >= 0."""

    K: int
    rhs: np.ndarray

    def __post_init__(self):
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.K < 1 or len(self.rhs) != self.K:
            raise InputError("rhs must have exactly K entries")
        if np.any(self.rhs <= 0):
            raise InputError("rhs entries must be positive")

    def matrix(self) -> np.ndarray:
        """Dense lower-triangular constraint matrix (row k = 1, 2, ..., k, 0, ...)."""
        cols = np.arange(1, self.K + 1, dtype=float)
        return np.tril(np.broadcast_to(cols, (self.K, self.K)))


@dataclass
class LpCertificate:
    primal: object
    dual: object
    primal_objective: float
    dual_objective: float
    max_primal_residual: float
    max_dual_residual: float
    scale: float
    min_primal_slack: float = 0.0
    max_primal_slack: float = 0.0
    max_dual_slack: float = 0.0
    K: int = 0
    label: str = ""

    @property
    def gap(self) -> float:
        return abs(self.primal_objective - self.dual_objective)

    @property
    def relative_gap(self) -> float:
        return self.gap / self.scale

    @property
    def max_residual(self) -> float:
        return max(self.max_primal_residual, self.max_dual_residual)

    @property
    def packing_bound(self) -> float:
        """Certified N <= primal objective + 3."""
        return self.primal_objective + 3


# -- power-law family -----------------------------------------------------------


def build_power_primal(L: float, d: float, eps: float, K: int) -> PrimalProgram:
    k = np.arange(1, K + 1, dtype=float)
    scale = (L / eps) ** d
    return PrimalProgram(K, scale * k**d + k - 1)


def primal_solution(program: PrimalProgram, L: float, d: float, eps: float) -> np.ndarray:
    k = np.arange(1, program.K + 1, dtype=float)
    scale = (L / eps) ** d
    f = (k**d - (k - 1) ** d) / k * scale + 1 / k
    f[0] = scale
    return f


def dual_solution(program: PrimalProgram) -> np.ndarray:
    k = np.arange(1, program.K + 1, dtype=float)
    g = 1 / k - 1 / (k + 1)
    g[-1] = 1 / program.K
    return g


def saturating_primal(program: PrimalProgram) -> np.ndarray:
    """f_k = (b_k - b_{k-1}) / k, valid whenever b is non-decreasing."""
    b = program.rhs
    k = np.arange(1, program.K + 1, dtype=float)
    return np.diff(b, prepend=0.0) / k


def verify_certificate(program: PrimalProgram, f, g, tol: float = DEFAULT_TOL, label: str = "") -> LpCertificate:
    """Check feasibility of both sides and equality of objectives."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    K = program.K
    if f.shape != (K,) or g.shape != (K,):
        raise InputError("certificate vectors must have length K")
    scale = float(program.rhs[-1])
    k = np.arange(1, K + 1, dtype=float)
    usage = np.asarray(neumaier_prefix(k * f)[1:])
    slack = program.rhs - usage
    cover = k * np.asarray(neumaier_prefix(g[::-1])[1:])[::-1]
    dual_slack = cover - 1.0
    primal_obj = math.fsum(f)
    dual_obj = math.fsum(program.rhs * g)
    cert = LpCertificate(
        primal=f,
        dual=g,
        primal_objective=primal_obj,
        dual_objective=dual_obj,
        max_primal_residual=max(float(np.max(-slack)), 0.0, float(np.max(-f))),
        max_dual_residual=max(float(np.max(-dual_slack)), 0.0, float(np.max(-g))),
        scale=scale,
        min_primal_slack=float(np.min(slack)),
        max_primal_slack=float(np.max(np.abs(slack))),
        max_dual_slack=float(np.max(np.abs(dual_slack))),
        K=K,
        label=label,
    )
    _raise_if_invalid(cert, tol, _first_violation(-slack, tol * scale), _first_violation(-dual_slack, tol))
    return cert


def _first_violation(excess: np.ndarray, tol: float) -> int:
    """1-based index of the first entry above tol (of the largest if none is)."""
    over = np.flatnonzero(excess > tol)
    return int(over[0] if over.size else np.argmax(excess)) + 1


def _raise_if_invalid(cert: LpCertificate, tol: float, primal_row: int, dual_row: int) -> None:
    if cert.max_primal_residual > tol * cert.scale:
        raise CertificateInvalid(
            f"primal row {primal_row} violated by {cert.max_primal_residual:.3g}", row=primal_row
        )
    if cert.max_dual_residual > tol:
        raise CertificateInvalid(f"dual row {dual_row} violated by {cert.max_dual_residual:.3g}", row=dual_row)
    if cert.relative_gap > tol:
        raise CertificateInvalid(f"duality gap {cert.gap:.3g} exceeds tolerance")


def power_certificate(L: float, d: float, eps: float, K: int, tol: float = DEFAULT_TOL) -> LpCertificate:
    program = build_power_primal(L, d, eps, K)
    return verify_certificate(
        program, primal_solution(program, L, d, eps), dual_solution(program), tol, label=f"power L={L} d={d} eps={eps}"
    )


# -- segment-compressed programs (Cantor family) ----------------------------------


@dataclass
class Segment:
    """Rows lo..hi with rhs b_p = base + (p - lo).

    Primal: f_lo explicit, f_p = harmonic / p on (lo, hi].
    Dual:   g_lo explicit, g_p = telescoping * (1/p - 1/(p+1)) on (lo, hi].
    """

    lo: int
    hi: int
    base: float
    f_lo: float = 0.0
    harmonic: float = 0.0
    g_lo: float = 0.0
    telescoping: float = 0.0


@dataclass
class SegmentCertificate(LpCertificate):
    segments: list = field(default_factory=list)

    def to_dense(self):
        """(program, f, g) expanded column by column; only for small K."""
        rhs, f, g = [], [], []
        for s in self.segments:
            for p in range(s.lo, s.hi + 1):
                rhs.append(s.base + (p - s.lo))
                if p == s.lo:
                    f.append(s.f_lo)
                    g.append(s.g_lo)
                else:
                    f.append(s.harmonic / p)
                    g.append(s.telescoping * (1 / p - 1 / (p + 1)))
        return PrimalProgram(len(rhs), rhs), np.array(f), np.array(g)


def verify_segments(segments: list, tol: float = DEFAULT_TOL, label: str = "") -> SegmentCertificate:
    """Verify a segment-compressed certificate by checking each segment's ends."""
    if not segments or segments[0].lo != 1:
        raise InputError("segments must start at row 1")
    for a, b in zip(segments, segments[1:]):
        if b.lo != a.hi + 1:
            raise InputError("segments must tile 1..K")
    scale = segments[-1].base + segments[-1].hi - segments[-1].lo
    usage = 0.0
    worst_primal, worst_primal_row = 0.0, 1
    min_slack, max_abs_slack = math.inf, 0.0
    primal_terms, dual_terms = [], []
    for s in segments:
        usage_lo = usage + s.lo * s.f_lo
        checks = [(s.lo, usage_lo)]
        if s.hi > s.lo:
            checks.append((s.lo + 1, usage_lo + s.harmonic))
            checks.append((s.hi, usage_lo + s.harmonic * (s.hi - s.lo)))
        for p, used in checks:
            slack = s.base + (p - s.lo) - used
            min_slack = min(min_slack, slack)
            max_abs_slack = max(max_abs_slack, abs(slack))
            if -slack > worst_primal:
                worst_primal, worst_primal_row = -slack, p
        usage = checks[-1][1]
        primal_terms.append(s.f_lo)
        primal_terms.append(s.harmonic * harmonic_range(s.lo + 1, s.hi))
        dual_terms.append(s.base * s.g_lo)
        if s.hi > s.lo and s.telescoping:
            shifted = s.base - s.lo
            dual_terms.append(
                s.telescoping * (shifted * (1 / (s.lo + 1) - 1 / (s.hi + 1)) + harmonic_range(s.lo + 2, s.hi + 1))
            )
        if min(s.f_lo, s.harmonic, s.g_lo, s.telescoping) < 0:
            raise CertificateInvalid(f"negative entry in segment starting at row {s.lo}", row=s.lo)
    # dual rows, right to left
    tail = 0.0
    worst_dual, worst_dual_row, max_dual_slack = 0.0, 1, 0.0
    for s in reversed(segments):
        inner = {}
        if s.hi > s.lo:
            for j in (s.hi, s.lo + 1):
                inner[j] = tail + s.telescoping * (1 / j - 1 / (s.hi + 1))
            at_lo = inner[s.lo + 1] + s.g_lo
        else:
            at_lo = tail + s.g_lo
        inner[s.lo] = at_lo
        for j, cover in inner.items():
            short = 1.0 - j * cover
            max_dual_slack = max(max_dual_slack, abs(short))
            if short > worst_dual:
                worst_dual, worst_dual_row = short, j
        tail = at_lo
    cert = SegmentCertificate(
        primal=segments,
        dual=segments,
        primal_objective=math.fsum(primal_terms),
        dual_objective=math.fsum(dual_terms),
        max_primal_residual=worst_primal,
        max_dual_residual=worst_dual,
        scale=scale,
        min_primal_slack=min_slack,
        max_primal_slack=max_abs_slack,
        max_dual_slack=max_dual_slack,
        K=segments[-1].hi,
        label=label,
        segments=segments,
    )
    _raise_if_invalid(cert, tol, worst_primal_row, worst_dual_row)
    return cert


def cantor_horizon(a, n: int) -> tuple[list[int], int]:
    """(p_0..p_I, I) with I the first index whose tail sum is <= a 3**-n."""
    seq = BlockGeometric(Fraction(1, 3), 2, 1)
    eps = Fraction(a) * Fraction(1, 3**n)
    p = cantor_thresholds(a, 2)
    i = 0
    while seq.tail_sum(p[i]) > eps:
        i += 1
        if i + 1 >= len(p):
            p = cantor_thresholds(a, len(p) + 8)
    return p[: i + 1], i


def cantor_segments(a, n: int, form: str = "saturating") -> list[Segment]:
    """Rows p = 1..p_I of the Cantor program with rhs 2**(n+k-1) + p - 1 on [p_k, p_{k+1}).

    ``form="saturating"`` gives the optimal pair (every row and dual row tight).
    ``form="sparse"`` gives the pair supported on the thresholds p_k only.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    p, I = cantor_horizon(a, n)
    bounds = [(p[k], p[k + 1] - 1) for k in range(I)] + [(p[I], p[I])]
    segments = []
    for k, (lo, hi) in enumerate(bounds):
        base = 2.0 ** (n + k - 1) + lo - 1
        last = k == I
        if form == "saturating":
            f_lo = 2.0 ** (n - 1) if k == 0 else (2.0 ** (n + k - 2) + 1) / lo
            g_lo = 1 / lo if last else 1 / lo - 1 / (lo + 1)
            seg = Segment(lo, hi, base, f_lo, 1.0, g_lo, 1.0)
        elif form == "sparse":
            f_lo = 2.0 ** (n - 1) if k == 0 else (2.0 ** (n + k - 2) + p[k] - p[k - 1]) / lo
            g_lo = 1 / lo if last else 1 / p[k] - 1 / p[k + 1]
            seg = Segment(lo, hi, base, f_lo, 0.0, g_lo, 0.0)
        else:
            raise InputError(f"unknown certificate form {form!r}")
        segments.append(seg)
    return segments


def build_cantor_certificate(a, n: int, form: str = "saturating", tol: float = DEFAULT_TOL) -> SegmentCertificate:
    """Certified upper bound on N(S, a 3**-n) - 3 for the rearranged Cantor set."""
    return verify_segments(cantor_segments(a, n, form), tol, label=f"cantor a={a} n={n} {form}")


def sparse_cantor_objective(a, n: int) -> float:
    """2**(n-1) (1 + sum 2**(k-1)/p_k) + sum (p_k - p_{k-1})/p_k over k = 1..I."""
    p, I = cantor_horizon(a, n)
    first = 1 + math.fsum(2.0 ** (k - 1) / p[k] for k in range(1, I + 1))
    return 2.0 ** (n - 1) * first + math.fsum((p[k] - p[k - 1]) / p[k] for k in range(1, I + 1))


# -- oracle ----------------------------------------------------------------------


def simplex_max(c, A, b, max_iter: int = 10000) -> tuple[float, np.ndarray]:
    """Maximize c.x subject to A x <= b, x >= 0 with b >= 0 (Bland's rule).

    A small dense tableau meant only as a test oracle.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise InputError("simplex oracle needs b >= 0")
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        entering = next((j for j in range(n + m) if tab[m, j] < -1e-12), None)
        if entering is None:
            break
        col = tab[:m, entering]
        ratios = [(tab[i, -1] / col[i], basis[i], i) for i in range(m) if col[i] > 1e-12]
        if not ratios:
            raise InputError("unbounded program")
        _, _, row = min(ratios)
        tab[row] /= tab[row, entering]
        for i in range(m + 1):
            if i != row and tab[i, entering] != 0:
                tab[i] -= tab[i, entering] * tab[row]
        basis[row] = entering
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = tab[i, -1]
    return float(tab[m, -1]), x[:n]
