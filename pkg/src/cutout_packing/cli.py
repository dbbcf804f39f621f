"""Command-line drivers.  Every command writes CSV (header first) or a plain report.

Exit codes: 0 success, 2 bad input, 3 numerically undecidable, 4 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import descriptors
from .constants import p_const, series_A
from .errors import InputError, PackingError
from .geometry import CutOutSet, SelfSimilarSystem, tube_volume
from .lp_cert import build_cantor_certificate, power_certificate
from .massdist import bracket, tail_upper_bound
from .packing import greedy_blocks, pack_cutout
from .renewal import CountFunction, build_profile, packing_constant
from .sequences import PowerLaw, first_small_tail
from .sharpness import cantor_report, half_third_report

DENSE_LP_LIMIT = 4000
DEFAULT_DIMS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999)


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str) or (isinstance(value, int) and not isinstance(value, bool)):
        return str(value)
    return "%.17g" % float(value)


def eps_grid(start: float, stop: float, per_decade: int) -> list[float]:
    """Log-spaced, strictly decreasing grid from start down to stop."""
    if not (start > 0 and stop > 0 and per_decade >= 1):
        raise InputError("grid needs positive start, stop and per-decade")
    if stop > start:
        raise InputError("eps-stop must not exceed eps-start")
    steps = round(math.log10(start / stop) * per_decade)
    return [start * 10 ** (-i / per_decade) for i in range(steps + 1)]


def _parallel(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _write_csv(args, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _grid(args) -> list[float]:
    if args.eps is not None:
        return [args.eps]
    return eps_grid(args.eps_start, args.eps_stop, args.per_decade)


def _load(args):
    if not args.set:
        raise InputError("--set is required")
    return descriptors.read(args.set)


# -- commands ---------------------------------------------------------------------


def cmd_pack_curve(args) -> int:
    obj = _load(args)
    grid = _grid(args)
    d = args.d if args.d is not None else descriptors.natural_dimension(obj)
    if isinstance(obj, SelfSimilarSystem):
        from .constants import moran_dimension

        d = d if d is not None else moran_dimension(obj)
        counter = CountFunction(obj)

        def row(eps):
            n = counter(Fraction(eps) if obj.exact else eps)
            return (eps, n, n * eps**d, None, None)

    else:
        if d is None:
            raise InputError("--d is required for this model")
        cut = CutOutSet(obj)

        def row(eps):
            res = pack_cutout(cut, eps, d)
            lp, greedy = None, None
            if isinstance(obj, PowerLaw):
                K = first_small_tail(obj, eps)
                if K <= DENSE_LP_LIMIT:
                    lp = power_certificate(obj.L, obj.d, eps, K).packing_bound
                greedy = greedy_blocks(obj, eps, obj.d, obj.L, strict=False).count
            return (eps, res.count, res.normalized, lp, greedy)

    rows = _parallel(row, grid, args.threads)
    _write_csv(args, ["epsilon", "count", "normalized", "lp_upper", "greedy_lower"], rows)
    return 0


def cmd_constants(args) -> int:
    dims = [args.d] if args.d is not None else list(DEFAULT_DIMS)
    tol = args.tol if args.tol is not None else 1e-10

    def row(d):
        value = series_A(d, tol)
        return (d, value.midpoint, value.tail_bound, p_const(d, tol))

    _write_csv(args, ["d", "A_d", "A_d_tail", "p_d"], _parallel(row, dims, args.threads))
    return 0


def cmd_lp_verify(args) -> int:
    tol = args.tol if args.tol is not None else 1e-9
    jobs = []
    if args.set:
        seq = _load(args)
        if not isinstance(seq, PowerLaw):
            raise InputError("lp-verify --set needs a powerlaw descriptor")
        for eps in _grid(args):
            jobs.append(("power", (seq.L, seq.d, eps)))
    for a in args.cantor_a or []:
        for n in args.cantor_n or [3, 5, 8]:
            jobs.append(("cantor", (descriptors.number(a), n)))
    if not jobs:
        raise InputError("nothing to verify: give --set with a grid or --cantor-a")

    def run(job):
        kind, params = job
        if kind == "power":
            L, d, eps = params
            K = first_small_tail(PowerLaw(L, d), eps)
            if K > DENSE_LP_LIMIT:
                raise InputError(f"K={K} too large for the dense power-law program")
            cert = power_certificate(L, d, eps, K, tol)
            name = f"power L={fmt(L)} d={fmt(d)} eps={fmt(eps)}"
        else:
            a, n = params
            cert = build_cantor_certificate(a, n, tol=tol)
            name = f"cantor a={a} n={n}"
        return (name, cert.K, cert.primal_objective, cert.dual_objective, cert.gap, cert.max_residual)

    _write_csv(args, ["instance", "K", "primalObj", "dualObj", "gap", "maxResidual"],
               _parallel(run, jobs, args.threads))
    return 0


def cmd_renewal(args) -> int:
    system = _load(args)
    if not isinstance(system, SelfSimilarSystem):
        raise InputError("renewal needs a system descriptor")
    profile = build_profile(system, args.tol if args.tol is not None else 1e-12)
    lo, hi = profile.constant_interval
    out = sys.stderr if args.out is None and args.eps_start is not None else sys.stdout
    print(f"d = {profile.d:.17g}", file=out)
    print(f"delta = {profile.delta}", file=out)
    print("jumps (count, bracket):", file=out)
    for j in profile.jumps:
        print(f"  N >= {j.count} up to eps in [{float(j.lo):.17g}, {float(j.hi):.17g}]", file=out)
    print("z pieces (a_lo, a_hi, coefficient):", file=out)
    for a1, a2, c in profile.z_pieces:
        print(f"  [{a1:.17g}, {a2:.17g}) {c}", file=out)
    print(f"mu_mean = {profile.mu_mean:.17g}", file=out)
    try:
        packing_constant(profile)
        print(f"constant in [{lo:.17g}, {hi:.17g}]", file=out)
    except PackingError as exc:
        print(f"constant unavailable: {exc}", file=out)
    if args.eps_start is not None:
        counter = profile.counter
        rows = []
        for eps in _grid(args):
            n = counter(Fraction(eps) if system.exact else eps)
            rows.append((eps, n, n * eps**profile.d))
        _write_csv(args, ["epsilon", "count", "normalized"], rows)
    return 0


def cmd_mssp(args) -> int:
    seq = descriptors.as_sequence(_load(args))
    d = args.d if args.d is not None else descriptors.natural_dimension(seq)
    L_low = args.L_low if args.L_low is not None else getattr(seq, "L", None)

    def row(eps):
        if d is None or L_low is None:
            upper = tail_upper_bound(seq, eps)
            return (eps, None, upper, None, upper)
        b = bracket(seq, eps, d, L_low)
        return (eps, b.lower, b.upper, b.greedy, b.tailbound)

    _write_csv(args, ["epsilon", "lower", "upper", "greedy", "tailbound"],
               _parallel(row, _grid(args), args.threads))
    return 0


def cmd_tube(args) -> int:
    seq = descriptors.as_sequence(_load(args))
    d = args.d if args.d is not None else descriptors.natural_dimension(seq)
    if d is None:
        raise InputError("--d is required for this model")

    def row(eps):
        vol = tube_volume(seq, eps)
        return (eps, vol, float(vol) / eps ** (1 - d))

    _write_csv(args, ["epsilon", "tube_volume", "normalized_content"], _parallel(row, _grid(args), args.threads))
    return 0


def cmd_sharpness(args) -> int:
    if args.set:
        descriptors.read(args.set)  # only validates; the report is for the fixed pair
    t_rep = half_third_report()
    lo, hi = t_rep.constant_interval
    print(f"t = {t_rep.t:.17g} (|2^-t + 3^-t - 1| = {t_rep.moran_residual:.3g})")
    print("N(T, 1/j): " + ", ".join(f"j={j}: {n}" for j, n in t_rep.counts.items()))
    print(f"delta(T,6) in [{float(t_rep.delta6[0]):.17g}, {float(t_rep.delta6[1]):.17g}]  (case {t_rep.case})")
    print(f"packing constant in [{lo:.17g}, {hi:.17g}]")
    print(f"p_t * content = {t_rep.content_bound:.17g}")
    print(f"verdict: constant < p_t * content is {t_rep.verdict}")
    s_rep = cantor_report()
    print(f"S normalized curve: min {s_rep.empirical_min:.17g}, max {s_rep.empirical_max:.17g}")
    print(f"L(a) over the a-grid: min {s_rep.formula_min:.17g}, max {s_rep.formula_max:.17g}")
    return 0


# -- entry ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutout-packing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--set", help="descriptor file or inline JSON")
        p.add_argument("--d", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        p.add_argument("--threads", type=int, default=1)
        if grid:
            p.add_argument("--eps", type=float)
            p.add_argument("--eps-start", type=float)
            p.add_argument("--eps-stop", type=float)
            p.add_argument("--per-decade", type=int, default=1)
        return p

    common(sub.add_parser("pack-curve", help="eps, N(eps), eps^d N(eps) along a grid")).set_defaults(
        func=cmd_pack_curve, eps_start=1e-2, eps_stop=1e-4
    )
    common(sub.add_parser("constants", help="A_d and p_d table"), grid=False).set_defaults(func=cmd_constants)
    lp = common(sub.add_parser("lp-verify", help="check LP certificates"))
    lp.add_argument("--cantor-a", nargs="*", help="values of a in (1, 3], e.g. 3/2")
    lp.add_argument("--cantor-n", nargs="*", type=int)
    lp.set_defaults(func=cmd_lp_verify, eps_start=1e-2, eps_stop=1e-3)
    ren = common(sub.add_parser("renewal", help="renewal profile of a self-similar system"))
    ren.add_argument("--system", dest="set")
    ren.set_defaults(func=cmd_renewal)
    ms = common(sub.add_parser("mssp", help="mass distribution bracket"))
    ms.add_argument("--seq", dest="set")
    ms.add_argument("--L-low", dest="L_low", type=float)
    ms.set_defaults(func=cmd_mssp, eps_start=1e-2, eps_stop=1e-4)
    common(sub.add_parser("tube", help="tube volume and normalized content")).set_defaults(
        func=cmd_tube, eps_start=1e-2, eps_stop=1e-6
    )
    common(sub.add_parser("sharpness", help="reports for the sets T and S"), grid=False).set_defaults(
        func=cmd_sharpness
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except PackingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
