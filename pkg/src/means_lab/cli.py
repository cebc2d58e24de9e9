"""Command-line front end.

Exit codes: 0 completed (and, for ``hunt``, no counterexample), 2 usage or
domain error, 3 certified counterexample found and emitted.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional

from . import __version__
from .errors import DomainError, OutOfRangeError
from .explorer import (
    DEFAULT_T_MAX,
    ScanConfig,
    assess_margin,
    bracket_ratio_crossing,
    exponent_profile,
    hunt,
    scan,
)
from .inequalities import (
    ChainMargins,
    InequalityId,
    check_exponent,
    chain_margins,
    lemma_gap,
    proof_identity_residuals,
)
from .means import MeanKind, PositivePair, RatioForm, eval_all
from .oracle import MIN_DIGITS, default_start_digits, eval_all_hp
from . import report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COUNTEREXAMPLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _positive(text: str) -> float:
    value = _finite(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _digits(text: str) -> int:
    value = _count(text)
    if value < MIN_DIGITS:
        raise argparse.ArgumentTypeError(f"digits must be >= {MIN_DIGITS}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not -(1 << 63) <= value < (1 << 64):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _float_list(text: str) -> List[float]:
    return [_finite(part) for part in text.split(",") if part.strip()]


def _add_pair(p):
    p.add_argument("--x", type=_positive)
    p.add_argument("--y", type=_positive)
    p.add_argument("--t", type=_finite, help="canonical ratio >= 1 (scale 1)")


def _add_common(p):
    p.add_argument("--out", choices=("csv", "json"), default="csv")
    p.add_argument("--digits", type=_digits, help="oracle start precision (default $MEANS_LAB_DIGITS or 50)")


def _add_range(p, t_lo=1.0, t_hi=DEFAULT_T_MAX):
    p.add_argument("--t-lo", type=_finite, default=t_lo)
    p.add_argument("--t-hi", type=_finite, default=t_hi)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="means-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one or all seven means")
    _add_pair(p)
    _add_common(p)
    p.add_argument("--kind", help="H, G, A, Q, P, L or I (default: all)")

    p = sub.add_parser("margin", help="signed margin of one inequality at a pair")
    _add_pair(p)
    _add_common(p)
    p.add_argument("--ineq", required=True)
    p.add_argument("--n", type=_finite)
    p.add_argument("--certify", action="store_true", help="always certify the sign with the oracle")

    for verb, help_text in (("chain", "the six-term chain and its five margins"),
                            ("identities", "margins and residuals of the proof identities")):
        p = sub.add_parser(verb, help=help_text)
        _add_pair(p)
        _add_common(p)

    p = sub.add_parser("lemma", help="c^n + d^n - a^n - b^n under a+b <= c+d, ab >= cd")
    for name in ("a", "b", "c", "d"):
        p.add_argument(f"--{name}", type=_positive, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("scan", help="sign map over the ratio (and exponent) grid")
    _add_common(p)
    p.add_argument("--ineq", required=True)
    _add_range(p, 1.0, 100.0)
    p.add_argument("--t-steps", type=_count, default=64)
    p.add_argument("--linear", action="store_true", help="linear instead of log spacing in t")
    p.add_argument("--n", type=_finite, help="single exponent")
    p.add_argument("--n-lo", type=_finite)
    p.add_argument("--n-hi", type=_finite)
    p.add_argument("--n-steps", type=_count)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--budget", type=_count, default=100_000)
    p.add_argument("--workers", type=_count, default=1)

    p = sub.add_parser("hunt", help="search for a certified counterexample")
    _add_common(p)
    p.add_argument("--ineq", required=True)
    _add_range(p)
    p.add_argument("--t-steps", type=_count, default=64)
    p.add_argument("--n", type=_finite)
    p.add_argument("--n-lo", type=_finite)
    p.add_argument("--n-hi", type=_finite)
    p.add_argument("--n-steps", type=_count)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--budget", type=_count, default=4096)

    p = sub.add_parser("bracket", help="bisect a certified sign change in log t")
    _add_common(p)
    p.add_argument("--ineq", required=True)
    p.add_argument("--t-lo", type=_finite, required=True)
    p.add_argument("--t-hi", type=_finite, required=True)
    p.add_argument("--n", type=_finite)
    p.add_argument("--tol", type=_positive, default=1e-6, help="bracket width in log t")

    p = sub.add_parser("profile", help="per-exponent minimal power gap over the ratio range")
    _add_common(p)
    p.add_argument("--n-grid", type=_float_list, required=True, help="comma-separated exponents")
    _add_range(p, 1.0, 1e6)
    p.add_argument("--closed", action="store_true", help="include t_lo itself in the grid")
    p.add_argument("--grid-points", type=_count, default=512)
    p.add_argument("--workers", type=_count, default=1)
    return parser


def _pair_from(args) -> PositivePair:
    if args.t is not None:
        if args.x is not None or args.y is not None:
            raise DomainError("give either --x/--y or --t, not both")
        return RatioForm(args.t).to_pair()
    if args.x is None or args.y is None:
        raise DomainError("a pair needs --x and --y (or --t)")
    return PositivePair(args.x, args.y)


def _n_range(args):
    if args.n is not None:
        if args.n_lo is not None or args.n_hi is not None:
            raise DomainError("give either --n or --n-lo/--n-hi")
        return (args.n, args.n), 1
    if args.n_lo is None and args.n_hi is None:
        return None, None
    if args.n_lo is None or args.n_hi is None:
        raise DomainError("--n-lo and --n-hi go together")
    return (args.n_lo, args.n_hi), args.n_steps


def _write(data: bytes):
    out = getattr(sys.stdout, "buffer", None)
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        out.write(data)
    sys.stdout.flush()


def _cmd_eval(args):
    pair = _pair_from(args)
    if args.digits:
        values = {k: v.value for k, v in eval_all_hp(pair, args.digits).items()}
    else:
        values = eval_all(pair)
    if args.kind:
        kind = MeanKind.parse(args.kind)
        if args.out == "csv" and not args.digits:
            _write((report.fmt_float(values[kind]) + "\n").encode("utf-8"))
        elif args.out == "csv":
            _write((str(values[kind]) + "\n").encode("utf-8"))
        else:
            _write(report.emit_named_values([(kind.value, values[kind])], "json"))
        return EXIT_OK
    if args.digits and args.out == "csv":
        text = report.write_csv(("name", "value"), ((k.value, str(v)) for k, v in values.items()))
        _write(text.encode("utf-8"))
    else:
        _write(report.emit_named_values([(k.value, v) for k, v in values.items()], args.out))
    return EXIT_OK


def _cmd_margin(args):
    ineq = InequalityId.parse(args.ineq)
    n = check_exponent(ineq, args.n)
    rec = assess_margin(ineq, _pair_from(args), n, args.start_digits, force=args.certify)
    _write(report.emit_margin_rows([rec], args.out))
    return EXIT_OK


def _cmd_chain(args):
    chain: ChainMargins = chain_margins(_pair_from(args))
    rows = list(zip(ChainMargins.NAMES, chain.quantities))
    rows += [(f"margin_{k + 1}", m) for k, m in enumerate(chain.margins)]
    _write(report.emit_named_values(rows, args.out))
    return EXIT_OK


def _cmd_identities(args):
    res = proof_identity_residuals(_pair_from(args))
    names = ("square_root_bound", "arith_harmonic_residual", "root_sum_bound", "quad_geom_residual")
    _write(report.emit_named_values(list(zip(names, res.as_tuple())), args.out))
    return EXIT_OK


def _cmd_lemma(args):
    value = lemma_gap(args.a, args.b, args.c, args.d, args.n)
    _write(report.emit_named_values([("lemma_gap", value)], args.out))
    return EXIT_OK


def _scan_config(args, ineq):
    n_range, n_steps = _n_range(args)
    return ScanConfig(
        ineq,
        (args.t_lo, args.t_hi),
        args.t_steps,
        log_t=not getattr(args, "linear", False),
        n_range=n_range,
        n_steps=n_steps,
        seed=args.seed,
        budget=args.budget,
    )


def _cmd_scan(args):
    cfg = _scan_config(args, InequalityId.parse(args.ineq))
    sys.stderr.write(f"seed: {cfg.seed}\n")
    smap = scan(cfg, workers=args.workers, start_digits=args.start_digits)
    _write(report.emit_signmap(smap, args.out))
    return EXIT_OK


def _cmd_hunt(args):
    cfg = _scan_config(args, InequalityId.parse(args.ineq))
    sys.stderr.write(f"seed: {cfg.seed}\n")
    result = hunt(cfg, start_digits=args.start_digits)
    _write(report.emit_hunt(result, cfg.id.value, args.out, cfg.to_dict()))
    return EXIT_COUNTEREXAMPLE if result.found else EXIT_OK


def _cmd_bracket(args):
    ineq = InequalityId.parse(args.ineq)
    n = check_exponent(ineq, args.n)
    b = bracket_ratio_crossing(ineq, args.t_lo, args.t_hi, n, args.tol, args.start_digits)
    _write(report.emit_bracket(b, ineq.value, n, args.out))
    return EXIT_OK


def _cmd_profile(args):
    if not args.n_grid:
        raise DomainError("--n-grid needs at least one exponent")
    prof = exponent_profile(
        args.n_grid,
        (args.t_lo, args.t_hi),
        open_lower=not args.closed,
        grid_points=args.grid_points,
        start_digits=args.start_digits,
        workers=args.workers,
    )
    _write(report.emit_profile(prof, args.out))
    return EXIT_OK


_COMMANDS = {
    "eval": _cmd_eval,
    "margin": _cmd_margin,
    "chain": _cmd_chain,
    "identities": _cmd_identities,
    "lemma": _cmd_lemma,
    "scan": _cmd_scan,
    "hunt": _cmd_hunt,
    "bracket": _cmd_bracket,
    "profile": _cmd_profile,
}


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.start_digits = args.digits if args.digits is not None else default_start_digits()
        return _COMMANDS[args.verb](args)
    except (DomainError, OutOfRangeError) as exc:
        sys.stderr.write(f"means-lab {args.verb}: error: {exc}\n")
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)
