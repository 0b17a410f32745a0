"""Command-line interface.

Subcommands: count, summatory, asymptotic, scan, fit, expsum, lemma3,
verify.  Exit codes: 0 success, 1 verification failure, 2 usage error,
3 resource/precision failure.  Integer results are printed as exact
decimal strings (and serialized as strings in JSON); high-precision reals
are printed as exact finite decimals that parse back bit-identically.

The default precision is 128 bits, overridable per-invocation with
``--precision-bits`` or globally with the ``POWERSUM_PRECISION_BITS``
environment variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction
from typing import List, Optional

import mpmath as mp

from . import _serialize, _verify, asymptotics, counting, residuals, sawtooth
from .errors import (DegenerateFitError, EnvelopeViolationError,
                     OracleMismatchError, PowersumError, PrecisionError,
                     QuadratureError, ResourceLimitError)
from .instance import Instance

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class _UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision-bits", type=int, default=None,
                   help="working precision in bits (default: "
                        "$POWERSUM_PRECISION_BITS or 128)")
    p.add_argument("--format", choices=("csv", "tsv", "json"), default=None,
                   help="output format for tabular commands")
    p.add_argument("--output", default=None,
                   help="write output to this file instead of stdout")
    p.add_argument("--threads", type=int, default=0,
                   help="worker threads for parallelizable stages (0 = auto)")
    p.add_argument("--allow-outside-theorem", action="store_true",
                   help="permit k < 4 or s > k+1 (results flagged exploratory)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for synthetic-data generation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powersum",
        description="Exact power-sum representation counts, their two-term "
                    "asymptotic, and error-exponent measurement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="representation count r_{k,s}(n)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", required=True)
    _add_common(p)

    p = sub.add_parser("summatory", help="partial-sum count S_{k,s}(x)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--algorithm",
                   choices=("auto", "direct", "split", "recursive"),
                   default="auto")
    _add_common(p)

    p = sub.add_parser("asymptotic", help="two-term asymptotic at x")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--x", required=True)
    _add_common(p)

    p = sub.add_parser("scan", help="residual scan across a grid")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--x-min", required=True)
    p.add_argument("--x-max", required=True)
    p.add_argument("--grid", choices=("dyadic", "geometric"), default="dyadic")
    p.add_argument("--ratio", type=float,
                   default=residuals.DEFAULT_GEOMETRIC_RATIO,
                   help="spacing ratio for geometric grids")
    _add_common(p)

    p = sub.add_parser("fit", help="log-log exponent fit")
    p.add_argument("--input", default=None,
                   help="CSV to fit: scan output (use --which) or x,sup pairs")
    p.add_argument("--which", choices=("two_term", "main_only"),
                   default="two_term",
                   help="residual column when fitting scan output")
    p.add_argument("--synthetic-slope", type=float, default=None,
                   help="generate a synthetic power law and fit it back")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--decades", type=float, default=6.0)
    p.add_argument("--noise", type=float, default=0.0)
    _add_common(p)

    p = sub.add_parser("expsum", help="block exponential sums and bounds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--M", type=float, default=None,
                   help="block start; defaults to every generated block")
    p.add_argument("--H", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("lemma3", help="boundary sawtooth cancellation sum")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    _add_common(p)

    return parser


def _parse_cutoff(raw: str, name: str = "x") -> int:
    """Integer cutoff; non-integer reals are floored with a warning."""
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        v = float(raw)
    except ValueError as exc:
        raise _UsageError(f"--{name} must be a number, got {raw!r}") from exc
    if not math.isfinite(v):
        raise _UsageError(f"--{name} must be finite, got {raw!r}")
    floored = math.floor(v)
    if floored != v:
        print(f"warning: non-integer --{name}={raw} floored to {floored}",
              file=sys.stderr)
    return floored


def _parse_real(raw: str, name: str = "x") -> float | int:
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        v = float(raw)
    except ValueError as exc:
        raise _UsageError(f"--{name} must be a number, got {raw!r}") from exc
    if not math.isfinite(v):
        raise _UsageError(f"--{name} must be finite, got {raw!r}")
    return v


def _gate_theorem(args, k: int, s: Optional[int]) -> None:
    """Warn-or-refuse for parameters outside the proven range."""
    outside = k < 4 or (s is not None and s > k + 1)
    if not outside:
        return
    desc = f"k={k}" + (f", s={s}" if s is not None else "")
    if not args.allow_outside_theorem:
        raise _UsageError(
            f"({desc}) is outside the proven range (k >= 4 and 2 <= s <= k+1); "
            "pass --allow-outside-theorem to proceed"
        )
    print(f"warning: ({desc}) is outside the proven range; results are "
          "exploratory", file=sys.stderr)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _rows_to_delimited(header: List[str], rows: List[List[str]],
                       fmt: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",",
                        lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _cmd_count(args) -> int:
    n = _parse_cutoff(args.n, "n")
    if n < 0:
        raise _UsageError("--n must be nonnegative")
    inst = Instance(k=args.k, s=args.s)
    _emit(args, str(counting.r_count(inst, n)))
    return EXIT_OK


def _cmd_summatory(args) -> int:
    x = _parse_cutoff(args.x)
    if x < 0:
        raise _UsageError("--x must be nonnegative")
    inst = Instance(k=args.k, s=args.s)
    algo = args.algorithm
    if algo == "split" and inst.s != 2:
        raise _UsageError("--algorithm split requires s = 2")
    if algo in ("recursive", "auto") and inst.s < 2 and algo == "recursive":
        raise _UsageError("--algorithm recursive requires s >= 2")
    if algo == "auto":
        algo = "split" if inst.s == 2 else ("recursive" if inst.s > 2 else "direct")
    if algo == "direct":
        val = counting.summatory_direct(inst, x, workers=args.threads)
    elif algo == "split":
        val = counting.summatory_split_s2(inst.k, x, workers=args.threads) if x >= 1 else 0
    else:
        val = counting.summatory_recursive(inst, x)
    _emit(args, str(val))
    return EXIT_OK


def _cmd_asymptotic(args) -> int:
    inst = Instance(k=args.k, s=args.s)
    _gate_theorem(args, inst.k, inst.s)
    x = _parse_real(args.x)
    if not float(x) > 0:
        raise _UsageError("--x must be positive")
    est = asymptotics.two_term(inst, x, args.precision_bits)
    payload = {
        "k": inst.k,
        "s": inst.s,
        "x": str(x),
        "precision_bits": est.main_term.precision_bits,
        "theorem_valid": inst.theorem_valid,
        "main": _serialize.mpf_to_exact_decimal(est.main_term.value),
        "second": _serialize.mpf_to_exact_decimal(est.second_term.value),
        "two_term": _serialize.mpf_to_exact_decimal(est.two_term_value.value),
        "predicted_exponent": str(est.predicted_error_exponent),
    }
    _emit(args, json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_scan(args) -> int:
    x_min = _parse_cutoff(args.x_min, "x-min")
    x_max = _parse_cutoff(args.x_max, "x-max")
    if args.s >= args.k + 2:
        _gate_theorem(args, args.k, args.s)
        result = residuals.probe_beyond_theorem(
            args.k, args.s, x_max, x_min=x_min, grid=args.grid,
            ratio=args.ratio, precision_bits=args.precision_bits)
    else:
        _gate_theorem(args, args.k, args.s)
        inst = Instance(k=args.k, s=args.s)
        result = residuals.scan(inst, x_min, x_max, grid=args.grid,
                                ratio=args.ratio,
                                precision_bits=args.precision_bits)
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(args, _serialize.scan_to_json(result))
    else:
        _emit(args, _serialize.scan_to_delimited(
            result, delimiter="\t" if fmt == "tsv" else ","))
    return EXIT_OK


def _fit_payload(fit: residuals.ExponentFit, extra: dict) -> str:
    payload = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "points_used": fit.points_used,
        "max_abs_residual_of_fit": fit.max_abs_residual_of_fit,
    }
    payload.update(extra)
    return json.dumps(payload, indent=2)


def _cmd_fit(args) -> int:
    if (args.input is None) == (args.synthetic_slope is None):
        raise _UsageError("fit needs exactly one of --input or --synthetic-slope")
    if args.synthetic_slope is not None:
        rng = random.Random(args.seed)
        pts = []
        for i in range(args.points):
            x = 10.0 ** (1.0 + args.decades * i / max(1, args.points - 1))
            noise = math.exp(rng.uniform(-args.noise, args.noise)) if args.noise else 1.0
            pts.append((x, 2.5 * x**args.synthetic_slope * noise))
        fit = residuals.fit_exponent(pts)
        _emit(args, _fit_payload(fit, {"planted_slope": args.synthetic_slope,
                                       "seed": args.seed}))
        return EXIT_OK
    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise _UsageError(f"{args.input} is empty")
    header = tuple(rows[0])
    if header == _serialize.SCAN_COLUMNS:
        col = "residual_two" if args.which == "two_term" else "residual_main_only"
        idx = _serialize.SCAN_COLUMNS.index(col)
        best: dict = {}
        for row in rows[1:]:
            x = int(row[0])
            v = abs(float(Fraction(row[idx])))
            j = x.bit_length() - 1
            if j not in best or v > best[j][1]:
                best[j] = (x, v)
        pts = [best[j] for j in sorted(best) if best[j][1] > 0]
        fit = residuals.fit_exponent(pts)
        _emit(args, _fit_payload(fit, {"which": args.which,
                                       "windows_used": len(pts)}))
        return EXIT_OK
    if header == ("x", "sup"):
        pts = [(float(r[0]), float(r[1])) for r in rows[1:]]
        fit = residuals.fit_exponent(pts)
        _emit(args, _fit_payload(fit, {}))
        return EXIT_OK
    raise _UsageError(
        f"unrecognized header {header!r}; expected scan columns or x,sup")


def _cmd_expsum(args) -> int:
    x = _parse_real(args.x)
    if not float(x) > 1:
        raise _UsageError("--x must exceed 1")
    if args.k < 2:
        raise _UsageError("--k must be >= 2")
    if args.M is not None:
        cfgs = [sawtooth.ExpSumConfig.make(x, args.k, args.M, args.h,
                                           H=args.H, nu=args.nu)]
    else:
        cfgs = [sawtooth.ExpSumConfig.for_block(x, args.k, blk, args.h,
                                                H=args.H, nu=args.nu)
                for blk in sawtooth.dyadic_blocks(x, args.k, args.nu)]
    header = ["M", "M_prime", "m_lo", "m_hi", "t_real", "t_imag", "t_abs",
              "mu", "eta", "bound", "abs_t_over_bound"]
    rows = []
    for cfg in cfgs:
        t = sawtooth.t_sum(cfg, args.precision_bits)
        row = [repr(cfg.M), repr(cfg.M_prime), str(cfg.m_lo), str(cfg.m_hi),
               _serialize.mpf_to_exact_decimal(t.real),
               _serialize.mpf_to_exact_decimal(t.imag),
               repr(float(abs(t)))]
        if cfg.h != 0:
            bnd = sawtooth.vdc_bound(cfg)
            ratio = float(abs(t)) / bnd.bound
            row.extend([repr(bnd.mu), repr(bnd.eta), repr(bnd.bound),
                        repr(ratio)])
        else:
            row.extend(["", "", "", ""])
        rows.append(row)
    fmt = args.format or "csv"
    if fmt == "json":
        payload = {"k": args.k, "x": str(x), "h": args.h,
                   "rows": [dict(zip(header, r)) for r in rows]}
        _emit(args, json.dumps(payload, indent=2))
    else:
        _emit(args, _rows_to_delimited(header, rows, fmt))
    return EXIT_OK


def _cmd_lemma3(args) -> int:
    x = _parse_real(args.x)
    if not float(x) > 1:
        raise _UsageError("--x must exceed 1")
    _gate_theorem(args, args.k, None)
    val = sawtooth.cancellation_sum(x, args.k, args.precision_bits)
    _emit(args, _serialize.mpf_to_exact_decimal(val))
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = (_verify.run_full() if args.level == "full"
               else _verify.run_quick())
    report = _verify.format_report(results)
    summary = {
        "level": args.level,
        "passed": sum(1 for r in results if r.passed),
        "failed": sum(1 for r in results if not r.passed),
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                   for r in results],
    }
    text = report + "\n" + json.dumps(summary, indent=2)
    _emit(args, text)
    return EXIT_OK if summary["failed"] == 0 else EXIT_VERIFICATION


_DISPATCH = {
    "count": _cmd_count,
    "summatory": _cmd_summatory,
    "asymptotic": _cmd_asymptotic,
    "scan": _cmd_scan,
    "fit": _cmd_fit,
    "expsum": _cmd_expsum,
    "lemma3": _cmd_lemma3,
    "verify": _cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _DISPATCH[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, PrecisionError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (OracleMismatchError, EnvelopeViolationError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (ValueError, DegenerateFitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
