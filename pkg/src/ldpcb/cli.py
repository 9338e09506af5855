"""Command-line front end (``ldpcb``).

Exit statuses: 0 success, 1 invalid input, 2 numeric or degenerate result,
3 file-system failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict

from . import __version__
from .bounds_rate import rate_bound_ip, rate_bound_parallel, rate_bound_rp
from .channel import NumericControls
from .code_entropy import (
    BitAssignment,
    ParityCheckMatrix,
    entropy_lower_bound,
    entropy_upper_bound,
    exact_conditional_entropy,
    map_bit_error_probability,
)
from .complexity import (
    complexity_bound_ip,
    complexity_bound_parallel,
    complexity_bound_rp,
    legacy_alpha,
    legacy_bound,
)
from .degree import check_rate_convergence
from .density_evolution import DEControls
from .errors import NumericError, ValidationError
from .io import load_ensemble, load_patterns, parse_channel, puncturing_from_dict, read_json, puncturing_to_dict
from .parallel import IntentionalPuncturing, ParallelAssignment, RandomPuncturing
from .thresholds import (
    capacity_limit,
    de_threshold,
    ml_threshold,
    pattern_design_rate,
    table_report,
)

EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

CSV_COLUMNS = ["pattern_id", "design_rate", "capacity_limit_db", "ml_bound_db", "it_threshold_db", "fractional_gap"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _controls(args) -> NumericControls:
    return NumericControls(series_pmax=args.pmax, series_tol=args.tol, quad_rel_tol=args.quad_tol,
                           quad_nodes=args.quad_nodes)


def _de_controls(args) -> DEControls:
    return DEControls(
        llr_quantization_step=args.llr_step,
        llr_range=args.llr_range,
        max_iterations=args.max_iter,
        target_error=args.target_error,
        bisection_tol_db=args.tol_db,
    )


def _puncturing(args):
    if getattr(args, "puncturing", None) is None:
        return None
    return puncturing_from_dict(read_json(args.puncturing))


def _emit(result: dict, args, out) -> None:
    if args.format == "json":
        json.dump(result, out, indent=2, sort_keys=True)
        out.write("\n")
        return

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}{k}." if isinstance(obj[k], dict) else f"{prefix}{k}", obj[k])
        else:
            out.write(f"{prefix}: {_fmt(obj)}\n")

    walk("", result)


# -- commands --------------------------------------------------------------


def cmd_rate(args, out):
    ens = load_ensemble(args.ensemble)
    ch = parse_channel(args.channel)
    ctrl = _controls(args)
    pat = _puncturing(args)
    if isinstance(pat, RandomPuncturing):
        res = rate_bound_rp(ens.lambda_edge, ens.Gamma_node, ch, pat, ctrl)
    elif isinstance(pat, IntentionalPuncturing):
        res = rate_bound_ip(ens.lambda_edge, ens.Gamma_node, ch, pat, ctrl)
    else:
        res = rate_bound_parallel(ParallelAssignment.build([ch], [1.0]), ens.Gamma_node, ctrl)
    d = res.to_dict()
    d["design_rate"] = pattern_design_rate(ens, pat)
    d["channel"] = args.channel
    d["puncturing"] = puncturing_to_dict(pat)
    return d


def cmd_complexity(args, out):
    ens = load_ensemble(args.ensemble)
    ch = parse_channel(args.channel)
    ctrl = _controls(args)
    pat = _puncturing(args)
    meta = {"channel": args.channel, "epsilon": args.epsilon, "controls": asdict(ctrl), "variant": args.variant}
    if args.variant == "legacy":
        if not isinstance(pat, RandomPuncturing):
            raise ValidationError("the legacy variant needs a random puncturing spec (its p_pct is used)")
        kind = "bec" if ch.family == "bec" else "mbios"
        meta.update(
            value=legacy_bound(ch, pat.p_pct, args.epsilon, kind, ctrl),
            alpha=legacy_alpha(ch.capacity(ctrl), pat.p_pct, args.epsilon),
            bound=f"legacy_{kind}",
        )
        return meta
    if isinstance(pat, RandomPuncturing):
        b = complexity_bound_rp(ens.lambda_edge, ch, pat, ctrl, args.epsilon)
    elif isinstance(pat, IntentionalPuncturing):
        b = complexity_bound_ip(ens.lambda_edge, ch, pat, ctrl, args.epsilon)
    else:
        b = complexity_bound_parallel(ParallelAssignment.build([ch], [1.0]), ctrl, args.epsilon)
    meta.update(K1=b.K1, K2=b.K2, value=b.value, bound=b.variant)
    return meta


def cmd_threshold_ml(args, out):
    ens = load_ensemble(args.ensemble)
    ctrl = _controls(args)
    pat = _puncturing(args)
    value = ml_threshold(ens, pat, args.family, ctrl)
    return {"family": args.family, "threshold": value, "design_rate": pattern_design_rate(ens, pat),
            "units": "dB" if args.family == "biawgn" else "parameter", "controls": asdict(ctrl)}


def cmd_threshold_de(args, out):
    ens = load_ensemble(args.ensemble)
    pat = _puncturing(args)
    dctrl = _de_controls(args)
    value = de_threshold(ens, pat, args.family, dctrl)
    return {"family": args.family, "threshold": value, "design_rate": pattern_design_rate(ens, pat),
            "units": "dB" if args.family == "biawgn" else "parameter", "de_controls": asdict(dctrl)}


def cmd_capacity_limit(args, out):
    ctrl = _controls(args)
    return {"family": args.family, "rate": args.rate, "capacity_limit": capacity_limit(args.rate, args.family, ctrl),
            "controls": asdict(ctrl)}


def cmd_table(args, out):
    ens = load_ensemble(args.ensemble)
    patterns = load_patterns(args.patterns or args.ensemble)
    ctrl = _controls(args)
    dctrl = _de_controls(args) if args.with_de else None
    workers = int(os.environ.get("LDPCB_THREADS", os.cpu_count() or 1))
    rows = table_report(ens, patterns, args.family, ctrl, dctrl, workers=max(1, workers))
    if args.format == "json":
        return {"rows": [asdict(r) for r in rows], "controls": asdict(ctrl),
                "de_controls": asdict(dctrl) if dctrl else None}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return None


def cmd_entropy(args, out):
    H = ParityCheckMatrix.read(args.matrix)
    channels = [parse_channel(c) for c in args.channel]
    if args.assignment:
        a = BitAssignment(tuple(int(x) for x in args.assignment.split(",")))
    else:
        a = BitAssignment.single(H.n)
    ctrl = _controls(args)
    lower = entropy_lower_bound(H, a, channels, ctrl)
    result = {"n": H.n, "rows": H.c, "design_rate": H.design_rate, "lower_bound": lower.value,
              "series_terms_used": lower.series_terms_used, "series_remainder_bound": lower.series_remainder_bound,
              "controls": asdict(ctrl)}
    if not args.no_exact:
        exact = exact_conditional_entropy(H, a, channels)
        pb = map_bit_error_probability(H, a, channels)
        result.update(exact=exact, map_bit_error=pb, upper_bound=entropy_upper_bound(H.rate, pb), rate=H.rate)
    return result


def cmd_check_ensemble(args, out):
    ens = load_ensemble(args.ensemble)
    conv = check_rate_convergence(ens.lambda_edge, ens.rho_edge)
    return {
        "design_rate": ens.design_rate,
        "average_right_degree": ens.average_right_degree,
        "rate_convergence_check": "pass" if conv.passes else "fail",
        "psi_argmax": conv.argmax,
        "psi_max": conv.max_value,
    }


# -- parser ----------------------------------------------------------------


def _add_numeric(p):
    g = p.add_argument_group("numeric controls")
    g.add_argument("--pmax", type=int, default=200, help="maximum series depth")
    g.add_argument("--tol", type=float, default=1e-10, help="series truncation tolerance")
    g.add_argument("--quad-tol", type=float, default=1e-10, help="relative quadrature tolerance")
    g.add_argument("--quad-nodes", type=int, default=301, help="Gauss-Hermite nodes")


def _add_de(p):
    g = p.add_argument_group("density evolution")
    g.add_argument("--llr-step", type=float, default=0.04)
    g.add_argument("--llr-range", type=float, default=30.0)
    g.add_argument("--max-iter", type=int, default=2000)
    g.add_argument("--target-error", type=float, default=1e-6)
    g.add_argument("--tol-db", type=float, default=1e-3)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpcb", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ldpcb {__version__}")
    ap.add_argument("--format", choices=["text", "json", "csv"], default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="upper bound on the achievable design rate")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--puncturing")
    p.add_argument("--channel", required=True)
    _add_numeric(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("complexity", help="lower bound on decoding complexity")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--puncturing")
    p.add_argument("--channel", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--variant", choices=["thm", "legacy"], default="thm")
    _add_numeric(p)
    p.set_defaults(func=cmd_complexity)

    for name, func, helptext in (
        ("threshold-ml", cmd_threshold_ml, "worst channel at which the rate bound allows the design rate"),
        ("threshold-de", cmd_threshold_de, "density-evolution threshold"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--ensemble", required=True)
        p.add_argument("--puncturing")
        p.add_argument("--family", choices=["biawgn", "bec", "bsc"], default="biawgn")
        _add_numeric(p)
        _add_de(p)
        p.set_defaults(func=func)

    p = sub.add_parser("capacity-limit", help="channel parameter whose capacity equals a rate")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--family", choices=["biawgn", "bec", "bsc"], default="biawgn")
    _add_numeric(p)
    p.set_defaults(func=cmd_capacity_limit)

    p = sub.add_parser("table", help="threshold table over puncturing patterns (CSV)")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--patterns", help="defaults to the patterns stored with the ensemble")
    p.add_argument("--family", choices=["biawgn", "bec", "bsc"], default="biawgn")
    p.add_argument("--with-de", action="store_true")
    p.add_argument("--out")
    _add_numeric(p)
    _add_de(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("entropy", help="conditional-entropy bounds for a parity-check matrix")
    p.add_argument("--matrix", required=True, help="alist file or JSON row list")
    p.add_argument("--channel", action="append", required=True, help="repeat once per channel")
    p.add_argument("--assignment", help="comma-separated channel index per bit")
    p.add_argument("--no-exact", action="store_true", help="skip the exhaustive oracle")
    _add_numeric(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("check-ensemble", help="design rate and rate-convergence check")
    p.add_argument("--ensemble", required=True)
    p.set_defaults(func=cmd_check_ensemble)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "table" and args.format == "text":
        args.format = "csv"
    out = sys.stdout
    try:
        result = args.func(args, out)
        if result is not None:
            _emit(result, args, out)
    except ValidationError as exc:
        print(f"ldpcb: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"ldpcb: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ldpcb: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
