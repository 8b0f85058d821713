"""``sharpconv`` command-line front end.

Exit codes: 0 success, 2 domain error, 3 solver/quadrature failure,
4 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds, checks, convolution, diagnostics, purepower
from .config import NumericConfig, load_config
from .errors import SharpConvError, VerificationError
from .surfaces import get_surface

EX_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fmt(v, digits):
    return f"{v:.{digits}g}"


def _round(obj, digits):
    """Round floats to ``digits`` significant digits, recursively."""
    if isinstance(obj, float):
        return float(_fmt(obj, digits)) if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _round(obj.item(), digits)
    return obj


def _json(obj, digits):
    return json.dumps(_round(obj, digits), indent=2) + "\n"


def _csv(header, rows, digits):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r[h], digits) if isinstance(r[h], float) else r[h] for h in header])
    return buf.getvalue()


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="FILE", help="flat key = value file with numeric settings")
    p.add_argument("--nodes", type=int, help="angular quadrature nodes (overrides config)")
    p.add_argument("--digits", type=int, default=7, help="significant digits in output (default 7)")
    p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    return p


def _linspace(spec):
    a, b, n = spec
    if n < 1 or n != int(n):
        raise UsageError("grid point count must be a positive integer")
    return np.linspace(a, b, int(n))


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="sharpconv", description="Convolution densities of convex surfaces and sharp-constant bounds.")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    conv = sub.add_parser("conv", help="evaluate the convolution density")
    csub = conv.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = csub.add_parser("eval", parents=[common], help="single point, JSON output")
    ev.add_argument("--surface", default="paraboloid")
    ev.add_argument("--xi", nargs=2, type=float, required=True, metavar=("XI1", "XI2"))
    ev.add_argument("--tau", type=float, required=True)
    ev.add_argument("--unweighted", action="store_true", help="ignore the surface weight")
    gr = csub.add_parser("grid", parents=[common], help="product grid, CSV output")
    gr.add_argument("--surface", default="paraboloid")
    gr.add_argument("--xi1", nargs=3, type=float, required=True, metavar=("A", "B", "N"))
    gr.add_argument("--xi2", nargs=3, type=float, required=True, metavar=("A", "B", "N"))
    gr.add_argument("--tau", nargs=3, type=float, required=True, metavar=("A", "B", "N"))
    gr.add_argument("--unweighted", action="store_true")

    pp = sub.add_parser("pp", help="pure-power profile")
    psub = pp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    pr = psub.add_parser("profile", parents=[common], help="CSV of the profile on a lambda grid")
    pr.add_argument("--p", type=float, required=True)
    pr.add_argument("--lam", nargs="+", type=float, help="explicit lambda values")
    pr.add_argument("--count", type=int, default=20, help="log-spaced points from the support edge")
    pr.add_argument("--lam-max", type=float, default=100.0)

    bd = sub.add_parser("bounds", help="bounds for the optimal constant")
    bsub = bd.add_subparsers(dest="action", required=True, parser_class=_Parser)
    bq = bsub.add_parser("quartic", parents=[common])
    bq.add_argument("--a", nargs="+", type=float, required=True)
    bq.add_argument("--format", choices=("json", "csv"))
    bp = bsub.add_parser("purepower", parents=[common])
    bp.add_argument("--p", nargs="+", type=float, required=True)
    bp.add_argument("--format", choices=("json", "csv"))

    ra = sub.add_parser("ratio", parents=[common], help="trial-function ratios")
    ra.add_argument("kind", nargs="?", choices=("pp", "concentration"), default="pp")
    ra.add_argument("--p", type=float, default=4.0)
    ra.add_argument("--surface", default="quartic-mixed")
    ra.add_argument("--y0", nargs=2, type=float, default=(1.0, 0.0))
    ra.add_argument("--n", nargs="+", type=float, default=list(diagnostics.DEFAULT_N_LIST))
    ra.add_argument("--method", choices=("support", "pairs"), default="support")

    cr = sub.add_parser("crossover", parents=[common], help="exponent where the two lower bounds meet")
    cr.add_argument("--tol", type=float, default=1e-6)

    ve = sub.add_parser("verify", help="invariant checks; exit 4 on failure")
    vsub = ve.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, text in (("compare", "comparison-gap scan"), ("caps", "distant-cap interaction"), ("contraction", "det T' and lam ranges"), ("oracle", "engine vs slab oracle")):
        v = vsub.add_parser(name, parents=[common], help=text)
        v.add_argument("--seed", type=int)

    sc = sub.add_parser("scan", parents=[common], help="comparison-gap table, CSV")
    sc.add_argument("--surface", default="quartic-mixed")
    sc.add_argument("--n-xi", type=int, default=20)
    sc.add_argument("--n-t", type=int, default=20)
    return parser


def _cfg(args) -> NumericConfig:
    return load_config(getattr(args, "config", None), angular_nodes=getattr(args, "nodes", None))


def _bounds_rows(kind, values, fn):
    rows = []
    for v in values:
        rep = fn(v)
        rows.append(
            {
                "p_or_a": v,
                "kind": kind,
                "lower_boundary": rep.entry("boundary") or rep.entry("exact"),
                "lower_gamma": rep.entry("gamma") or "",
                "lower_curve": rep.entry("curve") or "",
                "upper": rep.best_upper,
                "best_lower": rep.best_lower,
                "best_upper": rep.best_upper,
                "report": rep,
            }
        )
    return rows


BOUNDS_HEADER = ("p_or_a", "kind", "lower_boundary", "lower_gamma", "lower_curve", "upper", "best_lower", "best_upper")


def _run(args) -> tuple[str, int]:
    d = args.digits
    if d < 1 or d > 17:
        raise UsageError("--digits must be between 1 and 17")
    cfg = _cfg(args)
    cmd, action = args.cmd, getattr(args, "action", None)

    if cmd == "conv" and action == "eval":
        s = get_surface(args.surface)
        p = convolution.SpaceTimePoint(tuple(args.xi), args.tau)
        v = convolution.conv_eval(s, p, cfg, weighted=not args.unweighted)
        return _json(dict(xi1=p.xi[0], xi2=p.xi[1], tau=p.tau, **v.as_dict()), d), 0
    if cmd == "conv" and action == "grid":
        s = get_surface(args.surface)
        a1, a2 = _linspace(args.xi1), _linspace(args.xi2)
        xi = np.stack(np.meshgrid(a1, a2, indexing="ij"), axis=-1).reshape(-1, 2)
        rows = convolution.conv_grid(s, xi, _linspace(args.tau), cfg, weighted=not args.unweighted)
        return _csv(convolution.GRID_HEADER, rows, d), 0
    if cmd == "pp":
        edge = 2.0 ** (1 - args.p)
        lams = args.lam if args.lam else np.geomspace(edge, max(args.lam_max, edge), args.count)
        return _csv(purepower.PROFILE_HEADER, purepower.profile_rows(args.p, lams, cfg), d), 0
    if cmd == "bounds":
        kind = action
        values = args.a if kind == "quartic" else args.p
        fn = (lambda a: bounds.quartic_bounds(a, cfg)) if kind == "quartic" else bounds.pp_bounds
        rows = _bounds_rows(kind, values, fn)
        fmt = args.format or ("json" if len(values) == 1 else "csv")
        if fmt == "csv":
            return _csv(BOUNDS_HEADER, rows, d), 0
        docs = [dict({"a" if kind == "quartic" else "p": r["p_or_a"]}, **r["report"].as_dict()) for r in rows]
        return _json(docs[0] if len(docs) == 1 else docs, d), 0
    if cmd == "ratio" and args.kind == "pp":
        return _fmt(bounds.strichartz_ratio_pp(args.p, cfg), d) + "\n", 0
    if cmd == "ratio":
        st = diagnostics.concentration_study(get_surface(args.surface), args.y0, args.n, cfg, method=args.method)
        return _json(st.as_dict(), d), 0
    if cmd == "crossover":
        return _fmt(bounds.crossover_p0(args.tol), d) + "\n", 0
    if cmd == "verify":
        seed = args.seed if args.seed is not None else cfg.seed
        if action == "compare":
            res = checks.check_comparison(cfg=cfg)
        elif action == "caps":
            res = checks.check_caps(seed=seed, nodes=args.nodes or 512)
        elif action == "contraction":
            res = checks.check_contraction(seed=seed, cfg=cfg)
        else:
            res = checks.check_oracle(seed=seed, cfg=cfg)
        text = _json(res, d)
        if not res["ok"]:
            return text, VerificationError.exit_code
        return text, 0
    if cmd == "scan":
        xi, t = diagnostics.default_scan_grid(args.n_xi, args.n_t)
        rep = diagnostics.comparison_scan(get_surface(args.surface), xi, t, cfg)
        return _csv(diagnostics.SCAN_HEADER, rep.rows, d), 0
    raise UsageError(f"unknown command {cmd!r}")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text, code = _run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EX_USAGE
    except SharpConvError as exc:
        print(f"sharpconv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"sharpconv: {exc}", file=sys.stderr)
        return EX_USAGE
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
