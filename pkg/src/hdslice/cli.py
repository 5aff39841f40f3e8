"""Command-line interface.

Matrices are read from JSON files, vectors are comma-separated decimals and
slice families are inline JSON such as ``'{"family": "detmag"}'``. Exit codes:
0 success, 2 parse error, 3 non-generic data, 4 solver failure, 5 failed
verification.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import chambers, cxmat, lift, slices, verify
from .errors import HDSliceError, NonGenericData, ParseError, VerificationFailure


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-8
    seed: int = 0
    threads: int = 0
    output: str | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ParseError("--tol must be positive")


def parse_vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(p) for p in text.split(",") if p.strip()], dtype=float)
    except ValueError as exc:
        raise ParseError(f"cannot parse vector {text!r}: {exc}") from exc
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ParseError(f"vector {text!r} is empty or not finite")
    return v


def parse_range(text: str) -> tuple[float, float]:
    v = parse_vector(text)
    if v.size != 2 or not v[0] < v[1]:
        raise ParseError(f"range must be 'lo,hi' with lo < hi, got {text!r}")
    return float(v[0]), float(v[1])


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=_plain) + "\n"


def cmd_svd(args, cfg: RunConfig) -> int:
    A = cxmat.load_matrix(args.matrix)
    f = cxmat.svd(A)
    _emit(cfg, _json({
        "U": cxmat.matrix_to_dict(f.U),
        "sigma": f.sigma.tolist(),
        "V": cxmat.matrix_to_dict(f.V),
        "sweeps": f.sweeps,
        "residuals": f.residuals(A),
    }))
    return 0


def cmd_critical(args, cfg: RunConfig) -> int:
    family = slices.family_from_json(args.family)
    y = parse_vector(args.y)
    if args.require_distinct:
        gen = slices.genericity_check(family, y, require_distinct=True)
        if not gen.ok:
            raise NonGenericData("; ".join(gen.reasons))
    crit = slices.ed_critical(family, y, tol=cfg.tol)
    _emit(cfg, _json({"family": family.to_json(), "y": y.tolist(), **crit.to_json()}))
    return 0


def _points_report(points) -> dict:
    return {"count": len(points), "points": [p.to_json() for p in points],
            "max_residual": max((p.criticality_residual for p in points), default=0.0)}


def _check(points, cfg: RunConfig) -> None:
    bad = [p.criticality_residual for p in points if p.criticality_residual > cfg.tol]
    if bad:
        raise VerificationFailure(f"{len(bad)} points exceed residual {cfg.tol:g} (worst {max(bad):.3e})")


def cmd_lift(args, cfg: RunConfig) -> int:
    family = slices.family_from_json(args.family)
    Y = cxmat.load_matrix(args.matrix)
    pts = lift.lift_critical(Y, family, tol=cfg.tol)
    _emit(cfg, _json({"family": family.to_json(), **_points_report(pts)}))
    _check(pts, cfg)
    return 0


def cmd_eckart_young(args, cfg: RunConfig) -> int:
    Y = cxmat.load_matrix(args.matrix)
    pts = lift.eckart_young(Y, args.k, tol=cfg.tol)
    _emit(cfg, _json({"k": args.k, **_points_report(pts)}))
    _check(pts, cfg)
    return 0


def cmd_hdpoly(args, cfg: RunConfig) -> int:
    Y = cxmat.load_matrix(args.matrix)
    _emit(cfg, _json(lift.hd_poly(Y, args.r).to_json()))
    return 0


def cmd_chamber_scan(args, cfg: RunConfig) -> int:
    family = slices.family_from_json(args.family)
    if not args.step > 0:
        raise ParseError("--step must be positive")
    grid = chambers.Grid(parse_range(args.x_range), parse_range(args.y_range), args.step)
    reports = chambers.chamber_scan(family, grid, threads=cfg.threads)
    _emit(cfg, chambers.reports_to_csv(reports))
    if any(r.agree is False for r in reports):
        raise VerificationFailure("observed counts disagree with the closed-form prediction")
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    reports = verify.run_suites(args.suite, seed=cfg.seed, threads=cfg.threads)
    passed = all(r.passed for r in reports)
    _emit(cfg, _json({"passed": passed, "suites": [r.to_json() for r in reports]}))
    if not passed:
        raise VerificationFailure("one or more verification suites failed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdslice", description="Hermitian distance critical points via singular-value slices.")
    p.add_argument("--tol", type=float, default=1e-8, help="certification tolerance (default 1e-8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=0, help="worker threads, 0 = automatic")
    p.add_argument("--out", default=None, help="write output to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("svd", help="singular value decomposition of a matrix file")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_svd)

    s = sub.add_parser("critical", help="ED critical points of y on a slice family")
    s.add_argument("family", help='family JSON, e.g. \'{"family": "fermat", "d": 4}\'')
    s.add_argument("y", help="comma-separated data vector")
    s.add_argument("--require-distinct", action="store_true",
                   help="also demand nonzero, pairwise distinct |y_i| (the lifting condition)")
    s.set_defaults(func=cmd_critical)

    s = sub.add_parser("lift", help="HD critical points of a matrix for a slice family")
    s.add_argument("family")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("eckart-young", help="critical points on matrices of rank <= k")
    s.add_argument("matrix")
    s.add_argument("k", type=int)
    s.set_defaults(func=cmd_eckart_young)

    s = sub.add_parser("hdpoly", help="distance polynomial in t^2 for rank <= r")
    s.add_argument("matrix")
    s.add_argument("r", type=int)
    s.set_defaults(func=cmd_hdpoly)

    s = sub.add_parser("chamber-scan", help="grid scan of predicted vs observed counts (CSV)")
    s.add_argument("family")
    s.add_argument("--x-range", required=True, help="lo,hi (write --x-range=-2,2 for a negative lower end)")
    s.add_argument("--y-range", required=True, help="lo,hi (write --x-range=-2,2 for a negative lower end)")
    s.add_argument("--step", type=float, required=True)
    s.set_defaults(func=cmd_chamber_scan)

    s = sub.add_parser("verify", help="run certification suites")
    s.add_argument("suite", nargs="+", choices=[*verify.SUITES, "all"])
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.tol, args.seed, args.threads, args.out)
        return args.func(args, cfg)
    except HDSliceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ParseError.exit_code


if __name__ == "__main__":
    sys.exit(main())
