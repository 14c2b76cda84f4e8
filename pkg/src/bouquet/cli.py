"""Command-line front door: configuration, orchestration, CSV/JSON output.

Exit codes are a stable contract: 0 success, 1 usage or configuration
error, 2 numerical failure.  Partial outputs are flushed with a trailing
``#ABORTED`` comment so downstream plotting never reads a silently
truncated file.  All files are written atomically (temp + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import run_all
from .engine import (CylinderMeasure, PowerIterationError, build,
                     conformal_measure, conformality_residual, gibbs_check,
                     invariance_residual, invariant_measure, pressure_eigen,
                     pressure_iterate, tightness_report)
from .geometry import (NonConvergenceError, ShrinkingConstants, build_model,
                       endpoint, hair_points, fit_shrinking_constants)
from .potentials import (FAIL, PotentialSpec, bounded_on_balls_check,
                         law_from_json, law_from_text, rapid_decrease_check,
                         summability_check)
from .shift import Itinerary, StateCapError, ZERO, cylinders, parse_itinerary

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    lam: float
    spec: PotentialSpec
    N: int
    m: int
    seed: int
    backward_tolerance: float
    eigen_tolerance: float
    output_dir: str


def _default_config() -> RunConfig:
    return RunConfig(lam=0.25, spec=PotentialSpec(t=2.0, c_law=law_from_text("gaussian:2")),
                     N=1, m=4, seed=0, backward_tolerance=1e-10,
                     eigen_tolerance=1e-13, output_dir=".")


def load_config(args: argparse.Namespace, strict_spec: bool = True) -> RunConfig:
    """Config JSON (if any) with flag overrides; validated at load."""
    cfg = _default_config()
    if args.config:
        with open(args.config) as fh:
            obj = json.load(fh)
        spec = cfg.spec
        if "spec" in obj:
            spec = PotentialSpec(t=float(obj["spec"]["t"]),
                                 c_law=law_from_json(obj["spec"]["c_law"]),
                                 tau=float(obj["spec"].get("tau", 1.0)),
                                 strict=strict_spec)
        cfg = replace(cfg,
                      lam=float(obj.get("lambda", cfg.lam)),
                      spec=spec,
                      N=int(obj.get("N", cfg.N)),
                      m=int(obj.get("m", cfg.m)),
                      seed=int(obj.get("seed", cfg.seed)),
                      backward_tolerance=float(obj.get("backward_tolerance",
                                                       cfg.backward_tolerance)),
                      eigen_tolerance=float(obj.get("eigen_tolerance",
                                                    cfg.eigen_tolerance)),
                      output_dir=str(obj.get("output_dir", cfg.output_dir)))
    spec = cfg.spec
    if args.t is not None or args.c_law is not None:
        spec = PotentialSpec(
            t=float(args.t) if args.t is not None else spec.t,
            c_law=law_from_text(args.c_law) if args.c_law else spec.c_law,
            tau=spec.tau, strict=strict_spec)
    cfg = replace(cfg,
                  lam=args.lam if args.lam is not None else cfg.lam,
                  spec=spec,
                  N=args.N if args.N is not None else cfg.N,
                  m=args.m if args.m is not None else cfg.m,
                  seed=args.seed if args.seed is not None else cfg.seed,
                  output_dir=args.out if args.out is not None else cfg.output_dir)
    if not 0.0 < cfg.lam < 1.0 / math.e:
        raise ValueError(f"lambda = {cfg.lam} outside (0, 1/e)")
    if cfg.N < 1 or cfg.m < 1:
        raise ValueError("N and m must be positive")
    if strict_spec and cfg.spec.t * cfg.spec.tau <= 1.0:
        raise ValueError(f"t = {cfg.spec.t} must exceed 1/tau")
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path: str, lines: list[str]) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: str, rows: list[str],
               aborted: str | None = None) -> None:
    lines = [header] + rows
    if aborted is not None:
        lines.append(f"#ABORTED {aborted}")
    _atomic_write(path, lines)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# commands


def cmd_endpoint(cfg: RunConfig, args: argparse.Namespace) -> int:
    try:
        s = parse_itinerary(args.itinerary)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.strict and not s.in_sigma(cfg.N):
        print(f"error: symbol out of range for Sigma_{cfg.N}: {s}",
              file=sys.stderr)
        return USAGE_ERROR
    model = build_model(cfg.lam, tol=cfg.backward_tolerance)
    try:
        hp = endpoint(model, s)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    print(f"re={_fmt(hp.point.real)} im={_fmt(hp.point.imag)} "
          f"residual={hp.residual:.3e} depth={hp.depth_used}")
    return 0


def cmd_pressure(cfg: RunConfig, args: argparse.Namespace) -> int:
    model = build_model(cfg.lam, tol=cfg.backward_tolerance)
    path = os.path.join(cfg.output_dir, "pressure.csv")
    header = "route,N,m_or_n,value,residual"
    rows: list[str] = []
    try:
        for m in range(1, cfg.m + 1):
            est = pressure_eigen(build(model, cfg.spec, cfg.N, m))
            rows.append(f"eigen,{cfg.N},{m},{_fmt(est.value)},{est.residual:.3e}")
        for est in pressure_iterate(model, cfg.spec, cfg.N, ZERO, args.n_max):
            rows.append(f"iterate,{cfg.N},{est.m_or_n},{_fmt(est.value)},nan")
    except (StateCapError, PowerIterationError, NonConvergenceError) as exc:
        _write_csv(path, header, rows, aborted=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    _write_csv(path, header, rows)
    print(f"wrote {path}")
    return 0


def cmd_measure(cfg: RunConfig, args: argparse.Namespace) -> int:
    model = build_model(cfg.lam, tol=cfg.backward_tolerance)
    out = cfg.output_dir
    measure_path = os.path.join(out, "measure.json")
    gibbs_path = os.path.join(out, "gibbs.csv")
    tight_path = os.path.join(out, "tightness.csv")
    gibbs_header = "n,u,base,ratio,r_hat"
    tight_header = "N,R,measured,bound,sup_mode"
    try:
        op = build(model, cfg.spec, cfg.N, cfg.m)
        est = pressure_eigen(op)
        nu = conformal_measure(op)
        inv = invariant_measure(op, nu)
    except (StateCapError, PowerIterationError, NonConvergenceError) as exc:
        _write_csv(gibbs_path, gibbs_header, [], aborted=str(exc))
        _write_csv(tight_path, tight_header, [], aborted=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR

    obj = {"lambda": cfg.lam, "spec": cfg.spec.to_json(), "N": cfg.N,
           "m": cfg.m, "pressure": est.value,
           "weights": [float(w) for w in nu.weights]}
    _atomic_write(measure_path, [json.dumps(obj, indent=1)])

    gr = gibbs_check(op, nu, est.value, seed=cfg.seed)
    gibbs_rows = [f'{n},"{",".join(map(str, u))}","{s_text}",'
                  f"{_fmt(r)},{_fmt(rh)}"
                  for n, u, s_text, r, rh in gr.ratios]
    tight_rows_d = tightness_report(model, cfg.spec, tuple(range(1, cfg.N + 1)),
                                    (5.0, 10.0, 20.0), m=min(cfg.m, 4),
                                    seed=cfg.seed)
    tight_rows = [f"{r['N']},{r['R']},{_fmt(r['measured'])},"
                  f"{_fmt(r['bound'])},{r['sup_mode']}" for r in tight_rows_d]

    conf_res = conformality_residual(op, nu, est.theta)
    inv_res = invariance_residual(inv.measure)
    failing = None
    if conf_res > 1e-10:
        failing = f"conformality residual {conf_res:.3e} > 1e-10"
    elif inv_res > 1e-10:
        failing = f"invariance residual {inv_res:.3e} > 1e-10"
    _write_csv(gibbs_path, gibbs_header, gibbs_rows, aborted=failing)
    _write_csv(tight_path, tight_header, tight_rows, aborted=failing)
    if failing:
        print(f"error: {failing}", file=sys.stderr)
        return NUMERICAL_ERROR
    print(f"wrote {measure_path}, {gibbs_path}, {tight_path} "
          f"(conformality {conf_res:.2e}, invariance {inv_res:.2e})")
    return 0


def cmd_audit(cfg: RunConfig, args: argparse.Namespace) -> int:
    model = build_model(cfg.lam, tol=cfg.backward_tolerance)
    if args.C_E is not None and args.lambda_E is not None:
        rng = np.random.default_rng(cfg.seed)
        from .geometry import fit_delta0
        consts = ShrinkingConstants(C_E=args.C_E, lambda_E=args.lambda_E,
                                    delta_0=fit_delta0(model, cfg.N, rng))
    else:
        consts = fit_shrinking_constants(model, cfg.N, seed=cfg.seed)
    results = run_all(model, cfg.N, consts, seed=cfg.seed)
    path = os.path.join(cfg.output_dir, "audit.csv")
    rows = [f"{r.axiom},{cfg.N},{r.samples},{_fmt(r.worst_violation)},"
            f"{r.verdict},{r.notes}" for r in results]
    failed = [r for r in results if r.verdict == FAIL]
    _write_csv(path, "axiom,N,samples,worst_violation,verdict,notes", rows,
               aborted=f"{len(failed)} audit(s) FAIL" if failed else None)
    print(f"wrote {path}")
    if failed:
        for r in failed:
            print(f"FAIL: {r.axiom}: {r.notes}", file=sys.stderr)
        return NUMERICAL_ERROR
    return 0


def cmd_hairs(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.count < 1 or args.depth < 1:
        print("error: count and depth must be >= 1", file=sys.stderr)
        return USAGE_ERROR
    model = build_model(cfg.lam, tol=cfg.backward_tolerance)
    path = os.path.join(cfg.output_dir, "hairs.csv")
    rows = []
    skipped = 0
    # canonical enumeration: depth-2 cylinder representatives in lex order
    words = [w for w in cylinders(cfg.N, 2)][: args.count]
    for w in words:
        s = Itinerary(w, (0,))
        try:
            pts = hair_points(model, s, args.depth)
        except NonConvergenceError as exc:
            skipped += 1
            print(f"skip {s}: {exc}", file=sys.stderr)
            continue
        for i, z in enumerate(pts):
            rows.append(f'"{s}",{_fmt(z.real)},{_fmt(z.imag)},{i}')
    _write_csv(path, "itinerary,re,im,param_index", rows)
    print(f"wrote {path} ({len(rows)} rows, {skipped} skipped)")
    return 0


def cmd_summability(cfg: RunConfig, args: argparse.Namespace) -> int:
    model = build_model(cfg.lam, tol=cfg.backward_tolerance)
    reports = [
        summability_check(model, cfg.spec, N_max=args.N_max),
        rapid_decrease_check(model, cfg.spec, seed=cfg.seed),
        bounded_on_balls_check(model, cfg.spec, R=10.0, seed=cfg.seed),
    ]
    path = os.path.join(cfg.output_dir, "summability.csv")
    def _plain(x):
        if isinstance(x, np.ndarray):
            return x.tolist()
        if isinstance(x, (np.floating, np.integer)):
            return x.item()
        raise TypeError(f"unserializable detail entry: {type(x)}")

    rows = []
    for r in reports:
        detail = dict(r.detail)
        if "series" in detail:  # keep only the converged partial sums
            detail["final_partial_sums"] = {k: float(v[-1])
                                            for k, v in detail.pop("series").items()}
        text = json.dumps(detail, default=_plain).replace('"', '""')
        rows.append(f'{r.name},{r.verdict},"{text}"')
    failed = [r for r in reports if r.verdict == FAIL]
    _write_csv(path, "check,verdict,detail", rows,
               aborted=f"{len(failed)} check(s) FAIL" if failed else None)
    print(f"wrote {path}")
    if failed:
        for r in failed:
            print(f"FAIL: {r.name}", file=sys.stderr)
        return NUMERICAL_ERROR
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--lambda", dest="lam", type=float, default=None)
    common.add_argument("--N", type=int, default=None)
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--t", type=float, default=None)
    common.add_argument("--c-law", dest="c_law", type=str, default=None)

    p = argparse.ArgumentParser(prog="bouquet",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("endpoint", parents=[common])
    sp.add_argument("itinerary", type=str)
    sp.add_argument("--strict", action="store_true",
                    help="reject symbols outside Sigma_N")
    sp.set_defaults(fn=cmd_endpoint)

    sp = sub.add_parser("pressure", parents=[common])
    sp.add_argument("--n-max", dest="n_max", type=int, default=8)
    sp.set_defaults(fn=cmd_pressure)

    sp = sub.add_parser("measure", parents=[common])
    sp.set_defaults(fn=cmd_measure)

    sp = sub.add_parser("audit", parents=[common])
    sp.add_argument("--C-E", dest="C_E", type=float, default=None,
                    help="override fitted C_E (with --lambda-E)")
    sp.add_argument("--lambda-E", dest="lambda_E", type=float, default=None)
    sp.set_defaults(fn=cmd_audit)

    sp = sub.add_parser("hairs", parents=[common])
    sp.add_argument("--count", type=int, default=9)
    sp.add_argument("--depth", type=int, default=40)
    sp.set_defaults(fn=cmd_hairs)

    sp = sub.add_parser("summability", parents=[common])
    sp.add_argument("--N-max", dest="N_max", type=int, default=200)
    sp.set_defaults(fn=cmd_summability)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    # only `measure` requires an admissible spec: summability must accept
    # inadmissible potentials so the check itself can FAIL, and finite
    # truncations (pressure, audit, hairs) are well defined for any t
    strict_spec = args.command == "measure"
    try:
        cfg = load_config(args, strict_spec=strict_spec)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return args.fn(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
