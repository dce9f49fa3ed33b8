"""Command-line front end: ``entangle-boundary {gen,ray,verify,ree,validate}``.

Exit codes: 0 success, 1 a verification or validation check failed,
2 usage or input-format error.
"""

import argparse
import csv
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .boundary import (
    RESIDUAL_TOL,
    boundary_state_from_sigma,
    boundary_state_limit,
    delta_c_hadamard,
    extremal_residuals,
    make_boundary_state,
    sample_boundary_params,
    w_uniqueness_rank,
)
from .errors import (
    BoundaryViolation,
    EntangleBoundaryError,
    IterationLimit,
    NotPositive,
    StateFileError,
)
from .linalg import eig_hermitian
from .oracle import DEFAULT_GAP_TOL, closest_separable, validate_formula
from .states import concurrence_signed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TRACE_DELTA_TOL = 1e-12
C_SIGMA_TOL = 1e-9
MIN_SINGULAR_TOL = 1e-8
LN2 = math.log(2.0)


class _UsageError(Exception):
    pass


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _positive_float(text):
    v = float(text)
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _default_jobs():
    raw = os.environ.get("ENTANGLE_BOUNDARY_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="RNG seed (u64)")
    p.add_argument("--tol", type=_positive_float, default=RESIDUAL_TOL, help="residual tolerance")
    p.add_argument("--gap", type=_positive_float, default=DEFAULT_GAP_TOL, help="oracle duality-gap tolerance")
    p.add_argument("--jobs", type=_positive_int, default=None, help="worker processes (env ENTANGLE_BOUNDARY_JOBS)")
    p.add_argument("--bits", action="store_true", help="report entropies in bits")
    p.add_argument("--strict", action="store_true", help="treat oracle iteration limits as failures")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog="entangle-boundary",
        description="Boundary states of two-qubit entanglement, their entangled rays and a relative-entropy oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="sample boundary states")
    g.add_argument("--count", type=_positive_int, default=10)
    g.add_argument("--max-condition", type=float, default=10.0)
    g.add_argument("--limit", type=_positive_float, default=None, metavar="EPS",
                   help="set the smallest Bell weight to 0 and regularize it by EPS")
    g.add_argument("--out", required=True, help="output directory")

    r = sub.add_parser("ray", parents=[common], help="tabulate rho(x) = sigma + x delta")
    r.add_argument("state")
    xs = r.add_mutually_exclusive_group(required=True)
    xs.add_argument("--x", type=float, nargs="+")
    xs.add_argument("--x-fraction", type=float, nargs="+", help="multiples of x_max")
    r.add_argument("--out", required=True, help="CSV path")

    v = sub.add_parser("verify", parents=[common], help="extremal conditions and W-uniqueness")
    v.add_argument("target", help="state file or manifest")
    v.add_argument("--out", required=True)

    e = sub.add_parser("ree", parents=[common], help="relative entropy of entanglement")
    e.add_argument("state")
    e.add_argument("--max-iter", type=_positive_int, default=100_000)
    e.add_argument("--out", required=True)

    a = sub.add_parser("validate", parents=[common], help="oracle vs closed form on a manifest")
    a.add_argument("manifest")
    a.add_argument("--x-fraction", type=float, default=0.5)
    a.add_argument("--out", required=True)
    return parser


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def _load_boundary(path):
    sigma, meta = io.load_state(path)
    return boundary_state_from_sigma(sigma), meta


def _state_paths(target):
    if io.is_manifest(target):
        _, paths = io.load_manifest(target)
        return paths
    return [Path(target)]


# gen


def cmd_gen(args):
    if args.max_condition < 1.0:
        raise _UsageError("--max-condition must be >= 1")
    if args.limit is not None and args.limit > 1e-3:
        raise _UsageError("--limit must lie in (0, 1e-3]")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    entries = []
    for k in range(args.count):
        fa, fb, p = sample_boundary_params(rng, args.max_condition)
        if args.limit is not None:
            p = p.copy()
            p[int(np.argmin(p))] = 0.0
            p *= 0.5 / p.sum()
            bs = boundary_state_limit(fa, fb, *p, args.limit)
        else:
            bs = make_boundary_state(fa, fb, *p)
        name = f"state_{k:04d}.json"
        meta = {"label": f"boundary-{k:04d}", "seed": args.seed, "index": k, "p": p.tolist()}
        io.save_state(out / name, bs.sigma, meta)
        entries.append(
            {
                "index": k,
                "file": name,
                "p": p.tolist(),
                "fa": io.matrix_to_pairs(fa),
                "fb": io.matrix_to_pairs(fb),
                "concurrence": concurrence_signed(bs.sigma),
            }
        )
    io.save_manifest(
        out / "manifest.json",
        {
            "kind": "manifest",
            "seed": args.seed,
            "count": args.count,
            "max_condition": args.max_condition,
            "margin": 1e-3,
            "limit": args.limit,
            "states": entries,
        },
    )
    print(f"wrote {args.count} states and manifest.json to {out}")
    return EXIT_OK


# ray


def _ray_row(bs, x):
    try:
        pt = bs.ray(x)
    except NotPositive as exc:
        return {"x": x, "s_exact": math.nan, "c_signed": math.nan,
                "min_eig": float(exc.eigenvalue), "residual_max": math.nan}
    min_eig = float(eig_hermitian(0.5 * (pt.rho + pt.rho.conj().T)).values[0])
    res = float(np.max(extremal_residuals(pt.rho, bs))) if x != 0.0 else 0.0
    return {"x": x, "s_exact": pt.s_exact, "c_signed": pt.c_signed,
            "min_eig": min_eig, "residual_max": res}


def cmd_ray(args):
    bs, _ = _load_boundary(args.state)
    xs = args.x if args.x is not None else [f * bs.x_max for f in args.x_fraction]
    rows = [_ray_row(bs, float(x)) for x in xs]
    scale = 1.0 / LN2 if args.bits else 1.0
    cols = ["x", "s_exact", "c_signed", "min_eig", "residual_max"]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            row = dict(row, s_exact=row["s_exact"] * scale)
            w.writerow([repr(float(row[c])) for c in cols])
    flagged = sum(1 for r in rows if math.isnan(r["s_exact"]))
    if flagged:
        print(f"{flagged} row(s) beyond x_max = {bs.x_max:.6g} flagged", file=sys.stderr)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


# verify


def _verify_one(job):
    path, tol, seed = job
    bs, _ = _load_boundary(path)
    nv = bs.normal
    x = 0.5 * bs.x_max
    pt = bs.ray(x)
    res = extremal_residuals(pt.rho, bs)
    wr = w_uniqueness_rank(bs)
    c_sigma = concurrence_signed(bs.sigma)
    trace_delta = abs(complex(np.trace(nv.delta)))
    checks = {
        "residuals": bool(np.max(res) <= tol),
        "trace_delta": trace_delta <= TRACE_DELTA_TOL,
        "delta_c_positive": nv.deltaC > 0.0,
        "delta_c_identity": abs(nv.deltaC - delta_c_hadamard(bs)) <= 1e-10,
        "c_sigma": abs(c_sigma) <= C_SIGMA_TOL,
        "c_ray_positive": pt.c_signed > 0.0,
        "w_rank": wr.rank == 12 and wr.min_singular > MIN_SINGULAR_TOL,
    }
    return {
        "file": str(path),
        "seed": seed,
        "tol": tol,
        "x": x,
        "x_max": bs.x_max,
        "residuals": res.tolist(),
        "trace_delta": trace_delta,
        "delta_c": nv.deltaC,
        "c_sigma": c_sigma,
        "c_ray": pt.c_signed,
        "w_rank": wr.rank,
        "w_min_singular": wr.min_singular,
        "checks": checks,
        "passed": all(checks.values()),
    }


def cmd_verify(args):
    paths = _state_paths(args.target)
    for p in paths:  # reject malformed input up front
        io.load_state(p)
    jobs = [(str(p), args.tol, args.seed) for p in paths]
    records = _map(_verify_one, jobs, args.jobs)
    failed = [r for r in records if not r["passed"]]
    io.save_report(
        args.out,
        {
            "kind": "verify",
            "seed": args.seed,
            "tol": args.tol,
            "records": records,
            "summary": {
                "count": len(records),
                "passed": len(records) - len(failed),
                "max_residual": max(max(r["residuals"]) for r in records),
                "min_w_singular": min(r["w_min_singular"] for r in records),
            },
        },
    )
    for r in failed:
        print(f"FAIL {r['file']}: {[k for k, ok in r['checks'].items() if not ok]}", file=sys.stderr)
    print(f"verify: {len(records) - len(failed)}/{len(records)} passed")
    return EXIT_FAIL if failed else EXIT_OK


# ree


def cmd_ree(args):
    rho, meta = io.load_state(args.state)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IterationLimit)
        rep = closest_separable(rho, gap_tol=args.gap, max_iter=args.max_iter, seed=args.seed)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    scale = 1.0 / LN2 if args.bits else 1.0
    io.save_report(
        args.out,
        {
            "kind": "ree",
            "input": str(args.state),
            "seed": args.seed,
            "gap_tol": args.gap,
            "units": "bits" if args.bits else "nats",
            "e_r": rep.e_r * scale,
            "duality_gap": rep.duality_gap * scale,
            "error_bar": rep.error_bar * scale,
            "eta": rep.eta,
            "iterations": rep.iterations,
            "converged": rep.converged,
            "sigma_star": io.state_to_dict(rep.sigma_star, {"label": "closest separable state"}),
            "ensemble_size": len(rep.ensemble),
        },
    )
    unit = "bits" if args.bits else "nats"
    print(f"E_R = {rep.e_r * scale:.10g} {unit} (gap {rep.duality_gap * scale:.3g}, {rep.iterations} iterations)")
    if args.strict and not rep.converged:
        return EXIT_FAIL
    return EXIT_OK


# validate


def _validate_one(job):
    path, frac, gap, seed = job
    bs, _ = _load_boundary(path)
    x = frac * bs.x_max
    rec = validate_formula(bs, x, gap_tol=gap, seed=seed)
    dc = bs.normal.deltaC
    return {
        "file": str(path),
        "seed": seed,
        "gap_tol": gap,
        "x_fraction": frac,
        **rec._asdict(),
        "delta_c": dc,
        "x2_delta_c": x * x * dc,
        "quadratic_law_error": abs(rec.e_r - 0.5 * x * x * dc),
    }


def cmd_validate(args):
    if not 0.0 < args.x_fraction <= 0.9:
        raise _UsageError("--x-fraction must lie in (0, 0.9]")
    _, paths = io.load_manifest(args.manifest)
    for p in paths:
        io.load_state(p)
    jobs = [(str(p), args.x_fraction, args.gap, args.seed) for p in paths]
    records = _map(_validate_one, jobs, args.jobs)
    failed = [r for r in records if not r["passed"]]
    rate = (len(records) - len(failed)) / len(records)
    io.save_report(
        args.out,
        {
            "kind": "validate",
            "seed": args.seed,
            "gap_tol": args.gap,
            "x_fraction": args.x_fraction,
            "records": records,
            "summary": {
                "count": len(records),
                "pass_rate": rate,
                "max_trace_distance": max(r["trace_distance"] for r in records),
                "max_value_error": max(r["value_error"] for r in records),
            },
        },
    )
    for r in failed:
        print(f"FAIL {r['file']}: trace distance {r['trace_distance']:.3e}, "
              f"value error {r['value_error']:.3e}", file=sys.stderr)
    print(f"validate: pass rate {rate:.3f} ({len(records)} states)")
    return EXIT_OK if not failed else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "ray": cmd_ray, "verify": cmd_verify, "ree": cmd_ree, "validate": cmd_validate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs is None:
        args.jobs = _default_jobs()
    try:
        return COMMANDS[args.command](args)
    except (StateFileError, _UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BoundaryViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except EntangleBoundaryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
