"""Command-line pipeline: unfold section data, simulate sectioning, verify
solutions.

    stereo-unfold unfold {plane|line} --kernel SPEC --h SPEC
                  [--method mellin|abel|derivative|wicksell]
                  [--mu X] [--tol X] [--out DIR]
    stereo-unfold simulate {plane|line} --dist SPEC [--kernel SPEC]
                  [--n N] [--seed S] [--bins B] [--out FILE]
    stereo-unfold verify {plane|line} --dist H_CSV --h SPEC
                  [--kernel SPEC] [--tol X] [--out FILE]

Exit codes: 0 success (verify: all gates pass), 1 precondition or gate
failure, 2 usage or I/O errors.  All floats serialize at 17 significant
digits so CSV round-trips are lossless.  STEREO_UNFOLD_THREADS caps the
worker thread count.
"""
import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import classical, registry, simulate, unfold, verify
from ._accel import apply_thread_cap
from .densities import write_histogram_csv, write_histogram_json
from .errors import PreconditionFailed

_GRID = 500


def _fmt(v):
    return f"{float(v):.17g}"


def _write_curve_csv(path, header, xs, ys):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for x, y in zip(xs, ys):
            fh.write(f"{_fmt(x)},{_fmt(y)}\n")


def _report_dict(mode, method, kernel_spec, H, report, warn_msgs):
    out = {
        "mode": mode,
        "method": method,
        "kernel": kernel_spec,
        "support": [H.support[0], H.support[1]],
        "normalizable": bool(H.normalizable),
        "normalization": None if H.normalization is None
        else float(H.normalization),
        "warnings": list(warn_msgs),
    }
    if report is not None:
        out["preconditions"] = {
            "strip_ok": report.preconditions.strip_ok,
            "h_star_integrable": report.preconditions.h_star_integrable,
            "quotient_integrable": report.preconditions.quotient_integrable,
            "mu_used": report.preconditions.mu_used,
        }
        out["residual_sup_norm"] = report.residual_sup_norm
        out["scale_used"] = report.scale_used
        out["warnings"] = list(report.warnings) + list(warn_msgs)
    return out


def cmd_unfold(args):
    kernel = registry.parse_kernel(args.kernel, args.mode)
    h = registry.named_density(args.h_spec)
    method = args.method
    if method in ("abel", "wicksell") and args.mode != "plane":
        raise ValueError(f"method '{method}' applies to plane sections")
    if method == "derivative" and args.mode != "line":
        raise ValueError("method 'derivative' applies to line sections")

    report = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if method == "mellin":
            if args.mode == "plane":
                H, report = unfold.solve_plane(h, kernel, mu=args.mu,
                                               tol=args.tol)
            else:
                H, report = unfold.solve_line(h, kernel, mu=args.mu,
                                              tol=args.tol)
        elif method == "abel":
            H = classical.abel_solve_plane(h)
        elif method == "derivative":
            H = classical.derivative_solve_line(h)
        else:
            g = classical.radius_profile_from_area(h)
            H = classical.wicksell_solve(g)
    warn_msgs = [str(w.message) for w in caught]
    for msg in warn_msgs:
        print(f"warning: {msg}", file=sys.stderr)

    lo, hi = H.support
    grid = lo + (hi - lo) * (np.arange(_GRID) + 0.5) / _GRID
    hv = H.eval(grid)

    rep = _report_dict(args.mode, method, args.kernel, H, report, warn_msgs)
    if report is None:
        res = verify.residual(H, h, kernel, args.mode, grid_size=200)
        rep["residual_sup_norm"] = res.sup_norm

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_curve_csv(os.path.join(args.out, "H.csv"), "lambda,H",
                         grid, hv)
        with open(os.path.join(args.out, "report.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(rep, fh, indent=2)
            fh.write("\n")
        # rescaled distribution over the physical section variable
        if args.mode == "plane":
            H1 = unfold.to_sigma_distribution(H, kernel.max_section)
            xs = H1.support_upper * (np.arange(_GRID) + 0.5) / _GRID
            _write_curve_csv(os.path.join(args.out, "rescaled.csv"),
                             "sigma,H1", xs, H1.eval(xs))
        else:
            H1 = unfold.to_length_distribution(H, kernel.max_section)
            xs = H1.support_upper * (np.arange(_GRID) + 0.5) / _GRID
            _write_curve_csv(os.path.join(args.out, "rescaled.csv"),
                             "length,H1", xs, H1.eval(xs))
    else:
        sys.stdout.write("lambda,H\n")
        for x, y in zip(grid, hv):
            sys.stdout.write(f"{_fmt(x)},{_fmt(y)}\n")
    print(json.dumps(rep), file=sys.stderr)
    return 0


def cmd_simulate(args):
    dist = registry.named_distribution(args.dist)
    kernel = registry.parse_kernel(args.kernel, args.mode)
    cfg = simulate.SimConfig(mode=args.mode, distribution=dist,
                             kernel=kernel, n_samples=args.n,
                             seed=args.seed, bins=args.bins)
    hist = simulate.simulate_sections(cfg)
    out = args.out or "sections.csv"
    if out.endswith(".json"):
        write_histogram_json(out, hist)
    else:
        write_histogram_csv(out, hist)
    print(f"wrote {out}: {int(hist.total)} sections in {args.bins} bins",
          file=sys.stderr)
    return 0


def cmd_verify(args):
    kernel = registry.parse_kernel(args.kernel, args.mode)
    H = registry.named_distribution(args.dist)
    h = registry.named_density(args.h_spec)
    res = verify.residual(H, h, kernel, args.mode, grid_size=200)
    sup_h = max(abs(v) for v in res.target_values)
    residual_ok = res.sup_norm <= args.tol * sup_h
    moments = verify.moment_identities(kernel)
    verdict = {
        "residual_sup_norm": res.sup_norm,
        "residual_gate": bool(residual_ok),
        "moment_identities": {
            "plane_mean_ok": moments.plane_mean_ok,
            "line_mean_ok": moments.line_mean_ok,
            "deviations": moments.deviations,
        },
    }
    gates = [residual_ok, moments.plane_mean_ok, moments.line_mean_ok]
    if args.mode == "plane":
        cc = verify.correctness_conditions(
            h, math.sqrt(h.support_upper / math.pi))
        verdict["correctness_conditions"] = {
            "limit_is_zero": cc.limit_is_zero,
            "limit_estimate": cc.limit_estimate,
            "integral_finite": cc.integral_finite,
            "integral_estimate": cc.integral_estimate,
            "notes": list(cc.notes),
        }
        gates += [cc.limit_is_zero, cc.integral_finite]
    verdict["pass"] = bool(all(gates))
    print(json.dumps(verdict, indent=2))
    if args.out:
        base = args.out
        if base.endswith(".json"):
            with open(base, "w", encoding="utf-8") as fh:
                json.dump(verdict, fh, indent=2)
                fh.write("\n")
            base = os.path.dirname(base) or "."
        else:
            os.makedirs(base, exist_ok=True)
            with open(os.path.join(base, "verdict.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(verdict, fh, indent=2)
                fh.write("\n")
        grid_path = os.path.join(
            base if os.path.isdir(base) else ".", "residual_grid.csv")
        with open(grid_path, "w", encoding="utf-8") as fh:
            fh.write("x,forward,target\n")
            for x, f, t in zip(res.grid, res.forward_values,
                               res.target_values):
                fh.write(f"{_fmt(x)},{_fmt(f)},{_fmt(t)}\n")
    return 0 if verdict["pass"] else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stereo-unfold",
        description="Recover particle size distributions from plane-section "
                    "areas or line-chord lengths")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("unfold", help="solve for the size distribution")
    p.add_argument("mode", choices=["plane", "line"])
    p.add_argument("--kernel", default="sphere",
                   help="sphere | nearly-sphere:SIGMA_M,P | custom:FILE")
    p.add_argument("--h", dest="h_spec", required=True,
                   help="uniform:C | triangle | quadratic | histogram file")
    p.add_argument("--method", default="mellin",
                   choices=["mellin", "abel", "derivative", "wicksell"])
    p.add_argument("--mu", type=float, default=None,
                   help="contour abscissa (default: gamma+1)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default=None,
                   help="output directory (default: CSV to stdout)")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("simulate", help="Monte Carlo sectioning")
    p.add_argument("mode", choices=["plane", "line"])
    p.add_argument("--dist", required=True,
                   help="sex1 | sex2 | lambda,H CSV file")
    p.add_argument("--kernel", default="sphere")
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--out", default=None,
                   help="histogram file (default: sections.csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="gate a solution against data")
    p.add_argument("mode", choices=["plane", "line"])
    p.add_argument("--dist", required=True,
                   help="sex1 | sex2 | lambda,H CSV with the solution")
    p.add_argument("--h", dest="h_spec", required=True,
                   help="observed density spec or histogram file")
    p.add_argument("--kernel", default="sphere")
    p.add_argument("--tol", type=float, default=1e-4,
                   help="residual gate relative to sup|h|")
    p.add_argument("--out", default=None,
                   help="verdict JSON path or directory")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionFailed as exc:
        payload = {"error": type(exc).__name__,
                   "condition": exc.condition, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
