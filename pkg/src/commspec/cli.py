"""Command-line front end.

Subcommands: solve, density, simulate, compare, test, psd-estimate.
Every run echoes its full configuration as JSON so it can be reproduced
with --config; exit code 2 flags bad input, 3 a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import closedform, io
from .fixedpoint import (
    ConvergenceError,
    ModelSpec,
    SolverConfig,
    solve_path,
    stieltjes_from_h,
)
from .hypotest import PairedSample, TestConfig, estimate_psd, run_test
from .inversion import DensityCurve, EpsSchedule, curve_to_cdf, density_grid
from .measures import (
    BivariateSpectralMeasure,
    ImagSpectrum,
    UnivariateSpectralMeasure,
    ks_distance,
)
from .simulate import InnovationSpec, ScalingSpec, run_experiment

EXIT_BAD_INPUT = 2
EXIT_RUNTIME = 3


def _bad(msg):
    print(f"error: {msg}", file=sys.stderr)
    raise SystemExit(EXIT_BAD_INPUT)


def _model_from_flags(args):
    if getattr(args, "identity", False):
        return ModelSpec.identity(args.c)
    if args.H is None:
        _bad("one of --identity or --H is required")
    meas = io.load_measure(args.H)
    if isinstance(meas, UnivariateSpectralMeasure):
        return ModelSpec.equal(args.c, meas)
    if getattr(args, "equal", False):
        _bad("--equal expects a univariate measure JSON")
    return ModelSpec.general(args.c, meas)


def _parse_grid(text):
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        _bad(f"bad --grid {text!r}, expected lo:hi:step")
    if step <= 0 or hi <= lo:
        _bad(f"bad --grid {text!r}")
    n = int(round((hi - lo) / step))
    return np.linspace(lo, hi, n + 1)


def _echo_config(args, extra=None):
    cfg = {k: v for k, v in vars(args).items()
           if k not in ("func", "config") and v is not None}
    if extra:
        cfg.update(extra)
    return json.dumps(cfg, sort_keys=True, default=str)


def _emit(args, payload):
    text = json.dumps(payload, indent=1, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_solve(args):
    model = _model_from_flags(args)
    cfg = SolverConfig()
    try:
        zs = [complex(t) for t in args.z]
    except ValueError:
        _bad(f"unparseable complex in --z {args.z!r}")
    for z in zs:
        if z.real >= 0:
            _bad(f"z={z} must have negative real part")
    pairs = solve_path(model, zs, cfg)
    rows = []
    for z, pr in zip(zs, pairs):
        s = stieltjes_from_h(pr, model.c, z)
        rows.append({
            "z": str(z), "h1": str(pr.h1), "h2": str(pr.h2),
            "s": str(s), "residual": pr.residual, "iterations": pr.iterations,
        })
    _emit(args, {"config": json.loads(_echo_config(args)), "solutions": rows})
    return 0


def _closed_density_or_nan(c, x):
    try:
        return closedform.density_identity(c, x)
    except closedform.NoDensityAtZero:
        return math.nan


def cmd_density(args):
    grid = _parse_grid(args.grid)
    model = _model_from_flags(args)
    if model.mode == "identity" and not args.numeric:
        pm = closedform.point_mass_identity(args.c)
        fs = np.array([_closed_density_or_nan(args.c, x) for x in grid])
        sp = closedform.support_params(args.c)
        curve = DensityCurve(xs=grid, fs=fs, point_mass_zero=pm,
                             support_lo=-sp.U_c, support_hi=sp.U_c, model=model)
    else:
        curve = density_grid(model, grid, EpsSchedule(), SolverConfig())
    io.write_density_csv(args.out, curve)
    print(_echo_config(args, {"point_mass_zero": curve.point_mass_zero}))
    return 0


def cmd_simulate(args):
    n = int(round(args.p / args.c))
    scaling_H = io.load_measure(args.H) if args.H else None
    if isinstance(scaling_H, UnivariateSpectralMeasure):
        scaling_H = BivariateSpectralMeasure.from_univariate(scaling_H)
    kind = {"identity": "identity", "diag": "commuting_diag",
            "householder": "householder_lowrank", "haar": "haar_noncommuting"}[args.scaling]
    if kind != "identity" and scaling_H is None:
        _bad(f"--scaling {args.scaling} needs --H")
    sample = run_experiment(
        p=args.p, n=n,
        innovation=InnovationSpec(kind=args.dist, seed=args.seed),
        scaling=ScalingSpec(kind=kind, H=scaling_H),
        anti=args.anti, rho=args.rho, seed=args.seed)
    io.write_spectrum_csv(args.out, sample.spectrum)
    if args.config_out:
        with open(args.config_out, "w") as fh:
            fh.write(json.dumps(sample.config, sort_keys=True) + "\n")
    print(_echo_config(args, {"n": n}))
    return 0


def _theory_cdf_and_moments(args, spec):
    """Theoretical CDF, atom mass at 0, and second moment for compare."""
    from scipy.integrate import simpson

    model = _model_from_flags(args)
    if model.mode == "identity" and not args.numeric:
        pm = closedform.point_mass_identity(args.c)
        cdf = closedform.identity_cdf(args.c)
        sp = closedform.support_params(args.c)
        xs = np.linspace(-sp.U_c + 1e-9, sp.U_c - 1e-9, 4001)
        fs = np.nan_to_num([_closed_density_or_nan(args.c, x) for x in xs])
    else:
        span = float(np.abs(spec.vals).max()) + 0.5
        xs = np.linspace(-span, span, args.theory_points)
        curve = density_grid(model, xs, EpsSchedule(), SolverConfig())
        fs = np.nan_to_num(curve.fs)
        pm = curve.point_mass_zero
        cdf = curve_to_cdf(curve)
    m2 = float(simpson(fs * xs ** 2, x=xs))
    return cdf, pm, m2


def cmd_compare(args):
    spec = io.read_spectrum_csv(args.eig)
    # Exactly rank-deficient spectra carry their zeros scattered at rounding
    # scale; snap them so a theoretical atom at 0 lines up.
    vals = spec.vals.copy()
    vals[np.abs(vals) < 1e-10 * (1.0 + np.abs(vals).max())] = 0.0
    spec = ImagSpectrum(vals)
    cdf, pm_theory, m2_theory = _theory_cdf_and_moments(args, spec)
    ks = ks_distance(spec, cdf)
    pm_emp = float(np.mean(vals == 0.0))
    _emit(args, {
        "ks": ks,
        "point_mass_diff": abs(pm_emp - pm_theory),
        "second_moment_emp": float(np.mean(vals ** 2)),
        "second_moment_theory": m2_theory,
        "config": json.loads(_echo_config(args)),
    })
    return 0


def cmd_test(args):
    X1 = io.read_matrix(args.x1)
    X2 = io.read_matrix(args.x2)
    if X1.shape != X2.shape:
        _bad(f"dimension mismatch: {X1.shape} vs {X2.shape}")
    sample = PairedSample(X1, X2)
    if args.estimate_psd:
        cfg = TestConfig(B=args.B, seed=args.seed, sigma_mode="estimate",
                         threads=args.threads, cache_dir=args.cache_dir)
    else:
        if not args.sigma:
            _bad("--sigma or --estimate-psd is required")
        cfg = TestConfig(B=args.B, seed=args.seed, sigma_mode="known",
                         sigma=io.load_measure(args.sigma),
                         threads=args.threads, cache_dir=args.cache_dir)
    result = run_test(sample, cfg)
    _emit(args, {
        "t_obs": result.t_obs,
        "p_value": result.p_value,
        "nulls": [float(v) for v in result.nulls],
        "config": result.config,
    })
    return 0


def cmd_psd_estimate(args):
    if args.eig:
        eigs = io.read_spectrum_csv(args.eig).vals
        if args.c_n is None:
            _bad("--c-n is required with --eig")
        c_n = args.c_n
    elif args.x:
        X = io.read_matrix(args.x)
        p, n = X.shape
        eigs = np.linalg.eigvalsh(X @ X.T / n)
        c_n = p / n
    else:
        _bad("one of --eig or --x is required")
    grid = np.linspace(0.0, 3.0 * max(float(np.max(eigs)), 1e-12), args.grid_size)
    est = estimate_psd(np.maximum(eigs, 0.0), c_n, grid)
    _emit(args, {
        "measure": io.measure_to_dict(est.measure),
        "fit_residual": est.fit_residual,
        "converged": est.converged,
        "config": json.loads(_echo_config(args, {"c_n": c_n})),
    })
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="commspec",
        description="Limiting spectra of random commutator matrices")
    ap.add_argument("--config", help="JSON config echo from a previous run; "
                                     "its flags are replayed")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def add_model_flags(p):
        p.add_argument("--c", type=float, required=True, help="aspect ratio p/n limit")
        p.add_argument("--identity", action="store_true", help="identity scalings")
        p.add_argument("--H", help="measure JSON path")
        p.add_argument("--equal", action="store_true",
                       help="declare the measure univariate (equal scalings)")
        p.add_argument("--numeric", action="store_true",
                       help="force solver+inversion even in identity mode")

    p = sub.add_parser("solve", help="fixed-point solutions at given z")
    add_model_flags(p)
    p.add_argument("--z", action="append", required=True,
                   help="complex point in C_L, e.g. '-0.5+1j' (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("density", help="density curve CSV")
    add_model_flags(p)
    p.add_argument("--grid", required=True, help="lo:hi:step")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("simulate", help="simulate one spectrum")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--dist", choices=["gaussian", "uniform", "mixed"],
                   default="gaussian")
    p.add_argument("--scaling", choices=["identity", "diag", "householder", "haar"],
                   default="identity")
    p.add_argument("--H", help="measure JSON for non-identity scalings")
    p.add_argument("--anti", action="store_true")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="eigenvalue CSV path")
    p.add_argument("--config-out", dest="config_out",
                   help="experiment config JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="KS report of a spectrum against theory")
    add_model_flags(p)
    p.add_argument("--eig", required=True, help="eigenvalue CSV")
    p.add_argument("--theory-points", dest="theory_points", type=int, default=1201)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("test", help="equi-correlation test on paired samples")
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--sigma", help="known scaling spectrum (measure JSON)")
    p.add_argument("--estimate-psd", dest="estimate_psd", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="replicate parallelism (deterministic per seed)")
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("psd-estimate", help="estimate a population spectrum")
    p.add_argument("--eig", help="sample covariance eigenvalue CSV")
    p.add_argument("--x", help="sample matrix (CSV or CMSP binary)")
    p.add_argument("--c-n", dest="c_n", type=float)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_psd_estimate)
    return ap


def _args_from_config(cfg: dict):
    argv = [cfg["subcommand"]]
    for key, val in sorted(cfg.items()):
        if key in ("subcommand", "point_mass_zero", "n", "experiment"):
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        elif isinstance(val, list):
            for item in val:
                argv.extend([flag, str(item)])
        else:
            argv.extend([flag, str(val)])
    return argv


def _merge_dash_values(argv):
    """Join '--grid -4:4:0.01' style pairs so argparse does not read the
    leading-dash value as an option."""
    merged = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--grid", "--z") and i + 1 < len(argv):
            merged.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            merged.append(tok)
            i += 1
    return merged


def main(argv=None):
    argv = _merge_dash_values(list(sys.argv[1:] if argv is None else argv))
    if "--config" in argv:
        i = argv.index("--config")
        try:
            with open(argv[i + 1]) as fh:
                stored = json.load(fh)
        except (OSError, IndexError, json.JSONDecodeError) as err:
            print(f"error: cannot replay config: {err}", file=sys.stderr)
            return EXIT_BAD_INPUT
        argv = _merge_dash_values(_args_from_config(stored.get("config", stored)))
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (ConvergenceError, ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
