"""Recover densities and masses of the limit law from its Stieltjes
transform by controlled limits toward the imaginary axis.

At a point ix of the imaginary axis the density is
(1/pi) lim_{eps->0} Re s(-eps + ix) and an atom at 0 has mass
lim_{eps->0} eps * s(-eps).  The limits are estimated on a short decreasing
eps schedule and Richardson-extrapolated assuming a first-order error in
eps, which is exact to O(eps^2) for x inside the open support.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fixedpoint import (
    ConvergenceError,
    ModelSpec,
    SolverConfig,
    _solve_pair,
    solve_path,
    stieltjes_from_h,
)

__all__ = [
    "EpsSchedule",
    "DensityCurve",
    "density_at",
    "point_mass_zero",
    "interval_mass",
    "density_grid",
    "curve_to_cdf",
]

POINT_MASS_FLOOR = 1e-3
SPREAD_WARN = 0.05


@dataclass(frozen=True)
class EpsSchedule:
    eps_list: tuple = (1e-2, 1e-3, 1e-4)
    extrapolate: bool = True

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_list)
        if len(eps) < 1 or any(e <= 0 for e in eps):
            raise ValueError("eps_list must contain positive values")
        if any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        object.__setattr__(self, "eps_list", eps)


@dataclass(frozen=True)
class DensityCurve:
    xs: np.ndarray
    fs: np.ndarray
    point_mass_zero: float
    support_lo: float
    support_hi: float
    model: ModelSpec
    failures: tuple = ()


def _extrapolate(sched, eps, vals):
    if not sched.extrapolate or len(vals) < 2:
        return vals[-1]
    e1, e2 = eps[-2], eps[-1]
    v1, v2 = vals[-2], vals[-1]
    return v2 + (v2 - v1) * e2 / (e1 - e2)


def _warn_spread(vals, x, value):
    if len(vals) < 2 or abs(value) <= POINT_MASS_FLOOR:
        return
    spread = abs(vals[-1] - vals[-2]) / max(abs(vals[-1]), abs(vals[-2]), 1e-300)
    if spread > SPREAD_WARN:
        warnings.warn(
            f"eps sequence at x={x:g} has relative spread {spread:.2%} at the "
            "two smallest eps; the limit estimate may be unreliable",
            RuntimeWarning,
            stacklevel=3,
        )


def _re_s_sequence(model, x, sched, cfg, h0=None, atom=0.0):
    """Re s(-eps + ix) along the schedule, minus a known atom at 0.

    Subtracting the atom's exact contribution atom*eps/(eps^2 + x^2) keeps
    small-|x| evaluations from being swamped by the point mass before the
    extrapolation removes it.  Returns (values, last HPair).
    """
    vals = []
    pair = None
    for k, eps in enumerate(sched.eps_list):
        z = complex(-eps, x)
        warm = h0 if (pair is None and h0 is not None) else (
            (pair.h1, pair.h2) if pair is not None else None)
        if warm is None:
            pair = solve_path(model, [z], cfg)[0]
        else:
            try:
                pair = _solve_pair(model, z, cfg, h0=warm)
            except ConvergenceError:
                pair = solve_path(model, [z], cfg)[0]
        s = stieltjes_from_h(pair, model.c, z)
        vals.append(s.real - atom * eps / (eps * eps + x * x))
    return vals, pair


def density_at(model: ModelSpec, x: float, sched: EpsSchedule = EpsSchedule(),
               cfg: SolverConfig = SolverConfig()) -> float:
    """Density of the limit at x, clamped at zero from below."""
    x = float(x)
    vals, _ = _re_s_sequence(model, x, sched, cfg)
    est = _extrapolate(sched, sched.eps_list, vals) / math.pi
    _warn_spread(vals, x, est)
    return max(0.0, est)


def point_mass_zero(model: ModelSpec, sched: EpsSchedule = EpsSchedule(),
                    cfg: SolverConfig = SolverConfig()) -> float:
    """Mass of the atom at 0, via eps * s(-eps) along the schedule.

    Estimates below 1e-3 are reported as 0: genuine atoms in this family
    have macroscopic mass (1 - 2/c or 1 - beta scale).
    """
    vals = []
    pair = None
    for eps in sched.eps_list:
        z = complex(-eps, 0.0)
        if pair is None:
            pair = solve_path(model, [z], cfg)[0]
        else:
            try:
                pair = _solve_pair(model, z, cfg, h0=(pair.h1, pair.h2))
            except ConvergenceError:
                pair = solve_path(model, [z], cfg)[0]
        s = stieltjes_from_h(pair, model.c, z)
        vals.append((eps * s).real)
    est = _extrapolate(sched, sched.eps_list, vals)
    if est < POINT_MASS_FLOOR:
        return 0.0
    return min(1.0, est)


def interval_mass(model: ModelSpec, a: float, b: float,
                  sched: EpsSchedule = EpsSchedule(),
                  cfg: SolverConfig = SolverConfig(), n_points: int = 801) -> float:
    """Mass of the continuous part over (a, b).

    Composite Simpson of Re s(-eps + ix) over the interval at the two
    smallest eps, extrapolated; the contribution of a detected atom at 0 is
    subtracted exactly, so the atom is always reported separately by
    :func:`point_mass_zero` regardless of whether 0 lies in (a, b).
    """
    from scipy.integrate import simpson

    if not a < b:
        raise ValueError("interval requires a < b")
    pm = point_mass_zero(model, sched, cfg)
    xs = np.linspace(a, b, n_points if n_points % 2 == 1 else n_points + 1)
    eps_tail = sched.eps_list[-2:] if len(sched.eps_list) >= 2 else sched.eps_list
    integrals = []
    for eps in eps_tail:
        pair = None
        re_s = np.empty(len(xs))
        for i, x in enumerate(xs):
            z = complex(-eps, x)
            if pair is None:
                pair = solve_path(model, [z], cfg)[0]
            else:
                try:
                    pair = _solve_pair(model, z, cfg, h0=(pair.h1, pair.h2))
                except ConvergenceError:
                    pair = solve_path(model, [z], cfg)[0]
            s = stieltjes_from_h(pair, model.c, z)
            re_s[i] = s.real - pm * eps / (eps * eps + x * x)
        integrals.append(float(simpson(re_s, x=xs)))
    est = _extrapolate(sched, eps_tail, integrals) / math.pi
    return est


def density_grid(model: ModelSpec, grid, sched: EpsSchedule = EpsSchedule(),
                 cfg: SolverConfig = SolverConfig()) -> DensityCurve:
    """Density on a sorted grid, warm-starting each point from its neighbor.

    Per-point solver failures are recorded in ``failures`` and marked NaN in
    the curve without aborting the batch.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size and np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted ascending")
    pm = point_mass_zero(model, sched, cfg)
    fs = np.empty(grid.size)
    failures = []
    carry = {eps: None for eps in sched.eps_list}
    for i, x in enumerate(grid):
        try:
            vals = []
            prev_pair = None
            for eps in sched.eps_list:
                z = complex(-eps, x)
                warm = carry[eps] or (
                    (prev_pair.h1, prev_pair.h2) if prev_pair is not None else None)
                if warm is None:
                    pair = solve_path(model, [z], cfg)[0]
                else:
                    try:
                        pair = _solve_pair(model, z, cfg, h0=warm)
                    except ConvergenceError:
                        pair = solve_path(model, [z], cfg)[0]
                carry[eps] = (pair.h1, pair.h2)
                prev_pair = pair
                s = stieltjes_from_h(pair, model.c, z)
                vals.append(s.real - pm * eps / (eps * eps + x * x))
            fs[i] = max(0.0, _extrapolate(sched, sched.eps_list, vals) / math.pi)
        except ConvergenceError:
            fs[i] = math.nan
            failures.append(float(x))
    if model.mode == "identity":
        from .closedform import support_params

        sp = support_params(model.c)
        lo, hi = -sp.U_c, sp.U_c
    else:
        lo, hi = -math.inf, math.inf
    return DensityCurve(xs=grid, fs=fs, point_mass_zero=pm,
                        support_lo=lo, support_hi=hi, model=model,
                        failures=tuple(failures))


def curve_to_cdf(curve: DensityCurve):
    """CDF callable from a density curve plus its atom at 0.

    Failed grid points are dropped before the cumulative trapezoid; the
    result is not renormalized, so mass-conservation defects remain visible.
    """
    ok = ~np.isnan(curve.fs)
    xs = curve.xs[ok]
    fs = curve.fs[ok]
    if xs.size < 2:
        raise ValueError("curve has too few valid points for a CDF")
    cells = 0.5 * (fs[1:] + fs[:-1]) * np.diff(xs)
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    pm = curve.point_mass_zero
    top = float(cum[-1])

    def cdf(x):
        x = float(x)
        base = float(np.interp(x, xs, cum, left=0.0, right=top))
        return base + (pm if x >= 0 else 0.0)

    return cdf
