"""Fixed-point solvers for the limiting Stieltjes transform.

The commutator limit is characterized by a pair h = (h1, h2) in the open
right half-plane solving

    h_k(z) = integral  lam_k dH(lam) / (-z + lam . rho(c*h(z))),   k = 1, 2,

where rho(z1, z2) = (z2, z1) / (1 + z1 z2), and the transform itself is

    s(z) = (1/z)(2/c - 1) - (2/(c z)) / (1 + c^2 h1(z) h2(z)).

With a common scaling spectrum the system collapses to one unknown with
sigma(w) = 2w/(1 + w^2) in place of rho.  The solvers use damped Picard
iteration; a contraction argument covers large |Re z| only, so targets near
the imaginary axis are reached by continuation along decreasing |Re z|
(:func:`solve_path`), and the damping halves whenever the residual keeps
rising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import BivariateSpectralMeasure, UnivariateSpectralMeasure

__all__ = [
    "PoleError",
    "ConvergenceError",
    "SolverConfig",
    "ModelSpec",
    "HPair",
    "rho",
    "sigma_fn",
    "solve_h_general",
    "solve_h_equal",
    "stieltjes_from_h",
    "solve_path",
    "lsd_stieltjes",
    "anti_stieltjes",
]

POLE_TOL = 1e-14


class PoleError(ValueError):
    """Argument fell on (or numerically at) a pole of rho or sigma."""


class ConvergenceError(RuntimeError):
    """Fixed-point iteration did not reach tolerance."""

    def __init__(self, msg, z=None, residual=None, iterations=None):
        super().__init__(msg)
        self.z = z
        self.residual = residual
        self.iterations = iterations


def rho(z1: complex, z2: complex):
    """(z2, z1)/(1 + z1 z2); maps the right half-plane square into itself."""
    den = 1.0 + z1 * z2
    if abs(den) < POLE_TOL:
        raise PoleError(f"rho pole: 1 + z1*z2 = {den!r}")
    return z2 / den, z1 / den


def sigma_fn(z: complex) -> complex:
    """2z/(1 + z^2), the diagonal specialization of rho."""
    den = 1.0 + z * z
    if abs(den) < POLE_TOL:
        raise PoleError(f"sigma pole: 1 + z^2 = {den!r}")
    return 2.0 * z / den


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 20000
    damping: float = 0.5
    path_start_u: float = 50.0
    path_steps: int = 40

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iter < 1 or self.path_steps < 1:
            raise ValueError("max_iter and path_steps must be at least 1")


@dataclass(frozen=True)
class ModelSpec:
    """Aspect ratio c, scaling spectrum H, and which system applies.

    mode 'general' takes a bivariate H, 'equal' a univariate H, and
    'identity' fixes H = delta_1.
    """

    c: float
    H: object
    mode: str

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("aspect ratio c must be positive")
        if self.mode not in ("general", "equal", "identity"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "general" and not isinstance(self.H, BivariateSpectralMeasure):
            raise ValueError("general mode needs a bivariate measure")
        if self.mode == "equal" and not isinstance(self.H, UnivariateSpectralMeasure):
            raise ValueError("equal mode needs a univariate measure")
        if self.mode == "identity":
            want = UnivariateSpectralMeasure.point(1.0)
            if not isinstance(self.H, UnivariateSpectralMeasure) or \
                    self.H.atoms() != want.atoms():
                raise ValueError("identity mode requires H = delta_1")

    @classmethod
    def identity(cls, c):
        return cls(c=float(c), H=UnivariateSpectralMeasure.point(1.0), mode="identity")

    @classmethod
    def equal(cls, c, H):
        return cls(c=float(c), H=H, mode="equal")

    @classmethod
    def general(cls, c, H):
        return cls(c=float(c), H=H, mode="general")


@dataclass(frozen=True)
class HPair:
    """Solution of the fixed-point system at one z, with solve metadata."""

    h1: complex
    h2: complex
    residual: float
    iterations: int
    z: complex


def _require_left_half(z):
    z = complex(z)
    if z.real >= 0:
        raise ValueError(f"z = {z!r} must lie in the open left half-plane")
    return z


# ---------------------------------------------------------------------------
# Picard cores.  Acceptance uses a residual scaled by max(1, |h|): close to
# the imaginary axis in point-mass regimes |h| grows like 1/|Re z| and an
# absolute 1e-12 would sit below the float64 rounding floor of one map
# evaluation.


def _iterate(map_fn, h0, init, cfg):
    h = h0
    alpha = cfg.damping
    best_h, best_res = h, math.inf
    prev = math.inf
    rises = 0
    it = 0
    while it < cfg.max_iter:
        it += 1
        try:
            r = map_fn(h)
        except PoleError:
            alpha *= 0.5
            h = init
            prev = math.inf
            rises = 0
            if alpha < 1e-9:
                break
            continue
        res = max(abs(a - b) for a, b in zip(h, r))
        scale = max(1.0, *(abs(a) for a in r))
        if res < best_res:
            best_h, best_res = r, res
        if res <= cfg.tol * scale and all(a.real > 0 for a in r):
            return r, res, it
        if res > prev:
            rises += 1
            if rises >= 5:
                alpha *= 0.5
                rises = 0
        else:
            rises = 0
        h = tuple((1.0 - alpha) * a + alpha * b for a, b in zip(h, r))
        if any(a.real <= 0 for a in h):
            # The solution is unique in the right half-plane; restart rather
            # than follow an escaping trajectory.
            alpha *= 0.5
            h = init
            prev = math.inf
            rises = 0
            if alpha < 1e-9:
                break
            continue
        prev = res
    return best_h, best_res, it


def solve_h_general(model: ModelSpec, z: complex, cfg: SolverConfig = SolverConfig(),
                    h0=None) -> HPair:
    """Solve the two-component system at one z in the left half-plane.

    The iteration starts from the large-|z| asymptote (first moments of H
    over -z) unless a warm start ``h0 = (h1, h2)`` is given.  Raises
    :class:`ConvergenceError` with the best residual on failure.
    """
    z = _require_left_half(z)
    if model.mode != "general":
        raise ValueError("solve_h_general requires a general-mode model")
    H = model.H
    m1, m2 = H.first_moments()
    if m1 == 0.0 and m2 == 0.0:
        # Degenerate scaling: the limit is a point mass at 0 and h vanishes.
        return HPair(0j, 0j, 0.0, 0, z)
    c = model.c
    l1, l2, w = H.l1, H.l2, H.w
    wl1 = w * l1
    wl2 = w * l2

    def step(h):
        den = 1.0 + (c * h[0]) * (c * h[1])
        if abs(den) < POLE_TOL:
            raise PoleError("1 + c^2 h1 h2 vanished")
        r1 = c * h[1] / den
        r2 = c * h[0] / den
        d = -z + l1 * r1 + l2 * r2
        if np.any(np.abs(d) < POLE_TOL):
            raise PoleError("integrand denominator vanished")
        return complex(np.sum(wl1 / d)), complex(np.sum(wl2 / d))

    init = (m1 / -z, m2 / -z)
    start = tuple(h0) if h0 is not None else init
    h, res, it = _iterate(step, start, init, cfg)
    scale = max(1.0, abs(h[0]), abs(h[1]))
    if res > cfg.tol * scale or h[0].real <= 0 or h[1].real <= 0:
        raise ConvergenceError(
            f"general solve failed at z={z!r}: residual {res:.3e} after {it} iterations",
            z=z, residual=res, iterations=it)
    return HPair(h[0], h[1], res, it, z)


def _solve_equal_meta(model, z, cfg, h0=None):
    z = _require_left_half(z)
    if model.mode not in ("equal", "identity"):
        raise ValueError("solve_h_equal requires an equal- or identity-mode model")
    H = model.H
    m1 = H.first_moment()
    if m1 == 0.0:
        return 0j, 0.0, 0
    c = model.c
    lam, w = H.lam, H.w
    wl = w * lam

    def step(h):
        ch = c * h[0]
        den = 1.0 + ch * ch
        if abs(den) < POLE_TOL:
            raise PoleError("1 + (c h)^2 vanished")
        sig = 2.0 * ch / den
        d = -z + lam * sig
        if np.any(np.abs(d) < POLE_TOL):
            raise PoleError("integrand denominator vanished")
        return (complex(np.sum(wl / d)),)

    init = (m1 / -z,)
    start = (complex(h0),) if h0 is not None else init
    h, res, it = _iterate(step, start, init, cfg)
    if res > cfg.tol * max(1.0, abs(h[0])) or h[0].real <= 0:
        raise ConvergenceError(
            f"equal solve failed at z={z!r}: residual {res:.3e} after {it} iterations",
            z=z, residual=res, iterations=it)
    return h[0], res, it


def solve_h_equal(model: ModelSpec, z: complex, cfg: SolverConfig = SolverConfig(),
                  h0=None) -> complex:
    """Solve the one-component system (equal or identity scalings) at z."""
    return _solve_equal_meta(model, z, cfg, h0=h0)[0]


def _solve_pair(model, z, cfg, h0=None) -> HPair:
    """Mode dispatch returning an HPair in every mode."""
    if model.mode == "general":
        return solve_h_general(model, z, cfg, h0=h0)
    warm = h0[0] if h0 is not None else None
    h, res, it = _solve_equal_meta(model, z, cfg, h0=warm)
    return HPair(h, h, res, it, complex(z))


def stieltjes_from_h(h: HPair, c: float, z: complex) -> complex:
    """Algebraic form of s(z) given the solved pair."""
    z = complex(z)
    den = 1.0 + c * c * h.h1 * h.h2
    if abs(den) < POLE_TOL:
        raise PoleError("1 + c^2 h1 h2 vanished in the transform")
    return (1.0 / z) * (2.0 / c - 1.0) - (2.0 / (c * z)) / den


def solve_path(model: ModelSpec, targets, cfg: SolverConfig = SolverConfig()):
    """Continuation solve toward each target z in the left half-plane.

    For each target the solve starts at z0 = -path_start_u + 1j*Im(target),
    where uniqueness and contraction are unproblematic, and |Re z| is then
    lowered geometrically to the target in path_steps stages, warm-starting
    every stage from the previous solution.
    """
    out = []
    for z_t in targets:
        z_t = _require_left_half(z_t)
        u_t = -z_t.real
        v = z_t.imag
        if u_t >= cfg.path_start_u:
            out.append(_solve_pair(model, z_t, cfg))
            continue
        h = None
        for u in np.geomspace(cfg.path_start_u, u_t, cfg.path_steps):
            z = complex(-u, v)
            try:
                pair = _solve_pair(model, z, cfg, h0=h)
            except ConvergenceError as err:
                raise ConvergenceError(
                    f"continuation toward {z_t!r} failed at path point {z!r}: {err}",
                    z=z, residual=err.residual, iterations=err.iterations,
                ) from err
            h = (pair.h1, pair.h2)
        out.append(pair)
    return out


def lsd_stieltjes(model: ModelSpec, z: complex, cfg: SolverConfig = SolverConfig()) -> complex:
    """Stieltjes transform of the commutator limit at z in C_L."""
    pair = solve_path(model, [z], cfg)[0]
    return stieltjes_from_h(pair, model.c, z)


def anti_stieltjes(model: ModelSpec, z: complex, cfg: SolverConfig = SolverConfig()) -> complex:
    """Stieltjes transform of the anti-commutator limit at z in C+.

    The anti-commutator spectrum is the commutator spectrum rotated onto the
    real axis, so the transform is obtained by solving h at 1j*z in C_L and
    evaluating the same algebraic form; equivalently 1j*s(1j*z).
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("anti_stieltjes requires Im(z) > 0")
    w = 1j * z
    pair = solve_path(model, [w], cfg)[0]
    den = 1.0 + model.c ** 2 * pair.h1 * pair.h2
    if abs(den) < POLE_TOL:
        raise PoleError("1 + c^2 h1 h2 vanished in the transform")
    return (1.0 / z) * (2.0 / model.c - 1.0) - (2.0 / (model.c * z)) / den
