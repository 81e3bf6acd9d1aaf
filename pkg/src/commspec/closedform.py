"""Exact limiting law of the commutator spectrum when both scalings are the
identity.

The Stieltjes transform m(z) of the limit satisfies the cubic

    c^2 z m^3 + (c^2 - 2c) m^2 + z m + 1 = 0,

whose roots are available via Cardano's method.  The limit is a mixture of a
symmetric density on S_c = (-U_c, -L_c) u (L_c, U_c) and, for c > 2, a point
mass 1 - 2/c at zero.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NoDensityAtZero",
    "SupportParams",
    "support_params",
    "rqd_eval",
    "cardano_roots",
    "stieltjes_identity",
    "density_identity",
    "point_mass_identity",
    "identity_cdf",
]

_OMEGA1 = complex(-0.5, math.sqrt(3.0) / 2.0)
_OMEGA2 = _OMEGA1.conjugate()

RE_ROOT_TOL = 1e-12


class NoDensityAtZero(ValueError):
    """The limit has no density at 0 (c >= 2; the mass there is atomic)."""


@dataclass(frozen=True)
class SupportParams:
    """Cubic coefficients and support endpoints as functions of c."""

    c: float
    q0: float
    q2: float
    r1: float
    r3: float
    d0: float
    d2: float
    d4: float
    R_plus: float
    R_minus: float
    L_c: float
    U_c: float


def support_params(c: float) -> SupportParams:
    c = float(c)
    if c <= 0:
        raise ValueError("aspect ratio c must be positive")
    q0 = 1.0 / (3.0 * c * c)
    q2 = -((c - 2.0) ** 2) / (9.0 * c * c)
    r1 = -(c + 1.0) / (3.0 * c ** 3)
    r3 = -((c - 2.0) ** 3) / (27.0 * c ** 3)
    d0 = 1.0 / (27.0 * c ** 6)
    d2 = (2.0 * c * c + 10.0 * c - 1.0) / (27.0 * c ** 6)
    d4 = (c - 2.0) ** 3 / (27.0 * c ** 5)
    disc = d2 * d2 - 4.0 * d0 * d4  # equals ((4c+1)/(9c^4))^3, always > 0
    root = math.sqrt(disc)
    R_plus = (d2 + root) / (2.0 * d0)
    R_minus = (d2 - root) / (2.0 * d0)
    L_c = math.sqrt(R_minus) if R_minus > 0 else 0.0
    U_c = math.sqrt(R_plus)
    return SupportParams(c, q0, q2, r1, r3, d0, d2, d4, R_plus, R_minus, L_c, U_c)


def rqd_eval(sp: SupportParams, x: float):
    """Evaluate (|r(x)|, q(x), d(x)) on the imaginary axis, x != 0.

    r(x) is purely imaginary; the returned first component is its modulus.
    The identity d = -|r|^2 + q^3 holds for every nonzero x.
    """
    x = float(x)
    if x == 0.0:
        raise ValueError("rqd_eval is undefined at x = 0")
    ax = abs(x)
    r_signed = -sp.r1 / ax + sp.r3 / ax ** 3
    q = sp.q0 - sp.q2 / x ** 2
    d = sp.d0 - sp.d2 / x ** 2 + sp.d4 / x ** 4
    return abs(r_signed), q, d


def cardano_roots(c: float, z: complex):
    """All three roots of the identity-case cubic at z != 0.

    S0 is a principal cube root of R + sqrt(R^2 + Q^3) (the larger of the
    two candidates for stability) and T0 = -Q/S0, which pins the pairing
    S0^3 + T0^3 = 2R, S0*T0 = -Q.  Any of the three compatible pairings
    yields the same root set.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("cardano_roots requires z != 0")
    sp = support_params(c)
    Q = sp.q0 + sp.q2 / z ** 2
    R = sp.r1 / z + sp.r3 / z ** 3
    disc = cmath.sqrt(R * R + Q ** 3)
    u1, u2 = R + disc, R - disc
    u = u1 if abs(u1) >= abs(u2) else u2
    if u == 0:
        S0 = T0 = 0j
    else:
        S0 = u ** (1.0 / 3.0)
        T0 = -Q / S0
    pre = -(1.0 - 2.0 / c) / (3.0 * z)
    return (
        pre + S0 + T0,
        pre + _OMEGA1 * S0 + _OMEGA2 * T0,
        pre + _OMEGA2 * S0 + _OMEGA1 * T0,
    )


def stieltjes_identity(c: float, z: complex) -> complex:
    """The unique cubic root with positive real part, i.e. s_F(z) on C_L."""
    z = complex(z)
    if z.real >= 0:
        raise ValueError("stieltjes_identity requires Re(z) < 0")
    roots = cardano_roots(c, z)
    pos = [m for m in roots if m.real > RE_ROOT_TOL]
    if len(pos) == 1:
        return pos[0]
    # Near the support edges two real parts can collapse to 0 numerically.
    warnings.warn(
        f"root selection tie at z={z!r} (found {len(pos)} roots with "
        "positive real part); picking the largest real part",
        RuntimeWarning,
        stacklevel=2,
    )
    return max(roots, key=lambda m: m.real)


def point_mass_identity(c: float) -> float:
    if c <= 0:
        raise ValueError("aspect ratio c must be positive")
    return max(0.0, 1.0 - 2.0 / c)


def density_identity(c: float, x: float) -> float:
    """Density of the limit at x on the imaginary axis (identity scalings).

    Zero outside S_c; raises :class:`NoDensityAtZero` at x = 0 when c >= 2.
    """
    x = float(x)
    sp = support_params(c)
    if x == 0.0:
        if 0 < c < 2:
            return 1.0 / (math.pi * math.sqrt(2.0 * c - c * c))
        raise NoDensityAtZero(f"no density at 0 for c = {c}")
    ax = abs(x)
    if not (sp.L_c < ax < sp.U_c):
        return 0.0
    r_abs, _, d = rqd_eval(sp, x)
    s = math.sqrt(-d)
    v_plus = r_abs + s
    v_minus = r_abs - s
    return math.sqrt(3.0) / (2.0 * math.pi) * (
        np.cbrt(v_plus) - np.cbrt(v_minus)
    )


def identity_cdf(c: float, n_grid: int = 20001):
    """CDF of the identity-scaling limit, as a callable on the real line.

    Built by quadrature of the closed-form density over the positive support
    component, mirrored by symmetry, with the atomic mass at 0 added as a
    step.  The grid is geometric near 0 when L_c = 0 so the integrable
    x^(-1/3) blow-up at c = 2 is resolved.
    """
    sp = support_params(c)
    pm = point_mass_identity(c)
    if sp.L_c > 0:
        xs = np.linspace(sp.L_c, sp.U_c, n_grid)
    else:
        knee = min(0.5, sp.U_c / 10.0)
        lo = np.geomspace(1e-10, knee, n_grid // 5)
        hi = np.linspace(knee, sp.U_c, n_grid - n_grid // 5)
        xs = np.unique(np.concatenate([lo, hi]))
    fs = np.array([density_identity(c, x) for x in xs])
    cells = 0.5 * (fs[1:] + fs[:-1]) * np.diff(xs)
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    half = cum[-1]  # mass of one lobe, = (1 - pm)/2 up to quadrature error

    def cdf(x):
        x = float(x)
        if x >= 0:
            return half + pm + float(np.interp(x, xs, cum, left=0.0, right=half))
        return half - float(np.interp(-x, xs, cum, left=0.0, right=half))

    return cdf
