"""Discrete spectral measures, spectra on the imaginary axis, and the
empirical Stieltjes transform.

Eigenvalue distributions of scaling matrices live on the nonnegative reals
(univariate) or the nonnegative quadrant (bivariate, for commuting pairs
sharing an eigenbasis).  Spectra of skew-Hermitian matrices are stored as the
real numbers ``lam`` such that the eigenvalues are ``1j*lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BivariateSpectralMeasure",
    "UnivariateSpectralMeasure",
    "ImagSpectrum",
    "RankTwoCoeffs",
    "SingularUpdateError",
    "empirical_stieltjes",
    "esd_cdf_eval",
    "ks_distance",
    "rank2_inverse_apply",
]

WEIGHT_SUM_TOL = 1e-12
WEIGHT_RENORM_TOL = 1e-9


class SingularUpdateError(ValueError):
    """Rank-2 update denominator is numerically singular."""


def _clean_weights(w):
    w = np.asarray(w, dtype=float)
    if w.size == 0:
        raise ValueError("measure needs at least one atom")
    if np.any(w <= 0):
        raise ValueError("atom weights must be positive")
    total = w.sum()
    if abs(total - 1.0) > WEIGHT_RENORM_TOL:
        raise ValueError(f"atom weights sum to {total!r}, expected 1")
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        w = w / total
    return w


@dataclass(frozen=True)
class UnivariateSpectralMeasure:
    """Finite atomic probability measure on the nonnegative reals."""

    lam: np.ndarray
    w: np.ndarray

    def __init__(self, atoms):
        pts = [(float(l), float(wt)) for l, wt in atoms]
        lam = np.array([a[0] for a in pts])
        if np.any(lam < 0):
            raise ValueError("atom locations must be nonnegative")
        w = _clean_weights([a[1] for a in pts])
        lam.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "w", w)

    @classmethod
    def point(cls, lam=1.0):
        return cls([(lam, 1.0)])

    @classmethod
    def from_quantile_fn(cls, quantile_fn, n_atoms=64):
        """Discretize a continuous distribution on R+ by its quantiles.

        Places ``1/n_atoms`` of mass at the quantiles of the cell midpoints
        ``(k + 0.5)/n_atoms``.
        """
        qs = (np.arange(n_atoms) + 0.5) / n_atoms
        return cls([(quantile_fn(q), 1.0 / n_atoms) for q in qs])

    def first_moment(self):
        return float(np.dot(self.lam, self.w))

    def atoms(self):
        return list(zip(self.lam.tolist(), self.w.tolist()))

    def is_degenerate_at_zero(self):
        return bool(np.all(self.lam == 0.0))


@dataclass(frozen=True)
class BivariateSpectralMeasure:
    """Finite atomic probability measure on the nonnegative quadrant.

    This is the joint eigenvalue distribution of a commuting pair of psd
    matrices: each atom is a pair of eigenvalues sharing one eigenvector.
    """

    l1: np.ndarray
    l2: np.ndarray
    w: np.ndarray

    def __init__(self, atoms):
        pts = [(float(a), float(b), float(wt)) for a, b, wt in atoms]
        l1 = np.array([a[0] for a in pts])
        l2 = np.array([a[1] for a in pts])
        if np.any(l1 < 0) or np.any(l2 < 0):
            raise ValueError("atom locations must be nonnegative")
        w = _clean_weights([a[2] for a in pts])
        l1.flags.writeable = False
        l2.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "l1", l1)
        object.__setattr__(self, "l2", l2)
        object.__setattr__(self, "w", w)

    @classmethod
    def point(cls, l1=1.0, l2=1.0):
        return cls([(l1, l2, 1.0)])

    @classmethod
    def from_univariate(cls, meas):
        """Common-spectrum embedding (both coordinates equal)."""
        return cls([(l, l, wt) for l, wt in meas.atoms()])

    def first_moments(self):
        return float(np.dot(self.l1, self.w)), float(np.dot(self.l2, self.w))

    def atoms(self):
        return list(zip(self.l1.tolist(), self.l2.tolist(), self.w.tolist()))

    def is_degenerate_at_zero(self):
        return bool(np.all(self.l1 == 0.0) and np.all(self.l2 == 0.0))


@dataclass(frozen=True)
class ImagSpectrum:
    """Spectrum of a p x p skew-Hermitian matrix: eigenvalues are 1j*vals."""

    vals: np.ndarray
    p: int = field(init=False)

    def __init__(self, vals):
        v = np.sort(np.asarray(vals, dtype=float))
        if v.ndim != 1 or v.size == 0:
            raise ValueError("spectrum must be a nonempty 1-d array")
        v.flags.writeable = False
        object.__setattr__(self, "vals", v)
        object.__setattr__(self, "p", int(v.size))


def empirical_stieltjes(spec: ImagSpectrum, z: complex) -> complex:
    """Stieltjes transform (1/p) sum_j 1/(1j*lam_j - z) for Re(z) < 0."""
    z = complex(z)
    if z.real >= 0:
        raise ValueError("empirical_stieltjes requires Re(z) < 0")
    return complex(np.mean(1.0 / (1j * spec.vals - z)))


def esd_cdf_eval(spec: ImagSpectrum, x: float) -> float:
    """Fraction of spectrum values <= x."""
    return float(np.searchsorted(spec.vals, x, side="right")) / spec.p


def ks_distance(spec: ImagSpectrum, cdf) -> float:
    """Uniform distance between the ESD of ``spec`` and the CDF ``cdf``.

    The supremum of |ESD - F| over the line is attained at a jump of either
    function, so it is evaluated at every distinct spectrum value from both
    sides.  Left limits of ``cdf`` are taken by evaluating just below the
    jump, which keeps co-located atoms (e.g. a point mass at 0 against an
    exactly rank-deficient spectrum) from registering a spurious gap.
    """
    uniq, counts = np.unique(spec.vals, return_counts=True)
    cum_hi = np.cumsum(counts) / spec.p
    cum_lo = cum_hi - counts / spec.p
    d = 0.0
    for x, hi, lo in zip(uniq, cum_hi, cum_lo):
        d = max(d, abs(hi - float(cdf(x))),
                abs(lo - float(cdf(np.nextafter(x, -np.inf)))))
    return d


@dataclass(frozen=True)
class RankTwoCoeffs:
    """Coefficients of the skew rank-2 inverse update.

    With B = A - z*I (A skew-Hermitian, Re(z) < 0) and the perturbed matrix
    M = B + u v* - v u*, the solves against u and v reduce to solves
    against B:

        M^-1 u = B^-1 (alpha1 * u + beta1 * v)
        M^-1 v = B^-1 (alpha2 * v + beta2 * u)
    """

    alpha1: complex
    beta1: complex
    alpha2: complex
    beta2: complex
    D: complex


def rank2_inverse_apply(B: np.ndarray, u: np.ndarray, v: np.ndarray) -> RankTwoCoeffs:
    """Coefficients expressing (B + uv* - vu*)^-1 {u, v} via B^-1 {u, v}.

    Uses the inner product <a, b> = a* B^-1 b.  Raises
    :class:`SingularUpdateError` when the scalar denominator is below 1e-14.
    """
    B = np.asarray(B, dtype=complex)
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    sol = np.linalg.solve(B, np.column_stack([u, v]))
    bu, bv = sol[:, 0], sol[:, 1]
    uv = complex(u.conj() @ bv)
    vu = complex(v.conj() @ bu)
    uu = complex(u.conj() @ bu)
    vv = complex(v.conj() @ bv)
    den = (1.0 - uv) * (1.0 + vu) + uu * vv
    if abs(den) < 1e-14:
        raise SingularUpdateError(f"rank-2 denominator {den!r} is singular")
    D = 1.0 / den
    return RankTwoCoeffs(
        alpha1=(1.0 - uv) * D,
        beta1=uu * D,
        alpha2=(1.0 + vu) * D,
        beta2=-vv * D,
        D=D,
    )
