"""Finite-dimensional commutator and anti-commutator ensembles.

Builds X_k = Sigma_k^(1/2) Z_k with independent unit-variance innovations
and the scaling variants used in the numerical studies: identity, a
commuting diagonal pair, low-rank Householder eigenbases, and fully
non-commuting Haar-type orthogonal bases.  Randomness comes from
counter-based Philox streams keyed by (master seed, replicate, role) so
replicates are reproducible and independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import BivariateSpectralMeasure, ImagSpectrum

__all__ = [
    "InnovationSpec",
    "ScalingSpec",
    "SpectrumSample",
    "stream",
    "gen_innovations",
    "build_scaling",
    "commutator",
    "anticommutator",
    "eigenvalues_skew",
    "run_experiment",
]

SQRT3 = math.sqrt(3.0)
SKEW_REL_TOL = 1e-8

INNOVATION_KINDS = ("gaussian", "uniform", "mixed")
SCALING_KINDS = ("identity", "commuting_diag", "householder_lowrank",
                 "haar_noncommuting")


def stream(seed, *key):
    """Philox generator for the given (seed, *key) lane."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))))


@dataclass(frozen=True)
class InnovationSpec:
    """Entry distribution of the innovation matrices.

    'uniform' is scaled to unit variance (endpoints +-sqrt(3)); 'mixed'
    picks gaussian or uniform per entry by an independent fair coin.
    """

    kind: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in INNOVATION_KINDS:
            raise ValueError(f"unknown innovation kind {self.kind!r}")


@dataclass(frozen=True)
class ScalingSpec:
    """How the pair of scaling matrices is generated.

    H supplies the eigenvalue pairs for the non-identity kinds.  k is the
    Householder rank budget (orthonormal columns per reflector), default
    ceil(sqrt(p)) so the perturbation stays low-rank.
    """

    kind: str = "identity"
    H: BivariateSpectralMeasure | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind not in SCALING_KINDS:
            raise ValueError(f"unknown scaling kind {self.kind!r}")
        if self.kind != "identity" and self.H is None:
            raise ValueError(f"scaling kind {self.kind!r} needs a measure H")


@dataclass(frozen=True)
class SpectrumSample:
    """Eigenvalues of one simulated matrix plus the generating config."""

    spectrum: ImagSpectrum
    p: int
    n: int
    config: dict
    seed: int


def gen_innovations(p: int, n: int, spec: InnovationSpec, rng=None) -> np.ndarray:
    """p x n i.i.d. innovation matrix with mean 0 and variance 1.

    Draws from ``rng`` when given (the experiment driver passes
    role-specific streams); otherwise from a stream keyed by spec.seed.
    """
    if p < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    if rng is None:
        rng = stream(spec.seed, 0)
    if spec.kind == "gaussian":
        return rng.standard_normal((p, n))
    if spec.kind == "uniform":
        return rng.uniform(-SQRT3, SQRT3, (p, n))
    g = rng.standard_normal((p, n))
    u = rng.uniform(-SQRT3, SQRT3, (p, n))
    coin = rng.integers(0, 2, (p, n)).astype(bool)
    return np.where(coin, g, u)


def _draw_pairs(H: BivariateSpectralMeasure, p: int, rng):
    idx = rng.choice(len(H.w), size=p, p=H.w)
    return H.l1[idx], H.l2[idx]


def _orth_inverse_sqrt(M):
    w, Q = np.linalg.eigh(M)
    if np.any(w <= 0):
        raise np.linalg.LinAlgError("Gram matrix not positive definite")
    return Q @ np.diag(1.0 / np.sqrt(w)) @ Q.T


def build_scaling(spec: ScalingSpec, p: int, seed: int):
    """Matrix square roots (Sigma1^(1/2), Sigma2^(1/2)) for one experiment.

    identity            both are I_p.
    commuting_diag      shared (identity) eigenbasis, diagonal pair drawn
                        from H.
    householder_lowrank bases P_j = I - 2 U_j U_j^T with U_j a p x k
                        orthonormal frame: rank(P_1 - P_2) <= 2k << p.
    haar_noncommuting   bases P_j = (V_j^T V_j)^(-1/2) V_j^T from i.i.d.
                        Gaussian V_j, almost surely non-commuting.
    """
    if p < 1:
        raise ValueError("p must be positive")
    if spec.kind == "identity":
        eye = np.eye(p)
        return eye, eye.copy()
    for attempt in range(3):
        rng = stream(seed, 3, attempt)
        try:
            lam1, lam2 = _draw_pairs(spec.H, p, rng)
            if spec.kind == "commuting_diag":
                return np.diag(np.sqrt(lam1)), np.diag(np.sqrt(lam2))
            if spec.kind == "householder_lowrank":
                k = spec.k if spec.k is not None else math.ceil(math.sqrt(p))
                halves = []
                for lam in (lam1, lam2):
                    U, _ = np.linalg.qr(rng.standard_normal((p, k)))
                    P = np.eye(p) - 2.0 * U @ U.T
                    halves.append((P * np.sqrt(lam)) @ P.T)
                return halves[0], halves[1]
            halves = []
            for lam in (lam1, lam2):
                V = rng.standard_normal((p, p))
                P = _orth_inverse_sqrt(V.T @ V) @ V.T
                halves.append((P * np.sqrt(lam)) @ P.T)
            return halves[0], halves[1]
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError(
        f"scaling construction failed after 3 attempts (seed {seed})")


def commutator(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
    """n^-1 (X1 X2* - X2 X1*), with the skew part enforced exactly."""
    if X1.shape != X2.shape:
        raise ValueError("matrices must share dimensions")
    n = X1.shape[1]
    S = (X1 @ X2.conj().T - X2 @ X1.conj().T) / n
    return (S - S.conj().T) / 2.0


def anticommutator(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
    """n^-1 (X1 X2* + X2 X1*), with the Hermitian part enforced exactly."""
    if X1.shape != X2.shape:
        raise ValueError("matrices must share dimensions")
    n = X1.shape[1]
    S = (X1 @ X2.conj().T + X2 @ X1.conj().T) / n
    return (S + S.conj().T) / 2.0


def eigenvalues_skew(S: np.ndarray) -> ImagSpectrum:
    """Spectrum of a skew-Hermitian matrix via the Hermitian -1j*S."""
    nrm = np.linalg.norm(S)
    dev = np.linalg.norm(S + S.conj().T)
    if dev > SKEW_REL_TOL * max(nrm, 1e-300):
        raise ValueError(
            f"matrix is not skew-Hermitian (relative deviation {dev / max(nrm, 1e-300):.2e})")
    return ImagSpectrum(np.linalg.eigvalsh(-1j * S))


def run_experiment(p: int, n: int, innovation: InnovationSpec,
                   scaling: ScalingSpec, anti: bool = False, rho: float = 0.0,
                   seed: int = 0) -> SpectrumSample:
    """Generate one commutator (or anti-commutator) sample and its spectrum.

    The second innovation matrix is W = rho Z + sqrt(1 - rho^2) V with V
    independent of Z, so rho = 0 recovers the independent pair and rho != 0
    the equi-correlated alternative.  Everything is derived from ``seed``;
    the same seed reproduces the spectrum bitwise.
    """
    if p < 2 or n < 2:
        raise ValueError("p and n must be at least 2")
    if not -1.0 < rho < 1.0:
        raise ValueError("rho must lie in (-1, 1)")
    Z = gen_innovations(p, n, innovation, rng=stream(seed, 1))
    V = gen_innovations(p, n, innovation, rng=stream(seed, 2))
    W = rho * Z + math.sqrt(1.0 - rho * rho) * V if rho != 0.0 else V
    s1h, s2h = build_scaling(scaling, p, seed)
    X1 = s1h @ Z
    X2 = s2h @ W
    if anti:
        S = anticommutator(X1, X2)
        spectrum = ImagSpectrum(np.linalg.eigvalsh(S))
    else:
        spectrum = eigenvalues_skew(commutator(X1, X2))
    config = {
        "p": int(p),
        "n": int(n),
        "innovation": {"kind": innovation.kind, "seed": int(innovation.seed)},
        "scaling": {
            "kind": scaling.kind,
            "H": None if scaling.H is None else scaling.H.atoms(),
            "k": scaling.k,
        },
        "anti": bool(anti),
        "rho": float(rho),
        "seed": int(seed),
    }
    return SpectrumSample(spectrum=spectrum, p=p, n=n, config=config, seed=seed)


def run_experiment_config(config: dict) -> SpectrumSample:
    """Re-run an experiment from an echoed config dict."""
    sc = config["scaling"]
    H = None if sc["H"] is None else BivariateSpectralMeasure(sc["H"])
    return run_experiment(
        p=config["p"],
        n=config["n"],
        innovation=InnovationSpec(**config["innovation"]),
        scaling=ScalingSpec(kind=sc["kind"], H=H, k=sc["k"]),
        anti=config["anti"],
        rho=config["rho"],
        seed=config["seed"],
    )
