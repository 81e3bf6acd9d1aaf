"""Limiting spectral distributions of random commutator matrices.

The library covers the pipeline end to end: fixed-point solvers for the
limiting Stieltjes transform under general commuting scalings, numerical
inversion to densities and point masses, the exact identity-scaling law,
finite-dimensional simulation, and the equi-correlation test built on the
commutator spectrum.
"""

from .closedform import (
    NoDensityAtZero,
    SupportParams,
    cardano_roots,
    density_identity,
    identity_cdf,
    point_mass_identity,
    rqd_eval,
    stieltjes_identity,
    support_params,
)
from .fixedpoint import (
    ConvergenceError,
    HPair,
    ModelSpec,
    PoleError,
    SolverConfig,
    anti_stieltjes,
    lsd_stieltjes,
    rho,
    sigma_fn,
    solve_h_equal,
    solve_h_general,
    solve_path,
    stieltjes_from_h,
)
from .hypotest import (
    EstimatedPSD,
    PairedSample,
    TestConfig,
    TestResult,
    estimate_psd,
    mc_null,
    p_value,
    run_test,
    spectral_stat,
    theoretical_shrinkage,
)
from .inversion import (
    DensityCurve,
    EpsSchedule,
    curve_to_cdf,
    density_at,
    density_grid,
    interval_mass,
    point_mass_zero,
)
from .measures import (
    BivariateSpectralMeasure,
    ImagSpectrum,
    RankTwoCoeffs,
    SingularUpdateError,
    UnivariateSpectralMeasure,
    empirical_stieltjes,
    esd_cdf_eval,
    ks_distance,
    rank2_inverse_apply,
)
from .simulate import (
    InnovationSpec,
    ScalingSpec,
    SpectrumSample,
    anticommutator,
    build_scaling,
    commutator,
    eigenvalues_skew,
    gen_innovations,
    run_experiment,
    run_experiment_config,
)

__version__ = "0.1.0"
