"""Non-commuting scalings: the limit appears to survive.

The theory requires the two scaling matrices to commute, but simulations
with fully non-commuting Haar-type eigenbases still match the limit
computed from their joint eigenvalue distribution.  This reproduces that
experiment at desk scale: draw eigenvalue pairs uniformly from
{1,2} x {1,2}, rotate each spectrum by an independent orthogonal basis,
and compare the simulated ESD against the numerically inverted theory.

Run:  python demos/04_noncommuting_scalings.py
"""

import numpy as np

from commspec import (
    BivariateSpectralMeasure,
    EpsSchedule,
    ImagSpectrum,
    InnovationSpec,
    ModelSpec,
    ScalingSpec,
    SolverConfig,
    curve_to_cdf,
    density_grid,
    ks_distance,
    run_experiment,
)

H = BivariateSpectralMeasure(
    [(1, 1, 0.25), (1, 2, 0.25), (2, 1, 0.25), (2, 2, 0.25)])
c = 1.0
p = 600

print("inverting the transform of the 4-atom model on a grid...")
model = ModelSpec.general(c, H)
grid = np.linspace(-8.0, 8.0, 401)
curve = density_grid(model, grid, EpsSchedule(), SolverConfig())
mass = np.trapezoid(curve.fs, curve.xs) + curve.point_mass_zero
print(f"  curve mass + atom = {mass:.4f}, atom at 0 = {curve.point_mass_zero:.4f}")

print("simulating with Haar non-commuting scalings...")
sample = run_experiment(p=p, n=round(p / c),
                        innovation=InnovationSpec(kind="mixed"),
                        scaling=ScalingSpec(kind="haar_noncommuting", H=H),
                        seed=42)
vals = sample.spectrum.vals.copy()
vals[np.abs(vals) < 1e-10 * (1 + np.abs(vals).max())] = 0.0
ks = ks_distance(ImagSpectrum(vals), curve_to_cdf(curve))
print(f"  p={p}: KS(ESD, inverted theory) = {ks:.4f}")
print()
print("commutativity was never used by the simulator here; the agreement is")
print("the empirical evidence that the commuting-case formula extends.")
