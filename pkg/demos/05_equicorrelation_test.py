"""Testing entrywise correlation in paired data via the commutator.

If the paired innovations share correlation rho, the commutator spectrum
support contracts by exactly sqrt(1 - rho^2), so the root mean squared
eigenvalue drops below its null value.  The test Monte-Carlos the null of
that statistic, with the scaling spectrum either known or estimated from
the sample covariance.

The CLI equivalent:
    commspec test --x1 x1.csv --x2 x2.csv --B 500 --sigma delta1.json
    commspec test --x1 x1.csv --x2 x2.csv --B 500 --estimate-psd

Run:  python demos/05_equicorrelation_test.py
"""

import math

from commspec import (
    PairedSample,
    TestConfig,
    UnivariateSpectralMeasure,
    run_test,
    theoretical_shrinkage,
)
from commspec.simulate import stream

p, n, B = 100, 500, 300


def paired(rho, seed):
    rng = stream(seed, 999)
    Z = rng.standard_normal((p, n))
    V = rng.standard_normal((p, n))
    return PairedSample(Z, rho * Z + math.sqrt(1 - rho * rho) * V)


known = TestConfig(B=B, seed=11, sigma_mode="known",
                   sigma=UnivariateSpectralMeasure.point(1.0))
estimated = TestConfig(B=B, seed=13, sigma_mode="estimate")

print(f"p={p}, n={n}, B={B}; null statistic concentrates near "
      f"sqrt(2c) = {math.sqrt(2 * p / n):.4f}")
print()
print(f"{'rho':>5} {'T_obs':>8} {'shrinkage':>10} {'p (known)':>10} {'p (est.)':>9}")
for rho in (0.0, 0.1, 0.25, 0.5, 0.75):
    sample = paired(rho, seed=900 + int(100 * rho))
    rk = run_test(sample, known)
    re_ = run_test(sample, estimated)
    print(f"{rho:5.2f} {rk.t_obs:8.4f} {theoretical_shrinkage(rho):10.4f} "
          f"{rk.p_value:10.3f} {re_.p_value:9.3f}")
print()
print("small p-values reject independence; power arrives around rho = 0.25,")
print("matching the shrinkage factor pulling T_obs several null standard")
print("deviations below its rho = 0 distribution.")
