"""The exact limit law for identity scalings, across aspect ratios.

With both scaling matrices equal to the identity, the limiting spectral
distribution of the commutator n^-1(X1 X2^T - X2 X1^T) depends on nothing
but c = lim p/n.  This walks through its closed form: cubic coefficients,
support endpoints, the density, and the onset of an atom at zero once
c exceeds 2.

Run:  python demos/01_identity_limit_law.py
"""

import math

import numpy as np

from commspec import density_identity, point_mass_identity, support_params

print("support and atom at 0 as c grows")
print(f"{'c':>5} {'L_c':>8} {'U_c':>8} {'mass at 0':>10} {'f(0)':>8}")
for c in (0.5, 1.0, 2.0, 3.0, 4.0, 5.0):
    sp = support_params(c)
    pm = point_mass_identity(c)
    try:
        f0 = f"{density_identity(c, 0.0):.4f}"
    except ValueError:
        f0 = "none"
    print(f"{c:5.1f} {sp.L_c:8.4f} {sp.U_c:8.4f} {pm:10.4f} {f0:>8}")

print()
print("the density is symmetric and integrates, with the atom, to 1:")
for c in (1.0, 4.0):
    sp = support_params(c)
    xs = np.linspace(max(sp.L_c, 1e-6), sp.U_c, 200001)
    fs = np.array([density_identity(c, x) for x in xs])
    mass = 2 * np.trapezoid(fs, xs) + point_mass_identity(c)
    second = 2 * np.trapezoid(fs * xs ** 2, xs)
    print(f"  c={c:g}: total mass = {mass:.5f}, second moment = {second:.4f} "
          f"(theory 2c = {2 * c:g})")

print()
print(f"f_1(0) = 1/pi = {1 / math.pi:.6f}; for c >= 2 the density at 0 is "
      "replaced by a gap (c > 2) or an integrable blow-up (c = 2).")
