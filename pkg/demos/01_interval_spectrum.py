"""Relativistic particle on an interval: the transcendental ground level.

The lowest positive eigenvalue of the 1D Dirac operator with infinite-mass
endpoints is sqrt(m^2 + (nu_1(m*a)/a)^2), where nu_1 solves
mu*sin(nu) + nu*cos(nu) = 0 on [pi/2, pi).  This script walks the root
across ten decades of the mass parameter and checks the closed-form lower
bound along the way.
"""

import math

import numpy as np

from diracbox import lambda1_1d, nu1, nu1_lower

print("root of the boundary equation vs. mass parameter")
print(f"{'mu':>12} {'nu_1(mu)':>18} {'lower bound':>14} {'residual':>10}")
for mu in [0.0, *np.geomspace(1e-3, 1e6, 10)]:
    root = nu1(mu)
    print(f"{mu:12.4g} {root.nu:18.12f} {nu1_lower(mu):14.6f} "
          f"{root.residual:10.2e}")

print()
print("nu_1 runs from pi/2 =", f"{math.pi / 2:.12f}")
print("            to pi   =", f"{math.pi:.12f}", "as the mass grows")

print()
print("interval ground level lambda_1(a) for a few (a, m):")
for a in (0.5, 1.0, 2.0):
    for m in (0.0, 1.0, 10.0):
        lam = lambda1_1d(a, m)
        gap = lam - m
        print(f"  a={a:4.1f} m={m:5.1f}: lambda_1 = {lam:12.8f} "
              f"(exceeds the mass by {gap:.6f})")

print()
print("massless check: lambda_1(1, 0) = pi/2 =", lambda1_1d(1.0, 0.0))
