"""Where do the closed-form bounds already force square-minimality?

Along the fixed-area family (a, 1/a), sufficiently eccentric rectangles or
sufficiently heavy masses push the analytic lower bound above the square's
upper bound, settling the comparison without any eigensolve.  The margins
below measure the distance to each region's threshold; positive means the
condition holds.
"""

import numpy as np

from diracbox import corollary_conditions

print("fixed-area family, massless: eccentricity condition")
print(f"{'a':>8} {'|a^2-4|-sqrt(15)':>18} {'holds':>7}")
for a in (0.5, 1.0, 1.5, 2.5, 3.0, 4.0):
    cond = corollary_conditions(a, 0.0, "area")["cond_a"]
    print(f"{a:8.2f} {cond.margin:18.4f} {str(cond.holds):>7}")

print()
print("fixed-area family at a=1.2: heavy-mass condition")
print(f"{'m':>8} {'margin':>12} {'holds':>7} {'sharper variant':>16}")
for m in (10.0, 100.0, 417.0, 500.0, 1000.0):
    conds = corollary_conditions(1.2, m, "area")
    print(f"{m:8.1f} {conds['cond_b'].margin:12.3f} "
          f"{str(conds['cond_b'].holds):>7} "
          f"{str(conds['cond_initial_area'].holds):>16}")

print()
print("fixed-perimeter family (b = 2-a), massless eccentricity condition")
print(f"{'a':>8} {'margin':>12} {'holds':>7}")
for a in np.linspace(0.3, 1.7, 8):
    cond = corollary_conditions(float(a), 0.0, "perimeter")["cond_a_prime"]
    print(f"{a:8.3f} {cond.margin:12.4f} {str(cond.holds):>7}")

print()
print("note how the heavy-mass thresholds blow up as a -> 1: near the")
print("square the bounds alone cannot decide, which is what the fixed-point")
print("experiment (demo 06) probes instead")
