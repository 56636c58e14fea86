"""Closed-form two-sided bounds on the rectangle eigenvalue.

For the rectangle with sides ``(a, b)`` and mass ``m``, the shifted square
of the lowest positive eigenvalue is bracketed by

    (pi/a)^2 max{1/(1+(ma)^-1), 1/2}^2 + (pi/b)^2 max{...b...}^2
        <=  lambda_1(a,b)^2 - m^2  <=  (pi/a)^2 + (pi/b)^2,

where the upper bound is the Dirichlet Laplacian eigenvalue of the same
rectangle.  A sharper lower bound replaces each max-factor term with
``(nu_1(m*side)/side)^2`` using the 1D root; it always dominates the crude
form.  The eccentricity/mass conditions evaluated here single out parameter
regions where these bounds alone already force the rectangle's eigenvalue
above the square's, both along the fixed-area family ``b = 1/a`` and the
fixed-perimeter family ``b = 2 - a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dirac1d import nu1
from .errors import ConsistencyError

__all__ = [
    "Condition",
    "BoundsReport",
    "thm_lower",
    "sharp_lower",
    "thm_upper",
    "dirichlet_lambda",
    "corollary_conditions",
    "bounds_report",
    "bracket",
]

ECC_AREA_THRESHOLD = math.sqrt(15.0)
ECC_PERIMETER_THRESHOLD = (9.0 - math.sqrt(33.0)) / 8.0
MASS_THRESHOLD = 56.0
INITIAL_THRESHOLD = 2.0


def _check(a, b, m):
    a, b, m = float(a), float(b), float(m)
    if not (math.isfinite(a) and a > 0.0 and math.isfinite(b) and b > 0.0):
        raise ValueError(f"side lengths must be finite and > 0, got {a!r}, {b!r}")
    if not math.isfinite(m) or m < 0.0:
        raise ValueError(f"mass must be finite and >= 0, got {m!r}")
    return a, b, m


def _mass_factor(m: float, side: float) -> float:
    # 1/(1 + 1/(m*side)), read as 0 at m = 0
    ms = m * side
    return max(ms / (1.0 + ms), 0.5)


def thm_lower(a: float, b: float, m: float) -> float:
    """Crude closed-form lower bound for lambda_1(a,b)^2 - m^2."""
    a, b, m = _check(a, b, m)
    return ((math.pi / a) ** 2 * _mass_factor(m, a) ** 2
            + (math.pi / b) ** 2 * _mass_factor(m, b) ** 2)


def sharp_lower(a: float, b: float, m: float) -> float:
    """Sharper lower bound (nu_1(ma)/a)^2 + (nu_1(mb)/b)^2."""
    a, b, m = _check(a, b, m)
    return (nu1(m * a).nu / a) ** 2 + (nu1(m * b).nu / b) ** 2


def thm_upper(a: float, b: float, m: float = 0.0) -> float:
    """Upper bound (pi/a)^2 + (pi/b)^2; the mass does not enter."""
    a, b, _ = _check(a, b, m)
    return (math.pi / a) ** 2 + (math.pi / b) ** 2


def dirichlet_lambda(a: float, b: float) -> float:
    """Lowest Dirichlet Laplacian eigenvalue of the (a, b) rectangle."""
    return thm_upper(a, b)


@dataclass(frozen=True)
class Condition:
    holds: bool
    margin: float    # left-hand side minus threshold


def corollary_conditions(a: float, m: float, constraint: str):
    """Square-beats-this-rectangle sufficient conditions with margins.

    ``constraint`` is ``"area"`` (family b = 1/a) or ``"perimeter"``
    (family b = 2 - a, requiring a in (0, 2)).  Each condition reports its
    truth value together with the signed distance to its threshold.
    """
    a = float(a)
    m = float(m)
    if not math.isfinite(a) or a <= 0.0:
        raise ValueError(f"side length must be finite and > 0, got {a!r}")
    if not math.isfinite(m) or m < 0.0:
        raise ValueError(f"mass must be finite and >= 0, got {m!r}")

    if constraint == "area":
        ecc = abs(a * a - 4.0) - ECC_AREA_THRESHOLD
        gap = 1.0 / a**2 + a**2 - 2.0
        heavy = m * gap - MASS_THRESHOLD
        sharp = m * gap / (1.0 / a**3 + a**3) - INITIAL_THRESHOLD
        return {
            "cond_a": Condition(ecc > 0.0, ecc),
            "cond_b": Condition(heavy >= 0.0, heavy),
            "cond_initial_area": Condition(sharp > 0.0, sharp),
        }
    if constraint == "perimeter":
        if not 0.0 < a < 2.0:
            raise ValueError(
                f"perimeter family requires a in (0, 2), got {a!r}")
        ecc = (a - 1.0) ** 2 - ECC_PERIMETER_THRESHOLD
        gap = 1.0 / a**2 + 1.0 / (2.0 - a) ** 2 - 2.0
        heavy = m * gap - MASS_THRESHOLD
        sharp = m * gap / (1.0 / a**3 + 1.0 / (2.0 - a) ** 3) - INITIAL_THRESHOLD
        return {
            "cond_a_prime": Condition(ecc > 0.0, ecc),
            "cond_b_prime": Condition(heavy >= 0.0, heavy),
            "cond_initial_perimeter": Condition(sharp > 0.0, sharp),
        }
    raise ValueError(f"constraint must be 'area' or 'perimeter', got {constraint!r}")


@dataclass(frozen=True)
class BoundsReport:
    """Closed-form bound values and condition set for one parameter point.

    All three bound fields refer to lambda_1^2 - m^2; ``dirichlet`` repeats
    the upper bound, being the Dirichlet eigenvalue of the rectangle.
    Perimeter-family conditions are present only for a in (0, 2).
    """

    a: float
    b: float
    m: float
    thm_lower: float
    sharp_lower: float
    thm_upper: float
    dirichlet: float
    conditions: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "a": self.a, "b": self.b, "m": self.m,
            "thm_lower": self.thm_lower,
            "sharp_lower": self.sharp_lower,
            "thm_upper": self.thm_upper,
            "dirichlet": self.dirichlet,
            "conditions": {
                name: {"holds": c.holds, "margin": c.margin}
                for name, c in self.conditions.items()
            },
        }
        return out


def bounds_report(a: float, b: float, m: float) -> BoundsReport:
    """Evaluate every closed-form bound and condition at one point."""
    a, b, m = _check(a, b, m)
    lo = thm_lower(a, b, m)
    sh = sharp_lower(a, b, m)
    up = thm_upper(a, b, m)
    if not (lo <= sh * (1 + 1e-12) and sh <= up * (1 + 1e-12)):
        raise ConsistencyError(
            f"bound ordering violated at (a={a}, b={b}, m={m}): "
            f"{lo!r} <= {sh!r} <= {up!r} fails")
    conditions = dict(corollary_conditions(a, m, "area"))
    if 0.0 < a < 2.0:
        conditions.update(corollary_conditions(a, m, "perimeter"))
    return BoundsReport(a=a, b=b, m=m, thm_lower=lo, sharp_lower=sh,
                        thm_upper=up, dirichlet=up, conditions=conditions)


def bracket(a: float, b: float, m: float, n: int, tol: float = 1e-10,
            *, fm=None, seed: int = 0):
    """Two-sided interval for lambda_1(a,b)^2.

    Lower end from the closed-form bounds, upper end from the conforming
    discrete eigenvalue capped by the Dirichlet value.  An empty interval
    signals a bug and raises.
    """
    from .eigsolve import lambda1_2d

    a, b, m = _check(a, b, m)
    result = lambda1_2d(a, b, m, n, tol, fm=fm, seed=seed)
    lo = m**2 + max(thm_lower(a, b, m), sharp_lower(a, b, m))
    hi = min(result.mu, m**2 + thm_upper(a, b, m))
    if lo > hi:
        raise ConsistencyError(
            f"empty eigenvalue bracket at (a={a}, b={b}, m={m}, n={n}): "
            f"[{lo!r}, {hi!r}]")
    return lo, hi
