"""Drop energies at fixed charge and fixed voltage, and their competitors.

The fixed-charge energy of a set is perimeter + lambda * riesz_energy; the
fixed-voltage energy is perimeter - lambda / riesz_energy.  For balls both
are closed forms, which makes the critical thresholds, the optimal radius,
the many-ball "mist" competitors and the nonexistence witnesses of the
fixed-area problem all exactly computable.  Numerical sets enter only
through energy_report, which combines the geometry and capacity modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import capacity, geometry

__all__ = [
    "InfeasibleConfigurationError",
    "EnergyReport",
    "CriticalThresholds",
    "BallConfiguration",
    "energy_report",
    "ball_energy_Q",
    "ball_energy_U",
    "ball_energy_U_infimum",
    "optimal_ball_radius",
    "critical_thresholds",
    "multiball_energy_upper",
    "mist_configuration",
    "nonexistence_witness",
    "minimal_witness_count",
    "eu_divergence_sequence",
    "dudko_energy_bound",
    "nondimensionalize_Q",
    "nondimensionalize_U",
]


class InfeasibleConfigurationError(ValueError):
    """A competitor construction has no admissible parameter choice."""


@dataclass(frozen=True)
class EnergyReport:
    """Perimeter, capacitary energy and both drop energies of one set."""

    perimeter: float
    riesz: float
    lam: float
    energy_Q: float
    energy_U: float


@dataclass(frozen=True)
class CriticalThresholds:
    """The four critical charge/voltage parameters at area m."""

    m: float
    lambda0_Q: float      # 4m/pi: last lambda with a fixed-area minimizer
    lambda_c1_Q: float    # 4m*sqrt(2)/pi: splitting instability
    lambda_c2_Q: float    # 12m/pi: elongation instability
    lambda0_U: float      # pi^2, independent of m


@dataclass(frozen=True)
class BallConfiguration:
    """Disjoint balls with charge fractions summing to one."""

    centers: np.ndarray           # (n, 2)
    radii: np.ndarray             # (n,)
    charge_fractions: np.ndarray  # (n,)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.asarray(self.radii, dtype=float)
        t = np.asarray(self.charge_fractions, dtype=float)
        if not (len(c) == len(r) == len(t)):
            raise ValueError("centers, radii and charge fractions must align")
        if np.any(r <= 0.0):
            raise ValueError("radii must be positive")
        if np.any(t < 0.0) or abs(t.sum() - 1.0) > 1e-12:
            raise ValueError("charge fractions must be nonnegative and sum to 1")
        if len(c) > 1:
            d = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=2)
            sums = r[:, None] + r[None, :]
            np.fill_diagonal(d, np.inf)
            if np.any(d <= sums):
                raise ValueError("balls must be pairwise disjoint")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "charge_fractions", t)

    def total_area(self) -> float:
        return float(math.pi * np.sum(self.radii**2))


def ball_energy_Q(radius: float, lam: float) -> float:
    """Fixed-charge energy of a single ball: 2 pi R + lambda pi / (2R)."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    return 2.0 * math.pi * radius + lam * math.pi / (2.0 * radius)


def ball_energy_U(radius: float, lam: float) -> float:
    """Fixed-voltage energy of a single ball: 2 pi R - 2 lambda R / pi.

    One-homogeneous in R; identically zero at lambda = pi^2.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    return 2.0 * math.pi * radius - 2.0 * lam * radius / math.pi


def ball_energy_U_infimum(lam: float) -> tuple[float, bool]:
    """(infimum over R > 0 of ball_energy_U, attained?) for a given lambda.

    Below pi^2 the infimum 0 is approached by shrinking balls but never
    attained; at pi^2 every radius attains 0; above pi^2 the energy is
    unbounded below.
    """
    crit = math.pi**2
    if lam < crit:
        return 0.0, False
    if lam == crit:
        return 0.0, True
    return -math.inf, False


def optimal_ball_radius(lam: float) -> float:
    """Radius sqrt(lambda)/2 minimizing ball_energy_Q over all radii."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    return 0.5 * math.sqrt(lam)


def critical_thresholds(m: float) -> CriticalThresholds:
    """Critical parameters for drops of area m."""
    if m <= 0.0:
        raise ValueError("area must be positive")
    return CriticalThresholds(
        m=m,
        lambda0_Q=4.0 * m / math.pi,
        lambda_c1_Q=4.0 * m * math.sqrt(2.0) / math.pi,
        lambda_c2_Q=12.0 * m / math.pi,
        lambda0_U=math.pi**2,
    )


def energy_report(
    s: geometry.PlanarSet,
    lam: float,
    resolutions: Sequence[float] | None = None,
    extrapolate: bool = True,
    grading: str = "boundary-graded",
) -> EnergyReport:
    """Both drop energies of a planar set, with numerically computed riesz term.

    Resolutions default to a 3-level geometric ladder scaled to the set
    diameter.
    """
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    if resolutions is None:
        d = geometry.diameter(s)
        resolutions = [d * r for r in (0.08, 0.04, 0.02)]
    perim = geometry.perimeter(s)
    result = capacity.riesz_energy(s, resolutions, extrapolate=extrapolate, grading=grading)
    riesz = result.extrapolated
    return EnergyReport(
        perimeter=perim,
        riesz=riesz,
        lam=lam,
        energy_Q=perim + lam * riesz,
        energy_U=perim - lam / riesz,
    )


def multiball_energy_upper(cfg: BallConfiguration, lam: float) -> float:
    """Upper bound for the fixed-charge energy of a union of balls.

    Sum of the single-ball energies at the given charge split plus the
    pairwise center-distance interaction:
    sum_i [2 pi r_i + lambda theta_i^2 pi / (2 r_i)]
      + lambda sum_{i<j} 2 theta_i theta_j / |c_i - c_j|.
    """
    r = cfg.radii
    t = cfg.charge_fractions
    self_part = float(np.sum(2.0 * math.pi * r + lam * t * t * math.pi / (2.0 * r)))
    if len(r) == 1:
        return self_part
    d = np.linalg.norm(cfg.centers[:, None, :] - cfg.centers[None, :, :], axis=2)
    iu = np.triu_indices(len(r), k=1)
    interaction = float(np.sum(2.0 * t[iu[0]] * t[iu[1]] / d[iu]))
    return self_part + lam * interaction


def _line_centers(n: int, separation: float) -> np.ndarray:
    return np.column_stack([separation * np.arange(n), np.zeros(n)])


def mist_configuration(lam: float, n: int, separation: float) -> BallConfiguration:
    """N balls of radius R_lambda/N with charge 1/N each, far apart.

    Their total energy is 2 pi sqrt(lambda) + O(lambda / separation) while the
    total area N pi (R_lambda/N)^2 vanishes as N grows: the energy infimum is
    approached by a mist of droplets, never attained.
    """
    if n < 1:
        raise ValueError("need at least one ball")
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    r_opt = optimal_ball_radius(lam)
    if n > 1 and separation <= 2.0 * r_opt / n:
        raise ValueError("separation must exceed the ball diameter")
    return BallConfiguration(
        centers=_line_centers(n, separation if n > 1 else 1.0),
        radii=np.full(n, r_opt / n),
        charge_fractions=np.full(n, 1.0 / n),
    )


def minimal_witness_count(m: float, lam: float) -> int:
    """Smallest N for which the witness charge-balance equation has a root."""
    lam0 = 4.0 * m / math.pi
    if lam <= lam0:
        return 1
    return max(1, math.ceil(lam / lam0 - 1.0))


def nonexistence_witness(
    m: float, lam: float, n: int, separation: float
) -> tuple[BallConfiguration, float]:
    """Big-ball-plus-mist competitor of exact total area m.

    Solves lambda (1-theta)^2 = 4m/pi - theta^2 lambda / N for the charge
    fraction theta carried by the mist; the big ball of radius
    sqrt(m/pi - r^2/N) with r = theta sqrt(lambda)/2 keeps charge 1-theta and
    each of the N small balls of radius r/N carries theta/N.  All balls are
    individually charge-optimal, so the total energy is
    2 pi sqrt(lambda) + O(1/separation).

    Returns (configuration, theta).  Raises InfeasibleConfigurationError when
    N is too small for a root theta in [0, 1).
    """
    if m <= 0.0:
        raise ValueError("area must be positive")
    lam0 = 4.0 * m / math.pi
    if lam < lam0:
        raise ValueError(f"witness needs lambda >= lambda0 = {lam0}")
    if n < 1:
        raise ValueError("need at least one small ball")
    # theta^2 lam (1 + 1/N) - 2 lam theta + (lam - lam0) = 0
    a = lam * (1.0 + 1.0 / n)
    disc = lam * (lam0 * (1.0 + 1.0 / n) - lam / n)
    if disc < 0.0:
        raise InfeasibleConfigurationError(
            f"no admissible charge split for N={n}; need N >= {minimal_witness_count(m, lam)}"
        )
    theta = (lam - math.sqrt(disc)) / a
    if theta < 0.0 or theta >= 1.0:
        raise InfeasibleConfigurationError(
            f"charge split theta={theta} outside [0, 1); need N >= {minimal_witness_count(m, lam)}"
        )
    if theta == 0.0:
        cfg = BallConfiguration(
            centers=np.zeros((1, 2)),
            radii=np.array([math.sqrt(m / math.pi)]),
            charge_fractions=np.array([1.0]),
        )
        return cfg, 0.0
    r = 0.5 * theta * math.sqrt(lam)
    big_radius = math.sqrt(m / math.pi - r * r / n)
    small_radius = r / n
    centers = np.vstack([[0.0, 0.0], _line_centers(n, separation)[:, :] + [separation, 0.0]])
    radii = np.concatenate([[big_radius], np.full(n, small_radius)])
    fractions = np.concatenate([[1.0 - theta], np.full(n, theta / n)])
    return BallConfiguration(centers=centers, radii=radii, charge_fractions=fractions), theta


def eu_divergence_sequence(m: float, lam: float, n: int) -> float:
    """Fixed-voltage energy of n equal balls of total area m, far apart.

    n * ball_energy_U(sqrt(m/(pi n)), lambda) = 2 sqrt(pi m) (1 - lambda/pi^2) sqrt(n):
    unbounded below in n whenever lambda exceeds pi^2.
    """
    if m <= 0.0 or n < 1:
        raise ValueError("need positive area and n >= 1")
    return n * ball_energy_U(math.sqrt(m / (math.pi * n)), lam)


def dudko_energy_bound(s: geometry.PlanarSet, lam: float) -> float:
    """Closed-form upper bound for the fixed-charge energy of a set.

    perimeter + lambda * (pi^5 / (4 area perimeter))^(1/3), exact for disks;
    the capacitary factor is accurate to about 5e-5 in relative terms for
    mildly elongated ellipses.
    """
    perim = geometry.perimeter(s)
    m = geometry.area(s)
    return perim + lam * (math.pi**5 / (4.0 * m * perim)) ** (1.0 / 3.0)


def dudko_capacitary_factor(perimeter: float, area: float) -> float:
    """The (pi^5 / (4 area perimeter))^(1/3) factor of the energy bound."""
    if perimeter <= 0.0 or area <= 0.0:
        raise ValueError("perimeter and area must be positive")
    return (math.pi**5 / (4.0 * area * perimeter)) ** (1.0 / 3.0)


def elongation_favorable(m: float, lam: float) -> bool:
    """Whether lengthening the boundary lowers the energy bound at fixed area.

    Minimizing perimeter + lambda*(pi^5/(4 m P))^(1/3) over P >= 2 pi R with
    pi R^2 = m: the derivative at the disk perimeter is 1 - lambda/(12 R^2),
    negative exactly when lambda > 12 m / pi (the elongation threshold).
    """
    return lam > 12.0 * m / math.pi


def nondimensionalize_Q(
    charge: float, epsilon: float, epsilon0: float, sigma: float, ell: float, length_scale: float
) -> float:
    """lambda = Q^2 / (8 pi eps eps0 sigma ell L^2)."""
    for name, val in (
        ("epsilon", epsilon),
        ("epsilon0", epsilon0),
        ("sigma", sigma),
        ("ell", ell),
        ("length_scale", length_scale),
    ):
        if val <= 0.0:
            raise ValueError(f"{name} must be positive")
    return charge**2 / (8.0 * math.pi * epsilon * epsilon0 * sigma * ell * length_scale**2)


def nondimensionalize_U(
    voltage: float, epsilon: float, epsilon0: float, sigma: float, ell: float
) -> float:
    """lambda = 2 pi eps eps0 U^2 / (sigma ell); no dependence on drop size."""
    for name, val in (("epsilon", epsilon), ("epsilon0", epsilon0), ("sigma", sigma), ("ell", ell)):
        if val <= 0.0:
            raise ValueError(f"{name} must be positive")
    return 2.0 * math.pi * epsilon * epsilon0 * voltage**2 / (sigma * ell)


def split_crossover(m: float, lo: float | None = None, hi: float | None = None, tol: float = 1e-10) -> float:
    """Locate by bisection the lambda where splitting a ball of area m into two
    far-apart equal balls stops costing energy; equals 4 m sqrt(2) / pi."""
    radius = math.sqrt(m / math.pi)

    def gap(lam: float) -> float:
        one = ball_energy_Q(radius, lam)
        r2 = radius / math.sqrt(2.0)
        two = 2.0 * (2.0 * math.pi * r2 + lam * 0.25 * math.pi / (2.0 * r2))
        return two - one

    a = lo if lo is not None else 4.0 * m / math.pi
    b = hi if hi is not None else 32.0 * m / math.pi
    ga, gb = gap(a), gap(b)
    if ga <= 0.0 or gb >= 0.0:
        raise ValueError("bisection bracket does not straddle the crossover")
    while b - a > tol:
        mid = 0.5 * (a + b)
        if gap(mid) > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)
