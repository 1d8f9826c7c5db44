"""
Explicit Maps - The Persian Carpet Cubic and Its Relatives

The cubic family

    f_λ(z) = (1−λ)[(1−4λ+6λ²−λ³)z − 2λ³] / ((z−1)²[(1−λ−λ²)z − 2λ²(1−λ)])

has the super-attracting 4-cycle λ → 1 → ∞ → 0 → λ, with local degrees
2 at λ, 1 and ∞ and degree 1 at 0; its fourth critical point is the free
critical point λ'. At λ = 0 it degenerates to f₀(z) = 1/(z−1)², whose
3-cycle 0 → 1 → ∞ carries local degrees (1, 2, 2).

Also here: the McMullen maps z^{d∞} + c + λ/z^{d₀}, the postcritically
finite quadratic parameters, orbit tracking and the order-of-magnitude
ladder that locates each piece of the cycle's neighbourhood under f_λ.
"""

import csv
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .constants import (
    LADDER_K,
    LADDER_MAX_LAMBDA,
    LADDER_SAMPLES,
    LAMBDA_DEGENERACY_TOL,
    PCF_CLUSTER_TOL,
    PCF_MAX_PERIOD,
    PCF_PERIOD_TOL,
    VALID_LAMBDA_RADIUS,
)
from .errors import DegenerateEvaluation, DomainError, NumericalFailure
from .numerics import (
    INFINITY,
    Polynomial,
    RationalMap,
    SpherePoint,
    aberth,
    as_sphere_point,
    chordal_distance,
    derivative,
    evaluate,
    initial_circle,
    polynomial_roots,
)

logger = logging.getLogger(__name__)


# =============================================================================
# THE CUBIC FAMILY
# =============================================================================

def _numerator_factor(lam):
    return 1 - 4 * lam + 6 * lam ** 2 - lam ** 3


def _denominator_factor(lam):
    return 1 - lam - lam ** 2


def persian_carpet_coefficients(lam) -> Tuple[np.ndarray, np.ndarray]:
    """
    Numerator and denominator coefficients of f_λ, lowest degree first.

    Vectorized: ``lam`` may be a scalar or an array, and the results have
    shapes ``lam.shape + (2,)`` and ``lam.shape + (4,)``. No degeneracy
    checks are made here.
    """
    lam = np.asarray(lam, dtype=complex)
    n1 = (1 - lam) * _numerator_factor(lam)
    n0 = -2 * lam ** 3 * (1 - lam)
    p = _denominator_factor(lam)
    q = -2 * lam ** 2 * (1 - lam)
    # (z−1)²(pz + q) expanded
    num = np.stack([n0, n1], axis=-1)
    den = np.stack([q, p - 2 * q, q - 2 * p, p], axis=-1)
    return num, den


def lambda_prime(lam: complex) -> complex:
    """The free critical point λ' = −λ(1−6λ+11λ²−10λ³+5λ⁴)/((1−λ−λ²)(1−4λ+6λ²−λ³))."""
    top = 1 - 6 * lam + 11 * lam ** 2 - 10 * lam ** 3 + 5 * lam ** 4
    return -lam * top / (_denominator_factor(lam) * _numerator_factor(lam))


def _check_lambda(lam: complex, numerator: bool = True) -> None:
    factors = {
        "1 - λ": 1 - lam,
        "1 - λ - λ²": _denominator_factor(lam),
    }
    if numerator:
        factors["1 - 4λ + 6λ² - λ³"] = _numerator_factor(lam)
    for name, value in factors.items():
        if abs(value) <= LAMBDA_DEGENERACY_TOL:
            raise DomainError(f"degenerate parameter λ = {lam!r}: {name} vanishes")


@dataclass(frozen=True)
class PersianCarpetMap:
    """f_λ with its marked cycle z₀..z₃ = (λ, 1, ∞, 0) and free critical point λ'."""
    lam: complex
    map: RationalMap
    cycle: Tuple[SpherePoint, ...]
    free_critical: complex
    verified: bool = True

    @property
    def degree(self) -> int:
        return self.map.degree

    def cycle_residuals(self) -> Dict[str, float]:
        """
        How far the cycle relations are from exact.

        f(0) = λ is measured relative to 1+|λ| (it is ≈ 0 on f₀), f(λ) = 1
        absolutely, and the two relations through ∞ chordally.
        """
        f = self.map
        lam = self.lam
        residuals = {
            "f(0)=lambda": abs(evaluate(f, 0j).to_complex() - lam) / (1 + abs(lam)),
            "f(lambda)=1": abs(evaluate(f, lam).to_complex() - 1),
            "f(1)=inf": chordal_distance(evaluate(f, 1.0), INFINITY),
            "f(inf)=0": chordal_distance(evaluate(f, INFINITY), 0j),
        }
        if lam != 0:
            residuals["f'(lambda)=0"] = abs(evaluate(derivative(f), lam).to_complex())
        return residuals


def hat_map() -> PersianCarpetMap:
    """f₀(z) = 1/(z−1)² with its 3-cycle 0 → 1 → ∞."""
    f0 = RationalMap(Polynomial((1,)), Polynomial((1, -2, 1)))
    return PersianCarpetMap(0j, f0, (SpherePoint(0j), SpherePoint(1 + 0j), INFINITY), 0j, True)


HAT_LOCAL_DEGREES = (1, 2, 2)


def build_f_lambda(lam: complex) -> PersianCarpetMap:
    """
    Assemble f_λ from its closed form.

    λ = 0 returns f₀ (the closed form has the common factor z there).
    Parameters with |λ| ≥ VALID_LAMBDA_RADIUS are built but flagged
    ``verified=False``.

    Raises:
        DomainError: one of 1−λ, 1−λ−λ², 1−4λ+6λ²−λ³ vanishes.
    """
    lam = complex(lam)
    if lam == 0:
        return hat_map()
    _check_lambda(lam)
    num, den = persian_carpet_coefficients(lam)
    f = RationalMap(Polynomial.from_array(num), Polynomial.from_array(den))
    cycle = (SpherePoint(lam), SpherePoint(1 + 0j), INFINITY, SpherePoint(0j))
    verified = abs(lam) < VALID_LAMBDA_RADIUS
    if not verified:
        logger.info("λ = %r lies outside |λ| < %g; map built unverified", lam, VALID_LAMBDA_RADIUS)
    return PersianCarpetMap(lam, f, cycle, lambda_prime(lam), verified)


def closed_form_coefficients(lam: complex) -> Tuple[complex, complex]:
    """a₁ = (1−4λ+6λ²−λ³)/(−2λ²) and b'₁ = (1−λ−λ²)/(−2λ²(1−λ))."""
    return (_numerator_factor(lam) / (-2 * lam ** 2),
            _denominator_factor(lam) / (-2 * lam ** 2 * (1 - lam)))


def derive_coefficients(lam: complex) -> Tuple[complex, complex]:
    """
    Solve for (a₁, b'₁) in f = (a₁z + λ)/((z−1)²(b'₁z + 1)).

    The conditions f(λ) = 1 and f'(λ) = 0 give the system

        λ a₁ − λ(1−λ)² b'₁ = 1 − 3λ + λ²
          a₁ − (1−λ)(1−3λ) b'₁ = −2 + 2λ

    Subtracting λ times the second row from the first eliminates a₁; the
    b'₁ coefficient λ(1−λ)[(1−3λ) − (1−λ)] is used in its reduced form
    −2λ²(1−λ) so no cancellation enters for small λ. a₁ then follows by
    back substitution. At a root of 1−4λ+6λ²−λ³ the system is still
    regular and returns a₁ = 0.

    Raises:
        DomainError: λ is 0, 1 or a root of 1−λ−λ².
        NumericalFailure: the eliminated pivot is zero.
    """
    lam = complex(lam)
    if lam == 0:
        raise DomainError("λ = 0 has no derivation: the cycle collapses onto f₀")
    _check_lambda(lam, numerator=False)
    rhs1 = 1 - 3 * lam + lam ** 2
    rhs2 = -2 + 2 * lam
    row2_b = -(1 - lam) * (1 - 3 * lam)
    pivot = -2 * lam ** 2 * (1 - lam)
    if pivot == 0:
        raise NumericalFailure(f"singular coefficient system at λ = {lam!r}")
    b1p = (rhs1 - lam * rhs2) / pivot
    a1 = rhs2 - row2_b * b1p
    return a1, b1p


def map_from_coefficients(a1: complex, b1p: complex, lam: complex) -> RationalMap:
    """(a₁z + λ)/((z−1)²(b'₁z + 1))."""
    num = Polynomial((lam, a1))
    den = Polynomial((1, -2, 1)) * Polynomial((1, b1p))
    return RationalMap(num, den)


# =============================================================================
# McMULLEN MAPS
# =============================================================================

@dataclass(frozen=True)
class McMullenMap:
    """g(z) = z^{d∞} + c + λ/z^{d₀}."""
    d_inf: int
    d_0: int
    c: complex
    lam: complex
    map: RationalMap

    @property
    def h0(self) -> bool:
        """1/d∞ + 1/d₀ < 1."""
        return Fraction(1, self.d_inf) + Fraction(1, self.d_0) < 1

    def to_dict(self) -> Dict:
        return {
            "d_inf": self.d_inf,
            "d_0": self.d_0,
            "c": [self.c.real, self.c.imag],
            "lambda": [self.lam.real, self.lam.imag],
            "degree": self.map.degree,
            "h0": self.h0,
        }


def build_mcmullen(d_inf: int, d_0: int, c: complex, lam: complex) -> McMullenMap:
    """(z^{d∞+d₀} + c z^{d₀} + λ) / z^{d₀}, a map of degree d∞ + d₀."""
    if d_inf < 1 or d_0 < 1:
        raise ValueError(f"exponents must be >= 1, got ({d_inf}, {d_0})")
    c, lam = complex(c), complex(lam)
    if lam == 0:
        raise DomainError("λ = 0 leaves the polynomial z^d + c, not a McMullen map")
    num = Polynomial.monomial(d_inf + d_0) + Polynomial.monomial(d_0, c) + lam
    den = Polynomial.monomial(d_0)
    return McMullenMap(d_inf, d_0, c, lam, RationalMap(num, den))


def build_modified_mcmullen(lam: complex) -> RationalMap:
    """z²/(1−z²) + λ/z³ = (z⁵ − λz² + λ)/(z³ − z⁵)."""
    lam = complex(lam)
    if lam == 0:
        raise DomainError("λ = 0 removes the pole at the origin")
    num = Polynomial((lam, 0, -lam, 0, 0, 1))
    den = Polynomial((0, 0, 0, 1, 0, -1))
    return RationalMap(num, den)


# =============================================================================
# POSTCRITICALLY FINITE QUADRATICS
# =============================================================================

@dataclass
class PCFParameter:
    """A parameter c whose critical point 0 has exact period n under z² + c."""
    period: int
    c: complex
    all_roots: List[complex] = field(default_factory=list)

    def return_times(self, tol: float = PCF_PERIOD_TOL) -> List[int]:
        """Steps k ≤ period with |P^k(0)| ≤ tol."""
        z = 0j
        hits = []
        for k in range(1, self.period + 1):
            z = z * z + self.c
            if abs(z) <= tol:
                hits.append(k)
        return hits


def _critical_orbit(c: np.ndarray, n: int):
    """G_n(c), G_n'(c) and a rounding bound, by G_{k+1} = G_k² + c."""
    eps = np.finfo(float).eps
    g = c.copy()
    dg = np.ones_like(c)
    err = np.zeros(c.shape)
    for _ in range(n - 1):
        err = 2 * np.abs(g) * err + 2 * eps * (np.abs(g) ** 2 + np.abs(c))
        g, dg = g * g + c, 2 * g * dg + 1
    return g, dg, 4 * err


def critical_orbit_roots(n: int) -> List[complex]:
    """All 2^{n−1} roots of G_n, the parameters where 0 returns to 0 after n steps."""
    degree = 2 ** (n - 1)
    if degree == 1:
        return [0j]
    start = initial_circle(-0.5 + 0j, 2.0, degree)
    roots = aberth(lambda c: _critical_orbit(c, n), start)
    return [complex(r) for r in roots]


SELECTORS = {
    "largest-imaginary-part": lambda roots: max(roots, key=lambda r: (r.imag, r.real)),
    "largest-real-part": lambda roots: max(roots, key=lambda r: (r.real, r.imag)),
}


def solve_pcf_parameter(period: int, selector: str = "largest-imaginary-part") -> PCFParameter:
    """
    Centre of exact period n of the quadratic family.

    Roots of G_n that are also roots of some G_m with m | n, m < n are
    sieved out (clustering at PCF_CLUSTER_TOL).

    Raises:
        ValueError: period outside 1..PCF_MAX_PERIOD or unknown selector.
        NumericalFailure: root iteration failed.
    """
    if not 1 <= period <= PCF_MAX_PERIOD:
        raise ValueError(f"period must be in 1..{PCF_MAX_PERIOD}, got {period}")
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; expected one of {sorted(SELECTORS)}")
    candidates = critical_orbit_roots(period)
    lower: List[complex] = []
    for m in range(1, period):
        if period % m == 0:
            lower.extend(critical_orbit_roots(m))
    exact = [r for r in candidates if all(abs(r - s) > PCF_CLUSTER_TOL for s in lower)]
    logger.debug("period %d: %d roots of G_n, %d of exact period", period, len(candidates), len(exact))
    exact.sort(key=lambda r: (r.real, r.imag))
    return PCFParameter(period, SELECTORS[selector](exact), exact)


def exact_period_count(n: int) -> int:
    """Number of exact-period-n centres: 2^{n−1} minus those of each proper divisor."""
    return 2 ** (n - 1) - sum(exact_period_count(m) for m in range(1, n) if n % m == 0)


# =============================================================================
# ORBITS
# =============================================================================

@dataclass
class Orbit:
    """Forward orbit; ``degenerate`` marks an early stop at a 0/0 evaluation."""
    points: List[SpherePoint]
    degenerate: bool = False

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, k: int) -> SpherePoint:
        return self.points[k]

    def rows(self) -> List[Tuple[int, float, float, str]]:
        return [(k, p.value.real, p.value.imag, "w" if p.inverted else "z")
                for k, p in enumerate(self.points)]

    def write_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step", "re", "im", "chart"])
            for step, re_, im_, chart in self.rows():
                writer.writerow([step, repr(re_), repr(im_), chart])


def orbit(f: RationalMap, z0, n: int) -> Orbit:
    """z₀, f(z₀), …, fⁿ(z₀), stopping early (and flagged) on a degenerate evaluation."""
    if n < 0:
        raise ValueError(f"orbit length must be >= 0, got {n}")
    point = as_sphere_point(z0)
    points = [point]
    for _ in range(n):
        try:
            point = evaluate(f, point)
        except DegenerateEvaluation:
            logger.debug("orbit stopped at step %d: degenerate evaluation", len(points))
            return Orbit(points, degenerate=True)
        points.append(point)
    return Orbit(points)


# =============================================================================
# MAGNITUDE LADDER
# =============================================================================

@dataclass
class LadderClaim:
    """
    One containment claim f(source) ⊂ target.

    ``achieved`` is the measured quantity divided by the nominal order
    ``scale``: the claim holds when achieved ≤ K (or ≥ 1/K for the one
    exterior target) and the source region is free of the poles or zeros
    that would void the maximum principle.
    """
    name: str
    description: str
    achieved: float
    bound: float
    region_clear: bool
    passed: bool

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "description": self.description,
            "achieved": self.achieved,
            "bound": self.bound,
            "region_clear": self.region_clear,
            "passed": self.passed,
        }


@dataclass
class LadderReport:
    lam: complex
    K: float
    claims: List[LadderClaim]
    perturbative: bool = True

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def to_dict(self) -> Dict:
        return {
            "lambda": [self.lam.real, self.lam.imag],
            "K": self.K,
            "perturbative": self.perturbative,
            "all_passed": self.all_passed,
            "claims": [c.to_dict() for c in self.claims],
        }


def _circle(center: complex, radius: float, samples: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(samples) / samples
    return center + radius * np.exp(1j * theta)


def _values(f: RationalMap, z: np.ndarray) -> np.ndarray:
    return f.numerator(z) / f.denominator(z)


def _none_inside(points: Sequence[complex], center: complex, radius: float) -> bool:
    return all(abs(p - center) > radius for p in points)


def magnitude_ladder_check(lam: complex, K: float = LADDER_K, samples: int = LADDER_SAMPLES) -> LadderReport:
    """
    Order-of-magnitude checks on how f_λ moves the pieces of the cycle.

    With r = |λ|:
        (1) |f(λ') − 1| ≤ K r
        (2) f(D(1, r)) avoids D(0, r⁻²/K)
        (3) f({|z| ≥ r⁻²}) ⊂ D(0, K r⁴)
        (4) f(D(0, r⁴)) ⊂ D(λ, K r²)
        (5) f(D(λ, r²)) ⊂ D(1, K r³)

    Source regions use the nominal radii and K enters on the target side
    only. Disk targets are checked by the maximum principle on sampled
    boundaries after confirming the source holds no pole; the exterior
    target by the minimum principle after confirming it holds no zero.
    Parameters outside the perturbative regime |λ| ≤ LADDER_MAX_LAMBDA are
    still checked and flagged ``perturbative=False``; their failed claims
    are reported, not raised.
    """
    lam = complex(lam)
    if lam == 0:
        raise DomainError("the ladder is undefined at λ = 0")
    carpet = build_f_lambda(lam)
    f = carpet.map
    r = abs(lam)
    poles = polynomial_roots(f.denominator)
    zeros = polynomial_roots(f.numerator)
    claims = []

    value = abs(evaluate(f, carpet.free_critical).to_complex() - 1)
    achieved = value / r
    claims.append(LadderClaim("critical_value", "|f(λ') − 1| ≤ K|λ|", achieved, K, True, achieved <= K))

    boundary = _circle(1 + 0j, r, samples)
    clear = _none_inside(zeros, 1 + 0j, r)
    achieved = float(np.min(np.abs(_values(f, boundary)))) * r ** 2
    claims.append(LadderClaim("near_one", "f(D(1,|λ|)) ⊂ {|w| ≥ |λ|⁻²/K}", achieved, 1.0 / K,
                              clear, clear and achieved >= 1.0 / K))

    big = r ** -2
    boundary = _circle(0j, big, samples)
    clear = all(abs(p) < big for p in poles)
    achieved = float(np.max(np.abs(_values(f, boundary)))) / r ** 4
    claims.append(LadderClaim("near_infinity", "f({|z| ≥ |λ|⁻²}) ⊂ D(0, K|λ|⁴)", achieved, K,
                              clear, clear and achieved <= K))

    boundary = _circle(0j, r ** 4, samples)
    clear = _none_inside(poles, 0j, r ** 4)
    achieved = float(np.max(np.abs(_values(f, boundary) - lam))) / r ** 2
    claims.append(LadderClaim("near_zero", "f(D(0,|λ|⁴)) ⊂ D(λ, K|λ|²)", achieved, K,
                              clear, clear and achieved <= K))

    boundary = _circle(lam, r ** 2, samples)
    clear = _none_inside(poles, lam, r ** 2)
    achieved = float(np.max(np.abs(_values(f, boundary) - 1))) / r ** 3
    claims.append(LadderClaim("near_lambda", "f(D(λ,|λ|²)) ⊂ D(1, K|λ|³)", achieved, K,
                              clear, clear and achieved <= K))

    perturbative = r <= LADDER_MAX_LAMBDA
    if not perturbative:
        logger.info("λ = %r lies outside |λ| ≤ %g; ladder failures are expected", lam, LADDER_MAX_LAMBDA)
    report = LadderReport(lam, K, claims, perturbative)
    logger.debug("ladder at λ=%r: %s", lam, [(c.name, c.achieved) for c in claims])
    return report
