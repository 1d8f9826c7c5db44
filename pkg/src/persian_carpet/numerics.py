"""
Numerics on the Riemann sphere.

Points of the sphere are stored in one of two charts (z, or w = 1/z once
|z| passes CHART_SWITCH), so ∞ is an ordinary value w = 0. Polynomials keep
their coefficients lowest degree first, and rational maps are pairs of
polynomials evaluated chart by chart. Roots come from a simultaneous
(Aberth) iteration followed by Newton polishing, which avoids any
companion-matrix eigensolve.

Everything here is a pure function on immutable values.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npp

from .constants import (
    CHART_SWITCH,
    CLUSTER_TOL,
    COEFF_TRIM_TOL,
    COMMON_ROOT_TOL,
    DEGENERATE_TOL,
    ROOT_INIT_ANGLE,
    ROOT_MAX_ITER,
    ROOT_POLISH_STEPS,
    ROOT_RESIDUAL_TOL,
    ROOT_STEP_TOL,
)
from .errors import DegenerateEvaluation, DomainError, NumericalFailure

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


# =============================================================================
# SPHERE POINTS
# =============================================================================

@dataclass(frozen=True)
class SpherePoint:
    """
    A point of the Riemann sphere.

    ``value`` is z in the standard chart, or w = 1/z when ``inverted`` is
    set. The point at infinity is the inverted chart with w = 0. Charts are
    normalized on construction: |z| > CHART_SWITCH always lands in the
    inverted chart.
    """
    value: complex
    inverted: bool = False

    def __post_init__(self):
        v = complex(self.value)
        if not cmath.isfinite(v):
            raise ValueError(f"chart value must be finite, got {v!r}")
        inverted = bool(self.inverted)
        if not inverted and abs(v) > CHART_SWITCH:
            v, inverted = 1.0 / v, True
        elif inverted and v != 0 and abs(1.0 / v) <= CHART_SWITCH:
            v, inverted = 1.0 / v, False
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "inverted", inverted)

    @classmethod
    def from_complex(cls, z: Union[complex, float, "SpherePoint"]) -> "SpherePoint":
        """Wrap a complex number; non-finite input is the point at infinity."""
        if isinstance(z, SpherePoint):
            return z
        z = complex(z)
        if not cmath.isfinite(z):
            return INFINITY
        if abs(z) > CHART_SWITCH:
            return cls(1.0 / z, True)
        return cls(z, False)

    @classmethod
    def from_ratio(cls, num: complex, den: complex) -> "SpherePoint":
        """The point [num : den], picking the chart that keeps precision."""
        if den == 0:
            if num == 0:
                raise DegenerateEvaluation("0/0 has no value on the sphere")
            return INFINITY
        if abs(num) > CHART_SWITCH * abs(den):
            return cls(den / num, True)
        return cls(num / den, False)

    @property
    def is_infinity(self) -> bool:
        return self.inverted and self.value == 0

    def homogeneous(self) -> Tuple[complex, complex]:
        """Homogeneous coordinates [x : y] with z = x/y."""
        if self.inverted:
            return 1.0 + 0j, self.value
        return self.value, 1.0 + 0j

    def to_complex(self) -> complex:
        if not self.inverted:
            return self.value
        if self.value == 0:
            return complex(math.inf, 0.0)
        return 1.0 / self.value

    def __repr__(self) -> str:
        if self.is_infinity:
            return "SpherePoint(∞)"
        chart = "w" if self.inverted else "z"
        return f"SpherePoint({chart}={self.value!r})"


INFINITY = SpherePoint(0j, True)

PointLike = Union[SpherePoint, complex, float]


def as_sphere_point(z: PointLike) -> SpherePoint:
    return SpherePoint.from_complex(z)


def chordal_distance(z: PointLike, w: PointLike) -> float:
    """
    Chordal distance σ(z, w) = 2|z − w| / √((1+|z|²)(1+|w|²)).

    Computed in homogeneous coordinates so that ∞ needs no special case;
    the value lies in [0, 2].
    """
    x1, y1 = as_sphere_point(z).homogeneous()
    x2, y2 = as_sphere_point(w).homogeneous()
    cross = abs(x1 * y2 - y1 * x2)
    n1 = math.sqrt(abs(x1) ** 2 + abs(y1) ** 2)
    n2 = math.sqrt(abs(x2) ** 2 + abs(y2) ** 2)
    return 2.0 * cross / (n1 * n2)


# =============================================================================
# POLYNOMIALS
# =============================================================================

@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial, coefficients lowest degree first.

    Trailing (leading-degree) zeros are trimmed on construction; the zero
    polynomial is ``(0,)``.
    """
    coefficients: Tuple[complex, ...]

    def __post_init__(self):
        coeffs = [complex(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [0j]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_array(cls, arr: Sequence[complex]) -> "Polynomial":
        return cls(tuple(complex(c) for c in np.atleast_1d(arr)))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "Polynomial":
        if len(roots) == 0:
            return cls((complex(leading),))
        return cls.from_array(npp.polyfromroots(np.asarray(roots, dtype=complex)) * leading)

    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0) -> "Polynomial":
        return cls((0j,) * k + (complex(coeff),))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (0j,)

    @property
    def leading(self) -> complex:
        return self.coefficients[-1]

    def as_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)

    def coefficient_scale(self) -> float:
        return max(abs(c) for c in self.coefficients)

    def __call__(self, z):
        value = npp.polyval(z, self.as_array())
        if np.ndim(value) == 0:
            return complex(value)
        return value

    def abs_bound(self, z: complex) -> float:
        """Σ|c_k||z|^k, the magnitude scale of an evaluation at z."""
        return float(npp.polyval(abs(z), np.abs(self.as_array())))

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0j,))
        return Polynomial.from_array(npp.polyder(self.as_array()))

    def trimmed(self, rel_tol: float = COEFF_TRIM_TOL) -> "Polynomial":
        """Drop leading coefficients that are tiny relative to the largest one."""
        scale = self.coefficient_scale()
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and abs(coeffs[-1]) <= rel_tol * scale:
            coeffs.pop()
        return Polynomial(tuple(coeffs))

    def reversed(self, degree: int) -> "Polynomial":
        """Coefficients of w^degree · p(1/w)."""
        if degree < self.degree:
            raise ValueError(f"cannot reverse degree {self.degree} polynomial as degree {degree}")
        padded = list(self.coefficients) + [0j] * (degree - self.degree)
        return Polynomial(tuple(reversed(padded)))

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial((complex(other),))

    def __add__(self, other) -> "Polynomial":
        return Polynomial.from_array(npp.polyadd(self.as_array(), self._coerce(other).as_array()))

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        return Polynomial.from_array(npp.polysub(self.as_array(), self._coerce(other).as_array()))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coefficients))

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial.from_array(npp.polymul(self.as_array(), other.as_array()))
        return Polynomial(tuple(c * complex(other) for c in self.coefficients))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        result = Polynomial((1 + 0j,))
        for _ in range(k):
            result = result * self
        return result


Z = Polynomial((0j, 1 + 0j))


# =============================================================================
# ROOT FINDING
# =============================================================================

def _fujiwara_bound(monic: np.ndarray) -> float:
    """Upper bound on root moduli of a monic polynomial (lowest degree first)."""
    n = len(monic) - 1
    terms = [abs(monic[n - k]) ** (1.0 / k) for k in range(1, n)]
    terms.append(abs(monic[0] / 2.0) ** (1.0 / n))
    return 2.0 * max(terms)


def initial_circle(center: complex, radius: float, n: int) -> np.ndarray:
    """n starting points evenly spaced on a circle, rotated off the real axis."""
    angles = 2.0 * np.pi * np.arange(n) / n + ROOT_INIT_ANGLE
    return center + radius * np.exp(1j * angles)


def aberth(evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]],
           initial: np.ndarray,
           max_iter: int = ROOT_MAX_ITER) -> np.ndarray:
    """
    Aberth simultaneous iteration.

    ``evaluate(z)`` returns p(z), p'(z) and a rounding-error bound on p(z)
    for an array of iterates; an iterate whose residual is within that bound
    is left in place. Converges when every step is below
    ROOT_STEP_TOL·(1+|z|) or every residual is at rounding level.

    Raises:
        NumericalFailure: the cap was reached; carries the final iterates.
    """
    z = np.array(initial, dtype=complex)
    n = len(z)
    for iteration in range(1, max_iter + 1):
        pv, dpv, rounding = evaluate(z)
        at_rounding = np.abs(pv) <= rounding

        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dpv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * repulsion)

        step = np.where(at_rounding, 0.0, step)
        stuck = ~np.isfinite(step)
        if stuck.any():
            # p' vanished away from a root: nudge off the critical point
            step[stuck] = 1e-8 * (1.0 + np.abs(z[stuck]))
        z = z - step

        small = np.abs(step) < ROOT_STEP_TOL * (1.0 + np.abs(z))
        if np.all(small | at_rounding):
            logger.debug("aberth converged: degree %d in %d iterations", n, iteration)
            return z

    raise NumericalFailure(
        f"simultaneous root iteration did not converge in {max_iter} steps (degree {n})",
        best_iterates=[complex(r) for r in z],
    )


def _aberth_polynomial(coeffs: np.ndarray, max_iter: int) -> np.ndarray:
    n = len(coeffs) - 1
    dcoeffs = npp.polyder(coeffs)
    abs_coeffs = np.abs(coeffs)
    monic = coeffs / coeffs[-1]

    def evaluate(z):
        rounding = 8.0 * _EPS * npp.polyval(np.abs(z), abs_coeffs)
        return npp.polyval(z, coeffs), npp.polyval(z, dcoeffs), rounding

    start = initial_circle(-monic[n - 1] / n, _fujiwara_bound(monic), n)
    return aberth(evaluate, start, max_iter)


def _polish(coeffs: np.ndarray, dcoeffs: np.ndarray, root: complex) -> complex:
    n = len(coeffs) - 1
    target = ROOT_RESIDUAL_TOL * np.max(np.abs(coeffs)) * (1.0 + abs(root)) ** n
    residual = abs(npp.polyval(root, coeffs))
    for _ in range(ROOT_POLISH_STEPS):
        if residual <= target:
            break
        slope = npp.polyval(root, dcoeffs)
        if slope == 0:
            break
        candidate = root - npp.polyval(root, coeffs) / slope
        cand_residual = abs(npp.polyval(candidate, coeffs))
        if cand_residual >= residual:
            break
        root, residual = candidate, cand_residual
    return complex(root)


def polynomial_roots(p: Polynomial, max_iter: int = ROOT_MAX_ITER) -> List[complex]:
    """
    All roots of p, repeated by multiplicity.

    Exact zero roots are split off first; the rest come from the Aberth
    iteration started on a circle around the root mean whose radius is the
    Fujiwara bound. Every root is then Newton-polished against p.

    Raises:
        ValueError: p is constant.
        NumericalFailure: the iteration cap was reached; the exception
            carries the best iterates.
    """
    if p.degree < 1:
        raise ValueError("polynomial_roots needs a polynomial of degree >= 1")
    coeffs = p.as_array()
    lowest = 0
    while coeffs[lowest] == 0:
        lowest += 1
    roots: List[complex] = [0j] * lowest
    deflated = coeffs[lowest:]
    if len(deflated) == 2:
        roots.append(complex(-deflated[0] / deflated[1]))
    elif len(deflated) > 2:
        roots.extend(complex(r) for r in _aberth_polynomial(deflated, max_iter))
    dcoeffs = npp.polyder(coeffs)
    return [_polish(coeffs, dcoeffs, r) if r != 0 else r for r in roots]


def cluster_roots(roots: Sequence[complex], tol: float = CLUSTER_TOL) -> List[Tuple[complex, int]]:
    """Merge roots closer than ``tol`` into (mean, multiplicity) pairs, in first-seen order."""
    clusters: List[List[complex]] = []
    for r in roots:
        for members in clusters:
            centre = sum(members) / len(members)
            if abs(r - centre) < tol:
                members.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(sum(m) / len(m)), len(m)) for m in clusters]


# =============================================================================
# RATIONAL MAPS
# =============================================================================

@dataclass(frozen=True)
class RationalMap:
    """
    f = numerator / denominator.

    With ``check_coprime`` (the default) construction verifies numerically
    that the two polynomials share no root. Derivatives are built with the
    check off since their denominator D² shares roots with the numerator
    N'D - ND' wherever D has a multiple root.
    """
    numerator: Polynomial
    denominator: Polynomial
    check_coprime: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.denominator.is_zero:
            raise DomainError("denominator is the zero polynomial")
        object.__setattr__(self, "_degree", max(self.numerator.degree, self.denominator.degree))
        if self.check_coprime and self.has_common_root():
            raise DomainError("numerator and denominator share a root")

    @classmethod
    def from_coefficients(cls, numerator: Sequence[complex], denominator: Sequence[complex],
                          check_coprime: bool = True) -> "RationalMap":
        return cls(Polynomial(tuple(numerator)), Polynomial(tuple(denominator)), check_coprime)

    @property
    def degree(self) -> int:
        return self._degree

    def has_common_root(self) -> bool:
        if self.numerator.is_zero or self.numerator.degree == 0 or self.denominator.degree == 0:
            return False
        num_roots = polynomial_roots(self.numerator)
        den_roots = polynomial_roots(self.denominator)
        gap = min(abs(a - b) for a in num_roots for b in den_roots)
        return gap <= COMMON_ROOT_TOL

    def chart_pair(self, inverted: bool) -> Tuple[Polynomial, Polynomial]:
        """Numerator and denominator expressed in the chart of the argument."""
        if not inverted:
            return self.numerator, self.denominator
        d = self.degree
        return self.numerator.reversed(d), self.denominator.reversed(d)

    def __call__(self, z: PointLike) -> SpherePoint:
        return evaluate(self, z)


def evaluate(f: RationalMap, z: PointLike) -> SpherePoint:
    """
    f(z) on the sphere.

    Inverted-chart arguments are evaluated through w^d·N(1/w) / w^d·D(1/w),
    so poles and ∞ need no special handling.

    Raises:
        DegenerateEvaluation: numerator and denominator both vanish to
            within DEGENERATE_TOL of their magnitude scale.
    """
    point = as_sphere_point(z)
    num, den = f.chart_pair(point.inverted)
    x = point.value
    n_val = num(x)
    d_val = den(x)
    if abs(n_val) <= DEGENERATE_TOL * num.abs_bound(x) and abs(d_val) <= DEGENERATE_TOL * den.abs_bound(x):
        raise DegenerateEvaluation(f"0/0 evaluating degree {f.degree} map at {point!r}")
    return SpherePoint.from_ratio(n_val, d_val)


def wronskian(f: RationalMap) -> Polynomial:
    """N'D - ND', whose roots are the finite critical points."""
    n, d = f.numerator, f.denominator
    return n.derivative() * d - n * d.derivative()


def derivative(f: RationalMap) -> RationalMap:
    """f' = (N'D − ND') / D², shared factors left in place."""
    return RationalMap(wronskian(f), f.denominator * f.denominator, check_coprime=False)


def critical_points(f: RationalMap) -> List[Tuple[SpherePoint, int]]:
    """
    Critical points with multiplicities, 2d − 2 in total.

    Finite ones are the roots of the Wronskian; the deficit of its degree
    below 2d − 2 is the multiplicity of ∞ (the Wronskian read as a form of
    degree 2d − 2 has that many zeros at w = 0 in the inverted chart).
    """
    d = f.degree
    if d < 2:
        raise DomainError(f"critical points need degree >= 2, got {d}")
    w = wronskian(f).trimmed()
    result: List[Tuple[SpherePoint, int]] = []
    if w.degree >= 1:
        for root, mult in cluster_roots(polynomial_roots(w)):
            result.append((SpherePoint.from_complex(root), mult))
    at_infinity = 2 * d - 2 - w.degree
    if at_infinity > 0:
        result.append((INFINITY, at_infinity))
    return result


def fixed_points(f: RationalMap) -> List[SpherePoint]:
    """The d + 1 fixed points, repeated by multiplicity; ∞ is fixed when deg N > deg D."""
    p = (f.numerator - Z * f.denominator).trimmed()
    points: List[SpherePoint] = []
    if p.degree >= 1:
        for root, mult in cluster_roots(polynomial_roots(p)):
            points.extend([SpherePoint.from_complex(root)] * mult)
    points.extend([INFINITY] * (f.degree + 1 - p.degree))
    return points


def multiplier(f: RationalMap, z: PointLike) -> complex:
    """f'(z) at a fixed point; at ∞ the derivative is taken in the inverted chart."""
    point = as_sphere_point(z)
    if point.is_infinity:
        flip = MobiusMap(0, 1, 1, 0)
        return multiplier(conjugate(f, flip), 0j)
    x = point.to_complex()
    den = f.denominator(x)
    if den == 0:
        raise DomainError(f"{point!r} is a pole, not a fixed point")
    return wronskian(f)(x) / (den * den)


# =============================================================================
# MÖBIUS MAPS
# =============================================================================

@dataclass(frozen=True)
class MobiusMap:
    """z ↦ (az + b)/(cz + d) with ad − bc ≠ 0."""
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.determinant == 0:
            raise DomainError("Möbius map with ad − bc = 0")

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self ∘ other."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, z: PointLike) -> SpherePoint:
        x, y = as_sphere_point(z).homogeneous()
        return SpherePoint.from_ratio(self.a * x + self.b * y, self.c * x + self.d * y)

    def as_rational_map(self) -> RationalMap:
        return RationalMap(Polynomial((self.b, self.a)), Polynomial((self.d, self.c)))


def _homogenize(p: Polynomial, degree: int, x: Polynomial, y: Polynomial) -> Polynomial:
    """Σ p_k x^k y^(degree−k)."""
    total = Polynomial((0j,))
    for k, coeff in enumerate(p.coefficients):
        if coeff != 0:
            total = total + (x ** k) * (y ** (degree - k)) * coeff
    return total


def conjugate(f: RationalMap, phi: MobiusMap) -> RationalMap:
    """φ⁻¹ ∘ f ∘ φ, by substituting φ into the homogenized numerator and denominator."""
    d = f.degree
    x = Polynomial((phi.b, phi.a))
    y = Polynomial((phi.d, phi.c))
    num = _homogenize(f.numerator, d, x, y)
    den = _homogenize(f.denominator, d, x, y)
    psi = phi.inverse()
    return RationalMap((num * psi.a + den * psi.b).trimmed(), (num * psi.c + den * psi.d).trimmed())
