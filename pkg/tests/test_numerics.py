"""
Tests for numerics on the Riemann sphere: charts, chordal distance,
polynomial roots, rational maps and Möbius conjugation.
"""

import math
import os
import sys

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from persian_carpet.errors import DegenerateEvaluation, DomainError, NumericalFailure
from persian_carpet.family import build_f_lambda, hat_map, lambda_prime
from persian_carpet.numerics import (
    INFINITY,
    MobiusMap,
    Polynomial,
    RationalMap,
    SpherePoint,
    chordal_distance,
    cluster_roots,
    conjugate,
    critical_points,
    derivative,
    evaluate,
    fixed_points,
    multiplier,
    polynomial_roots,
)


def _match(found, expected, tol):
    """Every expected point has a distinct found point within chordal tol."""
    remaining = list(found)
    for point in expected:
        distances = [chordal_distance(point, f) for f in remaining]
        k = int(np.argmin(distances))
        assert distances[k] <= tol, f"{point!r} not found (closest {distances[k]:.3g})"
        remaining.pop(k)
    assert not remaining


class TestSpherePoint:
    """Chart normalization."""

    def test_large_values_switch_chart(self):
        p = SpherePoint.from_complex(1e9)
        assert p.inverted
        assert p.value == pytest.approx(1e-9)

    def test_moderate_values_stay_standard(self):
        p = SpherePoint(1e-9, True)
        assert p.inverted
        q = SpherePoint(0.5, True)
        assert not q.inverted
        assert q.value == pytest.approx(2.0)

    def test_infinity(self):
        assert INFINITY.is_infinity
        assert SpherePoint.from_complex(complex(math.inf, 0)).is_infinity
        assert math.isinf(INFINITY.to_complex().real)

    def test_ratio(self):
        assert SpherePoint.from_ratio(1, 0).is_infinity
        assert SpherePoint.from_ratio(3, 2).value == pytest.approx(1.5)
        with pytest.raises(DegenerateEvaluation):
            SpherePoint.from_ratio(0, 0)


class TestChordalDistance:

    def test_known_values(self):
        assert chordal_distance(0, INFINITY) == pytest.approx(2.0)
        assert chordal_distance(1, -1) == pytest.approx(2.0)
        assert chordal_distance(1j, 1j) == 0.0

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            z, w = rng.normal(size=2) * 10 + 1j * rng.normal(size=2) * 10
            d = chordal_distance(z, w)
            assert d == pytest.approx(chordal_distance(w, z))
            assert 0.0 <= d <= 2.0

    def test_infinity_formula(self):
        z = 3 + 4j
        assert chordal_distance(z, INFINITY) == pytest.approx(2.0 / math.sqrt(1 + 25))


class TestPolynomial:

    def test_trailing_zeros_trimmed(self):
        p = Polynomial((1, 2, 0, 0))
        assert p.degree == 1

    def test_arithmetic(self):
        p = Polynomial((1, 1))
        q = p * p
        assert q.coefficients == pytest.approx((1, 2, 1))
        assert (q - p * p).is_zero
        assert (p ** 3).degree == 3

    def test_derivative_and_evaluation(self):
        p = Polynomial((1, -3, 0, 2))
        assert p(2.0) == pytest.approx(11.0)
        assert p.derivative()(2.0) == pytest.approx(21.0)

    def test_reversed(self):
        p = Polynomial((1, 2))
        assert p.reversed(3).coefficients == pytest.approx((0, 0, 2, 1))


class TestRoots:
    """Simultaneous iteration with polishing."""

    def test_random_roots_recovered(self):
        rng = np.random.default_rng(11)
        expected = rng.normal(size=6) + 1j * rng.normal(size=6)
        found = polynomial_roots(Polynomial.from_roots(expected))
        for r in expected:
            assert min(abs(r - f) for f in found) < 1e-9

    def test_zero_roots_split_off(self):
        p = Polynomial((0, 0, -3, 1))
        roots = sorted(polynomial_roots(p), key=abs)
        assert roots[0] == 0 and roots[1] == 0
        assert roots[2] == pytest.approx(3.0)

    def test_double_root_clusters(self):
        p = Polynomial.from_roots([1.0, 1.0, -2.0])
        clusters = cluster_roots(polynomial_roots(p))
        mults = sorted(m for _, m in clusters)
        assert mults == [1, 2]

    def test_iteration_cap(self):
        p = Polynomial.from_roots([1, 2, 3, 4, 5, 6])
        with pytest.raises(NumericalFailure) as info:
            polynomial_roots(p, max_iter=1)
        assert len(info.value.best_iterates) == 6

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            polynomial_roots(Polynomial((2,)))


class TestRationalMap:

    def test_common_root_rejected(self):
        with pytest.raises(DomainError):
            RationalMap(Polynomial.from_roots([1, -1]), Polynomial.from_roots([1, -2]))

    def test_degenerate_evaluation(self):
        f = RationalMap(Polynomial((0, 1)), Polynomial((0, 1)), check_coprime=False)
        with pytest.raises(DegenerateEvaluation):
            evaluate(f, 0)

    def test_evaluation_through_infinity(self):
        f0 = hat_map().map
        assert evaluate(f0, 1.0).is_infinity
        assert evaluate(f0, INFINITY).value == pytest.approx(0)
        assert evaluate(f0, 0).value == pytest.approx(1.0)

    def test_degree(self):
        assert hat_map().map.degree == 2
        assert build_f_lambda(1e-3).map.degree == 3

    def test_derivative(self):
        # f₀′(z) = −2/(z−1)³
        df = derivative(hat_map().map)
        assert evaluate(df, 3.0).value == pytest.approx(-0.25)
        assert evaluate(df, 2j).value == pytest.approx(-2 / (2j - 1) ** 3)

    def test_derivative_matches_central_differences(self):
        # critical points and poles of f_λ all lie within 0.3 of 0 or 1, or at ∞
        f = build_f_lambda(1e-3).map
        df = derivative(f)
        rng = np.random.default_rng(23)
        h = 1e-6
        checked = 0
        while checked < 100:
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if abs(z) < 0.3 or abs(z - 1) < 0.3:
                continue
            slope = (evaluate(f, z + h).to_complex() - evaluate(f, z - h).to_complex()) / (2 * h)
            exact = evaluate(df, z).to_complex()
            assert abs(slope - exact) <= 1e-5 * abs(exact), z
            checked += 1


class TestCriticalPoints:

    def test_hat_map(self):
        points = critical_points(hat_map().map)
        assert sum(m for _, m in points) == 2
        _match([p for p, _ in points], [SpherePoint(1 + 0j), INFINITY], 1e-9)

    def test_cubic_family(self):
        lam = 1e-3 + 5e-4j
        points = critical_points(build_f_lambda(lam).map)
        assert sum(m for _, m in points) == 4
        expected = [SpherePoint(1 + 0j), INFINITY, SpherePoint(lam), SpherePoint(lambda_prime(lam))]
        _match([p for p, _ in points], expected, 1e-7)

    def test_cube_is_critical_at_zero_and_infinity(self):
        cube = RationalMap(Polynomial((0, 0, 0, 1)), Polynomial((1,)))
        points = critical_points(cube)
        assert len(points) == 2
        by_chart = {p.is_infinity: (p, m) for p, m in points}
        zero, m0 = by_chart[False]
        assert zero.value == 0 and m0 == 2
        assert by_chart[True][1] == 2


class TestFixedPoints:

    def test_count_and_invariance(self):
        f0 = hat_map().map
        points = fixed_points(f0)
        assert len(points) == 3
        for p in points:
            assert chordal_distance(evaluate(f0, p), p) < 1e-10

    def test_repelling_real_fixed_point(self):
        f0 = hat_map().map
        real = max((p.to_complex() for p in fixed_points(f0)), key=lambda z: z.real)
        assert real.real == pytest.approx(1.7548776662, abs=1e-9)
        assert abs(multiplier(f0, real)) > 1

    def test_infinity_superattracting_for_square(self):
        square = RationalMap(Polynomial((0, 0, 1)), Polynomial((1,)))
        assert any(p.is_infinity for p in fixed_points(square))
        assert abs(multiplier(square, INFINITY)) < 1e-12


class TestMobius:

    def test_compose_and_inverse(self):
        phi = MobiusMap(2, 1, 1, 3)
        ident = phi.compose(phi.inverse())
        for z in (0.3, 2 + 1j, -4j):
            assert chordal_distance(ident(z), z) < 1e-12

    def test_singular_rejected(self):
        with pytest.raises(DomainError):
            MobiusMap(1, 2, 2, 4)

    def test_conjugation_moves_critical_points(self):
        phi = MobiusMap(2, 1, 1, 3)
        g = conjugate(hat_map().map, phi)
        assert g.degree == 2
        points = critical_points(g)
        assert sorted(m for _, m in points) == [1, 1]
        # φ⁻¹(1) = 2 and φ⁻¹(∞) = −3
        _match([p for p, _ in points], [SpherePoint(2 + 0j), SpherePoint(-3 + 0j)], 1e-8)

    def test_conjugation_is_pointwise(self):
        f = hat_map().map
        phi = MobiusMap(1, 0.5, -0.25, 1)
        g = conjugate(f, phi)
        for z in (0.2 + 0.1j, -1.5, 3j):
            expected = phi.inverse()(evaluate(f, phi(z)))
            assert chordal_distance(evaluate(g, z), expected) < 1e-10


def _sample_maps():
    rng = np.random.default_rng(21)
    coeffs = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
    return {
        "hat": hat_map().map,
        "cubic": build_f_lambda(1e-3).map,
        "random": RationalMap.from_coefficients(coeffs[0], coeffs[1]),
    }


class TestTwoCharts:
    """Evaluation through the inverted chart agrees with the standard one."""

    @pytest.mark.parametrize("name", ["hat", "cubic", "random"])
    def test_conjugation_by_inversion(self, name):
        f = _sample_maps()[name]
        flip = MobiusMap(0, 1, 1, 0)
        g = conjugate(f, flip)
        assert g.degree == f.degree
        rng = np.random.default_rng(17)
        zs = 3 * rng.normal(size=1000) + 3j * rng.normal(size=1000)
        for z in zs:
            z = complex(z)
            direct = evaluate(f, z).to_complex()
            through = flip(evaluate(g, flip(z))).to_complex()
            assert abs(direct - through) <= 1e-10 * abs(direct), z

    def test_inverted_argument_uses_reversed_coefficients(self):
        f = _sample_maps()["random"]
        rng = np.random.default_rng(19)
        for z in 1e9 * np.exp(2j * np.pi * rng.uniform(size=20)):
            point = SpherePoint.from_complex(complex(z))
            assert point.inverted
            num, den = f.numerator.coefficients, f.denominator.coefficients
            limit = num[-1] / den[-1]
            assert abs(evaluate(f, point).to_complex() - limit) <= 1e-6 * abs(limit)
