"""
Tests for the explicit maps: the cubic family f_λ and its degenerate
member f₀, coefficient derivation, McMullen maps, postcritically finite
quadratic parameters, orbits and the magnitude ladder.
"""

import csv
import os
import sys

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from persian_carpet.errors import DomainError
from persian_carpet.family import (
    HAT_LOCAL_DEGREES,
    build_f_lambda,
    build_mcmullen,
    build_modified_mcmullen,
    closed_form_coefficients,
    derive_coefficients,
    exact_period_count,
    hat_map,
    lambda_prime,
    magnitude_ladder_check,
    map_from_coefficients,
    orbit,
    persian_carpet_coefficients,
    solve_pcf_parameter,
)
from persian_carpet.numerics import (
    INFINITY,
    SpherePoint,
    chordal_distance,
    critical_points,
    derivative,
    evaluate,
)


def _random_lambdas(seed, count, lo=1e-4, hi=1e-2):
    """Log-uniform modulus, uniform argument."""
    rng = np.random.default_rng(seed)
    radius = np.exp(rng.uniform(np.log(lo), np.log(hi), count))
    angle = rng.uniform(0, 2 * np.pi, count)
    return [complex(r * np.exp(1j * t)) for r, t in zip(radius, angle)]


class TestCubicFamily:
    """The super-attracting 4-cycle λ → 1 → ∞ → 0."""

    def test_cycle_residuals(self):
        for lam in _random_lambdas(1, 50):
            carpet = build_f_lambda(lam)
            residuals = carpet.cycle_residuals()
            assert set(residuals) == {"f(0)=lambda", "f(lambda)=1", "f(1)=inf", "f(inf)=0", "f'(lambda)=0"}
            for name, value in residuals.items():
                assert value <= 1e-9, (lam, name, value)

    def test_critical_points(self):
        for lam in _random_lambdas(2, 10):
            carpet = build_f_lambda(lam)
            points = critical_points(carpet.map)
            assert sum(m for _, m in points) == 4
            expected = [SpherePoint(lam), SpherePoint(1 + 0j), INFINITY, SpherePoint(carpet.free_critical)]
            for target in expected:
                assert min(chordal_distance(target, p) for p, _ in points) <= 1e-7

    def test_free_critical_point(self):
        lam = 2e-3 - 1e-3j
        f = build_f_lambda(lam).map
        assert abs(evaluate(derivative(f), lambda_prime(lam)).to_complex()) < 1e-6
        # λ' ≈ −λ to first order
        assert abs(lambda_prime(lam) + lam) < 10 * abs(lam) ** 2

    def test_vectorized_coefficients(self):
        lams = np.array(_random_lambdas(3, 6)).reshape(2, 3)
        num, den = persian_carpet_coefficients(lams)
        assert num.shape == (2, 3, 2)
        assert den.shape == (2, 3, 4)
        single_num, single_den = persian_carpet_coefficients(lams[1, 2])
        assert np.allclose(num[1, 2], single_num)
        assert np.allclose(den[1, 2], single_den)

    def test_degenerate_parameters(self):
        with pytest.raises(DomainError):
            build_f_lambda(1.0)
        with pytest.raises(DomainError):
            build_f_lambda((5 ** 0.5 - 1) / 2)

    def test_large_parameter_unverified(self):
        assert not build_f_lambda(0.2).verified
        assert build_f_lambda(0.01).verified

    def test_degree(self):
        assert build_f_lambda(1e-3).degree == 3

    def test_close_to_hat_map(self):
        rng = np.random.default_rng(8)
        for lam in _random_lambdas(9, 10, lo=1e-5, hi=1e-3):
            f = build_f_lambda(lam).map
            ring = 1 + rng.uniform(0.5, 2.0, 50) * np.exp(2j * np.pi * rng.uniform(size=50))
            for z in ring:
                z = complex(z)
                if abs(z) < 0.1:
                    continue  # the pole near 0
                value = evaluate(f, z).to_complex()
                assert abs(value * (z - 1) ** 2 - 1) <= 10 * abs(lam), (lam, z)

    @pytest.mark.parametrize("lam", [1e-3, 2e-3 - 1e-3j])
    def test_local_degree_two_at_one(self, lam):
        f = build_f_lambda(lam).map

        def reciprocal(t):
            x, y = evaluate(f, 1 + t).homogeneous()
            return y / x

        t = 1e-4 * np.exp(0.7j)
        second = reciprocal(t) / t ** 2
        assert abs(reciprocal(t) / t) <= 1e-3
        assert abs(second) > 0.5
        assert abs(reciprocal(t / 10) / (t / 10) ** 2 - second) <= 1e-2 * abs(second)

    @pytest.mark.parametrize("lam", [1e-3, 2e-3 - 1e-3j])
    def test_local_degree_two_at_infinity(self, lam):
        f = build_f_lambda(lam).map
        w = 1e-4 * np.exp(0.7j)
        second = evaluate(f, SpherePoint(w, True)).to_complex() / w ** 2
        assert abs(evaluate(f, SpherePoint(w, True)).to_complex() / w) <= 1e-3
        assert abs(second) > 0.5
        smaller = evaluate(f, SpherePoint(w / 10, True)).to_complex() / (w / 10) ** 2
        assert abs(smaller - second) <= 1e-2 * abs(second)


class TestHatMap:
    """λ = 0."""

    def test_zero_parameter_gives_hat_map(self):
        carpet = build_f_lambda(0)
        assert carpet.degree == 2
        assert carpet.map == hat_map().map
        assert len(carpet.cycle) == 3

    def test_three_cycle(self):
        f0 = hat_map().map
        assert chordal_distance(evaluate(f0, 0j), 1 + 0j) < 1e-15
        assert evaluate(f0, 1.0).is_infinity
        assert chordal_distance(evaluate(f0, INFINITY), 0j) < 1e-15

    def test_local_degrees(self):
        f0 = hat_map().map
        points = critical_points(f0)
        mult = {}
        for p, m in points:
            for k, c in enumerate(hat_map().cycle):
                if chordal_distance(p, c) < 1e-9:
                    mult[k] = m
        assert tuple(mult.get(k, 0) + 1 for k in range(3)) == HAT_LOCAL_DEGREES

    def test_residuals_skip_derivative(self):
        residuals = hat_map().cycle_residuals()
        assert "f'(lambda)=0" not in residuals
        assert residuals["f(lambda)=1"] < 1e-15


class TestDerivation:
    """Coefficients from the cycle conditions against the closed forms."""

    def test_matches_closed_form(self):
        for lam in _random_lambdas(4, 100):
            a1, b1p = derive_coefficients(lam)
            ca1, cb1p = closed_form_coefficients(lam)
            assert abs(a1 - ca1) <= 1e-12 * abs(ca1)
            assert abs(b1p - cb1p) <= 1e-12 * abs(cb1p)

    def test_pointwise_agreement(self):
        rng = np.random.default_rng(5)
        for lam in _random_lambdas(6, 20, lo=1e-3):
            g = map_from_coefficients(*derive_coefficients(lam), lam)
            f = build_f_lambda(lam).map
            for z in 0.5 * np.exp(2j * np.pi * rng.uniform(size=4)) + 2.0:
                a = evaluate(f, complex(z)).to_complex()
                b = evaluate(g, complex(z)).to_complex()
                assert abs(a - b) <= 1e-10 * abs(a)

    def test_zero_parameter_rejected(self):
        with pytest.raises(DomainError):
            derive_coefficients(0)

    def test_numerator_root_still_derived(self):
        # a₁ vanishes there, but the linear system stays regular
        lam = complex(max(np.roots([-1, 6, -4, 1]), key=lambda r: r.real))
        a1, b1p = derive_coefficients(lam)
        _, cb1p = closed_form_coefficients(lam)
        assert abs(a1) <= 1e-9
        assert abs(b1p - cb1p) <= 1e-9 * abs(cb1p)
        with pytest.raises(DomainError):
            build_f_lambda(lam)


class TestMcMullen:

    def test_degree_and_condition(self):
        g = build_mcmullen(3, 3, 0, 1e-6)
        assert g.map.degree == 6
        assert g.h0
        assert not build_mcmullen(2, 2, 0, 1e-6).h0

    def test_values(self):
        g = build_mcmullen(2, 3, 0.25, 1e-3)
        z = 0.7 + 0.2j
        expected = z ** 2 + 0.25 + 1e-3 / z ** 3
        assert evaluate(g.map, z).to_complex() == pytest.approx(expected)

    def test_dict(self):
        doc = build_mcmullen(3, 3, 0, 1e-6).to_dict()
        assert doc["degree"] == 6 and doc["h0"]

    def test_zero_lambda_rejected(self):
        with pytest.raises(DomainError):
            build_mcmullen(2, 2, 0, 0)

    def test_modified(self):
        lam = 1e-4
        g = build_modified_mcmullen(lam)
        assert g.degree == 5
        z = 0.3 + 0.4j
        expected = z ** 2 / (1 - z ** 2) + lam / z ** 3
        assert evaluate(g, z).to_complex() == pytest.approx(expected)


class TestPCF:
    """Centres of exact period n of z² + c."""

    def test_period_four(self):
        pcf = solve_pcf_parameter(4)
        assert pcf.c.real == pytest.approx(-0.157, abs=1e-3)
        assert pcf.c.imag == pytest.approx(1.032, abs=1e-3)
        assert len(pcf.all_roots) == 6
        assert pcf.return_times() == [4]

    def test_period_three(self):
        pcf = solve_pcf_parameter(3)
        assert pcf.c.real == pytest.approx(-0.123, abs=1e-3)
        assert pcf.c.imag == pytest.approx(0.745, abs=1e-3)

    def test_largest_real_part(self):
        pcf = solve_pcf_parameter(2, "largest-real-part")
        assert pcf.c == pytest.approx(-1.0)

    def test_exact_counts(self):
        assert [exact_period_count(n) for n in range(1, 9)] == [1, 1, 3, 6, 15, 27, 63, 120]
        for n in range(1, 7):
            assert len(solve_pcf_parameter(n).all_roots) == exact_period_count(n)

    def test_bad_input(self):
        with pytest.raises(ValueError):
            solve_pcf_parameter(0)
        with pytest.raises(ValueError):
            solve_pcf_parameter(3, "smallest")


class TestOrbit:

    def test_cycle_orbit(self, tmp_path):
        lam = 1e-3
        path = orbit(build_f_lambda(lam).map, 0, 4)
        assert len(path) == 5
        for point, target in zip(path.points, [0j, lam, 1 + 0j, INFINITY, 0j]):
            assert chordal_distance(point, target) < 1e-9
        out = tmp_path / "orbit.csv"
        path.write_csv(out)
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["step", "re", "im", "chart"]
        assert len(rows) == 6

    def test_negative_length(self):
        with pytest.raises(ValueError):
            orbit(hat_map().map, 0, -1)


class TestLadder:
    """Order-of-magnitude containments near the cycle."""

    @pytest.mark.parametrize("lam", [1e-2, 1e-3, 1e-4])
    def test_passes_in_perturbative_regime(self, lam):
        report = magnitude_ladder_check(lam)
        assert len(report.claims) == 5
        assert report.all_passed, report.to_dict()

    def test_critical_value_ratio(self):
        report = magnitude_ladder_check(1e-3)
        claim = report.claims[0]
        assert claim.name == "critical_value"
        assert 4 < claim.achieved < 12

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            magnitude_ladder_check(0)

    def test_large_parameter_flagged_not_raised(self):
        report = magnitude_ladder_check(0.3)
        assert len(report.claims) == 5
        assert report.perturbative is False
        assert report.to_dict()["perturbative"] is False

    def test_regime_boundary_inclusive(self):
        assert magnitude_ladder_check(1e-2).perturbative
