"""
Modulus bookkeeping for the surgery.

The moduli x₀..x₃ of the annuli cut out by the equipotentials must satisfy

    x₁/d₀ < x₀
    x₂/d₁ < x₁
    (x₀ + x₃)/d₂ < x₂
    (x₀ + x₁ + C)/d₃ < x₃

which is MX + (0, 0, 0, C/d₃) < X for the HP transition matrix M. When M
has leading eigenvalue below 1 a positive Perron vector V with MV < V
exists and a multiple of it solves the system.

Also here: the conversion between moduli and equipotential levels, and the
two modulus bounds used for the annulus-to-disk covering and the separating
quasicircle.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .constants import ANNULUS_R, ANNULUS_SAMPLES, GROTZSCH_C, LEVEL_MARGIN
from .errors import DomainError
from .trees import builtin_trees, is_unobstructed

logger = logging.getLogger(__name__)

INEQUALITIES = (
    "x1/d0 < x0",
    "x2/d1 < x1",
    "(x0+x3)/d2 < x2",
    "(x0+x1+C)/d3 < x3",
)


@dataclass
class ModuliSolution:
    """Positive solution X = μV of the modulus system."""
    weights: Tuple[int, int, int, int]
    x: Tuple[float, float, float, float]
    C: float
    mu: float
    perron_vector: Tuple[float, ...] = ()

    def margins(self) -> Dict[str, float]:
        """Right side minus left side of every inequality; all positive for a valid solution."""
        d0, d1, d2, d3 = self.weights
        x0, x1, x2, x3 = self.x
        values = (
            x0 - x1 / d0,
            x1 - x2 / d1,
            x2 - (x0 + x3) / d2,
            x3 - (x0 + x1 + self.C) / d3,
        )
        return dict(zip(INEQUALITIES, values))

    @property
    def valid(self) -> bool:
        return all(x > 0 for x in self.x) and all(m > 0 for m in self.margins().values())

    def to_dict(self) -> Dict:
        return {
            "weights": list(self.weights),
            "C": self.C,
            "mu": self.mu,
            "x": list(self.x),
            "perron_vector": list(self.perron_vector),
            "margins": self.margins(),
            "valid": self.valid,
        }


@dataclass
class EquipotentialLevels:
    """
    Levels L ∈ (0, 1) of the named equipotentials.

    ``basins`` records which super-attracting basin each equipotential lives
    in; levels are only comparable within one basin.
    """
    levels: Dict[str, float]
    basins: Dict[str, int] = field(default_factory=dict)
    gap: float = 1.0

    def __getitem__(self, name: str) -> float:
        return self.levels[name]

    def modulus(self, outer: str, inner: str) -> float:
        if self.basins.get(outer) != self.basins.get(inner):
            raise ValueError(f"{outer} and {inner} lie in different basins")
        return modulus_from_levels(self.levels[outer], self.levels[inner])

    @property
    def ordered(self) -> bool:
        return self["beta0"] > self["beta3+"] > self["beta3-"]

    def to_dict(self) -> Dict:
        return {
            "levels": dict(self.levels),
            "basins": dict(self.basins),
            "gap_modulus": self.modulus("beta0", "beta3+"),
            "ordered": self.ordered,
        }


# =============================================================================
# SYSTEM OF INEQUALITIES
# =============================================================================

def solve_moduli(d0: int, d1: int, d2: int, d3: int, C: float = GROTZSCH_C) -> ModuliSolution:
    """
    Scale the Perron vector of HP(d₀..d₃) into a solution.

    μ = (C/d₃ + 1)/(v₃ − v₀/d₃ − v₁/d₃) makes the last inequality hold with
    margin μ-independent slack 1; the first three hold for any μ > 0
    because MV < V.

    Raises:
        DomainError: the tree is obstructed, so no positive solution exists.
        ValueError: C is not positive.
    """
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    weights = (d0, d1, d2, d3)
    report = is_unobstructed(builtin_trees("HP", weights))
    if not report.unobstructed:
        raise DomainError(
            f"HP{weights} is obstructed (leading eigenvalue {report.leading_eigenvalue:.6g}); "
            "the modulus system has no positive solution"
        )
    v = np.asarray(report.perron_vector)
    denominator = v[3] - (v[0] + v[1]) / d3
    mu = (C / d3 + 1.0) / denominator
    x = tuple(float(mu * vi) for vi in v)
    solution = ModuliSolution(weights, x, float(C), float(mu), tuple(float(vi) for vi in v))
    margins = solution.margins()
    if not solution.valid:
        raise DomainError(f"scaled Perron vector fails the system: margins {margins}")
    logger.debug("moduli for %s with C=%g: mu=%.6g, min margin %.3g", weights, C, mu, min(margins.values()))
    return solution


# =============================================================================
# LEVELS
# =============================================================================

def modulus_from_levels(outer: float, inner: float) -> float:
    """Modulus (1/2π)·log(L/L′) of the annulus between two nested equipotentials."""
    if not 0 < inner < outer:
        raise ValueError(f"levels must satisfy 0 < inner < outer, got {inner}, {outer}")
    return math.log(outer / inner) / (2.0 * math.pi)


def levels_from_moduli(sol: ModuliSolution, extra_margin: float = LEVEL_MARGIN,
                       gap: float = 1.0) -> EquipotentialLevels:
    """
    Equipotential levels realizing a solution.

    L(β_k) = exp(−2πx_k) in basin k for k = 0, 1, 2; β₃⁺ sits at modulus
    ``extra_margin`` inside β₀ and β₃⁻ at modulus x₃ inside β₃⁺. The
    preimage β₀,₁ of β₁ in basin 0 has modulus x₁/d₀.

    ``gap`` is the lower bound demanded of mod A(β₀, β₃⁺); any positive
    value works for the construction, 1 is the customary choice.
    """
    if gap <= 0:
        raise ValueError(f"gap must be positive, got {gap}")
    if extra_margin <= gap:
        raise ValueError(f"extra_margin must exceed {gap}, got {extra_margin}")
    x0, x1, x2, x3 = sol.x
    two_pi = 2.0 * math.pi
    beta0 = math.exp(-two_pi * x0)
    beta3_plus = beta0 * math.exp(-two_pi * extra_margin)
    levels = {
        "beta0": beta0,
        "beta1": math.exp(-two_pi * x1),
        "beta2": math.exp(-two_pi * x2),
        "beta3+": beta3_plus,
        "beta3-": beta3_plus * math.exp(-two_pi * x3),
        "beta0,1": math.exp(-two_pi * x1 / sol.weights[0]),
    }
    basins = {"beta0": 0, "beta1": 1, "beta2": 2, "beta3+": 0, "beta3-": 0, "beta0,1": 0}
    return EquipotentialLevels(levels, basins, gap)


def moduli_from_levels(levels: EquipotentialLevels) -> Tuple[float, float, float, float]:
    """Recover (x₀, x₁, x₂, x₃) from the levels."""
    return (
        -math.log(levels["beta0"]) / (2.0 * math.pi),
        -math.log(levels["beta1"]) / (2.0 * math.pi),
        -math.log(levels["beta2"]) / (2.0 * math.pi),
        levels.modulus("beta3+", "beta3-"),
    )


# =============================================================================
# ANNULUS-TO-DISK COVERING
# =============================================================================

def annulus_disk_bound(n: int, n_prime: int) -> Tuple[float, float]:
    """
    |λ| solving 2|λ|^{n/(n+n′)} = 4/e^π, and the modulus bound ½(1/n + 1/n′).

    Returns:
        (|λ|, bound) with |λ| = (2/e^π)^{(n+n′)/n}
    """
    if n < 1 or n_prime < 1:
        raise ValueError(f"n and n' must be >= 1, got ({n}, {n_prime})")
    lam = (2.0 / math.exp(math.pi)) ** ((n + n_prime) / n)
    return lam, 0.5 * (1.0 / n + 1.0 / n_prime)


def critical_value_constant(n: int, n_prime: int) -> float:
    """(n′/n)^{n/(n+n′)} + (n/n′)^{n′/(n+n′)}, at most 2 by the AM-GM inequality."""
    total = n + n_prime
    return (n_prime / n) ** (n / total) + (n / n_prime) ** (n_prime / total)


@dataclass
class AnnulusReport:
    """Sampled evidence that g(z) = zⁿ + λ/z^{n′} maps the annulus onto a disk."""
    n: int
    n_prime: int
    lam: float
    inner_circle_max: float
    critical_values_max: float
    outer_circles_min: float
    analytic_outer_bound: float
    critical_constant: float

    @property
    def circle_ok(self) -> bool:
        return self.inner_circle_max < 1.0

    @property
    def critical_ok(self) -> bool:
        return self.critical_values_max < 1.0

    @property
    def boundary_ok(self) -> bool:
        return self.outer_circles_min > 1.0

    @property
    def passed(self) -> bool:
        return self.circle_ok and self.critical_ok and self.boundary_ok

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "n_prime": self.n_prime,
            "lambda": self.lam,
            "circle_max": self.inner_circle_max,
            "critical_values_max": self.critical_values_max,
            "boundary_min": self.outer_circles_min,
            "analytic_boundary_bound": self.analytic_outer_bound,
            "critical_constant": self.critical_constant,
            "passed": {
                "circle": self.circle_ok,
                "critical_values": self.critical_ok,
                "boundary": self.boundary_ok,
            },
        }


def _g(z: np.ndarray, n: int, n_prime: int, lam: float) -> np.ndarray:
    return z ** n + lam / z ** n_prime


def _circle(radius: float, samples: int) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(samples) / samples)


def mcmullen_annulus_check(n: int, n_prime: int, samples: int = ANNULUS_SAMPLES) -> AnnulusReport:
    """
    With λ from annulus_disk_bound and ρ = λ^{1/(n+n′)}:

    - |g| ≤ 2λ^{n/(n+n′)} < 1 on |z| = ρ,
    - the n+n′ critical points (n′/n)^{1/(n+n′)}ρ·e^{2πik/(n+n′)} have |g(c)| < 1,
    - |g| > 1 on |z| = R^{−1/n′}ρ and |z| = R^{1/n}ρ, R = e^π.

    On the bounding circles one term of g has modulus exactly 2 and the
    other at most 2e^{−π(1+n/n′)} or 2e^{−π(1+n′/n)}, which gives the
    analytic lower bound reported alongside the samples.
    """
    lam, _ = annulus_disk_bound(n, n_prime)
    total = n + n_prime
    rho = lam ** (1.0 / total)
    circle = np.abs(_g(_circle(rho, samples), n, n_prime, lam)).max()

    k = np.arange(total)
    critical = (n_prime / n) ** (1.0 / total) * rho * np.exp(2j * np.pi * k / total)
    critical_values = np.abs(_g(critical, n, n_prime, lam)).max()

    inner = _circle(ANNULUS_R ** (-1.0 / n_prime) * rho, samples)
    outer = _circle(ANNULUS_R ** (1.0 / n) * rho, samples)
    boundary = min(np.abs(_g(inner, n, n_prime, lam)).min(), np.abs(_g(outer, n, n_prime, lam)).min())
    analytic = 2.0 - 2.0 * math.exp(-math.pi * (1.0 + min(n / n_prime, n_prime / n)))

    report = AnnulusReport(
        n=n,
        n_prime=n_prime,
        lam=lam,
        inner_circle_max=float(circle),
        critical_values_max=float(critical_values),
        outer_circles_min=float(boundary),
        analytic_outer_bound=analytic,
        critical_constant=critical_value_constant(n, n_prime),
    )
    logger.debug("annulus check (%d, %d): %s", n, n_prime, report.to_dict()["passed"])
    return report


def annulus_table(max_n: int = 4) -> List[AnnulusReport]:
    return [mcmullen_annulus_check(n, m) for n in range(1, max_n + 1) for m in range(1, max_n + 1)]


# =============================================================================
# SEPARATING QUASICIRCLE
# =============================================================================

def separating_circle_bound(eps: float, C: float) -> float:
    """
    (1/(2√ε))·log(1/(1 − Cε)), which behaves like (C/2)√ε as ε → 0.

    Raises:
        DomainError: ε ≤ 0 or ε ≥ 1/C.
    """
    if C <= 0:
        raise DomainError(f"C must be positive, got {C}")
    if eps <= 0 or C * eps >= 1.0:
        raise DomainError(f"epsilon must lie in (0, 1/C) = (0, {1.0 / C:.6g}), got {eps}")
    return -math.log1p(-C * eps) / (2.0 * math.sqrt(eps))
