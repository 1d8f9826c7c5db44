"""
Weighted Dynamical Trees - Transition Matrices and Obstructions

A weighted dynamical tree is kept abstractly: a list of edges, the set of
edges each one maps onto, and a positive integer weight per edge. Its
transition matrix has m[i][j] = 1/w(e_i) when e_j lies in the image of e_i.
The tree is unobstructed when the leading eigenvalue of that matrix is < 1.

The three built-in trees:
    HQ  two edges, each mapping onto both               weights (d∞, d₀)
    HP  e₀→e₁, e₁→e₂, e₂→e₀∪e₃, e₃→e₀∪e₁                 weights (d₀, d₁, d₂, d₃)
    HR  cyclic e₀→e₁→e₂→e₀                               weights (d₀, d₁, d₂)

Their obstruction criteria are decided exactly with Fraction arithmetic;
numeric power iteration supplies the eigenvalue and the Perron vector.
"""

import itertools
import json
import logging
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import POWER_MAX_ITER, POWER_SHIFT, POWER_TOL, UNOBSTRUCTED_TOL
from .errors import DomainError, NumericalFailure
from .numerics import Polynomial, polynomial_roots

logger = logging.getLogger(__name__)

TREE_KINDS = ("HP", "HQ", "HR")

_BUILTIN_IMAGES: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "HQ": ((0, 1), (0, 1)),
    "HP": ((1,), (2,), (0, 3), (0, 1)),
    "HR": ((1,), (2,), (0,)),
}


@dataclass(frozen=True)
class WeightedDynamicalTree:
    """
    Index-based weighted dynamical tree.

    edge_images[i] lists the edges covered by the image of edge i; weights[i]
    is the local degree carried by edge i. ``kind`` names a built-in tree,
    which unlocks its exact obstruction criterion.
    """
    edge_images: Tuple[Tuple[int, ...], ...]
    weights: Tuple[int, ...]
    vertex_count: Optional[int] = None
    kind: Optional[str] = None

    def __post_init__(self):
        images = tuple(tuple(sorted(set(int(j) for j in img))) for img in self.edge_images)
        object.__setattr__(self, "edge_images", images)
        n = len(images)
        if n == 0:
            raise ValueError("a tree needs at least one edge")
        if len(self.weights) != n:
            raise ValueError(f"{n} edges but {len(self.weights)} weights")
        for w in self.weights:
            if isinstance(w, bool) or not isinstance(w, numbers.Integral) or w < 1:
                raise ValueError(f"weights must be integers >= 1, got {w!r}")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        for i, img in enumerate(images):
            if not img:
                raise ValueError(f"edge {i} has an empty image")
            if img[0] < 0 or img[-1] >= n:
                raise ValueError(f"edge {i} maps outside the edge set: {img}")
        if self.vertex_count is None:
            object.__setattr__(self, "vertex_count", n + 1)
        elif self.vertex_count != n + 1:
            raise ValueError(f"a tree with {n} edges has {n + 1} vertices, not {self.vertex_count}")
        if self.kind is not None and self.kind not in TREE_KINDS:
            raise ValueError(f"unknown tree kind {self.kind!r}")

    @property
    def edge_count(self) -> int:
        return len(self.edge_images)


@dataclass(frozen=True)
class TransitionMatrix:
    """Square nonnegative matrix with entries in [0, 1]."""
    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass
class SpectralReport:
    """Leading eigenvalue, Perron vector and the obstruction verdict."""
    leading_eigenvalue: float
    perron_vector: List[float]
    unobstructed: bool
    iterations: int = 0
    exact_criterion: Optional[Fraction] = None

    def to_dict(self) -> Dict:
        out = {
            "leading_eigenvalue": self.leading_eigenvalue,
            "perron_vector": list(self.perron_vector),
            "unobstructed": self.unobstructed,
            "iterations": self.iterations,
        }
        if self.exact_criterion is not None:
            out["exact_criterion"] = str(self.exact_criterion)
        return out


# =============================================================================
# CONSTRUCTION
# =============================================================================

def builtin_trees(kind: str, weights: Sequence[int]) -> WeightedDynamicalTree:
    """
    One of the built-in trees HP, HQ, HR with the given weights.

    Raises:
        ValueError: unknown kind, or weight count not matching the edge count
            (HQ: 2, HP: 4, HR: 3).
    """
    kind = kind.upper()
    if kind not in _BUILTIN_IMAGES:
        raise ValueError(f"unknown tree kind {kind!r}; expected one of {', '.join(TREE_KINDS)}")
    images = _BUILTIN_IMAGES[kind]
    if len(weights) != len(images):
        raise ValueError(f"{kind} takes {len(images)} weights, got {len(weights)}")
    return WeightedDynamicalTree(images, tuple(weights), kind=kind)


def tree_to_json(tree: WeightedDynamicalTree) -> str:
    doc = {
        "edges": tree.edge_count,
        "images": [list(img) for img in tree.edge_images],
        "weights": list(tree.weights),
    }
    if tree.kind is not None:
        doc["kind"] = tree.kind
    return json.dumps(doc)


def tree_from_json(source: Union[str, Dict]) -> WeightedDynamicalTree:
    """Parse {"edges": N, "images": [[...]], "weights": [...]} (optional "kind")."""
    doc = json.loads(source) if isinstance(source, str) else dict(source)
    unknown = set(doc) - {"edges", "images", "weights", "kind"}
    if unknown:
        raise ValueError(f"unknown tree keys: {sorted(unknown)}")
    missing = {"images", "weights"} - set(doc)
    if missing:
        raise ValueError(f"missing tree keys: {sorted(missing)}")
    images = doc["images"]
    if doc.get("edges", len(images)) != len(images):
        raise ValueError(f"'edges' is {doc['edges']} but {len(images)} image lists given")
    tree = WeightedDynamicalTree(tuple(tuple(img) for img in images), tuple(doc["weights"]),
                                 kind=doc.get("kind"))
    # a declared kind must have the built-in shape
    if tree.kind is not None and builtin_trees(tree.kind, tree.weights).edge_images != tree.edge_images:
        raise ValueError(f"images do not match the built-in {tree.kind} tree")
    return tree


# =============================================================================
# SPECTRAL
# =============================================================================

def transition_matrix(tree: WeightedDynamicalTree) -> TransitionMatrix:
    n = tree.edge_count
    m = np.zeros((n, n))
    for i, img in enumerate(tree.edge_images):
        m[i, list(img)] = 1.0 / tree.weights[i]
    return TransitionMatrix(m)


def _as_array(m: Union[TransitionMatrix, np.ndarray]) -> np.ndarray:
    arr = m.entries if isinstance(m, TransitionMatrix) else np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {arr.shape}")
    if (arr < 0).any():
        raise ValueError("transition matrix must be nonnegative")
    return arr


def power_iteration(m: Union[TransitionMatrix, np.ndarray],
                    shift: float = POWER_SHIFT,
                    tol: float = POWER_TOL,
                    max_iter: int = POWER_MAX_ITER) -> Tuple[float, np.ndarray, int]:
    """
    Leading eigenvalue and Perron vector of a nonnegative matrix.

    Iterates on M + shift·I with 1-norm normalization, so the eigenvalue
    estimate of a step is the sum of the new vector before normalization.
    The shift moves the rotated peripheral eigenvalues of cyclic matrices
    strictly inside the spectral radius; it is subtracted at the end.

    Returns:
        (eigenvalue, unit 1-norm eigenvector, iterations)
    """
    arr = _as_array(m)
    n = arr.shape[0]
    a = arr + shift * np.eye(n)
    x = np.full(n, 1.0 / n)
    estimate = None
    for iteration in range(1, max_iter + 1):
        y = a @ x
        total = y.sum()
        if total == 0:
            # only reachable without a shift, on a nilpotent matrix
            return 0.0, x, iteration
        new_x = y / total
        step_x = np.max(np.abs(new_x - x))
        converged = estimate is not None and abs(total - estimate) < tol and step_x < tol
        x, estimate = new_x, total
        if converged:
            logger.debug("power iteration converged in %d steps: %.15g", iteration, total - shift)
            return float(total - shift), x, iteration
    raise NumericalFailure(
        f"power iteration did not converge in {max_iter} steps",
        best_iterates=[float(estimate - shift), x.tolist()],
    )


def leading_eigenvalue(m: Union[TransitionMatrix, np.ndarray]) -> float:
    """Spectral radius of a nonnegative square matrix, clamped at 0."""
    value, _, _ = power_iteration(m)
    return max(value, 0.0)


def check_h1(d0: int, d1: int, d2: int) -> Tuple[bool, Optional[int]]:
    """
    Integrality condition on the three weights of the tripod.

    d̂ = (d₀+d₁+d₂−1)/2 must be an integer ≥ 2 and ≥ max(d₀, d₁, d₂).

    Returns:
        (satisfied, d̂), d̂ being None when the sum is not even.
    """
    for d in (d0, d1, d2):
        if d < 1:
            raise ValueError(f"weights must be >= 1, got {d}")
    total = d0 + d1 + d2 - 1
    if total % 2:
        return False, None
    dhat = total // 2
    return dhat >= 2 and dhat >= max(d0, d1, d2), dhat


def map_degree(d0: int, d1: int, d2: int, d3: int) -> int:
    """Degree d̂ + d₃ of the map realizing HP with these weights."""
    ok, dhat = check_h1(d0, d1, d2)
    if not ok:
        raise DomainError(f"weights ({d0}, {d1}, {d2}) fail the integrality condition")
    return dhat + d3


def characteristic_polynomial_hp(d0: int, d1: int, d2: int, d3: int) -> Polynomial:
    """X⁴ − (1/(d₀d₁d₂) + 1/(d₁d₂d₃))X − 1/(d₀d₁d₂d₃), lowest degree first."""
    linear = 1.0 / (d0 * d1 * d2) + 1.0 / (d1 * d2 * d3)
    constant = 1.0 / (d0 * d1 * d2 * d3)
    return Polynomial((-constant, -linear, 0.0, 0.0, 1.0))


def hp_characteristic_root(d0: int, d1: int, d2: int, d3: int) -> float:
    """Largest real root of the HP characteristic polynomial."""
    roots = polynomial_roots(characteristic_polynomial_hp(d0, d1, d2, d3))
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * (1.0 + abs(r))]
    return max(real)


def exact_criterion(tree: WeightedDynamicalTree) -> Optional[Fraction]:
    """
    A rational number that is positive exactly when the built-in tree is
    unobstructed, or None for trees without a closed form.

    HP: P(1) = 1 − 1/(d₀d₁d₂) − 1/(d₁d₂d₃) − 1/(d₀d₁d₂d₃), since the
        characteristic polynomial has a single positive root.
    HQ: 1 − 1/d∞ − 1/d₀.
    HR: 1 − 1/(d₀d₁d₂), the eigenvalue being the cube root of the product.
    """
    w = tree.weights
    if tree.kind == "HP":
        d0, d1, d2, d3 = w
        return 1 - Fraction(1, d0 * d1 * d2) - Fraction(1, d1 * d2 * d3) - Fraction(1, d0 * d1 * d2 * d3)
    if tree.kind == "HQ":
        return 1 - Fraction(1, w[0]) - Fraction(1, w[1])
    if tree.kind == "HR":
        return 1 - Fraction(1, w[0] * w[1] * w[2])
    return None


def is_unobstructed(tree: WeightedDynamicalTree) -> SpectralReport:
    """
    Full spectral report of a tree.

    The verdict comes from the exact criterion for built-in trees and from
    the numeric eigenvalue (with UNOBSTRUCTED_TOL) otherwise. When the tree
    is unobstructed the Perron vector V is checked against the unshifted
    matrix: MV < V entrywise.
    """
    m = transition_matrix(tree)
    value, vector, iterations = power_iteration(m)
    value = max(value, 0.0)
    criterion = exact_criterion(tree)
    if criterion is not None:
        unobstructed = criterion > 0
    else:
        unobstructed = value < 1.0 - UNOBSTRUCTED_TOL
    if unobstructed:
        image = m.entries @ vector
        if not np.all(image < vector):
            raise NumericalFailure(
                "Perron vector does not satisfy MV < V for an unobstructed tree",
                best_iterates=[value, vector.tolist()],
            )
    return SpectralReport(
        leading_eigenvalue=value,
        perron_vector=vector.tolist(),
        unobstructed=unobstructed,
        iterations=iterations,
        exact_criterion=criterion,
    )


def degree_three_weights(max_weight: int = 6) -> List[Tuple[int, int, int, int]]:
    """HP weight tuples (entries ≤ max_weight) meeting both conditions with map degree 3."""
    found = []
    for weights in itertools.product(range(1, max_weight + 1), repeat=4):
        ok, dhat = check_h1(*weights[:3])
        if not ok or dhat + weights[3] != 3:
            continue
        if exact_criterion(builtin_trees("HP", weights)) > 0:
            found.append(weights)
    return found
