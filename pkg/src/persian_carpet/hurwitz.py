"""
Hurwitz realizability of branch data.

Branch data of degree d over n branch values is realizable by a branched
covering of the sphere exactly when there are permutations σ₁, …, σ_n in
S_d with the prescribed cycle types, product σ₁σ₂…σ_n = 1, generating a
transitive group. Products are read left to right: in σ₁σ₂, σ₁ is
performed first. The opposite convention breaks the cycle-length claim of
the explicit three-point construction.
"""

import itertools
import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .constants import HURWITZ_MAX_DEGREE
from .errors import BudgetError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..d}; ``images[i - 1]`` is σ(i)."""
    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(1, d + 1)))

    @classmethod
    def from_cycles(cls, d: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(1, d + 1))
        seen = set()
        for cycle in cycles:
            for k, point in enumerate(cycle):
                if point in seen or not 1 <= point <= d:
                    raise ValueError(f"bad cycle {tuple(cycle)} for degree {d}")
                seen.add(point)
                images[point - 1] = cycle[(k + 1) % len(cycle)]
        return cls(tuple(images))

    @classmethod
    def parse(cls, d: int, text: str) -> "Permutation":
        """Read cycle notation such as ``(1,2,3)(4,5)``; ``()`` is the identity."""
        cycles = []
        for body in re.findall(r"\(([^()]*)\)", text):
            if body.strip():
                cycles.append([int(p) for p in body.split(",")])
        return cls.from_cycles(d, cycles)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """self performed first, then other."""
        if other.degree != self.degree:
            raise ValueError("permutations of different degrees")
        return Permutation(tuple(other(self(i)) for i in range(1, self.degree + 1)))

    def inverse(self) -> "Permutation":
        images = [0] * self.degree
        for i, image in enumerate(self.images, start=1):
            images[image - 1] = i
        return Permutation(tuple(images))

    @property
    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.degree + 1))

    def cycles(self) -> List[Tuple[int, ...]]:
        """All cycles, fixed points included, each starting at its smallest point."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self(start)
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self(nxt)
            out.append(tuple(cycle))
        return out

    def cycle_type(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def cycle_notation(self) -> str:
        parts = ["(" + ",".join(str(p) for p in c) + ")" for c in self.cycles() if len(c) > 1]
        return "".join(parts) or "()"

    def __str__(self) -> str:
        return self.cycle_notation()


@dataclass(frozen=True)
class BranchData:
    """
    Abstract branch data: degree d and one row of local degrees per branch
    value. Each row sums to d and has an entry >= 2.
    """
    degree: int
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError(f"degree must be >= 2, got {self.degree}")
        rows = tuple(tuple(sorted((int(x) for x in row), reverse=True)) for row in self.rows)
        for row in rows:
            if not row or min(row) < 1:
                raise ValueError(f"local degrees must be positive: {row}")
            if sum(row) != self.degree:
                raise ValueError(f"row {row} does not sum to the degree {self.degree}")
            if max(row) < 2:
                raise ValueError(f"row {row} has no branching")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def parse(cls, degree: int, text: str) -> "BranchData":
        """Rows separated by ';', entries by ',': ``"3;2,1;2,1"``."""
        rows = tuple(tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip())
        return cls(degree, rows)

    @classmethod
    def simple(cls, d: int, d11: int, d21: int, d31: int) -> "BranchData":
        """Three rows of the form (d_i1, 1, ..., 1)."""
        return cls(d, tuple((di,) + (1,) * (d - di) for di in (d11, d21, d31)))

    def euler_defect(self) -> int:
        """Σ(d_ij − 1), which is 2d − 2 for a covering of the sphere by the sphere."""
        return sum(x - 1 for row in self.rows for x in row)


@dataclass
class Realization:
    """Witnessing permutations for a piece of branch data."""
    degree: int
    permutations: Tuple[Permutation, ...]
    model: str

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "model": self.model,
            "permutations": [p.cycle_notation() for p in self.permutations],
        }


# =============================================================================
# THREE BRANCH VALUES
# =============================================================================

def _check_simple_range(d: int, *local: int) -> None:
    for di in local:
        if not 2 <= di <= d:
            raise ValueError(f"local degree {di} outside 2..{d}")


def check_h1prime(d: int, d11: int, d21: int, d31: int) -> bool:
    """True iff d = (d₁₁ + d₂₁ + d₃₁ − 1)/2 exactly."""
    _check_simple_range(d, d11, d21, d31)
    return 2 * d == d11 + d21 + d31 - 1


def construct_permutations(d: int, d11: int, d21: int, d31: int) -> Tuple[Permutation, Permutation, Permutation]:
    """
    σ₁ = (1, 2, …, d₁₁), σ₂ = (d, d−1, …, d−d₂₁+1) and σ₃ = (σ₁σ₂)⁻¹.

    σ₁σ₂ is the single cycle (1, …, d−d₂₁, d, d−1, …, d₁₁) of length d₃₁.
    """
    if not check_h1prime(d, d11, d21, d31):
        raise DomainError(f"({d}; {d11}, {d21}, {d31}) fails d = (d11 + d21 + d31 - 1)/2")
    sigma1 = Permutation.from_cycles(d, [list(range(1, d11 + 1))])
    sigma2 = Permutation.from_cycles(d, [list(range(d, d - d21, -1))])
    sigma3 = (sigma1 * sigma2).inverse()
    return sigma1, sigma2, sigma3


def realize_simple(d: int, d11: int, d21: int, d31: Optional[int] = None) -> Realization:
    """
    Permutations for simple data over two or three branch values.

    With no third branch value (or d₃₁ = 1) the only realizable shape is
    d₁₁ = d₂₁ = d, the power map z ↦ z^d, realized by a d-cycle and its
    inverse.
    """
    if d31 is None or d31 == 1:
        if d11 != d or d21 != d:
            raise DomainError(f"two branch values need full branching: got ({d11}, {d21}) in degree {d}")
        cycle = Permutation.from_cycles(d, [list(range(1, d + 1))])
        return Realization(d, (cycle, cycle.inverse()), "z^d")
    return Realization(d, construct_permutations(d, d11, d21, d31), "three-point")


# =============================================================================
# VERIFICATION AND SEARCH
# =============================================================================

def _is_transitive(perms: Sequence[Permutation]) -> bool:
    d = perms[0].degree
    orbit = {1}
    frontier = [1]
    while frontier:
        point = frontier.pop()
        for p in perms:
            image = p(point)
            if image not in orbit:
                orbit.add(image)
                frontier.append(image)
    return len(orbit) == d


def verify_hurwitz_conditions(perms: Sequence[Permutation], data: BranchData) -> bool:
    """
    Cycle types match the rows, σ₁σ₂…σ_n = 1, the generated group is
    transitive and the Riemann–Hurwitz count is 2d − 2 (the covering
    surface is a sphere).
    """
    if len(perms) != len(data.rows):
        raise ValueError(f"{len(perms)} permutations for {len(data.rows)} rows")
    if data.euler_defect() != 2 * data.degree - 2:
        return False
    if any(p.degree != data.degree for p in perms):
        return False
    if any(p.cycle_type() != row for p, row in zip(perms, data.rows)):
        return False
    product = perms[0]
    for p in perms[1:]:
        product = product * p
    if not product.is_identity:
        return False
    return _is_transitive(perms)


def canonical_permutation(d: int, cycle_type: Sequence[int]) -> Permutation:
    """Consecutive cycles (1..c₁)(c₁+1..c₁+c₂)… for a cycle type."""
    cycles = []
    start = 1
    for length in cycle_type:
        cycles.append(list(range(start, start + length)))
        start += length
    return Permutation.from_cycles(d, cycles)


@lru_cache(maxsize=None)
def _permutations_by_cycle_type(d: int) -> Dict[Tuple[int, ...], Tuple[Permutation, ...]]:
    buckets = defaultdict(list)
    for images in itertools.permutations(range(1, d + 1)):
        p = Permutation(images)
        buckets[p.cycle_type()].append(p)
    logger.debug("enumerated %d permutations of degree %d", sum(len(b) for b in buckets.values()), d)
    return {k: tuple(v) for k, v in buckets.items()}


def find_realization(data: BranchData) -> Optional[Tuple[Permutation, ...]]:
    """
    Exhaustive search for witnessing permutations.

    σ₁ is fixed to the canonical representative of its cycle type
    (realizability is invariant under simultaneous conjugation); σ₂ … σ_{n−1}
    range over their cycle-type classes and σ_n is forced to be the inverse
    of the running product. Data whose Riemann–Hurwitz count differs from
    2d − 2 can only be realized on a surface of higher genus and is rejected
    up front.

    Raises:
        BudgetError: d exceeds HURWITZ_MAX_DEGREE.
    """
    d = data.degree
    if d > HURWITZ_MAX_DEGREE:
        raise BudgetError(f"brute force is limited to degree {HURWITZ_MAX_DEGREE}, got {d}")
    if data.euler_defect() != 2 * d - 2:
        logger.debug("branch data %s has Riemann-Hurwitz defect %d != %d", data.rows, data.euler_defect(), 2 * d - 2)
        return None
    if len(data.rows) < 2:
        return None
    classes = _permutations_by_cycle_type(d)
    first = canonical_permutation(d, data.rows[0])
    middle = [classes.get(row, ()) for row in data.rows[1:-1]]
    last_type = data.rows[-1]
    for choice in itertools.product(*middle):
        product = first
        for p in choice:
            product = product * p
        closing = product.inverse()
        if closing.cycle_type() != last_type:
            continue
        perms = (first,) + tuple(choice) + (closing,)
        if _is_transitive(perms):
            return perms
    return None


def brute_force_realizable(data: BranchData) -> bool:
    return find_realization(data) is not None
