"""
Symbolic dynamics of the Julia-component exchange.

Components are coded by sequences over {0, 1, 2, 3} in which consecutive
digits form one of the allowed pairs (0,1) (1,2) (2,0) (2,3) (3,0) (3,1).
Three sequences, the rotations of (0,1,2)^∞, form S_α, and two sequences
sharing a prefix of length n whose n-th shifts both lie in S_α are
identified. Words are handled in preperiod + period form so this relation
is decidable.

The interval model realizes the same shift on the line: base intervals
I_i = [4i, 4i+1], and an allowed pair (i, j) gets a sub-interval I_{i,j}
of length 1/3 inside I_i mapped affinely (slope 3) onto I_j.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    ALLOWED_PAIRS,
    ALPHA_PERIOD,
    ALPHABET_SIZE,
    INTERVAL_SPACING,
    MAX_WORD_LENGTH,
    SUBINTERVAL_LENGTH,
)
from .errors import BudgetError

logger = logging.getLogger(__name__)

Digits = Tuple[int, ...]


@dataclass(frozen=True)
class Subshift:
    alphabet_size: int
    allowed: FrozenSet[Tuple[int, int]]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.alphabet_size, self.alphabet_size), dtype=np.int64)
        for i, j in self.allowed:
            a[i, j] = 1
        return a

    def successors(self, digit: int) -> List[int]:
        return sorted(j for i, j in self.allowed if i == digit)

    def is_admissible(self, digits: Sequence[int]) -> bool:
        if any(not 0 <= d < self.alphabet_size for d in digits):
            return False
        return all((a, b) in self.allowed for a, b in zip(digits, digits[1:]))


SUBSHIFT = Subshift(ALPHABET_SIZE, ALLOWED_PAIRS)
ALPHA_ROTATIONS = tuple(ALPHA_PERIOD[k:] + ALPHA_PERIOD[:k] for k in range(len(ALPHA_PERIOD)))


def _primitive_period(period: Digits) -> Digits:
    n = len(period)
    for length in range(1, n + 1):
        if n % length == 0 and period[:length] * (n // length) == period:
            return period[:length]
    return period


@dataclass(frozen=True)
class Word:
    """
    Digit sequence preperiod · period^∞; an empty period makes a finite word.

    Every adjacent pair must be allowed, including the junction between
    preperiod and period and the wrap-around of the period.
    """
    preperiod: Digits = ()
    period: Digits = ()

    def __post_init__(self):
        pre = tuple(int(d) for d in self.preperiod)
        per = tuple(int(d) for d in self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)
        if not pre and not per:
            raise ValueError("empty word")
        chain = pre + per + per[:1]
        if not SUBSHIFT.is_admissible(chain):
            raise ValueError(f"inadmissible word {pre}·{per}^∞")

    @classmethod
    def finite(cls, digits: Sequence[int]) -> "Word":
        return cls(tuple(digits), ())

    @classmethod
    def parse(cls, text: str) -> "Word":
        """``"3.012"`` is 3·(0,1,2)^∞; ``"012"`` alone is finite, ``".012"`` purely periodic."""
        text = text.strip()
        if "." in text:
            pre, per = text.split(".", 1)
        else:
            pre, per = text, ""
        return cls(tuple(int(c) for c in pre), tuple(int(c) for c in per))

    @property
    def is_finite(self) -> bool:
        return not self.period

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("infinite word has no length")
        return len(self.preperiod)

    def digit(self, k: int) -> int:
        if k < len(self.preperiod):
            return self.preperiod[k]
        if self.is_finite:
            raise IndexError(f"finite word of length {len(self.preperiod)} has no digit {k}")
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def digits(self, n: int) -> Digits:
        return tuple(self.digit(k) for k in range(n))

    def normalized(self) -> "Word":
        """Shortest preperiod and primitive period describing the same sequence."""
        if self.is_finite:
            return self
        pre = list(self.preperiod)
        per = _primitive_period(self.period)
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = per[-1:] + per[:-1]
        return Word(tuple(pre), per)

    def __str__(self) -> str:
        pre = "".join(map(str, self.preperiod))
        if self.is_finite:
            return pre
        return pre + "." + "".join(map(str, self.period))


def shift(word: Word) -> Word:
    """σ: drop the first digit."""
    if word.preperiod:
        if word.is_finite and len(word.preperiod) == 1:
            raise ValueError("shifting a one-digit finite word leaves nothing")
        return Word(word.preperiod[1:], word.period)
    return Word((), word.period[1:] + word.period[:1])


def in_s_alpha(word: Word) -> bool:
    w = word.normalized()
    return not w.is_finite and not w.preperiod and w.period in ALPHA_ROTATIONS


# =============================================================================
# ENUMERATION
# =============================================================================

def adjacency_matrix() -> np.ndarray:
    return SUBSHIFT.adjacency_matrix()


def admissible_words(n: int) -> List[Digits]:
    """
    All admissible digit strings of length n, lexicographically ordered.

    Raises:
        BudgetError: n outside 1..MAX_WORD_LENGTH.
    """
    if not 1 <= n <= MAX_WORD_LENGTH:
        raise BudgetError(f"word length must be in 1..{MAX_WORD_LENGTH}, got {n}")
    words: List[Digits] = [(d,) for d in range(SUBSHIFT.alphabet_size)]
    for _ in range(n - 1):
        words = [w + (j,) for w in words for j in SUBSHIFT.successors(w[-1])]
    return words


def admissible_count(n: int) -> int:
    """Sum of the entries of A^{n−1}."""
    a = adjacency_matrix()
    return int(np.linalg.matrix_power(a, n - 1).sum())


# =============================================================================
# METRIC AND QUOTIENT
# =============================================================================

@dataclass(frozen=True)
class DistanceBound:
    """Truncated sum ``lo`` and an upper bound ``hi`` including the tail."""
    lo: float
    hi: float

    @property
    def value(self) -> float:
        return self.lo


def word_distance(s: Word, t: Word, depth: int) -> DistanceBound:
    """
    d(s, t) = Σ_k |s_k − t_k| / 4^k, truncated after ``depth`` digits.

    The omitted tail is at most Σ_{k ≥ depth} 3/4^k = 4^{1−depth}.
    """
    total = 0.0
    for k in range(depth):
        total += abs(s.digit(k) - t.digit(k)) / 4.0 ** k
    return DistanceBound(total, total + 4.0 ** (1 - depth))


def exact_distance(s: Word, t: Word) -> Fraction:
    """Exact d(s, t) for two infinite eventually periodic words (geometric series)."""
    if s.is_finite or t.is_finite:
        raise ValueError("exact distance needs infinite words")
    head = max(len(s.preperiod), len(t.preperiod))
    cycle = len(s.period) * len(t.period) // math.gcd(len(s.period), len(t.period))
    front = sum(Fraction(abs(s.digit(k) - t.digit(k)), 4 ** k) for k in range(head))
    loop = sum(Fraction(abs(s.digit(k) - t.digit(k)), 4 ** k) for k in range(head, head + cycle))
    return front + loop / (1 - Fraction(1, 4 ** cycle))


def _first_difference(s: Word, t: Word) -> Optional[int]:
    bound = max(len(s.preperiod), len(t.preperiod)) + len(s.period) * len(t.period)
    for k in range(bound):
        if s.digit(k) != t.digit(k):
            return k
    return None


def equivalence_witness(s: Word, t: Word) -> Optional[int]:
    """
    Smallest n such that s and t share their first n digits and both
    σⁿ(s), σⁿ(t) lie in S_α, or None.

    After normalization σⁿ(s) ∈ S_α exactly when n ≥ len(preperiod) and the
    period is a rotation of (0,1,2), so only n = max of the preperiod
    lengths needs checking.
    """
    if s.is_finite or t.is_finite:
        raise ValueError("equivalence is defined on infinite words")
    s, t = s.normalized(), t.normalized()
    if s.period not in ALPHA_ROTATIONS or t.period not in ALPHA_ROTATIONS:
        return None
    n = max(len(s.preperiod), len(t.preperiod))
    if s.digits(n) != t.digits(n):
        return None
    return n


def equivalent(s: Word, t: Word) -> bool:
    """The identification ∼ (equal sequences are always equivalent)."""
    if s.is_finite or t.is_finite:
        raise ValueError("equivalence is defined on infinite words")
    if _first_difference(s.normalized(), t.normalized()) is None:
        return True
    return equivalence_witness(s, t) is not None


def collapsed_prefixes(n: int) -> List[Digits]:
    """
    Prefixes p of length n that open a collapsed class of depth exactly n:
    p followed by some rotation of (0,1,2)^∞ is admissible and cannot be
    written with a shorter preperiod.
    """
    if n == 0:
        return [()]
    found = []
    for prefix in admissible_words(n):
        for start in SUBSHIFT.successors(prefix[-1]):
            if start >= len(ALPHA_PERIOD):
                continue
            tail = ALPHA_ROTATIONS[ALPHA_PERIOD.index(start)]
            if len(Word(prefix, tail).normalized().preperiod) == n:
                found.append(prefix)
                break
    return found


# =============================================================================
# INTERVAL MODEL
# =============================================================================

Interval = Tuple[float, float]


@dataclass(frozen=True)
class IntervalModel:
    """
    Expanding interval map realizing the shift.

    ``base[i]`` is I_i; ``pieces[(i, j)]`` is I_{i,j} ⊂ I_i, mapped by the
    increasing affine bijection onto I_j.
    """
    base: Tuple[Interval, ...]
    pieces: Dict[Tuple[int, int], Interval]

    def affine(self, pair: Tuple[int, int]) -> Tuple[float, float]:
        """(slope, offset) of the branch on I_{i,j}."""
        lo, hi = self.pieces[pair]
        t_lo, t_hi = self.base[pair[1]]
        slope = (t_hi - t_lo) / (hi - lo)
        return slope, t_lo - slope * lo

    def base_index(self, x: float) -> Optional[int]:
        for i, (lo, hi) in enumerate(self.base):
            if lo <= x <= hi:
                return i
        return None

    def apply(self, x: float) -> Optional[float]:
        """P(x), or None when x lies in no sub-interval (it escapes)."""
        for pair, (lo, hi) in self.pieces.items():
            if lo <= x <= hi:
                slope, offset = self.affine(pair)
                return slope * x + offset
        return None

    def itinerary(self, x: float, n: int) -> Optional[Digits]:
        """First n base-interval indices along the orbit of x, or None if it escapes sooner."""
        digits = []
        for k in range(n):
            i = self.base_index(x)
            if i is None:
                return None
            digits.append(i)
            if k < n - 1:
                x = self.apply(x)
                if x is None:
                    return None
        return tuple(digits)

    def pull_back(self, digits: Sequence[int]) -> Optional[Interval]:
        """Cylinder of ``digits``, or None when some pair has no sub-interval."""
        if not digits or not 0 <= digits[-1] < len(self.base):
            return None
        lo, hi = self.base[digits[-1]]
        for a, b in zip(reversed(digits[:-1]), reversed(digits[1:])):
            if (a, b) not in self.pieces:
                return None
            slope, offset = self.affine((a, b))
            lo, hi = (lo - offset) / slope, (hi - offset) / slope
        return lo, hi

    def cylinders(self, n: int) -> Dict[Digits, Interval]:
        """Every non-empty depth-n cylinder, found by brute force over all digit strings."""
        out = {}
        for digits in itertools.product(range(len(self.base)), repeat=n):
            interval = self.pull_back(digits)
            if interval is not None:
                out[digits] = interval
        return out


def build_interval_model(subshift: Subshift = SUBSHIFT) -> IntervalModel:
    """
    I_i = [4i, 4i+1]; the k-th allowed successor j of i (increasing j) gets
    I_{i,j} = [4i + 2k/3, 4i + 2k/3 + 1/3], leaving a gap between pieces.
    """
    base = tuple((INTERVAL_SPACING * i, INTERVAL_SPACING * i + 1.0) for i in range(subshift.alphabet_size))
    pieces = {}
    for i in range(subshift.alphabet_size):
        successors = subshift.successors(i)
        if (2 * len(successors) - 1) * SUBINTERVAL_LENGTH > 1.0:
            raise ValueError(f"digit {i} has too many successors for disjoint pieces")
        for k, j in enumerate(successors):
            lo = base[i][0] + 2 * k * SUBINTERVAL_LENGTH
            pieces[(i, j)] = (lo, lo + SUBINTERVAL_LENGTH)
    return IntervalModel(base, pieces)


def itinerary_cylinder(word, model: IntervalModel) -> Interval:
    """
    Points whose first len(word) itinerary digits spell the word.

    Raises:
        ValueError: the word is not admissible.
    """
    digits = tuple(word.preperiod) if isinstance(word, Word) else tuple(word)
    if not digits or not SUBSHIFT.is_admissible(digits):
        raise ValueError(f"inadmissible word {digits}")
    interval = model.pull_back(digits)
    if interval is None:
        raise ValueError(f"word {digits} has no cylinder in this model")
    return interval
