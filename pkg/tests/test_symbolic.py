"""
Tests for the symbolic coding: admissible words, the metric, the
identification of sequences ending in S_α, and the interval model.
"""

import itertools
import os
import sys
from fractions import Fraction

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from persian_carpet.errors import BudgetError
from persian_carpet.symbolic import (
    ALPHA_ROTATIONS,
    SUBSHIFT,
    Word,
    adjacency_matrix,
    admissible_count,
    admissible_words,
    build_interval_model,
    collapsed_prefixes,
    equivalence_witness,
    equivalent,
    exact_distance,
    in_s_alpha,
    itinerary_cylinder,
    shift,
    word_distance,
)


def _brute_equivalent(s, t, max_shift=8):
    """Compare 60 digits for equality, else look for a common prefix ending in S_α."""
    if s.digits(60) == t.digits(60):
        return True
    ss, tt = s, t
    for n in range(max_shift + 1):
        if s.digits(n) == t.digits(n) and in_s_alpha(ss) and in_s_alpha(tt):
            return True
        ss, tt = shift(ss), shift(tt)
    return False


def _sample_words():
    tails = list(ALPHA_ROTATIONS) + [(2, 3, 0, 1), (3, 0, 1, 2), (0, 1, 2, 3), (1, 2, 3, 0)]
    prefixes = [()] + [w for n in range(1, 4) for w in admissible_words(n)]
    words = []
    for prefix, tail in itertools.product(prefixes, tails):
        try:
            words.append(Word(prefix, tail))
        except ValueError:
            continue
    return words


class TestSubshift:
    """Allowed transitions."""

    def test_adjacency_matrix(self):
        expected = np.array([
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [1, 0, 0, 1],
            [1, 1, 0, 0],
        ])
        assert np.array_equal(adjacency_matrix(), expected)

    def test_successors(self):
        assert SUBSHIFT.successors(2) == [0, 3]
        assert SUBSHIFT.successors(3) == [0, 1]

    def test_small_counts(self):
        assert len(admissible_words(1)) == 4
        assert len(admissible_words(2)) == 6
        assert len(admissible_words(3)) == 8

    def test_counts_match_matrix_powers(self):
        for n in range(1, 21):
            assert len(admissible_words(n)) == admissible_count(n)

    def test_words_admissible_and_sorted(self):
        words = admissible_words(6)
        assert words == sorted(words)
        assert all(SUBSHIFT.is_admissible(w) for w in words)

    def test_budget(self):
        with pytest.raises(BudgetError):
            admissible_words(0)
        with pytest.raises(BudgetError):
            admissible_words(31)


class TestWord:

    def test_parse(self):
        w = Word.parse("3.012")
        assert w.preperiod == (3,) and w.period == (0, 1, 2)
        assert Word.parse(".012").preperiod == ()
        assert Word.parse("012").is_finite
        assert len(Word.parse("012")) == 3
        assert str(w) == "3.012"

    def test_inadmissible_rejected(self):
        with pytest.raises(ValueError):
            Word.finite((0, 2))
        # period wrap-around 1 → 0 is not allowed
        with pytest.raises(ValueError):
            Word((), (0, 1))

    def test_infinite_word_has_no_length(self):
        with pytest.raises(TypeError):
            len(Word.parse(".012"))

    def test_junction_checked(self):
        # the period 2 would follow itself
        with pytest.raises(ValueError):
            Word.parse("31.2")

    def test_finite_digit_out_of_range(self):
        with pytest.raises(IndexError):
            Word.parse("301").digit(3)

    def test_digit_access(self):
        w = Word.parse("3.012")
        assert w.digits(7) == (3, 0, 1, 2, 0, 1, 2)

    def test_normalized(self):
        assert Word((2, 0, 1), (2, 0, 1)).normalized() == Word((), (2, 0, 1))
        assert Word((0,), (1, 2, 0)).normalized() == Word((), (0, 1, 2))
        assert Word((), (0, 1, 2, 0, 1, 2)).normalized() == Word((), (0, 1, 2))
        assert Word.parse("23.0123").normalized() == Word.parse(".2301")

    def test_shift(self):
        assert shift(Word.parse("3.012")) == Word.parse(".012")
        assert shift(Word.parse(".012")) == Word.parse(".120")
        with pytest.raises(ValueError):
            shift(Word.finite((1,)))

    def test_s_alpha(self):
        assert in_s_alpha(Word.parse(".201"))
        assert in_s_alpha(Word.parse("0.120"))
        assert not in_s_alpha(Word.parse("3.012"))
        assert not in_s_alpha(Word.parse(".2301"))


class TestMetric:

    def test_truncation_bounds(self):
        s, t = Word.parse(".012"), Word.parse(".120")
        bound = word_distance(s, t, 10)
        exact = float(exact_distance(s, t))
        assert bound.lo <= exact <= bound.hi
        assert bound.hi - bound.lo == pytest.approx(4.0 ** -9)

    def test_exact_value(self):
        assert exact_distance(Word.parse(".012"), Word.parse(".120")) == Fraction(88, 63)
        assert exact_distance(Word.parse(".012"), Word.parse("0.120")) == 0

    def test_first_digit_dominates(self):
        s, t = Word.parse("3.012"), Word.parse("0.120")
        assert word_distance(s, t, 30).value >= 3


class TestEquivalence:
    """Identification of sequences that end in S_α after a common prefix."""

    def test_rotations_identified(self):
        assert equivalent(Word.parse(".012"), Word.parse(".120"))
        assert equivalence_witness(Word.parse(".012"), Word.parse(".201")) == 0

    def test_common_prefix(self):
        s, t = Word.parse("3.012"), Word.parse("3.120")
        assert equivalent(s, t)
        assert equivalence_witness(s, t) == 1

    def test_different_prefix(self):
        assert not equivalent(Word.parse("3.012"), Word.parse("0.120"))

    def test_outside_s_alpha(self):
        assert not equivalent(Word.parse(".2301"), Word.parse(".012"))
        assert equivalent(Word.parse(".2301"), Word.parse("23.0123"))
        assert equivalence_witness(Word.parse(".2301"), Word.parse("23.0123")) is None

    def test_finite_words_rejected(self):
        with pytest.raises(ValueError):
            equivalent(Word.parse("01"), Word.parse(".012"))

    def test_matches_brute_force(self):
        words = _sample_words()
        rng = np.random.default_rng(12)
        pairs = [(words[i], words[j]) for i, j in rng.integers(0, len(words), size=(1500, 2))]
        # make sure identified pairs are represented
        pairs += [(Word(p, a), Word(p, b))
                  for p in admissible_words(2) for a in ALPHA_ROTATIONS for b in ALPHA_ROTATIONS
                  if SUBSHIFT.is_admissible(p + a[:1]) and SUBSHIFT.is_admissible(p + b[:1])]
        hits = 0
        for s, t in pairs:
            expected = _brute_equivalent(s, t)
            assert equivalent(s, t) == expected, (str(s), str(t))
            hits += expected
        assert hits > 10

    def test_relation_is_symmetric(self):
        words = _sample_words()[:40]
        for s, t in itertools.product(words, repeat=2):
            assert equivalent(s, t) == equivalent(t, s)


class TestCollapsedPrefixes:

    def test_small_depths(self):
        assert collapsed_prefixes(0) == [()]
        assert collapsed_prefixes(1) == [(3,)]

    def test_class_count_by_enumeration(self):
        for n in range(1, 7):
            deep = []
            for prefix in admissible_words(n):
                for tail in ALPHA_ROTATIONS:
                    if not SUBSHIFT.is_admissible(prefix + tail[:1]):
                        continue
                    w = Word(prefix, tail)
                    if len(w.normalized().preperiod) == n:
                        deep.append(w)
            classes = []
            for w in deep:
                for members in classes:
                    if equivalent(w, members[0]):
                        members.append(w)
                        break
                else:
                    classes.append([w])
            assert len(classes) == len(collapsed_prefixes(n)), n

    def test_prefixes_end_in_three(self):
        for n in range(1, 8):
            assert all(p[-1] == 3 for p in collapsed_prefixes(n))


class TestIntervalModel:
    """The expanding interval map and its cylinders."""

    def setup_method(self):
        self.model = build_interval_model()

    def test_pieces(self):
        assert self.model.pieces[(0, 1)] == pytest.approx((0.0, 1.0 / 3))
        assert self.model.pieces[(2, 0)] == pytest.approx((8.0, 8.0 + 1.0 / 3))
        assert self.model.pieces[(2, 3)] == pytest.approx((8.0 + 2.0 / 3, 9.0))
        assert self.model.base[3] == (12.0, 13.0)

    def test_branches_are_onto(self):
        for pair in self.model.pieces:
            lo, hi = self.model.pieces[pair]
            slope, offset = self.model.affine(pair)
            assert slope == pytest.approx(3.0)
            assert (slope * lo + offset, slope * hi + offset) == pytest.approx(self.model.base[pair[1]])

    def test_cylinder_of_word(self):
        assert itinerary_cylinder((0, 1), self.model) == pytest.approx((0.0, 1.0 / 3))
        lo, hi = itinerary_cylinder(Word.finite((0, 1, 2)), self.model)
        assert lo == pytest.approx(0.0)
        assert hi - lo == pytest.approx(1.0 / 9)

    def test_inadmissible_word(self):
        with pytest.raises(ValueError):
            itinerary_cylinder((0, 2), self.model)

    def test_cylinders_disjoint_nested(self):
        for n in range(1, 8):
            cylinders = self.model.cylinders(n)
            assert set(cylinders) == set(admissible_words(n))
            spans = sorted(cylinders.values())
            for (_, hi), (lo, _) in zip(spans, spans[1:]):
                assert hi < lo
            for word, (lo, hi) in cylinders.items():
                assert hi - lo == pytest.approx(3.0 ** -(n - 1))
                if n > 1:
                    plo, phi = self.model.pull_back(word[:-1])
                    assert plo - 1e-12 <= lo and hi <= phi + 1e-12

    def test_itinerary_commutes_with_shift(self):
        rng = np.random.default_rng(3)
        words = admissible_words(11)
        for k in rng.choice(len(words), size=50, replace=False):
            word = words[k]
            lo, hi = itinerary_cylinder(word, self.model)
            x = 0.5 * (lo + hi)
            assert self.model.itinerary(x, 11) == word
            assert self.model.itinerary(self.model.apply(x), 10) == word[1:]

    def test_gap_points_escape(self):
        assert self.model.apply(0.5) is None
        assert self.model.itinerary(2.0, 1) is None
