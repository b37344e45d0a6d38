import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2lattice.coeff import GENERIC
from g2lattice.freealg import SkewPolynomial, leading_term, word_gt
from g2lattice.g2 import derived_relations, generic_g2, pbw_count, relation_coefficients
from g2lattice.lyndon import words_of_constitution
from g2lattice.reduce import (
    Echelon,
    ModularField,
    RelationSet,
    hardness_witness,
    ideal_block,
    ideal_membership,
    is_hard,
    is_in_ideal,
    normal_form,
    probabilistic_is_zero,
    random_prime,
)

from conftest import homogeneous
from oracles import block_rank, pbw_series, rational_algebra

F = GENERIC


def word(*letters):
    return SkewPolynomial.word(tuple(letters))


class TestEchelon:
    def test_reduces_to_zero(self):
        e = Echelon()
        e.add({(1,): Fraction(2), (2,): Fraction(1)})
        assert e.contains({(1,): Fraction(4), (2,): Fraction(2)})
        assert not e.contains({(2,): Fraction(1)})

    def test_dependent_row(self):
        e = Echelon()
        assert e.add({"a": Fraction(1), "b": Fraction(1)})
        assert not e.add({"a": Fraction(3), "b": Fraction(3)})
        assert e.rank == 1

    def test_fully_reduced(self):
        e = Echelon()
        e.add({"b": Fraction(1), "c": Fraction(1)})
        e.add({"a": Fraction(1), "b": Fraction(1)})
        e.add({"c": Fraction(2)})
        for p, row in e.pivots.items():
            assert row[p] == 1
            assert all(k not in row for k in e.pivots if k != p)


class TestBlocks:
    def test_cubic_block(self, g):
        blk = g.rels.block((2, 1))
        assert blk.rank == 1
        (row,) = blk.rows
        assert normal_form(row - g.cubic, g.rels).is_zero()
        assert leading_term(row) == ((1, 1, 2), F.one)
        assert block_rank(rational_algebra(), (2, 1))[0] == 1

    def test_quartic_block(self, g):
        assert g.rels.block((1, 4)).rank == 1
        assert block_rank(rational_algebra(), (1, 4))[0] == 1

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_pure_x2_empty(self, g, n):
        assert g.rels.block((0, n)).rank == 0

    def test_rows_ordered_and_monic(self, g):
        blk = g.rels.block((2, 4))
        leads = [leading_term(r) for r in blk.rows]
        assert all(c.is_one() for _, c in leads)
        assert all(word_gt(a[0], b[0]) for a, b in zip(leads, leads[1:]))
        for r in blk.rows:
            others = {w for w, _ in leads} - {leading_term(r)[0]}
            assert not others & set(r.terms)

    @pytest.mark.parametrize("d", [(2, 2), (2, 4), (3, 3), (2, 5), (3, 4)])
    def test_rank_matches_oracle(self, g, d):
        assert g.rels.block(d).rank == block_rank(rational_algebra(), d)[0]

    def test_dimension_identity_up_to_bound(self, g):
        series = pbw_series(9)
        for m1 in range(4):
            for m2 in range(7):
                if m1 + m2 == 0:
                    continue
                d = (m1, m2)
                quotient = math.comb(m1 + m2, m1) - g.rels.block(d).rank
                assert quotient == series[d] == pbw_count(d), d

    def test_redundant_generators(self, g):
        extra = RelationSet([g.quartic, g.cubic, g.x(1) * g.cubic, g.cubic.scale(g.field.q)])
        for d in [(2, 2), (3, 3), (2, 4)]:
            a, b = g.rels.block(d), ideal_block(extra, d)
            assert a.pivot_words == b.pivot_words
            assert all(a.rows[i] == b.rows[i] for i in range(a.rank))

    def test_rejects_inhomogeneous(self, g):
        with pytest.raises(ValueError):
            RelationSet([g.x(1) + g.x(1) * g.x(2)])


class TestNormalForm:
    def test_generators(self, g):
        assert normal_form(g.quartic, g.rels).is_zero()
        assert normal_form(g.cubic, g.rels).is_zero()

    def test_quartic_leading_word(self, g):
        c = relation_coefficients(g)
        want = SkewPolynomial({
            (2, 1, 2, 2, 2): -c["a1"], (2, 2, 1, 2, 2): -c["a2"], (2, 2, 2, 1, 2): -c["a3"], (2, 2, 2, 2, 1): -c["a4"],
        })
        assert normal_form(word(1, 2, 2, 2, 2), g.rels) == want

    def test_cubic_leading_word(self, g):
        c = relation_coefficients(g)
        want = SkewPolynomial({(1, 2, 1): -c["b1"], (2, 1, 1): -c["b2"]})
        assert normal_form(word(1, 1, 2), g.rels) == want


class TestMembership:
    def test_first_derived(self, g):
        assert is_in_ideal(derived_relations(g)["first"][1], g.rels)

    def test_not_member(self, g):
        assert not is_in_ideal(word(1, 2), g.rels)

    def test_bc_vanishes(self, g):
        assert is_in_ideal(g.bracket(g.value("B"), g.value("C")), g.rels)


class TestHardness:
    def test_b(self, g):
        assert is_hard(g.letter("B"), g.rels)

    def test_de_not_hard(self, g):
        w = g.letter("D").word + g.letter("E").word
        assert not is_hard(w, g.rels)
        row = hardness_witness(w, g.rels)
        assert leading_term(row)[0] == w and is_in_ideal(row, g.rels)

    def test_ae_not_hard(self, g):
        assert not is_hard(g.letter("A").word + g.letter("E").word, g.rels)

    def test_witness_none_for_hard(self, g):
        assert hardness_witness(g.letter("C").word, g.rels) is None


class TestProbabilistic:
    def test_third_derived_member(self, g):
        f = derived_relations(g)["third"][0]
        v = probabilistic_is_zero(f, g.rels, trials=3)
        assert v.member and v.trials == 3 and len(v.points) == 3
        assert all(p > 2 ** 61 for p, _, _ in v.points)

    def test_random_word_refuted(self, g):
        rng = random.Random(5)
        w = rng.choice(words_of_constitution((2, 2)))
        assert not probabilistic_is_zero(SkewPolynomial.word(w), g.rels).member
        # oracle: the block does not fill the component
        rank, n = block_rank(rational_algebra(), (2, 2))
        assert rank < n

    def test_zero(self, g):
        assert probabilistic_is_zero(SkewPolynomial.zero(), g.rels).member

    def test_trials_positive(self, g):
        with pytest.raises(ValueError):
            probabilistic_is_zero(word(1, 2), g.rels, trials=0)

    def test_modular_field(self):
        m = ModularField(101, 3, 5)
        assert m.coerce(GENERIC.q ** -1) * 3 == m.one
        assert m.p12 * m.p21 * m.q ** 3 == m.one

    def test_random_prime_size(self):
        p = random_prime(random.Random(0))
        assert 2 ** 61 < p < 2 ** 62

    @given(homogeneous(max_total=6, max_terms=3), st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_modes_agree(self, f, project):
        rels = generic_g2().rels
        if project:
            f = f - normal_form(f, rels)
        exact = ideal_membership(f, rels, mode="exact")
        prob = ideal_membership(f, rels, mode="probabilistic")
        assert exact.member == prob.member
        assert exact.member == (project or normal_form(f, rels).is_zero())

    def test_auto_policy(self, g):
        small = ideal_membership(word(1, 2), g.rels, mode="auto")
        assert small.method == "exact"
        # total degree 12 and 792 words: above both limits
        big = SkewPolynomial.word((1,) * 5 + (2,) * 7)
        assert ideal_membership(big, g.rels, mode="auto", trials=1).method == "probabilistic"

    def test_unknown_mode(self, g):
        with pytest.raises(ValueError):
            ideal_membership(word(1, 2), g.rels, mode="fast")
