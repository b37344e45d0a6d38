from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2lattice.coeff import GENERIC
from g2lattice.freealg import (
    SkewPolynomial,
    compact_word,
    constitution,
    degree_cmp,
    derivation,
    derive_sequence,
    g2_characters,
    leading_term,
    multiply,
    p_form,
    parse_word,
    skew_bracket,
    sorted_words,
    word_cmp,
)

from conftest import homogeneous
from oracles import braiding, pair, rational_algebra, sym_equal, symbolic_algebra, tree_value

F = GENERIC
q, p12, p21 = F.q, F.p12, F.p21
chars = g2_characters()
x1, x2 = SkewPolynomial.letter(1), SkewPolynomial.letter(2)

Q0, P0 = Fraction(7, 3), Fraction(-5, 11)


def at_point(f: SkewPolynomial) -> dict:
    return {w: c.evaluate(Q0, P0) for w, c in f.terms.items()}


def words(max_len=6):
    return st.lists(st.sampled_from([1, 2]), min_size=0, max_size=max_len).map(tuple)


class TestOrders:
    def test_first_letter(self):
        assert word_cmp((1, 2), (2, 1)) == 1

    def test_beginning_is_greater(self):
        assert word_cmp((1,), (1, 2)) == 1

    def test_longer_word_greater_here(self):
        # position 5: end of the shorter word against x1, and x1 wins
        bd = (1, 2, 1, 2, 2)
        longer = (1, 2, 1, 2, 1, 2, 2)
        assert word_cmp(longer, bd) == 1

    def test_letter_words_descending(self):
        letters = [(1,), (1, 2), (1, 2, 1, 2, 2), (1, 2, 2), (1, 2, 2, 2), (2,)]
        assert sorted_words(letters, descending=True) == letters

    def test_degree(self):
        assert degree_cmp((2, 3), (1, 5)) == 1
        assert degree_cmp((1, 1), (1, 1)) == 0
        assert degree_cmp((1, 0), (0, 4)) == 1

    @given(words(), words(), words())
    def test_word_total_order(self, u, v, w):
        assert word_cmp(u, v) == -word_cmp(v, u)
        assert (word_cmp(u, v) == 0) == (u == v)
        if word_cmp(u, v) >= 0 and word_cmp(v, w) >= 0:
            assert word_cmp(u, w) >= 0

    @given(*(st.tuples(st.integers(0, 5), st.integers(0, 5)) for _ in range(3)))
    def test_degree_total_order(self, a, b, c):
        assert degree_cmp(a, b) == -degree_cmp(b, a)
        if degree_cmp(a, b) >= 0 and degree_cmp(b, c) >= 0:
            assert degree_cmp(a, c) >= 0


class TestWords:
    def test_parse(self):
        assert parse_word("x1x2x2") == (1, 2, 2)
        assert parse_word("x1 x2") == (1, 2)
        assert parse_word("121") == (1, 2, 1)

    @pytest.mark.parametrize("bad", ["x3", "x1y2", "13", "x"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_word(bad)

    def test_compact(self):
        assert compact_word((1, 2, 2, 1)) == "x1x2^2x1"
        assert compact_word(()) == "1"

    @given(words())
    def test_constitution(self, w):
        assert constitution(w) == (w.count(1), w.count(2))


class TestPairing:
    def test_self_pair_b(self):
        assert p_form((1, 1), (1, 1), chars) == q

    def test_self_pair_c(self):
        assert p_form((2, 3), (2, 3), chars) == q ** 3

    def test_empty(self):
        assert p_form((0, 0), (3, 1), chars) == F.one

    def test_braiding_constraints(self):
        p = chars.p
        assert p[(1, 1)] == q ** 3 and p[(2, 2)] == q
        assert (p[(1, 2)] * p[(2, 1)] - q ** -3).is_zero()

    @given(*(st.tuples(st.integers(0, 3), st.integers(0, 3)) for _ in range(3)))
    @settings(deadline=None)
    def test_bicharacter(self, u, u2, v):
        s = (u[0] + u2[0], u[1] + u2[1])
        assert p_form(s, v, chars) == p_form(u, v, chars) * p_form(u2, v, chars)
        assert p_form(v, s, chars) == p_form(v, u, chars) * p_form(v, u2, chars)

    @given(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.tuples(st.integers(0, 3), st.integers(0, 3)))
    @settings(deadline=None)
    def test_against_oracle(self, u, v):
        p = braiding(Q0, P0)
        assert p_form(u, v, chars).evaluate(Q0, P0) == pair(u, v, p)


class TestProducts:
    def test_letters(self):
        assert multiply(x1, x2) == SkewPolynomial.word((1, 2))

    def test_distribute(self):
        f = x1 * x2 - (x2 * x1).scale(p12)
        want = SkewPolynomial({(1, 2, 2): F.one, (2, 1, 2): -p12})
        assert multiply(f, x2) == want

    def test_zero(self):
        assert multiply(x1, SkewPolynomial.zero()).is_zero()

    def test_no_zero_terms(self):
        f = x1 + x2 - x2
        assert list(f.terms) == [(1,)]

    def test_components(self):
        f = x1 + x1 * x2 + x2 * x1
        comps = f.components()
        assert set(comps) == {(1, 0), (1, 1)} and len(comps[(1, 1)]) == 2
        assert not f.is_homogeneous()


class TestBracket:
    def test_basic(self):
        assert skew_bracket(x1, x2, chars) == x1 * x2 - (x2 * x1).scale(p12)

    @given(homogeneous(max_total=3))
    @settings(max_examples=30, deadline=None)
    def test_self_bracket(self, u):
        d = u.constitution()
        assert skew_bracket(u, u, chars) == (u * u).scale(1 - p_form(d, d, chars))

    def test_d_expansion(self):
        d = skew_bracket(skew_bracket(x1, x2, chars), x2, chars)
        want = SkewPolynomial({(1, 2, 2): F.one, (2, 1, 2): -p12 * (1 + q), (2, 2, 1): p12 ** 2 * q})
        assert d == want
        alg = symbolic_algebra()
        ref = tree_value(((1, 2), 2), alg)
        assert set(ref) == set(d.terms)
        assert all(sym_equal(d.terms[w], ref[w]) for w in ref)

    @given(homogeneous(max_total=3), homogeneous(max_total=3))
    @settings(max_examples=30, deadline=None)
    def test_against_oracle(self, u, v):
        alg = rational_algebra(Q0, P0)
        assert at_point(skew_bracket(u, v, chars)) == alg.bracket(at_point(u), at_point(v))


class TestDerivation:
    def test_letters(self):
        assert derivation(1, x1, chars) == SkewPolynomial.scalar(1)
        assert derivation(2, x1, chars).is_zero()

    def test_b(self):
        b = skew_bracket(x1, x2, chars)
        assert derivation(1, b, chars) == x2.scale(1 - q ** -3)

    def test_sequence_order(self):
        f = SkewPolynomial.word((1, 2))
        assert derive_sequence([2, 1], f, chars) == derivation(1, derivation(2, f, chars), chars)

    @given(homogeneous(max_total=4), st.sampled_from([1, 2]))
    @settings(max_examples=40, deadline=None)
    def test_against_recursive_oracle(self, f, i):
        alg = rational_algebra(Q0, P0)
        assert at_point(derivation(i, f, chars)) == alg.deriv(i, at_point(f))

    def test_symbolic_oracle_c(self, g):
        alg = symbolic_algebra()
        ref = alg.deriv(1, tree_value(((1, 2), ((1, 2), 2)), alg))
        got = derivation(1, g.value("C"), chars)
        assert set(got.terms) == set(ref)
        assert all(sym_equal(got.terms[w], ref[w]) for w in ref)

    @pytest.mark.parametrize("name", ["A", "B", "C", "D", "E"])
    def test_d2_kills_x1_letters(self, g, name):
        assert derivation(2, g.value(name), chars).is_zero()

    @pytest.mark.parametrize("name", ["B", "D", "E"])
    def test_bracket_with_x2_preserves_kernel(self, g, name):
        u = g.value(name)
        assert derivation(2, skew_bracket(u, x2, chars), chars).is_zero()


class TestLeadingTerm:
    def test_basic(self):
        assert leading_term(x1 * x2 - (x2 * x1).scale(p12)) == ((1, 2), F.one)

    def test_constant(self):
        assert leading_term(SkewPolynomial.scalar(5)) == ((), F.from_int(5))

    def test_cd_word(self, g):
        w, _ = leading_term(g.value("C") * g.value("D"))
        assert w == (1, 2, 1, 2, 2, 1, 2, 2)

    def test_constitution_first(self):
        # x1-count has priority over total length
        assert leading_term(x2 * x2 * x2 + x1)[0] == (1,)

    def test_zero(self):
        with pytest.raises(ValueError):
            leading_term(SkewPolynomial.zero())
