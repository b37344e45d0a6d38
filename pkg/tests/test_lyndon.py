from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from g2lattice.freealg import g2_characters, leading_term, word_gt
from g2lattice.g2 import generic_g2
from g2lattice.lyndon import (
    SuperLetter,
    bracketing_by_longest_suffix,
    enumerate_standard,
    flatten,
    format_tree,
    is_lyndon_by_suffixes,
    is_standard,
    is_standard_tree,
    lyndon_factorization,
    necklace_count,
    shirshov_bracketing,
    superletter_value,
)

from oracles import is_standard_by_rotation, lyndon_words

chars = g2_characters()


def all_words(n):
    return [tuple(w) for w in product((1, 2), repeat=n)]


class TestStandard:
    def test_b(self):
        assert is_standard((1, 2))

    def test_reversed(self):
        assert not is_standard((2, 1))

    def test_c(self):
        assert is_standard((1, 2, 1, 2, 2))

    def test_empty(self):
        with pytest.raises(ValueError):
            is_standard(())

    def test_small_bound(self):
        assert set(enumerate_standard((1, 1))) == {(1,), (2,), (1, 2)}

    def test_four(self):
        assert sum(is_standard(w) for w in all_words(4)) == 3

    def test_c_enumerated(self):
        assert (1, 2, 1, 2, 2) in enumerate_standard((2, 3))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_necklace_counts(self, n):
        found = [w for w in all_words(n) if is_standard(w)]
        assert len(found) == necklace_count(n)
        assert sorted(found) == sorted(lyndon_words(n))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_suffix_criterion(self, n):
        for w in all_words(n):
            assert is_standard(w) == is_lyndon_by_suffixes(w) == is_standard_by_rotation(w)

    def test_necklace_formula(self):
        assert [necklace_count(n) for n in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]


class TestBracketing:
    def test_b(self):
        assert shirshov_bracketing((1, 2)) == (1, 2)

    def test_c(self):
        assert shirshov_bracketing((1, 2, 1, 2, 2)) == ((1, 2), ((1, 2), 2))

    def test_e(self):
        assert shirshov_bracketing((1, 2, 2, 2)) == (((1, 2), 2), 2)

    def test_text(self):
        assert format_tree(shirshov_bracketing((1, 2, 1, 2, 2))) == "[[x1,x2],[[x1,x2],x2]]"

    def test_not_standard(self):
        with pytest.raises(ValueError):
            shirshov_bracketing((2, 1))

    @pytest.mark.parametrize("n", range(1, 10))
    def test_rules_agree(self, n):
        for w in lyndon_words(n):
            tree = shirshov_bracketing(w)
            assert tree == bracketing_by_longest_suffix(w)
            assert flatten(tree) == w
            assert is_standard_tree(tree)

    def test_nonstandard_tree(self):
        # [[C],[F]] breaks the second standardness condition
        assert not is_standard_tree((((1, 2), ((1, 2), 2)), 2))


class TestSuperLetters:
    def test_leaf(self):
        assert superletter_value(2, chars).terms == {(2,): chars.field.one}

    def test_b_value(self):
        v = superletter_value((1, 2), chars)
        assert v.terms == {(1, 2): chars.field.one, (2, 1): -chars.field.p12}

    def test_d_leading(self):
        w, c = leading_term(superletter_value(((1, 2), 2), chars))
        assert w == (1, 2, 2) and c == chars.field.one

    def test_monic_up_to_bound(self):
        for w in enumerate_standard((3, 6)):
            lead, c = leading_term(superletter_value(shirshov_bracketing(w), chars))
            assert lead == w and c.is_one()

    def test_g2_order(self, g):
        names = sorted("ABCDEF", key=lambda n: g.letter(n), reverse=True)
        assert "".join(names) == "ABCDEF"

    @given(st.sampled_from("ABCDEF"), st.sampled_from("ABCDEF"))
    def test_order_matches_words(self, a, b):
        g = generic_g2()
        u, v = g.letter(a), g.letter(b)
        assert (v < u) == word_gt(u.word, v.word)

    def test_from_word(self):
        s = SuperLetter.from_word((1, 2, 2), chars, "[D]")
        assert str(s) == "[D]" and s.constitution == (1, 2)


class TestFactorization:
    @given(st.lists(st.sampled_from([1, 2]), min_size=1, max_size=12).map(tuple))
    def test_factors(self, w):
        parts = lyndon_factorization(w)
        assert sum(parts, ()) == w
        assert all(is_standard(u) for u in parts)
        # u1 <= u2 <= ... in the word order
        assert all(not word_gt(a, b) for a, b in zip(parts, parts[1:]))
