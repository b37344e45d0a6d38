from hypothesis import given, settings

from g2lattice.freealg import derivation, g2_characters, p_form, skew_bracket
from g2lattice.g2 import generic_g2
from g2lattice.reduce import is_in_ideal, normal_form

from conftest import coefficients, homogeneous

chars = g2_characters()


def p(u, v):
    return p_form(u.constitution(), v.constitution(), chars)


def br(u, v):
    return skew_bracket(u, v, chars)


@given(homogeneous(max_total=2), homogeneous(max_total=2), homogeneous(max_total=2))
@settings(max_examples=200, deadline=None)
def test_bracket_of_product_left(u, v, w):
    assert br(u * v, w) == br(u, w).scale(p(v, w)) * v + u * br(v, w)


@given(homogeneous(max_total=2), homogeneous(max_total=2), homogeneous(max_total=2))
@settings(max_examples=200, deadline=None)
def test_bracket_of_product_right(u, v, w):
    assert br(u, v * w) == br(u, v) * w + v.scale(p(u, v)) * br(u, w)


@given(homogeneous(max_total=3), homogeneous(max_total=3))
@settings(max_examples=200, deadline=None)
def test_twisted_leibniz(u, v):
    x = {1: (1, 0), 2: (0, 1)}
    for i in (1, 2):
        twist = p_form(u.constitution(), x[i], chars)
        lhs = derivation(i, u * v, chars)
        assert lhs == derivation(i, u, chars) * v + (u * derivation(i, v, chars)).scale(twist)


@given(homogeneous(max_total=6, max_terms=4))
@settings(max_examples=100, deadline=None)
def test_normal_form_idempotent(f):
    rels = generic_g2().rels
    once = normal_form(f, rels)
    assert normal_form(once, rels) == once
    assert is_in_ideal(f - once, rels)


@given(homogeneous(max_total=6, max_terms=3), homogeneous(max_total=6, max_terms=3), coefficients(), coefficients())
@settings(max_examples=100, deadline=None)
def test_normal_form_linear(f, h, a, b):
    rels = generic_g2().rels
    lhs = normal_form(f.scale(a) + h.scale(b), rels)
    assert lhs == normal_form(f, rels).scale(a) + normal_form(h, rels).scale(b)
