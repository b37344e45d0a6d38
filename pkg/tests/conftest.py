import pytest
from hypothesis import strategies as st

from g2lattice.coeff import GENERIC
from g2lattice.freealg import SkewPolynomial
from g2lattice.g2 import generic_g2


@pytest.fixture(scope="session")
def g():
    return generic_g2()


# -- strategies -------------------------------------------------------------------

small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def laurent(draw, max_terms=3):
    """Sum of c * q^i * p12^j with small integers."""
    out = GENERIC.zero
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        c = draw(small_ints)
        i = draw(st.integers(min_value=-3, max_value=3))
        j = draw(st.integers(min_value=-2, max_value=2))
        out = out + GENERIC.from_int(c) * GENERIC.q ** i * GENERIC.p12 ** j
    return out


@st.composite
def coefficients(draw, nonzero=False):
    num = draw(laurent())
    den = draw(laurent().filter(lambda c: not c.is_zero()))
    out = num / den
    if nonzero and out.is_zero():
        out = out + GENERIC.one
    return out


@st.composite
def words_of(draw, d):
    letters = [1] * d[0] + [2] * d[1]
    return tuple(draw(st.permutations(letters)))


@st.composite
def homogeneous(draw, max_total=4, d=None, max_terms=3):
    """Nonzero multihomogeneous SkewPolynomial with integer-monomial coefficients."""
    if d is None:
        n = draw(st.integers(min_value=1, max_value=max_total))
        m1 = draw(st.integers(min_value=0, max_value=n))
        d = (m1, n - m1)
    terms = {}
    for _ in range(draw(st.integers(min_value=1, max_value=max_terms))):
        w = draw(words_of(d))
        c = GENERIC.from_int(draw(st.integers(min_value=1, max_value=3)) * draw(st.sampled_from([1, -1])))
        c = c * GENERIC.q ** draw(st.integers(min_value=-2, max_value=2))
        c = c * GENERIC.p12 ** draw(st.integers(min_value=-1, max_value=1))
        terms[w] = terms.get(w, GENERIC.zero) + c
    f = SkewPolynomial(terms)
    if f.is_zero():
        f = SkewPolynomial.word(draw(words_of(d)))
    return f
