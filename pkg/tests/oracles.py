"""Independent reference implementations used by the tests.

Nothing here imports the package's algebra.  The free algebra is a plain
dict of words over any coefficient ring that supports + and *, with the
twisting scalars supplied as a function of two letter-count pairs.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import flint
import sympy

Q, P12 = sympy.symbols("q p12")


# -- braiding -----------------------------------------------------------------


def braiding(q, p12):
    """p_ij for the G2 Cartan datum: p11 = q^3, p22 = q, p12 p21 = q^-3."""
    return {(1, 1): q ** 3, (1, 2): p12, (2, 1): 1 / (q ** 3 * p12), (2, 2): q}


def pair(u, v, p):
    """p(u, v) for letter counts u = (n1, n2), v = (m1, m2)."""
    out = 1
    for i in (1, 2):
        for j in (1, 2):
            e = u[i - 1] * v[j - 1]
            if e:
                out = out * p[(i, j)] ** e
    return out


def counts(w):
    return (w.count(1), w.count(2))


# -- naive free algebra ---------------------------------------------------------


class Naive:
    """Free algebra k<x1,x2> with dict terms; zero coefficients are dropped."""

    def __init__(self, p, simplify=lambda c: c):
        self.p = p
        self.simplify = simplify

    def clean(self, f):
        out = {}
        for w, c in f.items():
            c = self.simplify(c)
            if c != 0:
                out[w] = c
        return out

    def add(self, *fs):
        out = {}
        for f in fs:
            for w, c in f.items():
                out[w] = out.get(w, 0) + c
        return self.clean(out)

    def scale(self, f, c):
        return self.clean({w: a * c for w, a in f.items()})

    def mul(self, f, g):
        out = {}
        for u, a in f.items():
            for v, b in g.items():
                out[u + v] = out.get(u + v, 0) + a * b
        return self.clean(out)

    def bracket(self, f, g):
        """fg - p(f, g) gf, expanded over homogeneous parts of f and g."""
        parts = []
        for u, a in f.items():
            for v, b in g.items():
                parts.append({u + v: a * b})
                parts.append({v + u: -a * b * pair(counts(u), counts(v), self.p)})
        return self.add(*parts)

    def deriv(self, i, f):
        """Recursive definition: d(x_j w) = delta_ij w + p(x_j, x_i) x_j d(w)."""
        out = {}
        for w, c in f.items():
            for v, a in self._deriv_word(i, w).items():
                out[v] = out.get(v, 0) + a * c
        return self.clean(out)

    def _deriv_word(self, i, w):
        if not w:
            return {}
        head, rest = w[0], w[1:]
        out = {rest: 1} if head == i else {}
        e = (1, 0) if i == 1 else (0, 1)
        f = pair(counts((head,)), e, self.p)
        for v, a in self._deriv_word(i, rest).items():
            out[(head,) + v] = out.get((head,) + v, 0) + a * f
        return out


def letter(i):
    return {(i,): 1}


def tree_value(tree, alg):
    if isinstance(tree, int):
        return letter(tree)
    return alg.bracket(tree_value(tree[0], alg), tree_value(tree[1], alg))


def symbolic_algebra():
    return Naive(braiding(Q, P12), simplify=sympy.cancel)


def rational_algebra(q0=Fraction(7, 3), p0=Fraction(-5, 11)):
    return Naive(braiding(Fraction(q0), Fraction(p0)))


# -- coefficient conversion ------------------------------------------------


def to_sympy(c):
    """Read a Coefficient through its printed form."""
    return sympy.sympify(str(c).replace("^", "**"), locals={"q": Q, "p12": P12})


def sym_equal(c, expr) -> bool:
    return sympy.simplify(to_sympy(c) - expr) == 0


# -- Lyndon words ---------------------------------------------------------------


def lyndon_words(n):
    """Duval's generation of Lyndon words of length n over {1 < 2} (python order).

    In the package's word order x1 > x2 and beginnings are greater, which
    flips python's lexicographic order, so these are exactly the standard words.
    """
    out = []
    w = [1]
    while w:
        if len(w) == n:
            out.append(tuple(w))
        m = len(w)
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == 2:
            w.pop()
        if w:
            w[-1] += 1
    return out


def is_standard_by_rotation(w):
    return all(w < w[k:] + w[:k] for k in range(1, len(w)))


# -- ranks of ideal blocks at a rational point ------------------------------------


def relation_values(alg):
    x1, x2 = letter(1), letter(2)
    quartic = x1
    for _ in range(4):
        quartic = alg.bracket(quartic, x2)
    cubic = alg.bracket(x1, alg.bracket(x1, x2))
    return [quartic, cubic]


def block_rank(alg, d, extra=None):
    """Rank of all padded products w1 r w2 of constitution d, as an fmpq matrix."""
    words = [w for w in product((1, 2), repeat=sum(d)) if counts(w) == tuple(d)]
    col = {w: i for i, w in enumerate(words)}
    rows = []
    for r in relation_values(alg):
        c = counts(next(iter(r)))
        rest = (d[0] - c[0], d[1] - c[1])
        if min(rest) < 0:
            continue
        for pad in product((1, 2), repeat=sum(rest)):
            if counts(pad) != rest:
                continue
            for k in range(len(pad) + 1):
                row = [0] * len(words)
                for u, a in r.items():
                    row[col[pad[:k] + u + pad[k:]]] = a
                rows.append(row)
    if extra is not None:
        row = [0] * len(words)
        for u, a in extra.items():
            row[col[u]] = a
        rows.append(row)
    if not rows:
        return 0, len(words)
    m = flint.fmpq_mat(len(rows), len(words), [flint.fmpq(x.numerator, x.denominator) for r in rows for x in
                                              (Fraction(v) for v in r)])
    return m.rank(), len(words)


def pbw_series(max_total):
    """Coefficients of prod over letters 1/(1 - x^a y^b) up to total degree max_total."""
    letters = [(1, 0), (1, 1), (2, 3), (1, 2), (1, 3), (0, 1)]
    series = {(0, 0): 1}
    for a, b in letters:
        # multiply by the geometric series in x^a y^b
        new = {}
        for (i, j), c in series.items():
            k = 0
            while i + k * a + j + k * b <= max_total:
                key = (i + k * a, j + k * b)
                new[key] = new.get(key, 0) + c
                k += 1
        series = new
    return series


# -- root system of type G2 -------------------------------------------------------

# Gram matrix in the basis (long simple root, short simple root); a root a*x1 + b*x2
# is recorded by its constitution (a, b)
_GRAM = ((6, -3), (-3, 2))


def _form(u, v):
    return sum(u[i] * _GRAM[i][j] * v[j] for i in range(2) for j in range(2))


def reflect(beta, i):
    alpha = (1, 0) if i == 0 else (0, 1)
    c = 2 * _form(beta, alpha) // _form(alpha, alpha)
    return (beta[0] - c * alpha[0], beta[1] - c * alpha[1])


def inversion_chain(first):
    """Inversion sets of the prefixes of the alternating reduced word starting with simple reflection first."""
    word = [(first + k) % 2 for k in range(6)]
    sets, acc = [], set()
    for k, i in enumerate(word):
        beta = (1, 0) if i == 0 else (0, 1)
        for j in reversed(word[:k]):
            beta = reflect(beta, j)
        acc.add(beta)
        sets.append(frozenset(acc))
    return sets
