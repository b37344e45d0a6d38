"""Free algebra k<x1, x2>: words, orders, skew brackets and derivations.

Words are tuples over {1, 2}.  The word order puts x1 above x2 and treats a
proper beginning as *greater* than the word itself; this is exactly the
reverse of Python's built-in tuple order, which the helpers below exploit.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator

from .coeff import GENERIC

Word = tuple
Constitution = tuple

X1: Word = (1,)
X2: Word = (2,)
EMPTY: Word = ()


def constitution(w: Word) -> Constitution:
    n1 = w.count(1)
    return (n1, len(w) - n1)


def word_gt(u: Word, v: Word) -> bool:
    return u < v


def word_cmp(u: Word, v: Word) -> int:
    """Return 1 if u > v, -1 if u < v and 0 if equal."""
    if u == v:
        return 0
    return 1 if u < v else -1


def degree_cmp(d1: Constitution, d2: Constitution) -> int:
    """Compare multidegrees, the x1-count having priority."""
    if d1 == d2:
        return 0
    return 1 if tuple(d1) > tuple(d2) else -1


def sorted_words(words: Iterable[Word], descending: bool = False) -> list:
    # python order is the reverse of the word order
    return sorted(words, reverse=not descending)


def parse_word(text: str) -> Word:
    """Read ``x1x2x2`` / ``x1 x2 x2`` / ``122`` into a word."""
    s = text.replace(" ", "").replace("*", "")
    if s.isdigit():
        out = tuple(int(ch) for ch in s)
    else:
        if len(s) % 2 or any(s[i] != "x" for i in range(0, len(s), 2)):
            raise ValueError(f"not a word: {text!r}")
        out = tuple(int(s[i + 1]) for i in range(0, len(s), 2))
    if any(a not in (1, 2) for a in out):
        raise ValueError(f"letters must be x1 or x2: {text!r}")
    return out


def format_word(w: Word) -> str:
    return " ".join(f"x{a}" for a in w) if w else "1"


def compact_word(w: Word) -> str:
    """``x1x2^2x1`` style rendering."""
    if not w:
        return "1"
    out = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        out.append(f"x{w[i]}" + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "".join(out)


class CharacterData:
    """Braiding matrix p_ij = chi^i(g_j) and the bicharacter it induces."""

    def __init__(self, p11, p12, p21, p22, field=GENERIC):
        self.field = field
        self.p = {(1, 1): p11, (1, 2): p12, (2, 1): p21, (2, 2): p22}
        self._cache: dict = {}

    def pair(self, u: Constitution, v: Constitution):
        """p(u, v) = prod p_ij^(u_i v_j); depends only on constitutions."""
        key = (u[0], u[1], v[0], v[1])
        out = self._cache.get(key)
        if out is None:
            out = self.field.one
            for (i, j), pij in self.p.items():
                e = u[i - 1] * v[j - 1]
                if e:
                    out = out * pij ** e
            self._cache[key] = out
        return out

    def specialize(self, ctx) -> "CharacterData":
        return CharacterData(*(ctx.coerce(self.p[k]) for k in [(1, 1), (1, 2), (2, 1), (2, 2)]), field=ctx)


def g2_characters(field=GENERIC) -> CharacterData:
    """p11 = q^3, p22 = q, p12 free, p21 = q^-3 p12^-1."""
    q = field.q
    return CharacterData(q ** 3, field.p12, field.p21, q, field=field)


def p_form(u: Constitution, v: Constitution, chars: CharacterData):
    return chars.pair(u, v)


class SkewPolynomial:
    """Finite linear combination of words with nonzero coefficients."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: dict | None = None, field=GENERIC):
        self.field = field
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, field=GENERIC) -> "SkewPolynomial":
        return cls({}, field)

    @classmethod
    def word(cls, w: Word, c=None, field=GENERIC) -> "SkewPolynomial":
        c = field.one if c is None else field.coerce(c)
        return cls({tuple(w): c}, field)

    @classmethod
    def letter(cls, i: int, field=GENERIC) -> "SkewPolynomial":
        return cls.word((i,), field=field)

    @classmethod
    def scalar(cls, c, field=GENERIC) -> "SkewPolynomial":
        return cls.word((), c, field)

    # -- basic protocol ----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def coefficient(self, w: Word):
        return self.terms.get(tuple(w), self.field.zero)

    def copy(self) -> "SkewPolynomial":
        return SkewPolynomial(dict(self.terms), self.field)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, SkewPolynomial):
            return other
        return SkewPolynomial.scalar(other, self.field)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            if s is None:
                out[w] = c
            else:
                s = s + c
                if s:
                    out[w] = s
                else:
                    del out[w]
        return SkewPolynomial(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return SkewPolynomial({w: -c for w, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "SkewPolynomial":
        c = self.field.coerce(c)
        if not c:
            return SkewPolynomial.zero(self.field)
        return SkewPolynomial({w: a * c for w, a in self.terms.items()}, self.field)

    def __mul__(self, other):
        if not isinstance(other, SkewPolynomial):
            return self.scale(other)
        out: dict = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = u + v
                c = a * b
                s = out.get(w)
                out[w] = c if s is None else s + c
        return SkewPolynomial(out, self.field)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = SkewPolynomial.scalar(1, self.field)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SkewPolynomial):
            other = self._coerce(other)
        return (self - other).is_zero()

    __hash__ = None

    # -- structure ---------------------------------------------------------
    def components(self) -> dict:
        """Multihomogeneous components keyed by constitution."""
        out: dict = {}
        for w, c in self.terms.items():
            out.setdefault(constitution(w), {})[w] = c
        return {d: SkewPolynomial(t, self.field) for d, t in out.items()}

    def is_homogeneous(self) -> bool:
        return len({constitution(w) for w in self.terms}) <= 1

    def constitution(self) -> Constitution:
        ds = {constitution(w) for w in self.terms}
        if len(ds) != 1:
            raise ValueError("polynomial is not multihomogeneous")
        return ds.pop()

    def degree(self) -> Constitution:
        """D(f): the largest constitution present."""
        return max(constitution(w) for w in self.terms)

    def leading_term(self):
        return leading_term(self)

    def map_coefficients(self, fn: Callable, field) -> "SkewPolynomial":
        return SkewPolynomial({w: fn(c) for w, c in self.terms.items()}, field)

    def specialize(self, ctx) -> "SkewPolynomial":
        return self.map_coefficients(ctx.coerce, ctx)

    def sorted_terms(self) -> list:
        """Terms in decreasing order: constitution first, then word."""
        return sorted(self.terms.items(), key=lambda t: (_neg(constitution(t[0])), t[0]))

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            parts.append(f"{c} {format_word(w)}" if w else f"{c}")
        return " + ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"SkewPolynomial({self.render()})"


def _neg(d):
    return (-d[0], -d[1])


def multiply(f: SkewPolynomial, g: SkewPolynomial) -> SkewPolynomial:
    return f * g


def skew_bracket(f: SkewPolynomial, g: SkewPolynomial, chars: CharacterData) -> SkewPolynomial:
    """[f, g] = fg - p(f, g) gf, applied pairwise on homogeneous components."""
    fc = f.components()
    gc = g.components()
    out = SkewPolynomial.zero(f.field)
    for du, fu in fc.items():
        for dv, gv in gc.items():
            out = out + fu * gv - (gv * fu).scale(chars.pair(du, dv))
    return out


def derivation(i: int, f: SkewPolynomial, chars: CharacterData) -> SkewPolynomial:
    """Twisted derivation with d_i(x_j) = delta_ij, d_i(uv) = d_i(u)v + p(u,x_i) u d_i(v)."""
    e = (1, 0) if i == 1 else (0, 1)
    out: dict = {}
    for w, c in f.terms.items():
        m1 = m2 = 0
        for k, a in enumerate(w):
            if a == i:
                v = w[:k] + w[k + 1:]
                t = c * chars.pair((m1, m2), e)
                s = out.get(v)
                out[v] = t if s is None else s + t
            if a == 1:
                m1 += 1
            else:
                m2 += 1
    return SkewPolynomial(out, f.field)


def derive_sequence(seq: Iterable[int], f: SkewPolynomial, chars: CharacterData) -> SkewPolynomial:
    """Apply derivations in the given order (first element applied first)."""
    for i in seq:
        f = derivation(i, f, chars)
    return f


def leading_term(f: SkewPolynomial):
    """(word, coefficient) of the largest term: constitution first, then word order."""
    if not f.terms:
        raise ValueError("zero polynomial has no leading term")
    top = f.degree()
    w = min(w for w in f.terms if constitution(w) == top)
    return w, f.terms[w]


def nested_bracket(u: SkewPolynomial, v: SkewPolynomial, times: int, chars: CharacterData) -> SkewPolynomial:
    """[u, [u, ... [u, v]...]] with ``times`` copies of u."""
    for _ in range(times):
        v = skew_bracket(u, v, chars)
    return v
