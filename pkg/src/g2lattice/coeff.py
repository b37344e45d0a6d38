"""Exact scalars for the G2 quantum Borel algebra.

Every scalar lives in the field K = Q(q, p12).  The remaining braiding
parameters are eliminated up front: p11 = q^3, p22 = q and
p21 = q^-3 p12^-1.  Laurent polynomials are stored as a monomial shift times
a flint ``fmpz_mpoly`` with no monomial content, so negative powers of q and
p12 cost nothing extra.

A second field, :class:`CyclotomicContext`, models q as a primitive t-th root
of unity (p12 stays transcendental).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

import flint

__all__ = [
    "LaurentPoly",
    "Coefficient",
    "CycloCoefficient",
    "CyclotomicContext",
    "GenericField",
    "GENERIC",
    "VanishingDenominator",
    "coef_arith",
    "is_zero",
    "q_bracket",
    "specialize",
    "eval_at_point",
]

_CTX = flint.fmpz_mpoly_ctx.get(("q", "p12"), "lex")
_ZERO = _CTX.constant(0)
_ONE = _CTX.constant(1)


class VanishingDenominator(ZeroDivisionError):
    """A denominator became zero after evaluation or specialization."""


def _mono(eq: int, ep: int):
    return _CTX.term(exp_vec=(eq, ep))


def _strip(poly):
    """Split off the monomial content: poly = q^a p^b * rest."""
    if poly.is_zero():
        return poly, 0, 0
    monoms = poly.monoms()
    a = int(min(m[0] for m in monoms))
    b = int(min(m[1] for m in monoms))
    if a or b:
        poly = poly / _mono(a, b)
    return poly, a, b


def _shifted(poly, eq: int, ep: int):
    # eq, ep must be non-negative here
    if eq or ep:
        return poly * _mono(eq, ep)
    return poly


def _format_terms(terms: dict) -> str:
    if not terms:
        return "0"
    parts = []
    for (eq, ep) in sorted(terms, reverse=True):
        c = terms[(eq, ep)]
        factors = []
        if eq:
            factors.append("q" if eq == 1 else f"q^{eq}")
        if ep:
            factors.append("p12" if ep == 1 else f"p12^{ep}")
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1 else f"{mag}*" + "*".join(factors)
        else:
            body = str(mag)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


class LaurentPoly:
    """Integer Laurent polynomial in q and p12.

    The value is ``q^eq * p12^ep * poly`` where ``poly`` is not divisible by
    q or p12.  Instances are immutable and hashable.
    """

    __slots__ = ("poly", "eq", "ep")

    def __init__(self, poly=None, eq: int = 0, ep: int = 0):
        if poly is None:
            poly = _ZERO
        elif isinstance(poly, int):
            poly = _CTX.constant(poly)
        poly, a, b = _strip(poly)
        if poly.is_zero():
            eq = ep = 0
        self.poly = poly
        self.eq = eq + a
        self.ep = ep + b

    @classmethod
    def from_terms(cls, terms: dict) -> "LaurentPoly":
        terms = {k: v for k, v in terms.items() if v}
        if not terms:
            return cls()
        a = min(k[0] for k in terms)
        b = min(k[1] for k in terms)
        poly = _CTX.from_dict({(k[0] - a, k[1] - b): v for k, v in terms.items()})
        return cls(poly, a, b)

    @classmethod
    def monomial(cls, eq: int = 0, ep: int = 0, c: int = 1) -> "LaurentPoly":
        return cls(_CTX.constant(c), eq, ep)

    @property
    def terms(self) -> dict:
        return {(int(e[0]) + self.eq, int(e[1]) + self.ep): int(c) for e, c in self.poly.terms()}

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_monomial(self) -> bool:
        return len(self.poly) == 1

    def _align(self, other: "LaurentPoly"):
        eq = min(self.eq, other.eq)
        ep = min(self.ep, other.ep)
        a = _shifted(self.poly, self.eq - eq, self.ep - ep)
        b = _shifted(other.poly, other.eq - eq, other.ep - ep)
        return a, b, eq, ep

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b, eq, ep = self._align(other)
        return LaurentPoly(a + b, eq, ep)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(-self.poly, self.eq, self.ep)

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return LaurentPoly(self.poly * other.poly, self.eq + other.eq, self.ep + other.ep)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial() or abs(int(self.poly.coeffs()[0])) != 1:
                raise ValueError("only unit monomials have Laurent inverses")
            return LaurentPoly(self.poly ** (-n), n * self.eq, n * self.ep)
        return LaurentPoly(self.poly ** n, n * self.eq, n * self.ep)

    def __eq__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return self.eq == other.eq and self.ep == other.ep and self.poly == other.poly

    def __hash__(self):
        return hash((self.eq, self.ep, str(self.poly)))

    def evaluate(self, q0, p0, modulus: int | None = None):
        """Evaluate at (q0, p0); exact Fraction, or an int modulo ``modulus``."""
        if modulus is None:
            q0, p0 = Fraction(q0), Fraction(p0)
            if (q0 == 0 and any(e[0] < 0 for e in self.terms)) or (
                p0 == 0 and any(e[1] < 0 for e in self.terms)
            ):
                raise VanishingDenominator("negative power of a zero parameter")
            return sum((c * q0 ** e[0] * p0 ** e[1] for e, c in self.terms.items()), Fraction(0))
        q0 %= modulus
        p0 %= modulus
        total = 0
        for e, c in self.terms.items():
            if (e[0] < 0 and q0 == 0) or (e[1] < 0 and p0 == 0):
                raise VanishingDenominator("negative power of a zero parameter")
            total += c * pow(q0, e[0], modulus) * pow(p0, e[1], modulus)
        return total % modulus

    def __str__(self):
        return _format_terms(self.terms)

    def __repr__(self):
        return f"LaurentPoly({self})"


def _as_laurent(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly(_CTX.constant(x))
    return NotImplemented


Scalar = Union["Coefficient", int, Fraction]


class Coefficient:
    """Element of Q(q, p12) kept as a reduced fraction.

    Stored as ``q^eq p12^ep * num / den`` with num and den coprime integer
    polynomials free of monomial content and den having a positive leading
    coefficient; this makes the representation canonical, so equality and
    hashing are structural.
    """

    __slots__ = ("_n", "_d", "_eq", "_ep")

    def __init__(self, num: Union[LaurentPoly, int] = 0, den: Union[LaurentPoly, int] = 1):
        num = _as_laurent(num)
        den = _as_laurent(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self._set(num.poly, den.poly, num.eq - den.eq, num.ep - den.ep)

    def _set(self, n, d, eq, ep):
        if n.is_zero():
            self._n, self._d, self._eq, self._ep = _ZERO, _ONE, 0, 0
            return
        n, a, b = _strip(n)
        d, c, e = _strip(d)
        eq += a - c
        ep += b - e
        if not d.is_one():
            g = n.gcd(d)
            if not g.is_one():
                n = n / g
                d = d / g
            if d.leading_coefficient() < 0:
                n, d = -n, -d
        self._n, self._d, self._eq, self._ep = n, d, eq, ep

    @classmethod
    def _raw(cls, n, d, eq, ep) -> "Coefficient":
        obj = cls.__new__(cls)
        obj._set(n, d, eq, ep)
        return obj

    @classmethod
    def from_fraction(cls, x: Fraction) -> "Coefficient":
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    # -- accessors -----------------------------------------------------
    @property
    def numerator(self) -> LaurentPoly:
        return LaurentPoly(self._n, self._eq, self._ep)

    @property
    def denominator(self) -> LaurentPoly:
        return LaurentPoly(self._d)

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def __bool__(self):
        return not self._n.is_zero()

    def is_one(self) -> bool:
        return self._eq == 0 and self._ep == 0 and self._n.is_one() and self._d.is_one()

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = _as_coef(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        eq = min(self._eq, other._eq)
        ep = min(self._ep, other._ep)
        a = _shifted(self._n, self._eq - eq, self._ep - ep)
        b = _shifted(other._n, other._eq - eq, other._ep - ep)
        if self._d == other._d:
            return Coefficient._raw(a + b, self._d, eq, ep)
        return Coefficient._raw(a * other._d + b * self._d, self._d * other._d, eq, ep)

    __radd__ = __add__

    def __neg__(self):
        obj = Coefficient.__new__(Coefficient)
        obj._n, obj._d, obj._eq, obj._ep = -self._n, self._d, self._eq, self._ep
        return obj

    def __sub__(self, other):
        other = _as_coef(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_coef(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return Coefficient()
        return Coefficient._raw(
            self._n * other._n, self._d * other._d, self._eq + other._eq, self._ep + other._ep
        )

    __rmul__ = __mul__

    def inverse(self) -> "Coefficient":
        if self.is_zero():
            raise ZeroDivisionError("division by zero coefficient")
        return Coefficient._raw(self._d, self._n, -self._eq, -self._ep)

    def __truediv__(self, other):
        other = _as_coef(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_coef(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return Coefficient(1)
        return Coefficient._raw(self._n ** n, self._d ** n, n * self._eq, n * self._ep)

    def __eq__(self, other):
        other = _as_coef(other)
        if other is NotImplemented:
            return other
        return (
            self._eq == other._eq
            and self._ep == other._ep
            and self._n == other._n
            and self._d == other._d
        )

    def __hash__(self):
        return hash((self._eq, self._ep, str(self._n), str(self._d)))

    # -- evaluation ----------------------------------------------------
    def evaluate(self, q0, p0, modulus: int | None = None):
        num = self.numerator.evaluate(q0, p0, modulus)
        den = self.denominator.evaluate(q0, p0, modulus)
        if den == 0:
            raise VanishingDenominator(f"denominator of {self} vanishes at ({q0}, {p0})")
        if modulus is None:
            return num / den
        return num * pow(den, -1, modulus) % modulus

    def total_degree_bound(self) -> int:
        """Degree of numerator plus denominator after clearing monomials."""
        n = self._n.total_degree() + abs(self._eq) + abs(self._ep)
        return n + self._d.total_degree()

    def __str__(self):
        return f"({self.numerator})/({self.denominator})"

    def __repr__(self):
        return f"Coefficient{self}"


def _as_coef(x):
    if isinstance(x, Coefficient):
        return x
    if isinstance(x, int):
        return Coefficient(x)
    if isinstance(x, Fraction):
        return Coefficient.from_fraction(x)
    if isinstance(x, LaurentPoly):
        return Coefficient(x)
    return NotImplemented


class GenericField:
    """Q(q, p12) with q and p12 algebraically independent."""

    name = "generic"
    t = None

    def __init__(self):
        self.q = Coefficient(LaurentPoly.monomial(1, 0))
        self.p12 = Coefficient(LaurentPoly.monomial(0, 1))
        self.p21 = Coefficient(LaurentPoly.monomial(-3, -1))
        self.zero = Coefficient(0)
        self.one = Coefficient(1)

    def from_int(self, n: int) -> Coefficient:
        return Coefficient(n)

    def coerce(self, x) -> Coefficient:
        out = _as_coef(x)
        if out is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into {self.name} field")
        return out

    def __repr__(self):
        return "GenericField()"


GENERIC = GenericField()


# -- cyclotomic specialization ------------------------------------------------


class CyclotomicContext:
    """Q(p12)[q]/Phi_t(q): q a primitive t-th root of unity."""

    def __init__(self, t: int, check: bool = True):
        if t < 1:
            raise ValueError("t must be positive")
        if check and (t <= 4 or t == 6):
            raise ValueError(f"order t={t} violates t > 4, t != 6")
        self.t = t
        cyc = flint.fmpz_poly.cyclotomic(t)
        self.modulus = _CTX.from_dict({(i, 0): int(c) for i, c in enumerate(cyc.coeffs()) if c})
        self.degree = cyc.degree()
        self.name = f"cyclotomic(t={t})"
        self.zero = CycloCoefficient(self, _ZERO, _ONE, 0)
        self.one = CycloCoefficient(self, _ONE, _ONE, 0)
        self.q = self.specialize(GENERIC.q)
        self.p12 = self.specialize(GENERIC.p12)
        self.p21 = self.specialize(GENERIC.p21)

    def reduce(self, poly):
        if poly.is_zero():
            return poly
        return divmod(poly, self.modulus)[1]

    def _laurent_to_poly(self, lp: LaurentPoly):
        """Return (poly, ep) with q-exponents made non-negative via q^t = 1."""
        if lp.is_zero():
            return _ZERO, 0
        eq = lp.eq % self.t
        return self.reduce(_shifted(lp.poly, eq, 0)), lp.ep

    def specialize(self, a) -> "CycloCoefficient":
        if isinstance(a, CycloCoefficient):
            return a
        a = GENERIC.coerce(a)
        n, ep_n = self._laurent_to_poly(a.numerator)
        d, ep_d = self._laurent_to_poly(a.denominator)
        if d.is_zero():
            raise VanishingDenominator(f"denominator of {a} vanishes modulo Phi_{self.t}")
        return CycloCoefficient(self, n, d, ep_n - ep_d)

    def from_int(self, n: int) -> "CycloCoefficient":
        return CycloCoefficient(self, _CTX.constant(n), _ONE, 0)

    def coerce(self, x) -> "CycloCoefficient":
        if isinstance(x, CycloCoefficient):
            if x.ctx is not self and x.ctx.t != self.t:
                raise TypeError("mixing cyclotomic contexts")
            return x
        return self.specialize(x)

    def __eq__(self, other):
        return isinstance(other, CyclotomicContext) and other.t == self.t

    def __hash__(self):
        return hash(("cyclotomic", self.t))

    def __repr__(self):
        return f"CyclotomicContext(t={self.t})"


class CycloCoefficient:
    """Element of Q(p12)[q]/Phi_t as ``p12^ep * num/den`` with reduced num, den.

    No canonical form is promised; equality is by cross-multiplication.
    """

    __slots__ = ("ctx", "_n", "_d", "_ep")
    __hash__ = None

    def __init__(self, ctx: CyclotomicContext, n, d, ep: int):
        self.ctx = ctx
        if n.is_zero():
            self._n, self._d, self._ep = _ZERO, _ONE, 0
            return
        n, a, b = _strip(n)
        d, c, e = _strip(d)
        # q-monomial content is a unit: move it into the numerator
        if a or c:
            k = (a - c) % ctx.t
            n = ctx.reduce(_shifted(n, k, 0))
            n, a2, b2 = _strip(n)
            b += b2
            if a2:
                n = ctx.reduce(_shifted(n, a2, 0))
        ep += b - e
        if not d.is_one():
            g = n.gcd(d)
            if not g.is_one():
                n = n / g
                d = d / g
            if d.leading_coefficient() < 0:
                n, d = -n, -d
        self._n, self._d, self._ep = n, d, ep

    def _wrap(self, n, d, ep):
        return CycloCoefficient(self.ctx, self.ctx.reduce(n), self.ctx.reduce(d), ep)

    def _co(self, other):
        if isinstance(other, CycloCoefficient):
            return other
        if isinstance(other, (int, Fraction, Coefficient, LaurentPoly)):
            return self.ctx.specialize(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def __bool__(self):
        return not self._n.is_zero()

    def __add__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        ep = min(self._ep, other._ep)
        a = _shifted(self._n, 0, self._ep - ep)
        b = _shifted(other._n, 0, other._ep - ep)
        if self._d == other._d:
            return self._wrap(a + b, self._d, ep)
        return self._wrap(a * other._d + b * self._d, self._d * other._d, ep)

    __radd__ = __add__

    def __neg__(self):
        return CycloCoefficient(self.ctx, -self._n, self._d, self._ep)

    def __sub__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return self.ctx.zero
        return self._wrap(self._n * other._n, self._d * other._d, self._ep + other._ep)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        return CycloCoefficient(self.ctx, self._d, self._n, -self._ep)

    def __truediv__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ctx.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    def is_one(self) -> bool:
        return (self - self.ctx.one).is_zero()

    def __str__(self):
        num = LaurentPoly(self._n, 0, self._ep)
        return f"({num})/({LaurentPoly(self._d)}) mod Phi_{self.ctx.t}"

    def __repr__(self):
        return f"CycloCoefficient{self}"


# -- functional surface ---------------------------------------------------


def coef_arith(a, b, op: str):
    """Field operation ``op`` in {add, sub, mul, div} on two scalars."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def is_zero(a) -> bool:
    return a.is_zero() if hasattr(a, "is_zero") else a == 0


def q_bracket(n: int, p):
    """1 + p + ... + p^(n-1)."""
    if n < 1:
        raise ValueError("n must be positive")
    total = p ** 0 if hasattr(p, "__pow__") else 1
    acc = total
    for _ in range(n - 1):
        acc = acc * p
        total = total + acc
    return total


def specialize(a, ctx: CyclotomicContext) -> CycloCoefficient:
    return ctx.specialize(a)


def eval_at_point(a, q0, p0, modulus: int | None = None):
    """Substitute q = q0, p12 = p0 (exactly, or modulo a prime)."""
    return _as_coef(a).evaluate(q0, p0, modulus)


def product(items: Iterable, one):
    out = one
    for x in items:
        out = out * x
    return out
