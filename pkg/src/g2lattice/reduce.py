"""Ideal membership in the free algebra, one constitution at a time.

The two-sided ideal generated by multihomogeneous relations is, in a fixed
constitution d, spanned by the padded products ``w1 * r * w2``.  Those rows
are brought to reduced row echelon form with pivots on the largest word, so
normal forms, membership and hardness are plain lookups.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable

import flint

from .coeff import GENERIC, VanishingDenominator
from .freealg import Constitution, SkewPolynomial, Word, constitution, sorted_words
from .lyndon import SuperLetter, words_of_constitution

EXACT_DEGREE_LIMIT = 9


class Echelon:
    """Sparse reduced row echelon form over any field.

    Rows are dicts key -> coefficient.  The pivot of a row is its smallest
    key in Python order, i.e. the largest word.  Every pivot row is monic
    and no pivot key occurs in another row.
    """

    def __init__(self):
        self.pivots: dict = {}
        self._occurs: dict = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict) -> dict:
        out = dict(vec)
        for key in [k for k in out if k in self.pivots]:
            c = out.pop(key)
            for k, a in self.pivots[key].items():
                if k == key:
                    continue
                s = out.get(k)
                t = a * c
                s = -t if s is None else s - t
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return out

    def add(self, vec: dict) -> bool:
        r = self.reduce(vec)
        if not r:
            return False
        lead = min(r)
        inv = r[lead] ** -1
        r = {k: a * inv for k, a in r.items()}
        for p in list(self._occurs.get(lead, ())):
            row = self.pivots[p]
            c = row.pop(lead)
            for k, a in r.items():
                if k == lead:
                    continue
                s = row.get(k)
                t = a * c
                s = -t if s is None else s - t
                if s:
                    if k not in row:
                        self._occurs.setdefault(k, set()).add(p)
                    row[k] = s
                else:
                    if k in row:
                        del row[k]
                        self._occurs[k].discard(p)
        self._occurs.pop(lead, None)
        for k in r:
            if k != lead:
                self._occurs.setdefault(k, set()).add(lead)
        self.pivots[lead] = r
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


@dataclass
class IdealBlock:
    constitution: Constitution
    echelon: Echelon
    field: object = GENERIC
    n_generators: int = 0

    @property
    def rank(self) -> int:
        return self.echelon.rank

    @property
    def pivot_words(self) -> set:
        return set(self.echelon.pivots)

    @property
    def rows(self) -> list:
        """Echelon rows as polynomials, leading words strictly decreasing."""
        return [
            SkewPolynomial(self.echelon.pivots[w], self.field)
            for w in sorted_words(self.echelon.pivots, descending=True)
        ]

    def reduce(self, f: SkewPolynomial) -> SkewPolynomial:
        return SkewPolynomial(self.echelon.reduce(f.terms), f.field)

    @property
    def quotient_dimension(self) -> int:
        return math.comb(sum(self.constitution), self.constitution[0]) - self.rank


class RelationSet:
    """Multihomogeneous generators of a two-sided ideal, with a block cache."""

    def __init__(self, generators: Iterable[SkewPolynomial], field=GENERIC):
        self.generators = list(generators)
        self.field = field
        for g in self.generators:
            if g.is_zero() or not g.is_homogeneous():
                raise ValueError("relations must be nonzero and multihomogeneous")
        self._blocks: dict = {}

    def specialize(self, field) -> "RelationSet":
        return RelationSet([g.map_coefficients(field.coerce, field) for g in self.generators], field)

    def block(self, d: Constitution) -> IdealBlock:
        d = tuple(d)
        blk = self._blocks.get(d)
        if blk is None:
            blk = ideal_block(self, d)
            self._blocks[d] = blk
        return blk


def _padded_rows(rels: RelationSet, d: Constitution):
    for g in rels.generators:
        c = g.constitution()
        rest = (d[0] - c[0], d[1] - c[1])
        if rest[0] < 0 or rest[1] < 0:
            continue
        for w in words_of_constitution(rest):
            for k in range(len(w) + 1):
                left, right = w[:k], w[k:]
                yield {left + u + right: a for u, a in g.terms.items()}


def ideal_block(rels: RelationSet, d: Constitution) -> IdealBlock:
    """Echelonized span of all w1 r w2 with constitution d."""
    ech = Echelon()
    n = 0
    for row in _padded_rows(rels, d):
        n += 1
        ech.add(row)
    return IdealBlock(tuple(d), ech, rels.field, n)


def normal_form(f: SkewPolynomial, rels: RelationSet) -> SkewPolynomial:
    out: dict = {}
    for d, comp in f.components().items():
        out.update(rels.block(d).echelon.reduce(comp.terms))
    return SkewPolynomial(out, f.field)


def is_in_ideal(f: SkewPolynomial, rels: RelationSet) -> bool:
    return all(rels.block(d).echelon.contains(comp.terms) for d, comp in f.components().items())


def is_hard(s, rels: RelationSet) -> bool:
    """False iff the word of s equals, modulo the ideal, a combination of smaller words."""
    w = s.word if isinstance(s, SuperLetter) else tuple(s)
    return w not in rels.block(constitution(w)).echelon.pivots


def hardness_witness(w: Word, rels: RelationSet):
    """The echelon row expressing w through smaller words, or None if w is hard."""
    row = rels.block(constitution(w)).echelon.pivots.get(tuple(w))
    return None if row is None else SkewPolynomial(row, rels.field)


# -- probabilistic path --------------------------------------------------------


class ModularField:
    """Z/P with q, p12 sent to fixed residues; coerces exact coefficients by evaluation."""

    def __init__(self, modulus: int, q0: int, p0: int):
        self.modulus = modulus
        self.q0 = q0 % modulus
        self.p0 = p0 % modulus
        self.zero = flint.nmod(0, modulus)
        self.one = flint.nmod(1, modulus)
        self.q = flint.nmod(self.q0, modulus)
        self.p12 = flint.nmod(self.p0, modulus)
        self.p21 = (self.q ** 3 * self.p12) ** -1
        self.name = f"GF({modulus})@({self.q0},{self.p0})"

    def from_int(self, n: int):
        return flint.nmod(n, self.modulus)

    def coerce(self, x):
        if isinstance(x, flint.nmod):
            return x
        if isinstance(x, int):
            return flint.nmod(x, self.modulus)
        return flint.nmod(x.evaluate(self.q0, self.p0, self.modulus), self.modulus)


def random_prime(rng: random.Random, bits: int = 62) -> int:
    """A random prime in (2^(bits-1), 2^bits)."""
    while True:
        n = rng.randrange(2 ** (bits - 1) + 1, 2 ** bits, 2)
        if flint.fmpz(n).is_prime():
            return n


@dataclass
class Verdict:
    """Outcome of a membership test; truthy iff the element lies in the ideal."""

    member: bool
    method: str
    trials: int = 0
    error_bound: float = 0.0
    points: list = dc_field(default_factory=list)
    residue: SkewPolynomial | None = None

    def __bool__(self):
        return self.member


def _modular_rank_test(rels: RelationSet, comp: SkewPolynomial, d, q0: int, p0: int, modulus: int):
    """(rank of the block, rank with comp appended), everything reduced mod P."""
    words = sorted_words(words_of_constitution(d), descending=True)
    col = {w: i for i, w in enumerate(words)}
    n = len(words)
    fld = ModularField(modulus, q0, p0)
    gens = [{u: int(fld.coerce(a)) for u, a in g.terms.items()} for g in rels.generators]
    entries: list = []
    nrows = 0
    for g, mg in zip(rels.generators, gens):
        c = g.constitution()
        rest = (d[0] - c[0], d[1] - c[1])
        if rest[0] < 0 or rest[1] < 0:
            continue
        for w in words_of_constitution(rest):
            for k in range(len(w) + 1):
                row = [0] * n
                left, right = w[:k], w[k:]
                for u, a in mg.items():
                    row[col[left + u + right]] = a
                entries.extend(row)
                nrows += 1
    frow = [0] * n
    for w, a in comp.terms.items():
        frow[col[w]] = int(fld.coerce(a))
    base = flint.nmod_mat(nrows, n, entries, modulus).rank() if nrows else 0
    full = flint.nmod_mat(nrows + 1, n, entries + frow, modulus).rank()
    return base, full


def _degree_bound(f: SkewPolynomial, rels: RelationSet, d) -> int:
    """Total degree of a nonzero minor certifying the generic ranks (after clearing denominators)."""
    rel_deg = max(int(c.total_degree_bound()) for g in rels.generators for c in g.terms.values())
    f_deg = sum(int(c.total_degree_bound()) for c in f.terms.values())
    n_words = math.comb(sum(d), d[0])
    return n_words * max(rel_deg, 1) + f_deg


def probabilistic_is_zero(
    f: SkewPolynomial, rels: RelationSet, trials: int = 3, seed: int | None = 0, bits: int = 62
) -> Verdict:
    """Membership test with all scalars evaluated at random points of large prime fields.

    A rank increase at any point refutes membership.  Agreement on every
    trial confirms it with error at most (degree bound / P) ** trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if f.is_zero():
        return Verdict(True, "probabilistic", trials, 0.0)
    rng = random.Random(seed)
    comps = f.components()
    bound = 1.0
    points = []
    done = 0
    while done < trials:
        modulus = random_prime(rng, bits)
        q0, p0 = rng.randrange(2, modulus - 1), rng.randrange(2, modulus - 1)
        try:
            ranks = [_modular_rank_test(rels, comp, d, q0, p0, modulus) for d, comp in comps.items()]
        except (VanishingDenominator, ZeroDivisionError):
            continue
        points.append((modulus, q0, p0))
        done += 1
        if any(full > base for base, full in ranks):
            return Verdict(False, "probabilistic", done, 0.0, points)
        worst = max(_degree_bound(comp, rels, d) for d, comp in comps.items())
        bound *= min(1.0, worst / modulus)
    return Verdict(True, "probabilistic", trials, bound, points)


EXACT_WORD_LIMIT = 500


def ideal_membership(
    f: SkewPolynomial, rels: RelationSet, mode: str = "auto", trials: int = 3, seed: int | None = 0
) -> Verdict:
    """Exact when forced or when every block is small, probabilistic otherwise.

    In ``auto`` mode a block is small if its total degree is at most
    EXACT_DEGREE_LIMIT or it has at most EXACT_WORD_LIMIT words.
    """
    if mode not in ("auto", "exact", "probabilistic"):
        raise ValueError(f"unknown mode {mode!r}")
    if f.is_zero():
        return Verdict(True, "exact")
    small = all(
        sum(d) <= EXACT_DEGREE_LIMIT or math.comb(sum(d), d[0]) <= EXACT_WORD_LIMIT for d in f.components()
    )
    if mode == "probabilistic" or (mode == "auto" and not small):
        return probabilistic_is_zero(f, rels, trials, seed)
    nf = normal_form(f, rels)
    return Verdict(nf.is_zero(), "exact", residue=nf)
