"""Right coideal subalgebras containing the coradical, through differential closure.

A homogeneous right coideal subalgebra is determined by its PBW generators,
each a hard letter plus a tail of smaller PBW monomials.  The tail
coefficients are pinned down by asking which derivatives may stay inside
the subalgebra; the lattice is then generated by closing single elements
under the derivations and a few brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product as iproduct

from .coeff import GENERIC, CyclotomicContext
from .freealg import SkewPolynomial, compact_word, constitution, derive_sequence, leading_term
from .g2 import (
    LETTER_ORDER,
    LETTER_WORDS,
    G2Instance,
    _check,
    build_g2,
    format_monomial,
    generic_g2,
    monomial_value,
    pbw_decompose,
    pbw_monomials,
    render_coordinates,
)
from .reduce import Echelon, normal_form

UNKNOWNS = ("alpha", "beta", "gamma", "delta", "epsilon", "tau")

# tails in the order their unknowns are named (smallest letter leftmost)
LISTED_TAILS = {
    "B": [("F", "A")],
    "D": [("F", "F", "A"), ("F", "B")],
    "E": [("F", "F", "F", "A"), ("F", "F", "B"), ("F", "D")],
    "C": [("F", "F", "F", "A", "A"), ("F", "F", "B", "A"), ("F", "D", "A"), ("F", "B", "B"), ("D", "B"), ("E", "A")],
}

# derivative sequences per template, written left to right as operators act
# on the left (so the last entry is applied first)
LISTED_SEQUENCES = {
    "B": [(2,), (1,)],
    "D": [(2,), (2, 2), (1,), (1, 2)],
    "E": [(2,), (2, 2), (2, 2, 2), (1, 2, 2), (1, 2), (1,)],
    "C": [(2, 1, 2, 2), (2, 2, 2, 1), (2, 2, 2), (2, 2, 1, 2), (1, 1), (1, 2, 1), (1, 2, 2, 1), (1, 1, 2, 2),
          (1, 1, 2), (1, 2, 1, 2)],
}

X1_BRANCH = "x1"
X2_BRANCH = "x2"


class InconsistentSystem(ValueError):
    pass


class ClosureError(RuntimeError):
    pass


def format_sequence(seq) -> str:
    out = []
    i = 0
    while i < len(seq):
        j = i
        while j < len(seq) and seq[j] == seq[i]:
            j += 1
        out.append(f"d{seq[i]}" + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return " ".join(out)


# -- templates -----------------------------------------------------------------


@dataclass
class GeneratorTemplate:
    head: str
    tails: list
    unknowns: tuple
    g: G2Instance = dc_field(repr=False)

    @property
    def constitution(self):
        return constitution(LETTER_WORDS[self.head])

    def parts(self) -> dict:
        """None -> head value, unknown -> value of its tail monomial."""
        out = {None: self.g.value(self.head)}
        for u, m in zip(self.unknowns, self.tails):
            out[u] = monomial_value(self.g, m)
        return out

    def instantiate(self, values: dict) -> SkewPolynomial:
        parts = self.parts()
        out = parts[None]
        for u in self.unknowns:
            c = values.get(u)
            if c is not None and c:
                out = out + parts[u].scale(c)
        return out

    def render(self) -> str:
        terms = [f"[{self.head}]"] + [f"{u} {format_monomial(m)}" for u, m in zip(self.unknowns, self.tails)]
        return " + ".join(terms)


def mechanical_tails(head: str) -> list:
    """Increasing PBW monomials of the head's constitution starting with a smaller letter."""
    d = constitution(LETTER_WORDS[head])
    rank = LETTER_ORDER.index
    return [m for m in pbw_monomials(d) if rank(m[0]) > rank(head)]


def templates(g: G2Instance | None = None) -> dict:
    """Templates for the letters that admit tails, keyed by head."""
    g = g or generic_g2()
    out = {}
    for head in ("B", "D", "E", "C"):
        mech = mechanical_tails(head)
        listed = LISTED_TAILS[head]
        if sorted(mech) != sorted(listed):
            raise AssertionError(f"tails for [{head}] differ: {mech} vs {listed}")
        out[head] = GeneratorTemplate(head, listed, UNKNOWNS[:len(listed)], g)
    return out


# -- derivative constraints --------------------------------------------------


def apply_operators(seq, f: SkewPolynomial, g: G2Instance) -> SkewPolynomial:
    """d_{s1} d_{s2} ... d_{sk} (f): the rightmost operator acts first."""
    return derive_sequence(tuple(reversed(seq)), f, g.chars)


def derivative_parts(tmpl: GeneratorTemplate, seq) -> dict:
    return {k: apply_operators(seq, v, tmpl.g) for k, v in tmpl.parts().items()}


def _pure_power(parts: dict):
    """(letter, length) if every part lives in the span of one x_i^k, else None."""
    words = {w for p in parts.values() for w in p.terms}
    if len(words) != 1:
        return None
    (w,) = words
    if not w or len(set(w)) != 1:
        return None
    return w[0], len(w)


@dataclass
class ConstraintSystem:
    unknowns: tuple
    rows: list
    labels: list
    field: object = GENERIC

    def __len__(self):
        return len(self.rows)

    def combined(self, other: "ConstraintSystem") -> "ConstraintSystem":
        return ConstraintSystem(self.unknowns, self.rows + other.rows, self.labels + other.labels, self.field)


def derivative_constraints(tmpl: GeneratorTemplate, branch: str, sequences=None) -> ConstraintSystem:
    """Linear conditions making forbidden derivatives vanish.

    On the x1 branch the subalgebra contains x1 and not x2, so coefficients
    in front of powers of x2 must vanish; on the x2 branch the same holds for
    powers of x1.  Each row maps an unknown (or None for the constant) to
    its coefficient.
    """
    forbidden = 2 if branch == X1_BRANCH else 1
    sequences = LISTED_SEQUENCES[tmpl.head] if sequences is None else sequences
    rows, labels = [], []
    for seq in sequences:
        parts = derivative_parts(tmpl, seq)
        pure = _pure_power(parts)
        if pure is None or pure[0] != forbidden:
            continue
        w = (pure[0],) * pure[1]
        row = {k: p.coefficient(w) for k, p in parts.items() if p.coefficient(w)}
        if row:
            rows.append(row)
            labels.append(format_sequence(seq))
    return ConstraintSystem(tmpl.unknowns, rows, labels, tmpl.g.field)


def full_length_sequences(tmpl: GeneratorTemplate, branch: str) -> list:
    """Every operator word landing on a pure power of the forbidden letter."""
    m1, m2 = tmpl.constitution
    out = []
    if branch == X1_BRANCH:
        counts = [(m1, j) for j in range(m2)]
    else:
        counts = [(i, m2) for i in range(m1)]
    for n1, n2 in counts:
        for seq in set(iproduct((1, 2), repeat=n1 + n2)):
            if seq.count(1) == n1:
                out.append(seq)
    return sorted(out)


@dataclass
class Solution:
    unknowns: tuple
    pivots: dict
    free: tuple

    def particular(self, free_values: dict | None = None, field=GENERIC) -> dict:
        free_values = free_values or {}
        out = {u: field.coerce(free_values.get(u, 0)) for u in self.free}
        for u, row in self.pivots.items():
            val = -row.get(None, field.zero) if None in row else field.zero
            for f in self.free:
                if f in row:
                    val = val - row[f] * out[f]
            out[u] = val
        return out

    @property
    def unique(self) -> bool:
        return not self.free


def solve_constraints(system: ConstraintSystem) -> Solution:
    """Exact elimination; raises InconsistentSystem if no solution exists."""
    index = {u: i for i, u in enumerate(system.unknowns)}
    const = len(system.unknowns)
    ech = Echelon()
    for row in system.rows:
        ech.add({(const if k is None else index[k]): c for k, c in row.items()})
    if const in ech.pivots:
        raise InconsistentSystem("constraints force a nonzero constant to vanish")
    pivots = {}
    for p, row in ech.pivots.items():
        pivots[system.unknowns[p]] = {(None if k == const else system.unknowns[k]): c
                                      for k, c in row.items() if k != p}
    free = tuple(u for u in system.unknowns if u not in pivots)
    return Solution(system.unknowns, pivots, free)


# -- canonical generators and closure ----------------------------------------


def displayed_bracket(g: G2Instance) -> SkewPolynomial:
    """[[x1,x2],[x2,[x2,x1]]], the label of the C-type x1-side node."""
    x1, x2 = g.x(1), g.x(2)
    return g.bracket(g.bracket(x1, x2), g.bracket(x2, g.bracket(x2, x1)))


def reversed_bracket(g: G2Instance) -> SkewPolynomial:
    """[[x2,[x2,x1]],[x2,x1]]: the brackets of the label taken the other way round."""
    x1, x2 = g.x(1), g.x(2)
    b = g.bracket(x2, x1)
    return g.bracket(g.bracket(x2, b), b)


def solved_generator(g: G2Instance, head: str, branch: str) -> SkewPolynomial:
    """The template instance fixed by the branch constraints (free unknowns set to 0)."""
    tmpl = templates(g)[head]
    return tmpl.instantiate(solve_template(tmpl, branch).particular(field=g.field))


def span_of(g: G2Instance, gens: list, d) -> Echelon:
    """Span of the ordered PBW monomials of constitution d in gens = [(value, head letter)]."""
    gens = sorted(gens, key=lambda vh: -LETTER_ORDER.index(vh[1]))
    consts = [constitution(LETTER_WORDS[h]) for _, h in gens]
    ech = Echelon()
    for combo in _multisets(consts, d):
        val = g.scalar(1)
        for (v, _), k in zip(gens, combo):
            for _ in range(k):
                val = val * v
        ech.add(normal_form(val, g.rels).terms)
    return ech


def invariance_constraints(tmpl: GeneratorTemplate, lower: list) -> ConstraintSystem:
    """Rows asking d1 and d2 of the template to lie in the algebra generated by lower.

    lower is a list of (value, head letter); reduction modulo a fully reduced
    echelon form is linear, so each surviving word gives one row.
    """
    g = tmpl.g
    rows, labels = [], []
    for i in (1, 2):
        parts = {k: normal_form(g.d(i, v), g.rels) for k, v in tmpl.parts().items()}
        d = next((p.constitution() for p in parts.values() if not p.is_zero()), None)
        if d is None:
            continue
        ech = span_of(g, lower, d)
        red = {k: ech.reduce(p.terms) for k, p in parts.items()}
        for w in sorted({w for r in red.values() for w in r}):
            row = {k: r[w] for k, r in red.items() if w in r}
            rows.append(row)
            labels.append(f"d{i} at {compact_word(w)}")
    return ConstraintSystem(tmpl.unknowns, rows, labels, g.field)


def invariant_generator(g: G2Instance) -> tuple:
    """The C-type x1-side generator: the [C] template instance whose derivatives stay
    in the algebra generated by x1 and [x2,x1].  Returns (value, Solution)."""
    tmpl = templates(g)["C"]
    x1, b = g.x(1), g.bracket(g.x(2), g.x(1))
    system = derivative_constraints(tmpl, X1_BRANCH).combined(invariance_constraints(tmpl, [(x1, "A"), (b, "B")]))
    sol = solve_constraints(system)
    return tmpl.instantiate(sol.particular(field=g.field)), sol


def canonical_generators(g: G2Instance) -> dict:
    """name -> (value, head letter) for the ten possible PBW generators.

    The C-type generator on the x1 side keeps its displayed label but its
    value is ``invariant_generator``; the label itself generates everything.
    """
    x1, x2 = g.x(1), g.x(2)
    br = g.bracket
    b_rev = br(x2, x1)
    d_rev = br(x2, b_rev)
    e_rev = br(x2, d_rev)
    values = {
        "x1": x1,
        "[x2,x1]": b_rev,
        "[x2,[x2,x1]]": d_rev,
        "[x2,[x2,[x2,x1]]]": e_rev,
        C_LABEL: invariant_generator(g)[0],
        "x2": x2,
        "[B]": g.value("B"),
        "[D]": g.value("D"),
        "[E]": g.value("E"),
        "[C]": g.value("C"),
    }
    by_word = {w: n for n, w in LETTER_WORDS.items()}
    return {name: (v, by_word[leading_term(v)[0]]) for name, v in values.items()}


C_LABEL = "[[x1,x2],[x2,[x2,x1]]]"
CANONICAL_ORDER = ("x1", "[x2,x1]", C_LABEL, "[x2,[x2,x1]]", "[x2,[x2,[x2,x1]]]",
                   "x2", "[E]", "[D]", "[C]", "[B]")
FULL = frozenset(CANONICAL_ORDER)

# brackets the closure may take among found generators: [[D],x2] = [E], [[B],x2] = [D],
# [[B],[D]] = [C], and on the x1 side the two products landing in constitution (2,3)
BRACKET_RULES = (("[D]", "x2"), ("[B]", "x2"), ("[B]", "[D]"),
                 ("[x2,[x2,x1]]", "[x2,x1]"), ("[x2,[x2,[x2,x1]]]", "x1"))


class Closure:
    """Closure of elements under derivations and brackets, tracked by PBW generators."""

    def __init__(self, g: G2Instance, bracket_bound=None):
        self.g = g
        self.canon = canonical_generators(g)
        self.bracket_bound = bracket_bound
        self._span_cache: dict = {}

    def _span(self, names: frozenset, d) -> Echelon:
        key = (names, d)
        ech = self._span_cache.get(key)
        if ech is None:
            ech = self._span_cache[key] = span_of(self.g, [self.canon[n] for n in names], d)
        return ech

    def explained(self, f: SkewPolynomial, names: frozenset) -> bool:
        if f.is_zero():
            return True
        if "x1" in names and "x2" in names:
            return True
        for d, comp in f.components().items():
            if d == (0, 0):
                continue
            if self._span(names, d).reduce(normal_form(comp, self.g.rels).terms):
                return False
        return True

    def _brackets(self, names: set, new: str) -> list:
        out = []
        if self.bracket_bound is None:
            pairs = [(a, b) for a, b in BRACKET_RULES if new in (a, b) and a in names and b in names]
        else:
            pairs = [(a, new) for a in names] + [(new, a) for a in names if a != new]
        for a, b in pairs:
            va, vb = self.canon[a][0], self.canon[b][0]
            d = tuple(x + y for x, y in zip(va.degree(), vb.degree()))
            if self.bracket_bound is not None and not (d[0] <= self.bracket_bound[0] and d[1] <= self.bracket_bound[1]):
                continue
            out.append(self.g.bracket(va, vb))
        return out

    def run(self, gens) -> frozenset:
        if isinstance(gens, SkewPolynomial):
            gens = [gens]
        names: set = set()
        pending: list = []
        work = [f for f in gens if not f.is_zero()]
        seen_heads = set()
        while work or pending:
            if not work:
                if not self._retry(pending, names, work, seen_heads):
                    rest = "; ".join(str(p) for p in pending[:3])
                    raise ClosureError(f"closure escapes the canonical list: {rest}")
                continue
            f = work.pop()
            if "x1" in names and "x2" in names:
                return FULL
            if f.is_zero() or f.degree() == (0, 0):
                continue
            work.extend(self._derivatives(f))
            if self.explained(f, frozenset(names)):
                continue
            added = self._adopt(f, names, seen_heads)
            if added is None:
                pending.append(f)
                continue
            work.extend(self._derivatives(self.canon[added][0]))
            work.extend(self._brackets(names, added))
        if "x1" in names and "x2" in names:
            return FULL
        return frozenset(names)

    def _derivatives(self, f):
        return [h for h in (self.g.d(1, f), self.g.d(2, f)) if not h.is_zero()]

    def _adopt(self, f, names: set, seen_heads: set):
        if not f.is_homogeneous():
            return None
        d = f.constitution()
        fits = []
        for c in CANONICAL_ORDER:
            val, head = self.canon[c]
            if head in seen_heads or val.degree() != d:
                continue
            if self.explained(f, frozenset(names | {c})):
                fits.append(c)
        if not fits:
            return None
        if len(fits) > 1:
            raise ClosureError(f"ambiguous canonical generator: {fits}")
        names.add(fits[0])
        seen_heads.add(self.canon[fits[0]][1])
        return fits[0]

    def _retry(self, pending: list, names: set, work: list, seen_heads: set) -> bool:
        for i, f in enumerate(pending):
            if self.explained(f, frozenset(names)):
                pending.pop(i)
                return True
            added = self._adopt(f, names, seen_heads)
            if added is not None:
                pending.pop(i)
                work.extend(self._derivatives(self.canon[added][0]))
                work.extend(self._brackets(names, added))
                return True
        return False


def _multisets(consts, d):
    """Exponent vectors e with sum e_i * consts_i = d."""
    if not consts:
        if d == (0, 0):
            yield ()
        return
    c = consts[0]
    k = 0
    while k * c[0] <= d[0] and k * c[1] <= d[1]:
        for rest in _multisets(consts[1:], (d[0] - k * c[0], d[1] - k * c[1])):
            yield (k,) + rest
        if c == (0, 0):
            break
        k += 1


def closure(gen, g: G2Instance | None = None, bracket_bound=None) -> frozenset:
    """Canonical PBW generators of the smallest differential subalgebra containing gen."""
    return Closure(g or generic_g2(), bracket_bound).run(gen)


# -- the lattice ---------------------------------------------------------------


@dataclass
class CoidealNode:
    name: str
    generator: str
    pbw_set: frozenset
    covers: list = dc_field(default_factory=list)
    chain: str = ""
    expansion: str = ""

    def record(self) -> dict:
        return {
            "name": self.name,
            "generator": self.generator,
            "expansion": self.expansion,
            "pbw_set": sorted(self.pbw_set, key=CANONICAL_ORDER.index),
            "covers": list(self.covers),
        }


# (display label, generator name, chain), each chain listed bottom to top in the expected order
NODE_SPECS = (
    ("<x2>", "x2", "right"),
    ("<[[[x1,x2],x2],x2]>", "[E]", "right"),
    ("<[[x1,x2],x2]>", "[D]", "right"),
    ("<[[x1,x2],[[x1,x2],x2]]>", "[C]", "right"),
    ("<[x1,x2]>", "[B]", "right"),
    ("<x1>", "x1", "left"),
    ("<[x2,x1]>", "[x2,x1]", "left"),
    ("<[x2,[x2,x1]]>", "[x2,[x2,x1]]", "left"),
    ("<[x2,[x2,[x2,x1]]]>", "[x2,[x2,[x2,x1]]]", "left"),
    ("<[[x1,x2],[x2,[x2,x1]]]>", C_LABEL, "left"),
)
BOTTOM = "k[G]"
TOP = "U_q^+(g)"


def _expected_sets() -> dict:
    out = {}
    for chain in ("right", "left"):
        acc: set = set()
        for _, gen, c in NODE_SPECS:
            if c == chain:
                acc = acc | {gen}
                out[gen] = frozenset(acc)
    return out


# expected PBW generators of each node: everything up to it on its chain
EXPECTED_PBW_SETS = _expected_sets()


@dataclass
class Lattice:
    nodes: list
    edges: list

    def node(self, name: str) -> CoidealNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def to_dot(self) -> str:
        lines = ["digraph coideals {", "  rankdir=BT;"]
        for i, n in enumerate(self.nodes):
            lines.append(f'  n{i} [label="{n.name}"];')
        idx = {n.name: i for i, n in enumerate(self.nodes)}
        for a, b in self.edges:
            lines.append(f"  n{idx[a]} -> n{idx[b]};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def records(self) -> list:
        return [n.record() for n in self.nodes]


def _hasse(nodes: list) -> list:
    edges = []
    for a in nodes:
        for b in nodes:
            if a is b or not a.pbw_set < b.pbw_set:
                continue
            if not any(a.pbw_set < c.pbw_set < b.pbw_set for c in nodes):
                edges.append((a.name, b.name))
    return edges


def enumerate_lattice(g: G2Instance | None = None) -> Lattice:
    """Close each labelled generator; nodes are listed chain by chain, smallest first."""
    g = g or generic_g2()
    clo = Closure(g)
    canon = clo.canon
    found = []
    for label, gen, chain in NODE_SPECS:
        value = canon[gen][0]
        found.append(CoidealNode(label, gen, clo.run(value), chain=chain,
                                 expansion=render_coordinates(pbw_decompose(value, g))))
    found.sort(key=lambda n: (n.chain != "right", len(n.pbw_set)))
    nodes = [CoidealNode(BOTTOM, "1", frozenset(), chain="bottom"), *found,
             CoidealNode(TOP, "x1, x2", FULL, chain="top")]
    sets = [n.pbw_set for n in nodes]
    if len(set(sets)) != len(sets):
        raise ClosureError("two generators produced the same subalgebra")
    edges = _hasse(nodes)
    for n in nodes:
        n.covers = [b for a, b in edges if a == n.name]
    return Lattice(nodes, edges)


def _chain_edges(chains) -> set:
    out = set()
    for chain in chains:
        out.add((BOTTOM, chain[0]))
        out.update(zip(chain, chain[1:]))
        out.add((chain[-1], TOP))
    return out


def expected_edges() -> set:
    """Covering pairs of the expected chains."""
    return _chain_edges([[s[0] for s in NODE_SPECS if s[2] == c] for c in ("right", "left")])


def two_chain_edges(lat: Lattice) -> set:
    """The covering pairs of two chains through the proper nodes of lat, each ordered by size."""
    return _chain_edges([[n.name for n in lat.nodes if n.chain == c] for c in ("right", "left")])


def lattice_signature(lat: Lattice) -> tuple:
    """Field-independent shape: node names with PBW sets, and the edges."""
    return (tuple((n.name, tuple(sorted(n.pbw_set))) for n in lat.nodes), tuple(sorted(lat.edges)))


# -- verification ----------------------------------------------------------------


# (template, line) -> the corrected reading of a displayed identity that is misprinted
MISPRINTS = {("C", 1): "beta carries (1 - q^-3), displayed as (1 + q^-3)"}


def expected_lines(g: G2Instance, corrected: bool = False) -> dict:
    """The derivative identities for each template, as (sequence, word, affine form in the unknowns).

    Lines whose value is not a multiple of a single word are given as a
    mapping key -> polynomial instead.
    """
    F = g.field
    q, p21, one = F.q, F.p21, F.one
    u1, u2, u3 = one - q ** -3, one - q ** -2, one - q ** -1
    q2, q3 = one + q, one + q + q ** 2
    c3 = one + q ** 3
    x1w, x2w = (1,), (2,)

    def lin(**kw):
        return kw

    B, Dv = g.value("B"), g.value("D")
    x2x1 = SkewPolynomial.word((2, 1), field=F)
    x2sq_x1 = SkewPolynomial.word((2, 2, 1), field=F)
    x2B = g.x(2) * B

    out = {
        "B": [
            ((2,), x1w, lin(alpha=one)),
            ((1,), x2w, lin(const=u1, alpha=p21)),
        ],
        "D": [
            ((2,), None, {"alpha": x2x1.scale(q2), "beta": B}),
            ((2, 2), x1w, lin(alpha=q2)),
            ((1,), (2, 2), lin(const=u1 * u2, alpha=p21 ** 2, beta=p21 * u1)),
            ((1, 2), x2w, lin(alpha=q2 * p21, beta=u1)),
        ],
        "E": [
            ((2,), None, {"alpha": x2sq_x1.scale(q3), "beta": x2B.scale(q2), "gamma": Dv}),
            ((2, 2), None, {"alpha": x2x1.scale(q3 * q2), "beta": B.scale(q2)}),
            ((2, 2, 2), x1w, lin(alpha=q3 * q2)),
            ((1, 2, 2), x2w, lin(alpha=q2 * q3 * p21, beta=q2 * u1)),
            ((1, 2), (2, 2), lin(alpha=p21 ** 2 * q3, beta=p21 * q2 * u1, gamma=u1 * u2)),
            ((1,), (2, 2, 2), lin(const=u1 * u2 * u3, alpha=p21 ** 3, beta=p21 ** 2 * u1, gamma=p21 * u1 * u2)),
        ],
    }

    # the [C] template: shared sub-expressions first
    def S():
        return lin(alpha=p21 ** 3 * c3, beta=p21 ** 2 * u1, gamma=p21 * u1 * u2, tau=u1 * u2 * u3)

    def T():
        return lin(beta=p21 ** 3 * q ** 3, delta=p21 * u1 + p21 * q * u1, epsilon=u1 * u2)

    def R():
        return lin(alpha=p21 ** 2 * q3 * c3, beta=p21 * q2 * u1, gamma=u1 * u2)

    out["C"] = [
        ((2, 1, 2, 2), x1w, _scale_lin(lin(alpha=p21 * q3 * c3, beta=u1 if corrected else one + q ** -3), q2)),
        ((2, 2, 2, 1), x1w, _scale_lin(S(), q3 * q2)),
        ((2, 2, 2), (1, 1), lin(alpha=q3 * q2)),
        ((2, 2, 1, 2), x1w, _scale_lin(R(), q2)),
        ((1, 1), (2, 2, 2), _scale_lin(_add_lin(
            _scale_lin(S(), p21 ** 2),
            _scale_lin(T(), p21 * u1),
            _scale_lin(lin(gamma=p21 ** 3 * q ** 3, const=q ** 2 * u1 ** 2, delta=p21 ** 2 * q ** 3 * u1,
                           epsilon=p21 * q ** 2 * u1), u1 * u2),
            _scale_lin(lin(epsilon=p21 * u1, tau=p21 ** 2, const=u1 * (one - q ** -1 - q ** -2)),
                       u1 * u2 * u3 * q ** 3),
        ), p21)),
        ((1, 2, 1), (2, 2), _add_lin(
            _scale_lin(S(), p21 ** 2 * q3),
            _scale_lin(T(), p21 * q2 * u1),
            _scale_lin(lin(gamma=p21 ** 3 * q, const=u1 ** 2, delta=p21 ** 2 * q * u1, epsilon=p21 * u1),
                       u1 * u2 * q ** 2),
        )),
        ((1, 2, 2, 1), x2w, _scale_lin(_add_lin(_scale_lin(S(), p21 * q3), _scale_lin(T(), u1)), q2)),
        ((1, 1, 2, 2), x2w, _scale_lin(lin(alpha=p21 * q3, beta=u1), p21 * q2 * c3)),
        ((1, 1, 2), (2, 2), _scale_lin(_add_lin(
            _scale_lin(R(), p21),
            _scale_lin(lin(beta=p21 ** 2 * q ** 3, delta=u1), u1 * q2),
            _scale_lin(lin(gamma=p21, delta=u1), u1 * u2 * q ** 3),
        ), p21)),
        ((1, 2, 1, 2), x2w, _scale_lin(_add_lin(
            _scale_lin(R(), p21),
            _scale_lin(lin(beta=p21 ** 2 * q ** 3, delta=u1), u1),
        ), q2)),
    ]
    return out


def _lin_clean(d: dict) -> dict:
    return {(None if k == "const" else k): v for k, v in d.items() if v}


def _scale_lin(d: dict, c) -> dict:
    return {k: v * c for k, v in d.items()}


def _add_lin(*ds) -> dict:
    out: dict = {}
    for d in ds:
        for k, v in d.items():
            out[k] = out[k] + v if k in out else v
    return out


def compare_line(tmpl: GeneratorTemplate, seq, word, expected) -> tuple:
    """(ok, computed, expected) for one derivative identity, compared modulo the ideal."""
    g = tmpl.g
    parts = derivative_parts(tmpl, seq)
    if word is None:
        want = {k: v for k, v in expected.items()}
    else:
        w = SkewPolynomial.word(word, field=g.field)
        want = {k: w.scale(v) for k, v in _lin_clean(expected).items()}
    keys = set(parts) | set(want)
    zero = SkewPolynomial.zero(g.field)
    ok = all(
        normal_form(parts.get(k, zero) - want.get(k, zero), g.rels).is_zero() for k in keys
    )
    return ok, parts, want


def verify_derivative_lines(g: G2Instance | None = None) -> list:
    g = g or generic_g2()
    tm = templates(g)
    lines = expected_lines(g)
    fixed = expected_lines(g, corrected=True)
    out = []
    for head in ("B", "D", "E", "C"):
        for n, (seq, word, expected) in enumerate(lines[head], 1):
            ok, parts, want = compare_line(tm[head], seq, word, expected)
            note = {}
            if not ok and (head, n) in MISPRINTS:
                ok = compare_line(tm[head], seq, word, fixed[head][n - 1][2])[0]
                note = {"misprint": MISPRINTS[(head, n)]}
            diff = []
            if not ok:
                for k in set(parts) | set(want):
                    a = parts.get(k, SkewPolynomial.zero(g.field))
                    b = want.get(k, SkewPolynomial.zero(g.field))
                    if not normal_form(a - b, g.rels).is_zero():
                        diff.append(f"{k or 'constant'}: computed {a} displayed {b}")
            out.append(_check(f"line-{head}-{n}", f"{format_sequence(seq)} of the [{head}] template", ok,
                              "; ".join(diff), **note))
    return out


def expected_solutions(g: G2Instance) -> dict:
    F = g.field
    q, p21, one = F.q, F.p21, F.one
    return {
        ("B", X1_BRANCH): {"alpha": (q ** -3 - one) / p21},
        ("D", X1_BRANCH): {
            "alpha": (one - q ** -3) * (one - q ** -2) / (q * p21 ** 2),
            "beta": -(one - q ** -2) * (one + q) / (p21 * q),
        },
    }


def _multiple_of(f: SkewPolynomial, base: SkewPolynomial, g: G2Instance):
    """c with f = c * base modulo the ideal, or None."""
    nf, nb = normal_form(f, g.rels), normal_form(base, g.rels)
    if nb.is_zero():
        return None
    w, cb = leading_term(nb)
    c = nf.coefficient(w) / cb
    return c if (nf - nb.scale(c)).is_zero() else None


# canonical generator expected on each branch of each template
BRANCH_TARGETS = {
    ("B", X1_BRANCH): "[x2,x1]", ("B", X2_BRANCH): "[B]",
    ("D", X1_BRANCH): "[x2,[x2,x1]]", ("D", X2_BRANCH): "[D]",
    ("E", X1_BRANCH): "[x2,[x2,[x2,x1]]]", ("E", X2_BRANCH): "[E]",
    ("C", X1_BRANCH): "[[x1,x2],[x2,[x2,x1]]]", ("C", X2_BRANCH): "[C]",
}
FREE_ON_X2_BRANCH = {"B": (), "D": ("beta",), "E": ("beta", "gamma"), "C": ("delta", "epsilon")}


def expected_multipliers(g: G2Instance) -> dict:
    q, p21 = g.field.q, g.field.p21
    return {
        ("B", X1_BRANCH): -(p21 ** -1),
        ("D", X1_BRANCH): q ** -1 * p21 ** -2,
    }


def solve_template(tmpl: GeneratorTemplate, branch: str, sequences=None) -> Solution:
    return solve_constraints(derivative_constraints(tmpl, branch, sequences))


def verify_systems(g: G2Instance | None = None) -> list:
    g = g or generic_g2()
    F = g.field
    canon = canonical_generators(g)
    tm = templates(g)
    want_sol = expected_solutions(g)
    want_mult = expected_multipliers(g)
    out = []
    for head, tmpl in tm.items():
        listed_tails = [format_monomial(m) for m in tmpl.tails]
        out.append(_check(f"tails-{head}", f"tails of the [{head}] template", True, tails=listed_tails))
        sols = {}
        for branch in (X1_BRANCH, X2_BRANCH):
            tag = f"{head}-{branch}"
            try:
                sol = solve_template(tmpl, branch)
            except InconsistentSystem as exc:
                out.append(_check(f"system-{tag}", f"[{head}] template, {branch} branch", False, str(exc)))
                continue
            sols[branch] = sol
            cross = solve_template(tmpl, branch, full_length_sequences(tmpl, branch))
            same = cross.free == sol.free and _same_solution(sol, cross, F)
            out.append(_check(f"system-{tag}-full", f"[{head}] template, {branch} branch: all operator words agree",
                              same, f"free {sol.free} vs {cross.free}"))
            if branch == X1_BRANCH:
                vals = sol.particular(field=F)
                loose = [u for u in sol.free if not _absorbed(tmpl, sol, u, g)]
                ok = not loose
                expect = want_sol.get((head, branch))
                if expect:
                    ok = ok and sol.unique and all(vals[k] == v for k, v in expect.items())
                out.append(_check(f"system-{tag}", f"[{head}] template, {branch} branch", ok,
                                  f"solution {_render(vals)}, undetermined {loose}", solution=_render(vals),
                                  free_modulo_lower=list(sol.free)))
                label = BRANCH_TARGETS[(head, branch)]
                if head == "C":
                    out += _identify_c(tmpl, g)
                    continue
                gen = tmpl.instantiate(vals)
                target = canon[label][0]
                mult = _multiple_of(gen, target, g)
                ok = mult is not None and bool(mult)
                if (head, branch) in want_mult:
                    ok = ok and mult == want_mult[(head, branch)]
                out.append(_check(f"identify-{tag}", f"[{head}] template solution is a multiple of {label}", ok,
                                  f"solution {gen} is not a multiple of {target}", multiple_of=label,
                                  factor=str(mult)))
            else:
                vals = sol.particular(field=F)
                zeros = [u for u in tmpl.unknowns if u not in sol.free]
                ok = sol.free == FREE_ON_X2_BRANCH[head] and all(not vals[u] for u in zeros)
                out.append(_check(f"system-{tag}", f"[{head}] template, {branch} branch", ok,
                                  f"free {sol.free}, values {_render(vals)}", free=list(sol.free),
                                  vanishing=zeros))
                if sol.free:
                    gen = tmpl.instantiate({u: F.one for u in sol.free})
                    got = closure(gen, g)
                    node = closure(canon[BRANCH_TARGETS[(head, branch)]][0], g)
                    nodes = {closure(canon[gen_][0], g) for _, gen_, _ in NODE_SPECS}
                    out.append(_check(f"free-{tag}", f"[{head}] template with free tail stays in the lattice",
                                      got in nodes and node <= got, f"closure {sorted(got)}"))
        if len(sols) == 2:
            both = derivative_constraints(tmpl, X1_BRANCH).combined(derivative_constraints(tmpl, X2_BRANCH))
            try:
                solve_constraints(both)
                excl = False
            except InconsistentSystem:
                excl = True
            out.append(_check(f"exclusive-{head}", f"[{head}] template cannot avoid both x1 and x2", excl))
    return out


def template_coordinates(tmpl: GeneratorTemplate, f: SkewPolynomial) -> dict | None:
    """Unknown values exhibiting f, scaled to head coefficient 1, as a template instance; None if f is not one."""
    coords = pbw_decompose(f, tmpl.g)
    lead = coords.get((tmpl.head,))
    if not lead:
        return None
    coords = {m: c / lead for m, c in coords.items()}
    vals = {u: coords.pop(m, tmpl.g.field.zero) for u, m in zip(tmpl.unknowns, tmpl.tails)}
    coords.pop((tmpl.head,))
    return None if coords else vals


def violated_rows(system: ConstraintSystem, vals: dict) -> list:
    out = []
    for row, label in zip(system.rows, system.labels):
        total = sum((c * (vals[k] if k else 1) for k, c in row.items()), system.field.zero)
        if total:
            out.append(label)
    return out


def _identify_c(tmpl: GeneratorTemplate, g: G2Instance) -> list:
    """The displayed label against the x1-branch family, and the invariant member."""
    out = []
    shown = displayed_bracket(g)
    vals = template_coordinates(tmpl, shown)
    listed = derivative_constraints(tmpl, X1_BRANCH)
    full = derivative_constraints(tmpl, X1_BRANCH, full_length_sequences(tmpl, X1_BRANCH))
    bad = violated_rows(listed, vals) if vals is not None else ["not a template instance"]
    bad_full = violated_rows(full, vals) if vals is not None else bad
    out.append(_check("identify-C-x1", f"[C] template solution is a multiple of {C_LABEL}", not bad,
                      f"{C_LABEL} breaks {len(bad)} of {len(listed)} listed rows ({', '.join(bad)}) "
                      f"and {len(bad_full)} of {len(full)} full-length rows",
                      multiple_of=C_LABEL, violated=bad, violated_full=bad_full))
    gen, sol = invariant_generator(g)
    mult = _multiple_of(gen, reversed_bracket(g), g)
    out.append(_check("identify-C-x1-invariant",
                      "the [C] template member with derivatives in <x1,[x2,x1]> is a multiple of "
                      "[[x2,[x2,x1]],[x2,x1]]", sol.unique and mult is not None and bool(mult),
                      f"free {sol.free}, factor {mult}", factor=str(mult),
                      solution=_render(sol.particular(field=g.field))))
    return out


X1_SIDE = ("x1", "[x2,x1]", "[x2,[x2,x1]]", "[x2,[x2,[x2,x1]]]")


def _absorbed(tmpl: GeneratorTemplate, sol: Solution, unknown: str, g: G2Instance) -> bool:
    """True if moving along a free unknown only adds monomials in the lower x1-side generators."""
    F = g.field
    base = tmpl.instantiate(sol.particular(field=F))
    step = tmpl.instantiate(sol.particular({unknown: 1}, F)) - base
    clo = Closure(g)
    lower = frozenset(n for n in X1_SIDE if clo.canon[n][1] != tmpl.head)
    return clo.explained(step, lower)


def _same_solution(a: Solution, b: Solution, field) -> bool:
    va, vb = a.particular(field=field), b.particular(field=field)
    if any(va[u] != vb[u] for u in a.unknowns):
        return False
    for f in a.free:
        ea = a.particular({f: 1}, field)
        eb = b.particular({f: 1}, field)
        if any(ea[u] != eb[u] for u in a.unknowns):
            return False
    return True


def _render(vals: dict) -> dict:
    return {k: str(v) for k, v in vals.items()}


def side_identities(g: G2Instance) -> list:
    """Single derivative facts used to climb each chain: (label, lhs, rhs)."""
    F = g.field
    q, p21, one = F.q, F.p21, F.one
    canon = canonical_generators(g)
    v = {k: c[0] for k, c in canon.items()}
    u1, u2 = one - q ** -3, one - q ** -2
    return [
        ("d2 [x2,x1]", g.d(2, v["[x2,x1]"]), v["x1"].scale(u1)),
        ("d2 [x2,[x2,x1]]", g.d(2, v["[x2,[x2,x1]]"]), v["[x2,x1]"].scale((one + q) * u2)),
        ("d2 [x2,[x2,[x2,x1]]]", g.d(2, v["[x2,[x2,[x2,x1]]]"]), v["[x2,[x2,x1]]"].scale(q ** 2 * u1)),
        ("d1 [[x1,x2],[x2,[x2,x1]]]", g.d(1, displayed_bracket(g)), v["[x2,[x2,[x2,x1]]]"].scale(u1)),
        ("d2 d1 [C]", g.d(2, g.d(1, v["[C]"])), v["[D]"].scale(q ** 2 * u1 ** 2)),
        ("d1 [B]", g.d(1, v["[B]"]), v["x2"].scale(u1)),
        ("d1 [D]", g.d(1, v["[D]"]), (v["x2"] * v["x2"]).scale(u1 * u2)),
        ("d1 [E]", g.d(1, v["[E]"]), (v["x2"] ** 3).scale(u1 * u2 * (one - q ** -1))),
        ("[[D],x2] = [E]", g.bracket(v["[D]"], v["x2"]), v["[E]"]),
        ("[[B],[D]] = [C]", g.bracket(v["[B]"], v["[D]"]), v["[C]"]),
        ("[[B],x2] = [D]", g.bracket(v["[B]"], v["x2"]), v["[D]"]),
        ("[x2,x1] = -p21 x1x2 + x2x1", v["[x2,x1]"], (v["[B]"] + (v["x2"] * v["x1"]).scale((q ** -3 - one) / p21)).scale(-p21)),
    ]


def verify_side_identities(g: G2Instance | None = None) -> list:
    g = g or generic_g2()
    out = []
    for label, lhs, rhs in side_identities(g):
        nf = normal_form(lhs - rhs, g.rels)
        out.append(_check(f"identity {label}", label, nf.is_zero(), f"difference {nf}"))
    return out


def verify_lattice(g: G2Instance | None = None, cross_bound=(3, 6)) -> list:
    g = g or generic_g2()
    out = []
    lat = enumerate_lattice(g)
    out.append(_check("lattice-nodes", "twelve subalgebras", len(lat.nodes) == 12, f"{len(lat.nodes)} nodes"))
    got_edges = set(lat.edges)
    shape = two_chain_edges(lat)
    out.append(_check("lattice-shape", "Hasse diagram: two five-chains between bottom and top",
                      got_edges == shape and len(got_edges) == 12,
                      f"extra {sorted(got_edges - shape)} missing {sorted(shape - got_edges)}", edges=len(got_edges)))
    drawn = expected_edges()
    out.append(_check("lattice-edges", "covering pairs of the expected chains", got_edges == drawn,
                      f"extra {sorted(got_edges - drawn)} missing {sorted(drawn - got_edges)}"))
    for label, gen, _ in NODE_SPECS:
        node = lat.node(label)
        want = EXPECTED_PBW_SETS[gen]
        out.append(_check(f"node {label}", f"PBW generators of {label} in the expected chain order", node.pbw_set == want,
                          f"got {sorted(node.pbw_set, key=CANONICAL_ORDER.index)}"))
    # joins, meets, opposite variable
    clo = Closure(g)
    canon = clo.canon
    gens = {n.name: n.generator for n in lat.nodes}
    proper = [n for n in lat.nodes if n.name not in (BOTTOM, TOP)]
    bad_join = []
    for i, a in enumerate(proper):
        for b in proper[i + 1:]:
            j = clo.run([canon[gens[a.name]][0], canon[gens[b.name]][0]])
            uppers = [n for n in lat.nodes if a.pbw_set <= n.pbw_set and b.pbw_set <= n.pbw_set]
            least = [n for n in uppers if all(n.pbw_set <= m.pbw_set for m in uppers)]
            if len(least) != 1 or least[0].pbw_set != j:
                bad_join.append((a.name, b.name))
    out.append(_check("lattice-joins", "joins of subalgebras are generated by the two generators", not bad_join,
                      f"bad pairs {bad_join}"))
    bad_meet = []
    for a in lat.nodes:
        for b in lat.nodes:
            lowers = [n for n in lat.nodes if n.pbw_set <= a.pbw_set and n.pbw_set <= b.pbw_set]
            great = [n for n in lowers if all(m.pbw_set <= n.pbw_set for m in lowers)]
            if len(great) != 1:
                bad_meet.append((a.name, b.name))
    out.append(_check("lattice-meets", "every pair of subalgebras has a unique meet", not bad_meet,
                      f"bad pairs {bad_meet}"))
    both = [n for n in proper if n.chain == "left"]
    chains_ok = all(not (a.pbw_set & b.pbw_set) for a in both for b in proper if b.chain == "right")
    out.append(_check("lattice-chains-disjoint", "the two chains share only bottom and top", chains_ok))
    bad_opp = []
    for n in proper:
        other = "x1" if n.chain == "right" else "x2"
        if clo.run([canon[gens[n.name]][0], canon[other][0]]) != FULL:
            bad_opp.append(n.name)
    out.append(_check("lattice-opposite", "adding the opposite variable gives the whole algebra", not bad_opp,
                      f"not full: {bad_opp}"))
    for n in proper:
        esc = bracket_escapes(clo, n.pbw_set, cross_bound)
        out.append(_check(f"brackets {n.name}", f"brackets of generators of {n.name} up to {cross_bound} stay inside",
                          not esc, "new elements from " + ", ".join(f"[{a},{b}]" for a, b in esc)))
    for label, gen, _ in NODE_SPECS:
        shown = displayed_bracket(g) if gen == C_LABEL else canon[gen][0]
        got = clo.run(shown)
        out.append(_check(f"displayed {label}", f"the displayed element generates {label}",
                          got == lat.node(label).pbw_set, f"generates {sorted(got, key=CANONICAL_ORDER.index)}"))
    return out


def bracket_escapes(clo: Closure, names: frozenset, bound=(3, 6)) -> list:
    """Pairs (a, b) of generators whose skew bracket leaves the span of the PBW monomials."""
    if "x1" in names and "x2" in names:
        return []
    out = []
    order = sorted(names, key=CANONICAL_ORDER.index)
    for a in order:
        for b in order:
            va, vb = clo.canon[a][0], clo.canon[b][0]
            d = tuple(x + y for x, y in zip(va.degree(), vb.degree()))
            if d[0] > bound[0] or d[1] > bound[1]:
                continue
            if not clo.explained(clo.g.bracket(va, vb), names):
                out.append((a, b))
    return out


def verify_cyclotomic_lattices(orders=(5, 7, 9)) -> list:
    """Rerun enumeration and the template systems with q a primitive t-th root of unity.

    The systems must give the same verdict, check by check, as in the
    generic case.
    """
    g0 = generic_g2()
    base = lattice_signature(enumerate_lattice(g0))
    base_status = {c.name: c.status for c in verify_systems(g0)}
    out = []
    for t in orders:
        g = build_g2(CyclotomicContext(t))
        sig = lattice_signature(enumerate_lattice(g))
        out.append(_check(f"lattice-t{t}", f"same lattice at order {t}", sig == base))
        status = {c.name: c.status for c in verify_systems(g)}
        diff = sorted(k for k in set(status) | set(base_status) if status.get(k) != base_status.get(k))
        out.append(_check(f"systems-t{t}", f"template systems at order {t} agree with the generic case", not diff,
                          f"differ: {diff}"))
    return out


def run_all(g: G2Instance | None = None, orders=(5, 7, 9)) -> list:
    g = g or generic_g2()
    out = []
    out += verify_derivative_lines(g)
    out += verify_side_identities(g)
    out += verify_systems(g)
    out += verify_lattice(g)
    out += verify_cyclotomic_lattices(orders)
    return out
