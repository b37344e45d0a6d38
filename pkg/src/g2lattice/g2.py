"""The G2 instance: Serre relations, the six PBW letters and the checks built on them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .coeff import GENERIC, CyclotomicContext, q_bracket
from .freealg import (
    CharacterData,
    SkewPolynomial,
    constitution,
    derivation,
    format_word,
    g2_characters,
    leading_term,
    nested_bracket,
    skew_bracket,
)
from .lyndon import (
    SuperLetter,
    enumerate_standard,
    flatten,
    is_standard_tree,
    lyndon_factorization,
)
from .reduce import RelationSet, ideal_membership, is_hard, normal_form

LETTER_WORDS = {
    "A": (1,),
    "B": (1, 2),
    "C": (1, 2, 1, 2, 2),
    "D": (1, 2, 2),
    "E": (1, 2, 2, 2),
    "F": (2,),
}
# names from largest to smallest letter
LETTER_ORDER = "ABCDEF"

# [[X],[Y]] for X > Y: either a listed letter, a non-standard tree, or not hard
PAIR_CLASSES = {
    ("A", "F"): ("in list", "B"),
    ("B", "D"): ("in list", "C"),
    ("B", "F"): ("in list", "D"),
    ("D", "F"): ("in list", "E"),
    ("C", "E"): ("not standard", None),
    ("C", "F"): ("not standard", None),
    ("A", "B"): ("not hard", None),
    ("A", "C"): ("not hard", None),
    ("A", "D"): ("not hard", None),
    ("A", "E"): ("not hard", None),
    ("E", "F"): ("not hard", None),
    ("D", "E"): ("not hard", None),
    ("B", "C"): ("not hard", None),
    ("B", "E"): ("not hard", None),
    ("C", "D"): ("not hard", None),
}

# number of brackets that kill the derivative of each letter
NESTED_DEPTH = {"A": 1, "B": 3, "C": 2, "D": 3, "E": 1, "F": 1}


@dataclass
class Check:
    """One verification record."""

    name: str
    anchor: str
    status: str
    witness: str = ""
    data: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> str:
        rec = {"name": self.name, "anchor": self.anchor, "status": self.status}
        if self.witness:
            rec["witness"] = self.witness
        if self.data:
            rec["data"] = self.data
        return json.dumps(rec, sort_keys=True)


def _check(name: str, anchor: str, ok: bool, witness: str = "", **data) -> Check:
    return Check(name, anchor, "pass" if ok else "fail", "" if ok else witness, data)


@dataclass
class G2Instance:
    field: object
    chars: CharacterData
    rels: RelationSet
    letters: dict
    quartic: SkewPolynomial
    cubic: SkewPolynomial

    def letter(self, name: str) -> SuperLetter:
        return self.letters[name]

    def value(self, name: str) -> SkewPolynomial:
        return self.letters[name].value

    def x(self, i: int) -> SkewPolynomial:
        return SkewPolynomial.letter(i, self.field)

    def bracket(self, f, g) -> SkewPolynomial:
        return skew_bracket(f, g, self.chars)

    def d(self, i: int, f) -> SkewPolynomial:
        return derivation(i, f, self.chars)

    def scalar(self, c) -> SkewPolynomial:
        return SkewPolynomial.scalar(c, self.field)


def build_g2(field=GENERIC) -> G2Instance:
    chars = g2_characters(field)
    x1 = SkewPolynomial.letter(1, field)
    x2 = SkewPolynomial.letter(2, field)
    quartic = x1
    for _ in range(4):
        quartic = skew_bracket(quartic, x2, chars)
    cubic = skew_bracket(x1, skew_bracket(x1, x2, chars), chars)
    rels = RelationSet([quartic, cubic], field)
    letters = {n: SuperLetter.from_word(w, chars, f"[{n}]") for n, w in LETTER_WORDS.items()}
    return G2Instance(field, chars, rels, letters, quartic, cubic)


@lru_cache(maxsize=None)
def generic_g2() -> G2Instance:
    return build_g2(GENERIC)


# -- relation coefficients ---------------------------------------------------


def relation_coefficients(g: G2Instance) -> dict:
    """a1..a4 and b1, b2 read off the expanded Serre relations."""
    out = {"lead_quartic": g.quartic.coefficient((1, 2, 2, 2, 2)), "lead_cubic": g.cubic.coefficient((1, 1, 2))}
    for k in range(1, 5):
        out[f"a{k}"] = g.quartic.coefficient((2,) * k + (1,) + (2,) * (4 - k))
    out["b1"] = g.cubic.coefficient((1, 2, 1))
    out["b2"] = g.cubic.coefficient((2, 1, 1))
    return out


def closed_form_coefficients(field=GENERIC) -> dict:
    """The same scalars from their closed formulas in p12 and p22 = q."""
    q, p12 = field.q, field.p12
    p11 = q ** 3
    return {
        "a1": -p12 * q_bracket(4, q),
        "a2": p12 ** 2 * q * q_bracket(3, q) * (q ** 2 + 1),
        "a3": -(p12 ** 3) * q ** 3 * q_bracket(4, q),
        "a4": p12 ** 4 * q ** 6,
        "b1": -p12 * (1 + p11),
        "b2": p12 ** 2 * p11,
    }


def verify_relation_coefficients(g: G2Instance) -> list:
    got = relation_coefficients(g)
    want = closed_form_coefficients(g.field)
    out = [
        _check("serre-monic", "leading coefficients of both Serre relations", got["lead_quartic"] == g.field.one
               and got["lead_cubic"] == g.field.one, f"{got['lead_quartic']}, {got['lead_cubic']}")
    ]
    for k in ("a1", "a2", "a3", "a4", "b1", "b2"):
        out.append(_check(f"coefficient-{k}", "expanded Serre relation coefficient", got[k] == want[k],
                          f"computed {got[k]} expected {want[k]}"))
    n = len(g.quartic) == 5 and len(g.cubic) == 3
    out.append(_check("serre-support", "Serre relations have 5 and 3 terms", n))
    return out


# -- derived relations ---------------------------------------------------------


def _terms(field, pairs) -> SkewPolynomial:
    return SkewPolynomial({tuple(w): field.coerce(c) for c, w in pairs}, field)


def _replace_leftmost(f: SkewPolynomial, pattern, replacement: SkewPolynomial) -> SkewPolynomial:
    """Rewrite the leftmost occurrence of ``pattern`` in every term."""
    out = SkewPolynomial.zero(f.field)
    n = len(pattern)
    for w, c in f.terms.items():
        for k in range(len(w) - n + 1):
            if w[k:k + n] == pattern:
                left = SkewPolynomial.word(w[:k], field=f.field)
                right = SkewPolynomial.word(w[k + n:], field=f.field)
                out = out + (left * replacement * right).scale(c)
                break
        else:
            out = out + SkewPolynomial({w: c}, f.field)
    return out


def derived_relations(g: G2Instance) -> dict:
    """Consequences of the Serre relations built by padding and subtracting.

    Returns recipe results and the closed-form displays they should match.
    Every polynomial is of the form lhs - rhs, so membership in the ideal
    is the claim.
    """
    F = g.field
    c = relation_coefficients(g)
    a1, a2, a3, a4, b1, b2 = (c[k] for k in ("a1", "a2", "a3", "a4", "b1", "b2"))
    x1, x2 = g.x(1), g.x(2)
    quartic, cubic = g.quartic, g.cubic
    ab = a1 - b1

    first = x1 * quartic - cubic * x2 ** 3
    first_display = _terms(F, [
        (ab, (1, 2, 1, 2, 2, 2)), (a2, (1, 2, 2, 1, 2, 2)), (a3, (1, 2, 2, 2, 1, 2)),
        (a4, (1, 2, 2, 2, 2, 1)), (-b2, (2, 1, 1, 2, 2, 2)),
    ])

    second = (x1 * x2).scale(ab) * quartic - first_display * x2
    second_display = _terms(F, [
        (a1 * ab - a2, (1, 2, 2, 1, 2, 2, 2)), (-(a3 - a2 * ab), (1, 2, 2, 2, 1, 2, 2)),
        (-(a4 - a3 * ab), (1, 2, 2, 2, 2, 1, 2)), (a4 * ab, (1, 2, 2, 2, 2, 2, 1)),
        (b2, (2, 1, 1, 2, 2, 2, 2)),
    ])

    raw = cubic * (x1 * x2 ** 3).scale(ab) - x1 * first_display
    rewrite = _terms(F, [(-b1, (1, 2, 1)), (-b2, (2, 1, 1))])
    third = _replace_leftmost(raw, (1, 1, 2), rewrite)
    lead = a2 * b1 - (b1 * ab + b2) * b1
    third_display = _terms(F, [
        (lead, (1, 2, 1, 2, 1, 2, 2)), (-(b1 * ab + b2) * b2, (1, 2, 2, 1, 1, 2, 2)),
        (a3 * b1, (1, 2, 1, 2, 2, 1, 2)), (a4 * b1, (1, 2, 1, 2, 2, 2, 1)),
    ])
    # leading word x1x2x1x2^2x1x2^2 of this combination certifies CD as non-hard
    cd_combo = third * (x2.scale(ab)) - (x1 * x2).scale(lead) * first_display
    return {
        "first": (first, first_display),
        "second": (second, second_display),
        "third": (third, third_display),
        "cd_combination": cd_combo,
    }


def cd_expected_coefficient(field=GENERIC):
    q, p12 = field.q, field.p12
    return -(p12 ** 5) * q ** 5 * (1 + q ** 3) * (1 + q ** 2)


def verify_derived_relations(g: G2Instance) -> list:
    rel = derived_relations(g)
    out = []
    for key, label in (("first", "x1 x2 x1 x2^3 relation"), ("second", "x1 x2^2 x1 x2^3 relation")):
        recipe, display = rel[key]
        out.append(_check(f"derived-{key}-recipe", f"{label}: recipe equals display", recipe == display,
                          f"difference {recipe - display}"))
        nf = normal_form(display, g.rels)
        out.append(_check(f"derived-{key}-member", f"{label}: lies in the ideal", nf.is_zero(), f"normal form {nf}"))
    recipe, display = rel["third"]
    rest = recipe - display
    x1_initial = [w for w in rest.terms if w and w[0] == 1]
    out.append(_check("derived-third-recipe", "x1 x2 x1 x2 x1 x2^2 relation: recipe equals display up to x2-initial words",
                      not x1_initial, f"x1-initial leftovers {[format_word(w) for w in x1_initial]}"))
    nf = normal_form(recipe, g.rels)
    out.append(_check("derived-third-member", "x1 x2 x1 x2 x1 x2^2 relation: lies in the ideal", nf.is_zero(),
                      f"normal form {nf}"))
    combo = rel["cd_combination"]
    nf = normal_form(combo, g.rels)
    word, coef = leading_term(combo)
    want = cd_expected_coefficient(g.field)
    ok = word == LETTER_WORDS["C"] + LETTER_WORDS["D"] and coef == want and nf.is_zero()
    out.append(_check("cd-leading-coefficient", "leading term of the CD elimination",
                      ok, f"leading {format_word(word)} coefficient {coef}, expected {want}",
                      coefficient=str(coef)))
    return out


# -- hardness ------------------------------------------------------------------


def classify_pair(g: G2Instance, big: str, small: str) -> tuple:
    """Classify the tree [[big],[small]]: in list / not standard / not hard / hard."""
    u, v = g.letter(big), g.letter(small)
    tree = (u.tree, v.tree)
    if not is_standard_tree(tree):
        return ("not standard", None)
    word = flatten(tree)
    for name, lw in LETTER_WORDS.items():
        if lw == word and g.letter(name).tree == tree:
            return ("in list", name)
    return ("hard", None) if is_hard(word, g.rels) else ("not hard", None)


def verify_hard_letters(g: G2Instance, bound=(3, 6)) -> list:
    out = []
    for name in LETTER_ORDER:
        out.append(_check(f"hard-{name}", f"letter [{name}] is hard", is_hard(g.letter(name), g.rels),
                          f"{format_word(LETTER_WORDS[name])} is a leading word of the ideal"))
    for i, big in enumerate(LETTER_ORDER):
        for small in LETTER_ORDER[i + 1:]:
            got = classify_pair(g, big, small)
            want = PAIR_CLASSES[(big, small)]
            out.append(_check(f"pair-{big}{small}", f"bracket [[{big}],[{small}]] classification", got == want,
                              f"got {got}, expected {want}", verdict=got[0] + (f" {got[1]}" if got[1] else "")))
    listed = set(LETTER_WORDS.values())
    stray = [w for w in enumerate_standard(bound) if w not in listed and is_hard(w, g.rels)]
    out.append(_check("no-other-hard", f"no other standard word up to {bound} is hard", not stray,
                      f"hard: {[format_word(w) for w in stray]}"))
    return out


# -- PBW monomials -----------------------------------------------------------


def letter_constitutions() -> dict:
    return {n: constitution(w) for n, w in LETTER_WORDS.items()}


@lru_cache(maxsize=None)
def pbw_monomials(d) -> tuple:
    """Nondecreasing letter sequences (smallest letter leftmost) of constitution d."""
    consts = letter_constitutions()
    ascending = LETTER_ORDER[::-1]

    def rec(rest, start):
        if rest == (0, 0):
            yield ()
            return
        for k in range(start, len(ascending)):
            n = ascending[k]
            c = consts[n]
            r = (rest[0] - c[0], rest[1] - c[1])
            if r[0] >= 0 and r[1] >= 0:
                for tail in rec(r, k):
                    yield (n,) + tail

    return tuple(rec(tuple(d), 0))


def pbw_count(d) -> int:
    return len(pbw_monomials(tuple(d)))


def monomial_value(g: G2Instance, names) -> SkewPolynomial:
    out = g.scalar(1)
    for n in names:
        out = out * g.value(n)
    return out


def format_monomial(names) -> str:
    if not names:
        return "1"
    parts = []
    i = 0
    while i < len(names):
        j = i
        while j < len(names) and names[j] == names[i]:
            j += 1
        base = {"A": "x1", "F": "x2"}.get(names[i], f"[{names[i]}]")
        parts.append(base + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "".join(parts)


def pbw_decompose(f: SkewPolynomial, g: G2Instance) -> dict:
    """Coordinates of f modulo the ideal in the increasing PBW monomials.

    Takes the leading word of the normal form, splits it into standard
    factors, subtracts the matching monomial and repeats.
    """
    by_word = {w: n for n, w in LETTER_WORDS.items()}
    rest = normal_form(f, g.rels)
    out: dict = {}
    while not rest.is_zero():
        word, coef = leading_term(rest)
        factors = lyndon_factorization(word)
        if any(u not in by_word for u in factors):
            raise ValueError(f"normal form has non-PBW leading word {format_word(word)}")
        names = tuple(by_word[u] for u in factors)
        out[names] = coef
        rest = rest - normal_form(monomial_value(g, names), g.rels).scale(coef)
    return out


def dimension_identity(g: G2Instance, max_total: int = 9) -> list:
    """(d, words, block rank, PBW count) for every constitution with 0 < |d| <= max_total."""
    rows = []
    for n in range(1, max_total + 1):
        for m1 in range(n + 1):
            d = (m1, n - m1)
            blk = g.rels.block(d)
            rows.append((d, math.comb(n, m1), blk.rank, pbw_count(d)))
    return rows


def verify_dimensions(g: G2Instance, max_total: int = 9) -> list:
    rows = dimension_identity(g, max_total)
    bad = [(d, w - r, c) for d, w, r, c in rows if w - r != c]
    return [_check("dimension-identity", f"quotient dimension equals PBW count for total degree <= {max_total}",
                   not bad, f"mismatches (d, quotient, pbw): {bad}", blocks=len(rows))]


# -- derivative table ----------------------------------------------------------


def expected_derivatives(field=GENERIC) -> dict:
    """Derivatives of the six letters in the PBW basis: (letter, i) -> {monomial: coefficient}."""
    q, p21 = field.q, field.p21
    one = field.one
    u1, u2, u3 = one - q ** -3, one - q ** -2, one - q ** -1
    return {
        ("A", 1): {(): one}, ("A", 2): {},
        ("B", 1): {("F",): u1}, ("B", 2): {},
        ("C", 1): {("F", "D"): q ** 2 * u1 ** 2, ("E",): p21 * u1 * (q ** 3 - q ** 2 - q)}, ("C", 2): {},
        ("D", 1): {("F", "F"): u1 * u2}, ("D", 2): {},
        ("E", 1): {("F", "F", "F"): u1 * u2 * u3}, ("E", 2): {},
        ("F", 1): {}, ("F", 2): {(): one},
    }


def derivative_table(g: G2Instance) -> dict:
    """(letter, i) -> PBW coordinates of the computed derivative."""
    return {(n, i): pbw_decompose(g.d(i, g.value(n)), g) for n in LETTER_ORDER for i in (1, 2)}


def render_coordinates(coords: dict) -> str:
    if not coords:
        return "0"
    items = sorted(coords.items(), key=lambda kv: [LETTER_ORDER.index(n) for n in kv[0]])
    return " + ".join(f"({c}) {format_monomial(m)}" if m else f"({c})" for m, c in items)


def verify_derivative_table(g: G2Instance) -> list:
    got = derivative_table(g)
    want = expected_derivatives(g.field)
    out = []
    for key in want:
        a, b = got[key], want[key]
        ok = set(a) == set(b) and all(a[m] == b[m] for m in a)
        out.append(_check(f"derivative-{key[0]}-{key[1]}", f"d{key[1]} of [{key[0]}] in the PBW basis", ok,
                          f"computed {render_coordinates(a)} expected {render_coordinates(b)}"))
    return out


# -- structure constants -------------------------------------------------------


def scalar_multiple(target: SkewPolynomial, base: SkewPolynomial, g: G2Instance):
    """The unique c with target - c * base in the ideal."""
    nt = normal_form(target, g.rels)
    nb = normal_form(base, g.rels)
    if nb.is_zero():
        raise ValueError("base vanishes modulo the ideal; multiple is not unique")
    w, cb = leading_term(nb)
    c = nt.coefficient(w) / cb
    if not (nt - nb.scale(c)).is_zero():
        raise ValueError("target is not a multiple of base modulo the ideal")
    return c


def structure_constants(g: G2Instance) -> dict:
    C, D, E, F = (g.value(n) for n in "CDEF")
    return {
        "CF_over_D2": scalar_multiple(g.bracket(C, F), D * D, g),
        "CE_over_D3": scalar_multiple(g.bracket(C, E), D * D * D, g),
    }


def verify_structure_constants(g: G2Instance) -> list:
    out = []
    try:
        consts = structure_constants(g)
        out.append(_check("structure-CF", "[[C],[F]] is a multiple of [D]^2", True,
                          value=str(consts["CF_over_D2"])))
        out.append(_check("structure-CE", "[[C],[E]] is a multiple of [D]^3", True,
                          value=str(consts["CE_over_D3"])))
    except ValueError as exc:
        out.append(_check("structure-constants", "brackets of [C] as powers of [D]", False, str(exc)))
    for a, b in (("B", "C"), ("C", "D"), ("D", "E")):
        nf = normal_form(g.bracket(g.value(a), g.value(b)), g.rels)
        out.append(_check(f"vanishing-{a}{b}", f"[[{a}],[{b}]] vanishes modulo the ideal", nf.is_zero(),
                          f"normal form has {len(nf)} terms"))
    return out


# -- nested brackets and heights ---------------------------------------------


def nested_derivative_bracket(g: G2Instance, name: str, i: int, depth: int | None = None) -> SkewPolynomial:
    u = g.value(name)
    depth = NESTED_DEPTH[name] if depth is None else depth
    return nested_bracket(u, g.d(i, u), depth, g.chars)


def verify_nested_vanishing(g: G2Instance, mode: str = "auto", trials: int = 3, seed: int = 0) -> list:
    out = []
    for name in LETTER_ORDER:
        for i in (1, 2):
            depth = NESTED_DEPTH[name]
            f = nested_derivative_bracket(g, name, i)
            label = f"{depth}-fold bracket of [{name}] with its d{i}"
            if f.is_zero():
                out.append(_check(f"nested-{name}-{i}", label, True, method="syntactic"))
                continue
            v = ideal_membership(f, g.rels, mode, trials, seed)
            data = {"method": v.method, "constitution": list(f.degree())}
            if v.method == "probabilistic":
                data["trials"] = v.trials
                data["error_bound"] = f"{v.error_bound:.3e}"
            out.append(_check(f"nested-{name}-{i}", label, v.member, f"residue {v.residue}", **data))
    return out


def self_pairing(g: G2Instance, name: str):
    d = g.letter(name).constitution
    return g.chars.pair(d, d)


def multiplicative_order(x, one, limit: int = 1000) -> int:
    y = x
    for n in range(1, limit + 1):
        if y == one:
            return n
        y = y * x
    raise ValueError("order exceeds limit")


def height_table(t: int) -> dict:
    """Order of p(u, u) for each letter when q is a primitive t-th root of unity."""
    ctx = CyclotomicContext(t)
    g = build_g2(ctx)
    return {n: multiplicative_order(self_pairing(g, n), ctx.one) for n in LETTER_ORDER}


def expected_heights(t: int) -> dict:
    cube = t // 3 if t % 3 == 0 else t
    return {n: (t if n in "BDF" else cube) for n in LETTER_ORDER}


def power_derivative_identity(g: G2Instance, name: str, i: int, t: int) -> SkewPolynomial:
    """d_i(u^t) - p(u, x_i)^(t-1) [u, [u, ... [u, d_i(u)]]] with t-1 brackets."""
    u = g.value(name)
    lhs = g.d(i, u ** t)
    e = (1, 0) if i == 1 else (0, 1)
    coef = g.chars.pair(g.letter(name).constitution, e) ** (t - 1)
    rhs = nested_bracket(u, g.d(i, u), t - 1, g.chars).scale(coef)
    return lhs - rhs


def verify_heights(t: int, identity_letters=("B",)) -> list:
    if t <= 4 or t == 6:
        raise ValueError("order t must satisfy t > 4 and t != 6")
    g = generic_g2()
    out = []
    q = g.field.q
    expect_pair = {n: (q ** 3 if n in "ACE" else q) for n in LETTER_ORDER}
    bad = [n for n in LETTER_ORDER if self_pairing(g, n) != expect_pair[n]]
    out.append(_check("self-pairing", "p(u,u) is q^3 for A, C, E and q for B, D, F", not bad, f"mismatch {bad}"))
    got, want = height_table(t), expected_heights(t)
    out.append(_check(f"heights-t{t}", f"heights at order {t}", got == want, f"computed {got} expected {want}",
                      heights=got))
    ctx = CyclotomicContext(t)
    gc = build_g2(ctx)
    for name in identity_letters:
        diff = power_derivative_identity(gc, name, 1, t)
        out.append(_check(f"power-derivative-{name}-t{t}", f"d1([{name}]^{t}) as a nested bracket at order {t}",
                          diff.is_zero(), f"{len(diff)} residual terms"))
    return out


def run_all(g: G2Instance | None = None, mode: str = "auto", trials: int = 3, heights=(5, 7, 9)) -> list:
    g = g or generic_g2()
    out = []
    out += verify_relation_coefficients(g)
    out += verify_derived_relations(g)
    out += verify_hard_letters(g)
    out += verify_derivative_table(g)
    out += verify_structure_constants(g)
    out += verify_dimensions(g)
    out += verify_nested_vanishing(g, mode, trials)
    for t in heights:
        out += verify_heights(t)
    return out
