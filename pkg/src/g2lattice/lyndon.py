"""Standard (Lyndon-Shirshov) words, their bracketing and super-letters."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Union

from .freealg import (
    CharacterData,
    SkewPolynomial,
    Word,
    constitution,
    skew_bracket,
    sorted_words,
    word_gt,
)

# a tree is either a letter (int) or a pair of trees
BracketTree = Union[int, tuple]


def is_standard(w: Word) -> bool:
    """vw > wv for every split w = vw' into nonempty parts."""
    if not w:
        raise ValueError("the empty word is not standard")
    return all(word_gt(w, w[k:] + w[:k]) for k in range(1, len(w)))


def is_lyndon_by_suffixes(w: Word) -> bool:
    """Classical test: w is greater than each of its proper suffixes."""
    if not w:
        raise ValueError("the empty word is not standard")
    return all(word_gt(w, w[k:]) for k in range(1, len(w)))


def words_of_constitution(d) -> list:
    n = d[0] + d[1]
    out = []
    for w in product((1, 2), repeat=n):
        if w.count(1) == d[0]:
            out.append(w)
    return out


def enumerate_standard(max_constitution) -> list:
    """All standard words with constitution componentwise <= the bound, ascending."""
    m1, m2 = max_constitution
    found = []
    for a in range(m1 + 1):
        for b in range(m2 + 1):
            if a + b:
                found.extend(w for w in words_of_constitution((a, b)) if is_standard(w))
    return sorted_words(found)


def flatten(tree: BracketTree) -> Word:
    if isinstance(tree, int):
        return (tree,)
    return flatten(tree[0]) + flatten(tree[1])


def shirshov_bracketing(w: Word) -> BracketTree:
    """Standard bracketing: split w = uv with both standard and u shortest."""
    w = tuple(w)
    if not is_standard(w):
        raise ValueError(f"{w} is not a standard word")
    if len(w) == 1:
        return w[0]
    for k in range(1, len(w)):
        u, v = w[:k], w[k:]
        if is_standard(u) and is_standard(v):
            return (shirshov_bracketing(u), shirshov_bracketing(v))
    raise AssertionError("standard word without a standard factorization")


def bracketing_by_longest_suffix(w: Word) -> BracketTree:
    """Reference bracketing: v is the longest proper standard suffix."""
    w = tuple(w)
    if len(w) == 1:
        return w[0]
    for k in range(1, len(w)):
        if is_standard(w[k:]):
            return (bracketing_by_longest_suffix(w[:k]), bracketing_by_longest_suffix(w[k:]))
    raise ValueError(f"{w} is not a standard word")


def is_standard_tree(tree: BracketTree) -> bool:
    """Membership in the set of standard non-associative words."""
    if isinstance(tree, int):
        return True
    left, right = tree
    if not (is_standard_tree(left) and is_standard_tree(right)):
        return False
    u, v = flatten(left), flatten(right)
    if not (is_standard(u) and is_standard(v) and word_gt(u, v)):
        return False
    if not isinstance(left, int):
        v2 = flatten(left[1])
        if word_gt(v2, v):
            return False
    return True


def format_tree(tree: BracketTree) -> str:
    if isinstance(tree, int):
        return f"x{tree}"
    return f"[{format_tree(tree[0])},{format_tree(tree[1])}]"


def superletter_value(tree: BracketTree, chars: CharacterData) -> SkewPolynomial:
    if isinstance(tree, int):
        return SkewPolynomial.letter(tree, chars.field)
    return skew_bracket(superletter_value(tree[0], chars), superletter_value(tree[1], chars), chars)


@dataclass(frozen=True, eq=False)
class SuperLetter:
    word: Word
    tree: BracketTree
    value: SkewPolynomial
    name: str = ""

    @classmethod
    def from_word(cls, w: Word, chars: CharacterData, name: str = "") -> "SuperLetter":
        tree = shirshov_bracketing(w)
        return cls(tuple(w), tree, superletter_value(tree, chars), name)

    @property
    def constitution(self):
        return constitution(self.word)

    def __lt__(self, other: "SuperLetter") -> bool:
        return word_gt(other.word, self.word)

    def __str__(self):
        return self.name or format_tree(self.tree)


def necklace_count(n: int, k: int = 2) -> int:
    """Number of Lyndon words of length n over k letters (Moebius formula)."""
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += _mobius(d) * k ** (n // d)
    return total // n


def _mobius(n: int) -> int:
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    if n > 1:
        out = -out
    return out


def lyndon_factorization(w: Word) -> list:
    """Unique factorization into standard words u1 <= u2 <= ... <= uk."""
    # Duval's algorithm in python tuple order, which reverses the word order
    w = tuple(w)
    out = []
    i = 0
    n = len(w)
    while i < n:
        j, k = i + 1, i
        while j < n and w[k] <= w[j]:
            k = i if w[k] < w[j] else k + 1
            j += 1
        while i <= k:
            out.append(w[i:i + j - k])
            i += j - k
    return out
