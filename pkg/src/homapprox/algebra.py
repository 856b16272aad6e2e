"""Free associative algebra on the letters xi_0, xi_1, xi_2, ...

A word (m1, ..., mk) stands for the basis element xi_{m1 ... mk}; its
order is m1 + ... + mk + k and its length is k.  Elements are finite
rational combinations of words, stored sparsely.  Besides the
concatenation product the module provides the shuffle product, the
derivation phi and the letter-stripping map psi used by the autonomous
construction.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterator

Word = tuple  # tuple[int, ...]


def word_order(w: Word) -> int:
    return sum(w) + len(w)


def word_sort_key(w: Word):
    # canonical order: by order, then length, then lexicographic
    return (word_order(w), len(w), w)


@lru_cache(maxsize=None)
def enumerate_basis(m: int) -> tuple:
    """All words of order m, length-ascending then lexicographic."""
    if m < 1:
        raise ValueError("order must be >= 1")
    words = []
    for k in range(1, m + 1):
        words.extend(_compositions(m - k, k))
    return tuple(words)


@lru_cache(maxsize=None)
def _compositions(total: int, k: int) -> tuple:
    """Weak compositions of total into k parts, lexicographic."""
    if k == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(m: int) -> dict:
    return {w: i for i, w in enumerate(enumerate_basis(m))}


class AlgElem:
    """Sparse element of the free algebra (plus an optional scalar part,
    keyed by the empty word, which psi produces)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[tuple(w)] = c

    @classmethod
    def zero(cls) -> "AlgElem":
        return cls()

    @classmethod
    def from_word(cls, w: Word, coeff=1) -> "AlgElem":
        return cls({tuple(w): Fraction(coeff)})

    @classmethod
    def scalar(cls, c) -> "AlgElem":
        return cls({(): Fraction(c)})

    def coeff(self, w: Word) -> Fraction:
        return self.terms.get(tuple(w), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def items(self) -> Iterator:
        return iter(self.terms.items())

    def sorted_items(self) -> list:
        return sorted(self.terms.items(), key=lambda p: word_sort_key(p[0]))

    def support(self) -> list:
        return sorted(self.terms.keys(), key=word_sort_key)

    def order(self) -> int | None:
        """Common order of all words if homogeneous, else None."""
        orders = {word_order(w) for w in self.terms if w != ()}
        if () in self.terms:
            orders.add(0)
        if len(orders) != 1:
            return None
        return orders.pop()

    def is_homogeneous(self, m: int | None = None) -> bool:
        o = self.order()
        if o is None:
            return False
        return True if m is None else o == m

    def __add__(self, other: "AlgElem") -> "AlgElem":
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, Fraction(0)) + c
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
        r = AlgElem()
        r.terms = out
        return r

    def __sub__(self, other: "AlgElem") -> "AlgElem":
        return self + (-other)

    def __neg__(self) -> "AlgElem":
        r = AlgElem()
        r.terms = {w: -c for w, c in self.terms.items()}
        return r

    def scale(self, c) -> "AlgElem":
        c = Fraction(c)
        r = AlgElem()
        if c != 0:
            r.terms = {w: c * cw for w, cw in self.terms.items()}
        return r

    def __rmul__(self, c) -> "AlgElem":
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other) -> "AlgElem":
        if isinstance(other, AlgElem):
            return concat(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgElem) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"AlgElem({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_items():
            if w == ():
                body = str(c)
            else:
                name = "xi_{" + " ".join(str(m) for m in w) + "}"
                if c == 1:
                    body = name
                elif c == -1:
                    body = f"-{name}"
                else:
                    body = f"{c}*{name}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def to_json(self) -> list:
        return [
            {"word": list(w), "coeff": str(c)} for w, c in self.sorted_items()
        ]

    @classmethod
    def from_json(cls, data: list) -> "AlgElem":
        return cls({tuple(item["word"]): Fraction(item["coeff"]) for item in data})


def vectorize(e: AlgElem, m: int) -> list:
    """Coefficient vector of a homogeneous element over enumerate_basis(m)."""
    idx = basis_index(m)
    vec = [Fraction(0)] * len(idx)
    for w, c in e.terms.items():
        if w not in idx:
            raise ValueError(f"word {w} is not of order {m}")
        vec[idx[w]] = c
    return vec


def devectorize(vec, m: int) -> AlgElem:
    basis = enumerate_basis(m)
    if len(vec) != len(basis):
        raise ValueError("vector length does not match the order-m basis")
    return AlgElem({w: c for w, c in zip(basis, vec)})


def concat(e1: AlgElem, e2: AlgElem) -> AlgElem:
    """Concatenation product; orders add."""
    out: dict = {}
    for w1, c1 in e1.terms.items():
        for w2, c2 in e2.terms.items():
            w = w1 + w2
            s = out.get(w, Fraction(0)) + c1 * c2
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
    r = AlgElem()
    r.terms = out
    return r


@lru_cache(maxsize=None)
def _shuffle_words(w1: Word, w2: Word) -> tuple:
    """Shuffle of two words as ((word, integer multiplicity), ...)."""
    if not w1:
        return ((w2, 1),)
    if not w2:
        return ((w1, 1),)
    acc: dict = {}
    for w, c in _shuffle_words(w1[1:], w2):
        key = (w1[0],) + w
        acc[key] = acc.get(key, 0) + c
    for w, c in _shuffle_words(w1, w2[1:]):
        key = (w2[0],) + w
        acc[key] = acc.get(key, 0) + c
    return tuple(sorted(acc.items()))


def shuffle(e1: AlgElem, e2: AlgElem) -> AlgElem:
    """Shuffle product; bilinear over the word recursion
    u xi_a sh v xi_b = (u sh v xi_b) xi_a + (u xi_a sh v) xi_b."""
    out: dict = {}
    for w1, c1 in e1.terms.items():
        for w2, c2 in e2.terms.items():
            c = c1 * c2
            if w1 <= w2:
                pairs = _shuffle_words(w1, w2)
            else:
                pairs = _shuffle_words(w2, w1)
            for w, mult in pairs:
                s = out.get(w, Fraction(0)) + c * mult
                if s == 0:
                    out.pop(w, None)
                else:
                    out[w] = s
    r = AlgElem()
    r.terms = out
    return r


def shuffle_power(e: AlgElem, q: int) -> AlgElem:
    """q-fold shuffle power; the 0th power is the scalar 1."""
    if q < 0:
        raise ValueError("shuffle powers need q >= 0")
    acc = AlgElem.scalar(1)
    for _ in range(q):
        acc = shuffle(acc, e)
    return acc


def phi(e: AlgElem) -> AlgElem:
    """Derivation with phi(xi_0) = 0 and phi(xi_m) = m xi_{m-1}."""
    out: dict = {}
    for w, c in e.terms.items():
        for i, mi in enumerate(w):
            if mi == 0:
                continue
            key = w[:i] + (mi - 1,) + w[i + 1 :]
            s = out.get(key, Fraction(0)) + mi * c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
    r = AlgElem()
    r.terms = out
    return r


def psi(e: AlgElem) -> AlgElem:
    """Drops a trailing xi_0 (psi(xi_0) = 1); words not ending in xi_0
    are sent to zero.  Lowers order by exactly 1 on its support."""
    out: dict = {}
    for w, c in e.terms.items():
        if not w or w[-1] != 0:
            continue
        key = w[:-1]
        s = out.get(key, Fraction(0)) + c
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    r = AlgElem()
    r.terms = out
    return r
