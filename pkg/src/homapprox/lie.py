"""Graded basis of the free Lie algebra inside the free algebra.

Candidates at order m and length k are the right-normed brackets
[xi_{m1},[...[xi_{m_{k-1}},xi_{m_k}]...]] of the words of that block,
scanned in canonical order; a candidate is kept iff its expansion is
linearly independent of the kept ones.  Per-order results are cached in
memory and, when a cache directory is configured, as JSON on disk.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .algebra import AlgElem, Word, concat, enumerate_basis
from .linalg import IntEchelon

CACHE_ENV_VAR = "HOMAPPROX_CACHE_DIR"


@dataclass
class LieBasisElement:
    word: Word
    expansion: AlgElem
    order: int
    length: int
    index: int  # 1-based position in the assembled basis

    def bracket_str(self) -> str:
        if self.length == 1:
            return f"xi_{{{self.word[0]}}}"
        out = f"xi_{{{self.word[-1]}}}"
        for m in reversed(self.word[:-1]):
            out = f"[xi_{{{m}}}, {out}]"
        return out


@lru_cache(maxsize=None)
def expand_right_normed(w: Word) -> AlgElem:
    """Image of the right-normed bracket of w in the free algebra."""
    w = tuple(w)
    if not w:
        raise ValueError("empty bracket word")
    if len(w) == 1:
        return AlgElem.from_word(w)
    head = AlgElem.from_word(w[:1])
    rest = expand_right_normed(w[1:])
    return concat(head, rest) - concat(rest, head)


def _mobius(d: int) -> int:
    if d == 1:
        return 1
    out = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            out = -out
        else:
            p += 1
    if d > 1:
        out = -out
    return out


def witt_dimension(m: int) -> int:
    """Dimension of the order-m graded piece of the free Lie algebra on
    countably many letters with order(xi_j) = j + 1."""
    if m < 1:
        raise ValueError("order must be >= 1")
    if m == 1:
        return 1
    total = 0
    for d in range(1, m + 1):
        if m % d == 0:
            total += _mobius(d) * 2 ** (m // d)
    return total // m


# per-order kept words, extended on demand
_order_cache: dict[int, list] = {}


def _cache_dir(explicit) -> Path | None:
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV_VAR)
    return Path(env) if env else None


def _compute_order(m: int) -> list:
    kept = []
    for k in range(1, m + 1):
        block = [w for w in enumerate_basis(m) if len(w) == k]
        if not block:
            continue
        index = {w: i for i, w in enumerate(block)}
        ech = IntEchelon(len(block))
        for w in block:
            elem = expand_right_normed(w)
            vec = [0] * len(block)
            for word, c in elem.terms.items():
                assert c.denominator == 1
                vec[index[word]] = c.numerator
            if ech.add(vec):
                kept.append(w)
    expected = witt_dimension(m)
    if len(kept) != expected:
        raise AssertionError(
            f"order {m}: kept {len(kept)} brackets, Witt formula gives {expected}"
        )
    return kept


def _load_order(m: int, cache_dir) -> list:
    directory = _cache_dir(cache_dir)
    path = directory / f"lie_order_{m}.json" if directory else None
    kept = _order_cache.get(m)
    if kept is None and path is not None and path.is_file():
        data = json.loads(path.read_text())
        kept = [tuple(w) for w in data["words"]]
    if kept is None:
        kept = _compute_order(m)
    if path is not None and not path.is_file():
        directory.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"order": m, "words": [list(w) for w in kept]}))
    _order_cache[m] = kept
    return kept


def build_lie_basis(N: int, cache_dir=None) -> list:
    """Basis elements of all orders <= N, order-ascending, 1-indexed."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = []
    idx = 1
    for m in range(1, N + 1):
        for w in _load_order(m, cache_dir):
            out.append(
                LieBasisElement(
                    word=w,
                    expansion=expand_right_normed(w),
                    order=m,
                    length=len(w),
                    index=idx,
                )
            )
            idx += 1
    return out
