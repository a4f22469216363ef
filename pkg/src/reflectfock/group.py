"""Exact arithmetic in the imprimitive reflection group G(m,1,n).

Elements are stored in the normal form ``t_1^a_1 ... t_n^a_n * w`` as a pair
``(alpha, w)``: ``alpha`` is a tuple of exponents mod m and ``w`` is a
permutation of ``{0, ..., n-1}`` stored as its image tuple.  Composition is
``(w o v)(i) = w(v(i))`` and conjugation acts by ``w t_j w^-1 = t_{w(j)}``.

Generators use 1-based indices (``S(1)..S(n-1)``, ``T(1)..T(n)``) to match the
usual notation; permutations are 0-based internally and 1-based in JSON.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidInputError, ResourceLimitError

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class GroupParams:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidInputError(f"need m >= 1 and n >= 1, got m={self.m}, n={self.n}")

    @property
    def order(self) -> int:
        return self.m**self.n * math.factorial(self.n)


@dataclass(frozen=True, order=True)
class GroupElement:
    alpha: tuple[int, ...]
    w: tuple[int, ...]

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "w": [i + 1 for i in self.w]}

    @classmethod
    def from_json(cls, data: dict) -> "GroupElement":
        return cls(tuple(data["alpha"]), tuple(i - 1 for i in data["w"]))


class Generator(NamedTuple):
    kind: str  # "S" or "T"
    index: int  # 1-based

    def __repr__(self):
        return f"{self.kind}{self.index}"


Word = tuple[Generator, ...]


def S(i: int) -> Generator:
    return Generator("S", i)


def T(j: int) -> Generator:
    return Generator("T", j)


def _check(a: GroupElement, p: GroupParams) -> None:
    if len(a.alpha) != p.n or len(a.w) != p.n:
        raise InvalidInputError(f"element {a} does not belong to G({p.m},1,{p.n})")
    if any(not 0 <= x < p.m for x in a.alpha) or sorted(a.w) != list(range(p.n)):
        raise InvalidInputError(f"element {a} is not in normal form for G({p.m},1,{p.n})")


def identity(p: GroupParams) -> GroupElement:
    return GroupElement((0,) * p.n, tuple(range(p.n)))


def element(alpha: Sequence[int], w: Sequence[int] | None, p: GroupParams) -> GroupElement:
    """Build ``t^alpha * w``; ``w`` is a 0-based image sequence (None for identity)."""
    if w is None:
        w = range(p.n)
    u = GroupElement(tuple(int(a) % p.m for a in alpha), tuple(int(i) for i in w))
    _check(u, p)
    return u


def generators(p: GroupParams) -> list[Generator]:
    """The representative reflection set; for m = 1 the t_j are trivial and omitted."""
    gens = [T(j) for j in range(1, p.n + 1)] if p.m > 1 else []
    return gens + [S(i) for i in range(1, p.n)]


def generator_element(g: Generator, p: GroupParams) -> GroupElement:
    if g.kind == "S":
        if not 1 <= g.index <= p.n - 1:
            raise InvalidInputError(f"s_{g.index} does not exist for n={p.n}")
        w = list(range(p.n))
        w[g.index - 1], w[g.index] = w[g.index], w[g.index - 1]
        return GroupElement((0,) * p.n, tuple(w))
    if g.kind == "T":
        if not 1 <= g.index <= p.n:
            raise InvalidInputError(f"t_{g.index} does not exist for n={p.n}")
        alpha = [0] * p.n
        alpha[g.index - 1] = 1 % p.m
        return GroupElement(tuple(alpha), tuple(range(p.n)))
    raise InvalidInputError(f"unknown generator kind {g.kind!r}")


def multiply(a: GroupElement, b: GroupElement, p: GroupParams) -> GroupElement:
    _check(a, p)
    _check(b, p)
    n, m = p.n, p.m
    alpha = list(a.alpha)
    # (w.beta)_{w(j)} = beta_j
    for j in range(n):
        alpha[a.w[j]] = (alpha[a.w[j]] + b.alpha[j]) % m
    w = tuple(a.w[b.w[i]] for i in range(n))
    return GroupElement(tuple(alpha), w)


def inverse(a: GroupElement, p: GroupParams) -> GroupElement:
    _check(a, p)
    winv = [0] * p.n
    for i, v in enumerate(a.w):
        winv[v] = i
    # (t^a w)^-1 = w^-1 t^-a = (w^-1 . (-a)) w^-1
    alpha = [0] * p.n
    for j in range(p.n):
        alpha[winv[j]] = (-a.alpha[j]) % p.m
    return GroupElement(tuple(alpha), tuple(winv))


def evaluate(word: Iterable[Generator], p: GroupParams) -> GroupElement:
    u = identity(p)
    for g in word:
        u = multiply(u, generator_element(g, p), p)
    return u


def _check_cap(p: GroupParams, cap: int) -> None:
    if p.order > cap:
        raise ResourceLimitError(f"|G({p.m},1,{p.n})| = {p.order} exceeds cap {cap}")


def enumerate_group(p: GroupParams, cap: int = DEFAULT_CAP) -> list[GroupElement]:
    """All elements, sorted lexicographically on ``(alpha, w)``."""
    _check_cap(p, cap)
    return list(_enumerate(p))


@lru_cache(maxsize=None)
def _enumerate(p: GroupParams) -> tuple[GroupElement, ...]:
    import itertools

    alphas = itertools.product(range(p.m), repeat=p.n)
    perms = list(itertools.permutations(range(p.n)))
    return tuple(GroupElement(a, w) for a in alphas for w in perms)


@lru_cache(maxsize=None)
def _length_table(p: GroupParams) -> dict[GroupElement, int]:
    # BFS over positive words: right multiplication by members of the generating set only.
    gens = [generator_element(g, p) for g in generators(p)]
    e = identity(p)
    dist = {e: 0}
    queue = deque([e])
    while queue:
        u = queue.popleft()
        for r in gens:
            v = multiply(u, r, p)
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def length_table(p: GroupParams, cap: int = DEFAULT_CAP) -> dict[GroupElement, int]:
    _check_cap(p, cap)
    return _length_table(p)


def length(u: GroupElement, p: GroupParams, cap: int = DEFAULT_CAP) -> int:
    _check(u, p)
    return length_table(p, cap)[u]


def inversions(w: Sequence[int]) -> int:
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def permutation_word(w: Sequence[int]) -> list[int]:
    """Reduced word ``[i_1, ..., i_k]`` with ``w = s_{i_1} ... s_{i_k}``.

    Insertion sort over the Lehmer code: inserting the entry at position ``k``
    past the larger entries to its left uses one adjacent swap per inversion, so
    the word has exactly ``inv(w)`` letters.
    """
    cur = list(w)
    swaps = []
    for k in range(1, len(cur)):
        i = k
        while i > 0 and cur[i - 1] > cur[i]:
            cur[i - 1], cur[i] = cur[i], cur[i - 1]
            swaps.append(i)  # right multiplication by s_i swaps positions i-1, i
            i -= 1
    # w * s_{a_1} ... s_{a_L} = id, hence w = s_{a_L} ... s_{a_1}
    return swaps[::-1]


def canonical_word(u: GroupElement, p: GroupParams) -> Word:
    _check(u, p)
    word = []
    for j, a in enumerate(u.alpha, start=1):
        word.extend([T(j)] * a)
    word.extend(S(i) for i in permutation_word(u.w))
    return tuple(word)


def all_reduced_words(
    u: GroupElement, p: GroupParams, cap: int = 1000
) -> tuple[set[Word], bool]:
    """Every word of length ``length(u)`` evaluating to ``u``, up to ``cap`` words.

    Returns ``(words, truncated)``.  The canonical word is always included.
    """
    table = length_table(p)
    gens = [(g, inverse(generator_element(g, p), p)) for g in generators(p)]
    words: set[Word] = {canonical_word(u, p)}
    truncated = False

    def walk(v: GroupElement, suffix: tuple[Generator, ...]):
        nonlocal truncated
        if truncated:
            return
        if table[v] == 0:
            if suffix not in words and len(words) >= cap:
                truncated = True
            else:
                words.add(suffix)
            return
        for g, ginv in gens:
            prev = multiply(v, ginv, p)
            if table[prev] == table[v] - 1:
                walk(prev, (g,) + suffix)

    walk(u, ())
    return words, truncated
