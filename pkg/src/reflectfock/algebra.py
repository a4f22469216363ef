"""The group algebra CG(m,1,n): convolution, involution, inner product."""
from __future__ import annotations

from functools import lru_cache
from typing import Mapping

import numpy as np

from . import group as grp
from .errors import InvalidInputError
from .group import GroupElement, GroupParams


class GroupAlgebraElement:
    """Finitely supported complex function on the group.

    Exact zeros are dropped from the support; nothing else is pruned.
    """

    __slots__ = ("params", "coeffs")

    def __init__(self, coeffs: Mapping[GroupElement, complex], params: GroupParams):
        self.params = params
        self.coeffs = {}
        for u, c in coeffs.items():
            grp._check(u, params)
            c = complex(c)
            if c != 0:
                self.coeffs[u] = c

    @classmethod
    def delta(cls, u: GroupElement, params: GroupParams, c: complex = 1.0):
        return cls({u: c}, params)

    def __getitem__(self, u: GroupElement) -> complex:
        return self.coeffs.get(u, 0j)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.params == other.params and self.coeffs == other.coeffs

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        _same(self, other)
        out = dict(self.coeffs)
        for u, c in other.coeffs.items():
            out[u] = out.get(u, 0j) + c
        return GroupAlgebraElement(out, self.params)

    def __rmul__(self, c: complex) -> "GroupAlgebraElement":
        return GroupAlgebraElement({u: c * v for u, v in self.coeffs.items()}, self.params)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            return ga_multiply(self, other)
        return self.__rmul__(other)

    def __repr__(self):
        terms = " + ".join(f"{c:.4g}*{u.alpha}{u.w}" for u, c in sorted(self.coeffs.items()))
        return f"GroupAlgebraElement({terms or '0'})"

    def to_json(self) -> list[dict]:
        return [
            {"element": u.to_json(), "re": c.real, "im": c.imag}
            for u, c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json(cls, data: list[dict], params: GroupParams) -> "GroupAlgebraElement":
        coeffs: dict[GroupElement, complex] = {}
        for item in data:
            u = GroupElement.from_json(item["element"])
            coeffs[u] = coeffs.get(u, 0j) + complex(item["re"], item["im"])
        return cls(coeffs, params)


def _same(f: GroupAlgebraElement, g: GroupAlgebraElement) -> None:
    if f.params != g.params:
        raise InvalidInputError(f"params mismatch: {f.params} vs {g.params}")


def ga_multiply(f: GroupAlgebraElement, g: GroupAlgebraElement) -> GroupAlgebraElement:
    """Convolution ``(fg)(w) = sum_{uv=w} f(u) g(v)``."""
    _same(f, g)
    p = f.params
    out: dict[GroupElement, complex] = {}
    for u, a in f.coeffs.items():
        for v, b in g.coeffs.items():
            w = grp.multiply(u, v, p)
            out[w] = out.get(w, 0j) + a * b
    return GroupAlgebraElement(out, p)


def ga_star(f: GroupAlgebraElement) -> GroupAlgebraElement:
    p = f.params
    return GroupAlgebraElement({grp.inverse(u, p): c.conjugate() for u, c in f.coeffs.items()}, p)


def ga_inner(f: GroupAlgebraElement, g: GroupAlgebraElement) -> complex:
    """``<f, g> = sum_u conj(f(u)) g(u)``, conjugate-linear in ``f``."""
    _same(f, g)
    return sum((c.conjugate() * g[u] for u, c in f.coeffs.items()), 0j)


@lru_cache(maxsize=None)
def _index(p: GroupParams) -> dict[GroupElement, int]:
    return {u: k for k, u in enumerate(grp._enumerate(p))}


def element_index(p: GroupParams, cap: int = grp.DEFAULT_CAP) -> dict[GroupElement, int]:
    """Row/column position of each element in regular-representation matrices."""
    grp._check_cap(p, cap)
    return _index(p)


def regular_rep(u: GroupElement, p: GroupParams, cap: int = grp.DEFAULT_CAP) -> np.ndarray:
    """Permutation matrix of left translation ``f -> u f`` on the group basis."""
    grp._check(u, p)
    index = element_index(p, cap)
    mat = np.zeros((len(index), len(index)), dtype=complex)
    for v, col in index.items():
        mat[index[grp.multiply(u, v, p)], col] = 1.0
    return mat


def to_vector(f: GroupAlgebraElement, cap: int = grp.DEFAULT_CAP) -> np.ndarray:
    index = element_index(f.params, cap)
    vec = np.zeros(len(index), dtype=complex)
    for u, c in f.coeffs.items():
        vec[index[u]] = c
    return vec
