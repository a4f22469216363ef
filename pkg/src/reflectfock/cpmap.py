"""The quasimultiplicative map phi, its group sums P, and complete-positivity witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import algebra
from . import group as grp
from . import operators as ops
from .admissibility import FockGenerators, OperatorSystem, power_sum
from .algebra import GroupAlgebraElement
from .errors import ConsistencyError, InvalidInputError, ResourceLimitError
from .group import GroupElement, GroupParams

MAX_HAT_DIM = 4096


@dataclass
class QuasiMap:
    """``phi(1) = id``, ``phi(s_i) = S_i``, ``phi(t_j) = T_j``, extended along reduced words."""

    sys: OperatorSystem
    _t_cache: dict = field(default_factory=dict, init=False, repr=False)
    _w_cache: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def params(self) -> GroupParams:
        return self.sys.params

    @property
    def dim(self) -> int:
        return self.sys.dim

    def phi(self, u: GroupElement) -> np.ndarray:
        p = self.params
        word = grp.canonical_word(u, p)
        if len(word) != grp.length(u, p):
            raise ConsistencyError(
                f"normal-form word of {u} has {len(word)} letters but length is {grp.length(u, p)}"
            )
        return self._t_part(u.alpha) @ self._w_part(u.w)

    def _t_part(self, alpha: tuple[int, ...]) -> np.ndarray:
        if alpha not in self._t_cache:
            out = ops.identity(self.dim)
            for j, a in enumerate(alpha):
                if a:
                    out = out @ np.linalg.matrix_power(self.sys.T[j], a)
            self._t_cache[alpha] = out
        return self._t_cache[alpha]

    def _w_part(self, w: tuple[int, ...]) -> np.ndarray:
        if w not in self._w_cache:
            out = ops.identity(self.dim)
            for i in grp.permutation_word(w):
                out = out @ self.sys.S[i - 1]
            self._w_cache[w] = out
        return self._w_cache[w]

    def phi_word(self, word: Sequence[grp.Generator]) -> np.ndarray:
        """Product of generator images along ``word`` (any word, reduced or not)."""
        out = ops.identity(self.dim)
        for g in word:
            out = out @ self.sys.image(g)
        return out


@dataclass
class DeformedMap:
    """``phi_q(r) = q phi(r)`` on generators, so ``phi_q(u) = q^l(u) phi(u)``."""

    base: QuasiMap
    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise InvalidInputError(f"q must lie in [0, 1], got {self.q}")

    @property
    def params(self) -> GroupParams:
        return self.base.params

    @property
    def dim(self) -> int:
        return self.base.dim

    def phi(self, u: GroupElement) -> np.ndarray:
        k = grp.length(u, self.params)
        if k == 0:
            return ops.identity(self.dim)
        return self.q**k * self.base.phi(u)


def phi(u: GroupElement, qmap) -> np.ndarray:
    return qmap.phi(u)


def phi_algebra(f: GroupAlgebraElement, qmap) -> np.ndarray:
    if f.params != qmap.params:
        raise InvalidInputError(f"params mismatch: {f.params} vs {qmap.params}")
    out = np.zeros((qmap.dim, qmap.dim), dtype=complex)
    for u, c in f.coeffs.items():
        out += c * qmap.phi(u)
    return out


def deform(qmap: QuasiMap, q: float) -> DeformedMap:
    return DeformedMap(qmap, q)


def build_P_naive(qmap, cap: int = grp.DEFAULT_CAP) -> np.ndarray:
    """``sum_u phi(u)`` over the whole group, pairwise-summed."""
    elements = grp.enumerate_group(qmap.params, cap)
    return ops.tree_sum(qmap.phi(u) for u in elements)


def m0_curve(qmap: QuasiMap, qs: Sequence[float]) -> np.ndarray:
    return np.array([ops.m0(build_P_naive(deform(qmap, q))) for q in qs])


def _check_level(level: int, d: int, max_dim: int) -> None:
    if level < 0:
        raise InvalidInputError(f"level must be >= 0, got {level}")
    if d**level > max_dim:
        raise ResourceLimitError(f"(C^{d})^{level} has dimension {d**level} > cap {max_dim}")


def build_R(level: int, gen: FockGenerators, max_dim: int = 4096) -> np.ndarray:
    """``(id + sum_{i=1}^{m-1} T_1^i)(id + sum_{j=1}^{level-1} S_1 S_2 ... S_j)``."""
    if level < 1:
        raise InvalidInputError(f"R is defined for level >= 1, got {level}")
    _check_level(level, gen.d, max_dim)
    d, dim = gen.d, gen.d**level
    t1 = ops.embed(gen.T, 1, level, d, 1)
    t_factor = ops.identity(dim) + power_sum(t1, gen.m)
    s_factor = ops.identity(dim)
    prefix = ops.identity(dim)
    for j in range(1, level):
        prefix = prefix @ ops.embed(gen.S, j, level, d, 2)
        s_factor = s_factor + prefix
    return t_factor @ s_factor


def build_P_recursive(level: int, gen: FockGenerators, max_dim: int = 4096) -> np.ndarray:
    """``P_0 = 1`` and ``P_{k+1} = (id (x) P_k) R_{k+1}``."""
    return gram_sequence(level, gen, max_dim)[level]


def gram_sequence(levels: int, gen: FockGenerators, max_dim: int = 4096) -> list[np.ndarray]:
    """``[P_0, ..., P_levels]`` via the recursion."""
    _check_level(levels, gen.d, max_dim)
    grams = [np.ones((1, 1), dtype=complex)]
    for k in range(levels):
        grams.append(ops.kron(ops.identity(gen.d), grams[k]) @ build_R(k + 1, gen, max_dim))
    return grams


def t_sum_inverse(T, m: int, tol: float = 1e-12) -> np.ndarray:
    """Inverse of ``sum_{i=0}^{m-1} T^i`` as ``(id - T) sum_k T^{mk}``, series truncated at ``tol``."""
    T = ops.as_operator(T)
    norm = ops.op_norm(T)
    if norm >= 1:
        raise InvalidInputError(f"need ||T|| < 1, got {norm}")
    r = norm**m
    if r == 0.0:
        K = 0
    else:
        # smallest K with r^K / (1 - r) < tol
        K = max(0, math.ceil(math.log(tol * (1 - r)) / math.log(r)))
    tm = np.linalg.matrix_power(T, m)
    series = ops.identity(T.shape[0])
    power = ops.identity(T.shape[0])
    for _ in range(K):
        power = power @ tm
        series = series + power
    return (ops.identity(T.shape[0]) - T) @ series


def cp_witness_value(qmap, fs: Sequence[GroupAlgebraElement], xs: Sequence) -> complex:
    """``sum_{i,j} <phi(f_j^* f_i) x_i, x_j>`` without discarding the imaginary part."""
    if len(fs) != len(xs) or not fs:
        raise InvalidInputError(f"need equally many f's and x's (k >= 1), got {len(fs)} and {len(xs)}")
    xs = [np.asarray(x, dtype=complex) for x in xs]
    for x in xs:
        if x.shape != (qmap.dim,):
            raise InvalidInputError(f"vector of shape {x.shape} not in a space of dimension {qmap.dim}")
    stars = [algebra.ga_star(f) for f in fs]
    total = 0j
    for i, fi in enumerate(fs):
        for j, fj_star in enumerate(stars):
            block = phi_algebra(algebra.ga_multiply(fj_star, fi), qmap)
            total += np.vdot(block @ xs[i], xs[j])
    return complex(total)


def cp_witness(qmap, fs, xs, tol: float | None = None) -> float:
    """Real value of the block-Gram form; raises if the imaginary part exceeds ``tol``.

    A non-negligible imaginary part means the form is not Hermitian, so no
    positivity statement about it can hold.
    """
    value = cp_witness_value(qmap, fs, xs)
    scale = 1.0 + sum(np.sum(np.abs(list(f.coeffs.values()))) for f in fs) ** 2 * max(
        np.linalg.norm(x) for x in xs
    ) ** 2
    tol = 1e-10 * scale if tol is None else tol
    if abs(value.imag) > tol:
        raise ConsistencyError(f"witness has imaginary part {value.imag:.3e} > {tol:.3e}")
    return value.real


def build_hat_P(qmap: QuasiMap, cap: int = MAX_HAT_DIM) -> np.ndarray:
    """``sum_u lambda(u) (x) phi(u)`` with ``lambda`` the left regular representation."""
    p = qmap.params
    if p.order * qmap.dim > cap:
        raise ResourceLimitError(f"|G| * dim = {p.order * qmap.dim} exceeds cap {cap}")
    return ops.tree_sum(
        ops.kron(algebra.regular_rep(u, p), qmap.phi(u), max_dim=cap)
        for u in grp.enumerate_group(p)
    )
