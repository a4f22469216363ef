"""Truncated full Fock space with the deformed inner product and twisted ladder operators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import operators as ops
from .admissibility import FockGenerators, family_q_twist
from .cpmap import build_R, gram_sequence
from .errors import InvalidInputError


@dataclass
class FockVector:
    """Components on levels ``0..len(levels)-1``; level 0 is the vacuum coefficient."""

    levels: list[np.ndarray]
    truncated: bool = False

    def __post_init__(self):
        self.levels = [np.atleast_1d(np.asarray(v, dtype=complex)) for v in self.levels]

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def level(self, k: int, d: int) -> np.ndarray:
        if k < len(self.levels):
            return self.levels[k]
        return np.zeros(d**k, dtype=complex)

    def to_json(self) -> dict:
        return {
            "levels": [[[float(z.real), float(z.imag)] for z in v] for v in self.levels],
            "truncated": self.truncated,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FockVector":
        return cls([np.array([complex(a, b) for a, b in v]) for v in data["levels"]],
                   bool(data.get("truncated", False)))


def vacuum() -> FockVector:
    return FockVector([np.ones(1)])


def homogeneous(X, k: int, d: int) -> FockVector:
    """Embed a level-``k`` tensor as a Fock vector."""
    X = np.asarray(X, dtype=complex).ravel()
    if X.shape != (d**k,):
        raise InvalidInputError(f"level {k} vector must have {d**k} entries, got {X.size}")
    return FockVector([np.zeros(d**j, dtype=complex) for j in range(k)] + [X])


class TruncatedFock:
    """Levels ``0..N`` over ``C^d`` with the Gram operators ``P_0..P_N`` precomputed."""

    def __init__(self, gen: FockGenerators, N: int, max_dim: int = 4096):
        if N < 0:
            raise InvalidInputError(f"truncation level must be >= 0, got {N}")
        self.gen = gen
        self.d = gen.d
        self.N = N
        self.grams = gram_sequence(N, gen, max_dim)
        self._R = {k: build_R(k, gen, max_dim) for k in range(1, N + 1)}

    def R(self, k: int) -> np.ndarray:
        return self._R[k]

    def _check(self, v: FockVector) -> None:
        if v.top > self.N:
            raise InvalidInputError(f"vector has level {v.top} beyond truncation {self.N}")
        for k, comp in enumerate(v.levels):
            if comp.shape != (self.d**k,):
                raise InvalidInputError(f"level {k} has {comp.size} entries, expected {self.d**k}")

    def zero(self) -> FockVector:
        return FockVector([np.zeros(self.d**k, dtype=complex) for k in range(self.N + 1)])

    # matrices between consecutive levels
    def creation_matrix(self, x, k: int) -> np.ndarray:
        """``l*(x)`` from level ``k`` to ``k+1``."""
        x = _vec(x, self.d)
        return np.kron(x.reshape(-1, 1), ops.identity(self.d**k))

    def free_annihilation_matrix(self, x, k: int) -> np.ndarray:
        """``l(x)`` from level ``k`` to ``k-1``: contracts the first slot with ``conj(x)``."""
        x = _vec(x, self.d)
        return np.kron(x.conj().reshape(1, -1), ops.identity(self.d ** (k - 1)))

    def annihilation_matrix(self, x, k: int) -> np.ndarray:
        """``d(x) = l(x) R_k`` from level ``k`` to ``k-1``."""
        return self.free_annihilation_matrix(x, k) @ self.R(k)


def _vec(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=complex).ravel()
    if x.shape != (d,):
        raise InvalidInputError(f"one-particle vector must have {d} entries, got {x.size}")
    return x


def free_create(x, v: FockVector, f: TruncatedFock) -> FockVector:
    f._check(v)
    out = [np.zeros(1, dtype=complex)]
    truncated = v.truncated
    for k, comp in enumerate(v.levels):
        if k + 1 > f.N:
            if np.any(comp != 0):
                truncated = True
            continue
        out.append(f.creation_matrix(x, k) @ comp)
    return FockVector(out, truncated)


def _annihilate(x, v: FockVector, f: TruncatedFock, twisted: bool) -> FockVector:
    f._check(v)
    out = []
    for k in range(1, len(v.levels)):
        mat = f.annihilation_matrix(x, k) if twisted else f.free_annihilation_matrix(x, k)
        out.append(mat @ v.levels[k])
    if not out:
        out = [np.zeros(1, dtype=complex)]
    return FockVector(out, v.truncated)


def free_annihilate(x, v: FockVector, f: TruncatedFock) -> FockVector:
    return _annihilate(x, v, f, twisted=False)


def create(x, v: FockVector, f: TruncatedFock) -> FockVector:
    return free_create(x, v, f)


def annihilate(x, v: FockVector, f: TruncatedFock) -> FockVector:
    return _annihilate(x, v, f, twisted=True)


def inner_G(X: FockVector, Y: FockVector, f: TruncatedFock) -> complex:
    """``sum_k <X_k, P_k Y_k>``."""
    f._check(X)
    f._check(Y)
    total = 0j
    for k in range(min(len(X.levels), len(Y.levels))):
        total += np.vdot(X.levels[k], f.grams[k] @ Y.levels[k])
    return complex(total)


def adjoint_residual(x, X: FockVector, Y: FockVector, f: TruncatedFock) -> float:
    """``|<d*(x) X, Y>_G - <X, d(x) Y>_G|``; ``X`` must stay within the truncation."""
    if X.top >= f.N and np.any(X.levels[f.N] != 0):
        raise InvalidInputError("X has a component at the top level; d*(x) X leaves the truncation")
    lhs = inner_G(create(x, X, f), Y, f)
    rhs = inner_G(X, annihilate(x, Y, f), f)
    return abs(lhs - rhs)


def norm_bound(x, gen: FockGenerators) -> float:
    """``||x|| / sqrt((1 - ||S||)(1 - ||T||))``."""
    s, t = gen.s_norm, gen.t_norm
    if s >= 1 or t >= 1:
        raise InvalidInputError(f"bound needs ||S|| < 1 and ||T|| < 1, got {s}, {t}")
    return float(np.linalg.norm(x) / np.sqrt((1 - s) * (1 - t)))


def g_op_norm(x, f: TruncatedFock) -> float:
    """Norm of ``d*(x)`` from levels ``0..N-1`` into ``1..N`` measured in ``||.||_G``.

    The map is block diagonal in the level, so the norm is the largest of
    ``|| P_{k+1}^{1/2} l*(x) P_k^{-1/2} ||``.
    """
    best = 0.0
    for k in range(f.N):
        g_in = f.grams[k]
        ok, report = ops.is_positive(g_in)
        if not ok or report.min_eig <= 0:
            raise InvalidInputError(f"P_{k} is not positive definite (min eig {report.min_eig:.3e})")
        block = ops.hermitian_sqrt(f.grams[k + 1]) @ f.creation_matrix(x, k) @ ops.hermitian_sqrt(
            g_in, inverse=True
        )
        best = max(best, ops.op_norm(block))
    return best


def per_vector_ratio(x, X, k: int, f: TruncatedFock) -> tuple[float, float]:
    """``(||d*(x) X||_G^2, ||x||^2 ||X||_G^2 / ((1-||S||)(1-||T||)))`` for a level-``k`` tensor ``X``.

    Reported for inspection only; the squared comparison is the one the operator
    inequality ``P_{k+1} <= c (id (x) P_k)`` actually yields.
    """
    X = np.asarray(X, dtype=complex)
    y = f.creation_matrix(x, k) @ X
    lhs = np.vdot(y, f.grams[k + 1] @ y).real
    c = 1.0 / ((1 - f.gen.s_norm) * (1 - f.gen.t_norm))
    rhs = c * np.vdot(x, x).real * np.vdot(X, f.grams[k] @ X).real
    return float(lhs), float(rhs)


def qij_residual(i: int, j: int, f: TruncatedFock, Q) -> float:
    """Norm of ``d(e_i) d*(e_j) - Q[i,j] d*(e_j) d(e_i) - delta_ij`` on levels ``0..N-2``.

    Indices are 0-based.  ``f`` must be built from ``S = family_q_twist(Q)`` and ``T = 0``.
    """
    Q = ops.as_operator(Q)
    d = f.d
    if Q.shape != (d, d):
        raise InvalidInputError(f"Q must be {d}x{d}")
    if f.gen.m > 1 and np.any(f.gen.T != 0):
        raise InvalidInputError("q_ij relations need T = 0")
    if np.max(np.abs(f.gen.S - family_q_twist(Q, validate=False))) > 1e-14:
        raise InvalidInputError("S is not the q-twist built from Q")
    if f.N < 2:
        raise InvalidInputError("need truncation level N >= 2")
    ei, ej = np.eye(d)[i], np.eye(d)[j]
    worst = 0.0
    for k in range(f.N - 1):
        lhs = f.annihilation_matrix(ei, k + 1) @ f.creation_matrix(ej, k)
        if k >= 1:
            lhs = lhs - Q[i, j] * f.creation_matrix(ej, k - 1) @ f.annihilation_matrix(ei, k)
        if i == j:
            lhs = lhs - ops.identity(d**k)
        worst = max(worst, ops.op_norm(lhs))
    return worst
