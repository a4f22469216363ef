"""Premise checks for operator families and the built-in admissible families."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebra
from . import group as grp
from . import operators as ops
from .errors import InvalidInputError, ResourceLimitError
from .group import GroupParams

MAX_TENSOR_DIM = 4096


@dataclass
class OperatorSystem:
    """Images ``S_1..S_{n-1}`` and ``T_1..T_n`` of the generators on a common space."""

    m: int
    n: int
    dim: int
    S: list[np.ndarray]
    T: list[np.ndarray]
    strict: bool = False

    def __post_init__(self):
        GroupParams(self.m, self.n)
        self.S = [ops.as_operator(a) for a in self.S]
        self.T = [ops.as_operator(a) for a in self.T]
        if self.m == 1 and not self.T:
            self.T = [np.zeros((self.dim, self.dim), dtype=complex) for _ in range(self.n)]
        if len(self.S) != self.n - 1 or len(self.T) != self.n:
            raise InvalidInputError(
                f"need {self.n - 1} S and {self.n} T operators, got {len(self.S)} and {len(self.T)}"
            )
        for a in self.S + self.T:
            if a.shape != (self.dim, self.dim):
                raise InvalidInputError(f"operator shape {a.shape} != ({self.dim}, {self.dim})")

    @property
    def params(self) -> GroupParams:
        return GroupParams(self.m, self.n)

    def image(self, g: grp.Generator) -> np.ndarray:
        return self.S[g.index - 1] if g.kind == "S" else self.T[g.index - 1]

    def scaled(self, q: float) -> "OperatorSystem":
        return OperatorSystem(
            self.m, self.n, self.dim, [q * a for a in self.S], [q * a for a in self.T],
            self.strict or abs(q) < 1,
        )


@dataclass
class FockGenerators:
    """The single braid operator ``S`` on ``C^d (x) C^d`` and ``T`` on ``C^d``."""

    m: int
    d: int
    S: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise InvalidInputError(f"need m >= 1 and d >= 1, got m={self.m}, d={self.d}")
        self.S = ops.as_operator(self.S)
        self.T = ops.as_operator(self.T)
        if self.S.shape != (self.d**2, self.d**2) or self.T.shape != (self.d, self.d):
            raise InvalidInputError(
                f"S must be {self.d**2}x{self.d**2} and T {self.d}x{self.d}, "
                f"got {self.S.shape} and {self.T.shape}"
            )

    @property
    def s_norm(self) -> float:
        return ops.op_norm(self.S)

    @property
    def t_norm(self) -> float:
        # for m = 1 the T operator never enters any construction
        return ops.op_norm(self.T) if self.m > 1 else 0.0


@dataclass
class RelationReport:
    residuals: dict[str, float]
    norms: dict[str, float]
    tol: float
    strict: bool
    failures: list[str] = field(default_factory=list)
    # relations the group needs for reduced-word independence of phi but that
    # are not among the stated premises; reported, never counted
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "strict": self.strict,
            "residuals": self.residuals,
            "norms": self.norms,
            "failures": self.failures,
            "diagnostics": self.diagnostics,
        }


def _res(a, b) -> float:
    return ops.op_norm(a - b)


def power_sum(T: np.ndarray, m: int, start: int = 1) -> np.ndarray:
    """``sum_{i=start}^{m-1} T^i``."""
    out = np.zeros_like(T)
    power = np.linalg.matrix_power(T, start)
    for _ in range(start, m):
        out = out + power
        power = power @ T
    return out


def _norm_failure(name: str, norm: float, strict: bool, tol: float) -> bool:
    return norm >= 1.0 if strict else norm > 1.0 + tol


def check_premises(sys: OperatorSystem, tol: float | None = None) -> RelationReport:
    """Residual of every premise: self-adjointness, norm bounds, power sums, braids."""
    n, m = sys.n, sys.m
    mats = sys.S + (sys.T if m > 1 else [])
    if tol is None:
        tol = 1e-10 * (1.0 + max((ops.op_norm(a) for a in mats), default=0.0))
    residuals: dict[str, float] = {}
    norms: dict[str, float] = {}
    failures: list[str] = []
    S, T = sys.S, sys.T

    for i in range(1, n):
        residuals[f"S{i}_selfadjoint"] = _res(S[i - 1], ops.adjoint(S[i - 1]))
        norms[f"S{i}"] = ops.op_norm(S[i - 1])
    if m > 1:
        for j in range(1, n + 1):
            norms[f"T{j}"] = ops.op_norm(T[j - 1])
            ps = power_sum(T[j - 1], m)
            residuals[f"T{j}_power_sum_hermitian"] = _res(ps, ops.adjoint(ps))

    for i in range(1, n - 1):
        a, b = S[i - 1], S[i]
        residuals[f"S{i}_S{i + 1}_braid"] = _res(a @ b @ a, b @ a @ b)
    for i in range(1, n):
        for j in range(i + 2, n):
            a, b = S[i - 1], S[j - 1]
            residuals[f"S{i}_S{j}_commute"] = _res(a @ b, b @ a)

    if m > 1:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                a, b = T[i - 1], T[j - 1]
                residuals[f"T{i}_T{j}_commute"] = _res(a @ b, b @ a)
        for i in range(1, n):
            for j in range(1, n + 1):
                if abs(i - j) >= 2:
                    a, b = S[i - 1], T[j - 1]
                    residuals[f"S{i}_T{j}_commute"] = _res(a @ b, b @ a)
        for i in range(1, n):
            s, t, t1 = S[i - 1], T[i - 1], T[i]
            residuals[f"S{i}_T{i}_mixed"] = _res(s @ t @ s @ t, t @ s @ t @ s)
            residuals[f"S{i}_T{i + 1}_mixed"] = _res(s @ t1 @ s @ t1, t1 @ s @ t1 @ s)

    for name, norm in norms.items():
        if _norm_failure(name, norm, sys.strict, tol):
            failures.append(f"norm_{name}")
    failures.extend(name for name, r in residuals.items() if r > tol)

    diagnostics: dict[str, float] = {}
    if m > 1:
        for i in range(1, n):
            s = S[i - 1]
            diagnostics[f"S{i}T{i}=T{i + 1}S{i}"] = _res(s @ T[i - 1], T[i] @ s)
            diagnostics[f"S{i}T{i + 1}=T{i}S{i}"] = _res(s @ T[i], T[i - 1] @ s)
            if i >= 2:
                a, b = s, T[i - 2]
                diagnostics[f"S{i}_T{i - 1}_commute"] = _res(a @ b, b @ a)
    return RelationReport(residuals, norms, tol, sys.strict, failures, diagnostics)


def _braid_ops(S: np.ndarray, d: int):
    if S.shape != (d * d, d * d):
        raise InvalidInputError(f"S has shape {S.shape}, expected {(d * d, d * d)}")
    idd = ops.identity(d)
    return ops.kron(S, idd), ops.kron(idd, S)


def check_yang_baxter(S, d: int) -> float:
    """Operator-norm residual of ``(1 x S)(S x 1)(1 x S) = (S x 1)(1 x S)(S x 1)``."""
    left, right = _braid_ops(ops.as_operator(S), d)
    return _res(right @ left @ right, left @ right @ left)


def check_mixed(S, T, d: int) -> tuple[float, float]:
    S, T = ops.as_operator(S), ops.as_operator(T)
    if S.shape != (d * d, d * d) or T.shape != (d, d):
        raise InvalidInputError(f"shapes {S.shape}, {T.shape} do not match d={d}")
    idd = ops.identity(d)
    a = ops.kron(T, idd)
    b = ops.kron(idd, T)
    return _res(a @ S @ a @ S, S @ a @ S @ a), _res(b @ S @ b @ S, S @ b @ S @ b)


def check_generators(gen: FockGenerators, tol: float | None = None) -> RelationReport:
    """Strict-norm premises on the single ``S`` and ``T`` of the Fock construction."""
    use_t = gen.m > 1
    if tol is None:
        tol = 1e-10 * (1.0 + max(gen.s_norm, gen.t_norm))
    norms = {"S": gen.s_norm}
    residuals = {
        "S_selfadjoint": _res(gen.S, ops.adjoint(gen.S)),
        "yang_baxter": check_yang_baxter(gen.S, gen.d),
    }
    if use_t:
        norms["T"] = gen.t_norm
        ps = power_sum(gen.T, gen.m)
        residuals["T_power_sum_hermitian"] = _res(ps, ops.adjoint(ps))
        residuals["mixed_T_left"], residuals["mixed_T_right"] = check_mixed(gen.S, gen.T, gen.d)
    failures = [f"norm_{k}" for k, v in norms.items() if v >= 1.0]
    failures += [k for k, v in residuals.items() if v > tol]
    return RelationReport(residuals, norms, tol, True, failures)


def lift_to_system(gen: FockGenerators, n: int, max_dim: int = MAX_TENSOR_DIM) -> OperatorSystem:
    """``S_i`` and ``T_j`` placed on the tensor slots of ``(C^d)^n``."""
    d = gen.d
    if d**n > max_dim:
        raise ResourceLimitError(f"(C^{d})^{n} has dimension {d**n} > cap {max_dim}")
    S = [ops.embed(gen.S, i, n, d, 2) for i in range(1, n)]
    T = [ops.embed(gen.T, j, n, d, 1) for j in range(1, n + 1)]
    strict = gen.s_norm < 1 and gen.t_norm < 1
    return OperatorSystem(gen.m, n, d**n, S, T, strict)


def regular_system(p: GroupParams, cap: int = grp.DEFAULT_CAP) -> OperatorSystem:
    """Generators mapped to their left-translation matrices on CG(m,1,n)."""
    S = [algebra.regular_rep(grp.generator_element(grp.S(i), p), p, cap) for i in range(1, p.n)]
    if p.m > 1:
        T = [algebra.regular_rep(grp.generator_element(grp.T(j), p), p, cap) for j in range(1, p.n + 1)]
    else:
        T = []
    return OperatorSystem(p.m, p.n, p.order, S, T, strict=False)


# -- families -----------------------------------------------------------------

def family_q_swap(d: int, q: float, validate: bool = True) -> np.ndarray:
    """``S(x (x) y) = q (y (x) x)``."""
    if validate and abs(q) > 1:
        raise InvalidInputError(f"|q| = {abs(q)} > 1")
    return q * ops.swap(d)


def family_q_twist(Q, validate: bool = True) -> np.ndarray:
    """``S(e_a (x) e_b) = Q[b, a] (e_b (x) e_a)``.

    With ``T = 0`` this index order gives ``d(e_i) d*(e_j) - Q[i, j] d*(e_j) d(e_i) = delta_ij``.
    """
    Q = ops.as_operator(Q)
    d = Q.shape[0]
    if Q.shape != (d, d):
        raise InvalidInputError(f"Q must be square, got {Q.shape}")
    if validate:
        if np.max(np.abs(Q - Q.conj().T)) > 1e-12:
            raise InvalidInputError("Q must satisfy Q[j, i] = conj(Q[i, j])")
        if np.max(np.abs(Q)) > 1 + 1e-12:
            raise InvalidInputError("entries of Q must satisfy |q_ij| <= 1")
    mat = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            mat[b * d + a, a * d + b] = Q[b, a]
    return mat


def family_diag_T(taus, validate: bool = True) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1:
        raise InvalidInputError("taus must be a vector")
    if validate and np.any(np.abs(taus) >= 1):
        raise InvalidInputError(f"need |tau_k| < 1, got {taus.tolist()}")
    return np.diag(taus).astype(complex)


def family_zero_T(d: int) -> np.ndarray:
    return np.zeros((d, d), dtype=complex)
