"""Dense complex-matrix helpers: norms, spectra, positivity, tensor embeddings.

Operators are plain 2-D ``numpy`` arrays.  The tensor basis is lexicographic
with the leftmost factor most significant, i.e. ``kron(a, b)`` acts on
``x (x) y`` as ``np.kron(x, y)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

SVD_MAX_DIM = 1024
MAX_DIM = 1 << 14


def as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise InvalidInputError(f"operator must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("operator has non-finite entries")
    return a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def kron(*ops, max_dim: int = MAX_DIM) -> np.ndarray:
    ops = [as_operator(a) for a in ops]
    rows = int(np.prod([a.shape[0] for a in ops]))
    cols = int(np.prod([a.shape[1] for a in ops]))
    if max(rows, cols) > max_dim:
        raise ResourceLimitError(f"kron result {rows}x{cols} exceeds cap {max_dim}")
    return reduce(np.kron, ops)


def adjoint(a) -> np.ndarray:
    return np.conj(as_operator(a)).T


def op_norm(a, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Largest singular value.

    Full SVD up to ``SVD_MAX_DIM``; power iteration on ``A*A`` beyond.
    """
    a = as_operator(a)
    if a.size == 0:
        return 0.0
    if max(a.shape) <= SVD_MAX_DIM:
        return float(np.linalg.norm(a, 2))
    gram = adjoint(a) @ a
    rng = np.random.default_rng(0)
    x = rng.standard_normal(gram.shape[0]) + 1j * rng.standard_normal(gram.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = gram @ x
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam))


def hermitian_residual(a) -> float:
    a = as_operator(a)
    return op_norm(a - adjoint(a))


def hermitian_tol(a) -> float:
    return 1e-10 * (1.0 + op_norm(a))


def positivity_tol(a) -> float:
    return 1e-9 * (1.0 + op_norm(a))


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray = field(repr=False)
    min_eig: float
    hermitian_residual: float

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "min_eig": self.min_eig,
            "hermitian_residual": self.hermitian_residual,
        }


def spectrum(a, tol: float | None = None) -> SpectralReport:
    """Sorted spectrum of a Hermitian matrix (symmetrised before ``eigh``)."""
    a = as_operator(a)
    res = hermitian_residual(a)
    tol = hermitian_tol(a) if tol is None else tol
    if res > tol:
        raise InvalidInputError(f"matrix is not Hermitian: residual {res:.3e} > {tol:.3e}")
    ev = np.linalg.eigvalsh((a + adjoint(a)) / 2)
    return SpectralReport(ev, float(ev[0]), res)


def m0(a, tol: float | None = None) -> float:
    """Smallest spectral value, i.e. the infimum of the Rayleigh quotient."""
    return spectrum(a, tol).min_eig


def is_positive(a, tol: float | None = None) -> tuple[bool, SpectralReport]:
    """Hermitian within tolerance and ``min_eig >= -tol``.

    A non-Hermitian input yields ``False`` with the full eigenvalue list of its
    Hermitian part in the report, so the caller can still see what went wrong.
    """
    a = as_operator(a)
    herm_tol = hermitian_tol(a)
    tol = positivity_tol(a) if tol is None else tol
    res = hermitian_residual(a)
    ev = np.linalg.eigvalsh((a + adjoint(a)) / 2)
    report = SpectralReport(ev, float(ev[0]), res)
    return bool(res <= herm_tol and ev[0] >= -tol), report


def embed(op, pos: int, slots: int, d: int, width: int) -> np.ndarray:
    """``id^(pos-1) (x) op (x) id^(slots-pos-width+1)`` on ``(C^d)^slots``; ``pos`` is 1-based."""
    op = as_operator(op)
    if op.shape != (d**width, d**width):
        raise InvalidInputError(f"operator of shape {op.shape} does not act on (C^{d})^{width}")
    if not 1 <= pos <= slots - width + 1:
        raise InvalidInputError(f"position {pos} out of range for width {width} in {slots} slots")
    left = identity(d ** (pos - 1))
    right = identity(d ** (slots - pos - width + 1))
    return kron(left, op, right)


def swap(d: int) -> np.ndarray:
    """Flip operator ``x (x) y -> y (x) x`` on ``C^d (x) C^d``."""
    mat = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            mat[b * d + a, a * d + b] = 1.0
    return mat


def hermitian_sqrt(a, inverse: bool = False) -> np.ndarray:
    """Square root (or inverse square root) through ``eigh``."""
    a = as_operator(a)
    ev, vecs = np.linalg.eigh((a + adjoint(a)) / 2)
    if inverse:
        if ev[0] <= 0:
            raise InvalidInputError(f"matrix not positive definite (min eig {ev[0]:.3e})")
        vals = 1.0 / np.sqrt(ev)
    else:
        vals = np.sqrt(np.clip(ev, 0.0, None))
    return (vecs * vals) @ adjoint(vecs)


def tree_sum(mats):
    """Pairwise summation of an iterable of equally shaped arrays."""
    stack: list[tuple[int, np.ndarray]] = []
    for mat in mats:
        level, acc = 0, mat
        while stack and stack[-1][0] == level:
            _, prev = stack.pop()
            acc = prev + acc
            level += 1
        stack.append((level, acc))
    if not stack:
        raise InvalidInputError("empty sum")
    total = stack.pop()[1]
    while stack:
        total = stack.pop()[1] + total
    return total


def to_json(a) -> dict:
    a = as_operator(a)
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def from_json(data: dict) -> np.ndarray:
    try:
        rows, cols, entries = int(data["rows"]), int(data["cols"]), data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad matrix record: {exc}") from exc
    if rows < 1 or cols < 1 or len(entries) != rows * cols:
        raise InvalidInputError(f"expected {rows}*{cols} entries, got {len(entries)}")
    try:
        flat = np.array([complex(float(re), float(im)) for re, im in entries])
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad matrix entry: {exc}") from exc
    return as_operator(flat.reshape(rows, cols))


def load_matrix(path) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read matrix file {path}: {exc}") from exc
    return from_json(data)


def save_matrix(a, path) -> None:
    Path(path).write_text(json.dumps(to_json(a)))
