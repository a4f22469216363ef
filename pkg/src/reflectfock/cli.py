"""Command-line entry point: ``reflectfock {check,gram,cp,fock,report}``.

Every subcommand prints a JSON report (schema ``reflect-fock/1``) and exits
with 0 when all checks pass, 1 when any check fails, 2 on invalid input or a
resource cap.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, algebra
from . import group as grp
from . import operators as ops
from .admissibility import (
    FockGenerators,
    check_mixed,
    check_premises,
    check_yang_baxter,
    family_diag_T,
    family_q_swap,
    family_q_twist,
    family_zero_T,
    lift_to_system,
)
from .cpmap import (
    QuasiMap,
    build_hat_P,
    build_P_naive,
    cp_witness_value,
    deform,
    gram_sequence,
    m0_curve,
)
from .errors import ConsistencyError, InvalidInputError, ResourceLimitError
from .fock import (
    FockVector,
    TruncatedFock,
    adjoint_residual,
    g_op_norm,
    norm_bound,
    qij_residual,
)

SCHEMA = "reflect-fock/1"
NAIVE_ORDER_CAP = 20_000


@dataclass
class RunConfig:
    command: str
    m: int = 2
    n: int = 3
    dim: int | None = None
    levels: int | None = None
    family: list[str] = field(default_factory=list)
    s_file: str | None = None
    t_file: str | None = None
    seed: int = 0
    tol: float | None = None
    draws: int = 100
    out: str | None = None


class Report:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.checks: list[dict] = []

    def add(self, name: str, value: float, tol: float, passed: bool, started: float, **extra):
        entry = {"name": name, "value": float(value), "tol": float(tol), "passed": bool(passed)}
        entry.update(extra)
        entry["seconds"] = time.perf_counter() - started
        self.checks.append(entry)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> dict:
        config = asdict(self.cfg)
        config.pop("out")
        return {
            "schema": SCHEMA,
            "version": __version__,
            "config": config,
            "passed": self.passed,
            "checks": sorted(self.checks, key=lambda c: c["name"]),
        }


# -- generator construction ---------------------------------------------------

def parse_family(specs: list[str], dim: int | None, validate: bool = True):
    """Return ``(S, T, q_matrix_or_None)`` from the family mini-grammar."""
    S = T = Q = None
    for spec in specs:
        name, _, arg = spec.partition(":")
        if name in ("q-swap", "q-twist"):
            if S is not None:
                raise InvalidInputError("more than one S family given")
            if name == "q-swap":
                if dim is None:
                    raise InvalidInputError("q-swap needs --dim")
                S = family_q_swap(dim, _float(arg, spec), validate=validate)
            else:
                Q = ops.load_matrix(arg)
                S = family_q_twist(Q, validate=validate)
        elif name in ("diag-t", "zero-t"):
            if T is not None:
                raise InvalidInputError("more than one T family given")
            if name == "diag-t":
                try:
                    taus = [float(v) for v in arg.split(",")]
                except ValueError as exc:
                    raise InvalidInputError(f"bad family spec {spec!r}") from exc
                T = family_diag_T(taus, validate=validate)
            else:
                if dim is None:
                    raise InvalidInputError("zero-t needs --dim")
                T = family_zero_T(dim)
        else:
            raise InvalidInputError(f"unknown family {spec!r}")
    if S is None:
        raise InvalidInputError("no S family (q-swap or q-twist) given")
    return S, T, Q


def _float(text: str, spec: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise InvalidInputError(f"bad family spec {spec!r}") from exc


def build_generators(cfg: RunConfig, validate: bool = True) -> tuple[FockGenerators, object]:
    has_family = bool(cfg.family)
    has_files = cfg.s_file is not None or cfg.t_file is not None
    if has_family == has_files:
        raise InvalidInputError("give exactly one of --family or --s-file/--t-file")
    if has_family:
        S, T, Q = parse_family(cfg.family, cfg.dim, validate)
    else:
        if cfg.s_file is None:
            raise InvalidInputError("--t-file needs --s-file")
        S = ops.load_matrix(cfg.s_file)
        T = ops.load_matrix(cfg.t_file) if cfg.t_file else None
        Q = None
    d = int(round(np.sqrt(S.shape[0])))
    if d * d != S.shape[0]:
        raise InvalidInputError(f"S of shape {S.shape} does not act on C^d (x) C^d")
    if cfg.dim is not None and cfg.dim != d:
        raise InvalidInputError(f"--dim {cfg.dim} does not match S (d = {d})")
    if T is None:
        T = family_zero_T(d)
    return FockGenerators(cfg.m, d, S, T), Q


# -- subcommands --------------------------------------------------------------

def run_check(cfg: RunConfig, report: Report) -> None:
    gen, _ = build_generators(cfg, validate=False)
    t0 = time.perf_counter()
    rel = check_premises(lift_to_system(gen, cfg.n), cfg.tol)
    for name, value in rel.norms.items():
        report.add(f"premise/norm/{name}", value, 1.0, f"norm_{name}" not in rel.failures, t0)
    for name, value in rel.residuals.items():
        report.add(f"premise/{name}", value, rel.tol, name not in rel.failures, t0)
    for name, value in rel.diagnostics.items():
        report.add(f"diagnostic/{name}", value, rel.tol, True, t0, informational=True)
    t0 = time.perf_counter()
    tol = rel.tol
    report.add("generator/yang_baxter", check_yang_baxter(gen.S, gen.d), tol,
               check_yang_baxter(gen.S, gen.d) <= tol, t0)
    if gen.m > 1:
        left, right = check_mixed(gen.S, gen.T, gen.d)
        report.add("generator/mixed_T_left", left, tol, left <= tol, t0)
        report.add("generator/mixed_T_right", right, tol, right <= tol, t0)


def run_gram(cfg: RunConfig, report: Report) -> None:
    gen, _ = build_generators(cfg)
    N = cfg.levels if cfg.levels is not None else cfg.n
    grams = gram_sequence(N, gen)
    strict = gen.s_norm < 1 and gen.t_norm < 1
    for k in range(1, N + 1):
        t0 = time.perf_counter()
        ok, spec = ops.is_positive(grams[k], cfg.tol)
        report.add(f"gram/P{k}/positive", spec.min_eig, -(cfg.tol or ops.positivity_tol(grams[k])),
                   ok and (spec.min_eig > 0 or not strict), t0,
                   spectrum=[round(float(v), 12) for v in spec.eigenvalues])
        if grp.GroupParams(gen.m, k).order <= NAIVE_ORDER_CAP:
            t0 = time.perf_counter()
            naive = build_P_naive(QuasiMap(lift_to_system(gen, k)))
            rel = ops.op_norm(naive - grams[k]) / ops.op_norm(naive)
            tol = cfg.tol or 1e-10
            report.add(f"gram/P{k}/naive_vs_recursive", rel, tol, rel <= tol, t0)
    t0 = time.perf_counter()
    qmap = QuasiMap(lift_to_system(gen, cfg.n))
    qs = np.linspace(0.0, 1.0, 21)
    curve = m0_curve(qmap, qs)
    report.add("gram/m0_curve/min", curve.min(), 0.0, curve.min() > 0 or not strict, t0,
               curve=[round(float(v), 12) for v in curve])
    t0 = time.perf_counter()
    worst = 0.0
    Ps = [build_P_naive(deform(qmap, q)) for q in qs]
    for a, b, pa, pb in zip(curve, curve[1:], Ps, Ps[1:]):
        worst = max(worst, abs(a - b) - ops.op_norm(pa - pb))
    report.add("gram/m0_curve/lipschitz_excess", worst, 1e-12, worst <= 1e-12, t0)


def random_algebra_element(p: grp.GroupParams, rng: np.random.Generator, support: int = 4):
    elements = grp.enumerate_group(p)
    picks = rng.integers(0, len(elements), size=support)
    coeffs = {}
    for idx in picks:
        mag = rng.uniform(0, 1)
        coeffs[elements[idx]] = mag * np.exp(2j * np.pi * rng.uniform())
    return algebra.GroupAlgebraElement(coeffs, p)


def witness_scale(fs, xs) -> float:
    return 1.0 + sum(sum(abs(c) for c in f.coeffs.values()) for f in fs) ** 2 * max(
        float(np.linalg.norm(x)) ** 2 for x in xs
    )


def run_cp(cfg: RunConfig, report: Report) -> None:
    gen, _ = build_generators(cfg)
    qmap = QuasiMap(lift_to_system(gen, cfg.n))
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    worst_real, worst_imag = np.inf, 0.0
    for _ in range(cfg.draws):
        k = int(rng.integers(1, 5))
        fs = [random_algebra_element(qmap.params, rng) for _ in range(k)]
        xs = [rng.standard_normal(qmap.dim) + 1j * rng.standard_normal(qmap.dim) for _ in range(k)]
        value = cp_witness_value(qmap, fs, xs)
        scale = witness_scale(fs, xs)
        worst_real = min(worst_real, value.real / scale)
        worst_imag = max(worst_imag, abs(value.imag) / scale)
    tol = cfg.tol or 1e-8
    report.add("cp/witness/min_scaled", worst_real, -tol, worst_real >= -tol, t0)
    report.add("cp/witness/max_scaled_imag", worst_imag, tol, worst_imag <= tol, t0)
    t0 = time.perf_counter()
    hat = build_hat_P(qmap)
    ok, spec = ops.is_positive(hat, cfg.tol or 1e-9)
    report.add("cp/hat_P/min_eig", spec.min_eig, -(cfg.tol or 1e-9), ok, t0,
               hermitian_residual=spec.hermitian_residual)


def run_fock(cfg: RunConfig, report: Report) -> None:
    gen, Q = build_generators(cfg)
    N = cfg.levels if cfg.levels is not None else 4
    f = TruncatedFock(gen, N)
    d = gen.d
    for k in range(N + 1):
        t0 = time.perf_counter()
        ok, spec = ops.is_positive(f.grams[k])
        report.add(f"fock/P{k}/positive_definite", spec.min_eig, 0.0, ok and spec.min_eig > 0, t0)
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(cfg.draws):
        x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        X = FockVector([_rand(rng, d**k) for k in range(N)])
        Y = FockVector([_rand(rng, d**k) for k in range(N + 1)])
        scale = 1.0 + _norm(X) * _norm(Y) * float(np.linalg.norm(x))
        worst = max(worst, adjoint_residual(x, X, Y, f) / scale)
    tol = cfg.tol or 1e-10
    report.add("fock/adjointness/max_scaled", worst, tol, worst <= tol, t0)
    t0 = time.perf_counter()
    margin = np.inf
    for _ in range(max(1, cfg.draws // 10)):
        x = _rand(rng, d)
        margin = min(margin, norm_bound(x, gen) - g_op_norm(x, f))
    report.add("fock/norm_bound/min_margin", margin, -1e-9, margin >= -1e-9, t0)
    if Q is not None and (gen.m == 1 or not np.any(gen.T)):
        t0 = time.perf_counter()
        table = [[qij_residual(i, j, f, Q) for j in range(d)] for i in range(d)]
        worst = max(max(row) for row in table)
        report.add("fock/qij/max_residual", worst, tol, worst <= tol, t0, table=table)


def _rand(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _norm(v: FockVector) -> float:
    return float(np.sqrt(sum(np.vdot(c, c).real for c in v.levels)))


COMMANDS = {
    "check": [run_check],
    "gram": [run_gram],
    "cp": [run_cp],
    "fock": [run_fock],
    "report": [run_check, run_gram, run_cp, run_fock],
}


def execute(cfg: RunConfig) -> Report:
    report = Report(cfg)
    for step in COMMANDS[cfg.command]:
        step(cfg, report)
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reflectfock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--m", type=int, default=2)
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--dim", type=int)
        p.add_argument("--levels", type=int)
        p.add_argument("--family", action="append", default=[],
                       help="q-swap:<q> | q-twist:<Q.json> | diag-t:<t1,...> | zero-t (repeatable)")
        p.add_argument("--s-file")
        p.add_argument("--t-file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float)
        p.add_argument("--draws", type=int, default=100)
        p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        if cfg.m < 1 or cfg.n < 1:
            raise InvalidInputError("--m and --n must be positive")
        report = execute(cfg)
    except (InvalidInputError, ResourceLimitError, ConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report.to_json(), indent=2)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
