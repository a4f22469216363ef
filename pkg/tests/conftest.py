import itertools

import numpy as np
import pytest

from reflectfock import group as grp
from reflectfock.admissibility import (
    FockGenerators,
    family_diag_T,
    family_q_swap,
    family_q_twist,
    family_zero_T,
)

Q3 = np.array(
    [
        [0.5, 0.3 + 0.4j, -0.2],
        [0.3 - 0.4j, -0.9, 0.1j],
        [-0.2, -0.1j, 0.0],
    ]
)


def monomial(u: grp.GroupElement, p: grp.GroupParams) -> np.ndarray:
    """``diag(zeta^alpha) @ M_w`` with ``M_w e_j = e_{w(j)}``: a faithful matrix model of G(m,1,n)."""
    zeta = np.exp(2j * np.pi / p.m)
    D = np.diag(zeta ** np.array(u.alpha))
    M = np.zeros((p.n, p.n), dtype=complex)
    for j, wj in enumerate(u.w):
        M[wj, j] = 1
    return D @ M


def brute_length(u, p, max_len=12):
    """Shortest word over the generating set, by plain enumeration of words."""
    gens = grp.generators(p)
    for k in range(max_len + 1):
        for word in itertools.product(gens, repeat=k):
            if grp.evaluate(word, p) == u:
                return k
    raise AssertionError("not found")


def strict_families(d, m):
    """Built-in admissible generator pairs with strict norms for the given d and m."""
    Q = Q3[:d, :d]
    taus = [0.5, -0.3, 0.2][:d]
    fams = {
        "q-swap(0.6)/zero-t": FockGenerators(m, d, family_q_swap(d, 0.6), family_zero_T(d)),
        "q-swap(-0.4)/diag-t": FockGenerators(m, d, family_q_swap(d, -0.4), family_diag_T(taus)),
        "q-twist/zero-t": FockGenerators(m, d, family_q_twist(Q), family_zero_T(d)),
        "q-twist/diag-t": FockGenerators(m, d, family_q_twist(Q), family_diag_T(taus)),
    }
    return fams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
