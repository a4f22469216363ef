import itertools

import numpy as np
import pytest

from reflectfock import operators as ops
from reflectfock.admissibility import (
    FockGenerators,
    family_diag_T,
    family_q_swap,
    family_q_twist,
    family_zero_T,
)
from reflectfock.cpmap import build_R
from reflectfock.errors import InvalidInputError
from reflectfock.fock import (
    FockVector,
    TruncatedFock,
    adjoint_residual,
    annihilate,
    create,
    free_annihilate,
    free_create,
    g_op_norm,
    homogeneous,
    inner_G,
    norm_bound,
    per_vector_ratio,
    qij_residual,
    vacuum,
)

from conftest import Q3, strict_families


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def random_fock(rng, d, top):
    return FockVector([cvec(rng, d**k) for k in range(top + 1)])


def free_fock(d, N, m=2):
    return TruncatedFock(FockGenerators(m, d, family_q_swap(d, 0), family_zero_T(d)), N)


# ---------------------------------------------------------------- ladder actions


def test_free_ladder_examples():
    f = free_fock(2, 3)
    e1, e2 = np.eye(2)
    out = free_annihilate(e1, vacuum(), f)
    assert np.all(out.levels[0] == 0)
    out = free_create(e1, vacuum(), f)
    np.testing.assert_array_equal(out.levels[1], e1)
    assert out.levels[0] == 0
    out = free_annihilate(e1, homogeneous(np.kron(e2, e1), 2, 2), f)
    np.testing.assert_array_equal(out.levels[1], np.zeros(2))


def test_free_ladder_on_product_vectors(rng):
    f = free_fock(3, 3)
    x, a, b = cvec(rng, 3), cvec(rng, 3), cvec(rng, 3)
    out = free_create(x, homogeneous(np.kron(a, b), 2, 3), f)
    np.testing.assert_allclose(out.levels[3], np.kron(x, np.kron(a, b)))
    out = free_annihilate(x, homogeneous(np.kron(a, b), 2, 3), f)
    np.testing.assert_allclose(out.levels[1], np.vdot(x, a) * b)


def test_annihilate_level_one_uses_T_sum(rng):
    d, m = 2, 3
    T = family_diag_T([0.5, -0.3])
    f = TruncatedFock(FockGenerators(m, d, family_q_swap(d, 0.2), T), 2)
    x, y = cvec(rng, d), cvec(rng, d)
    out = annihilate(x, homogeneous(y, 1, d), f)
    expected = np.vdot(x, (np.eye(d) + T + T @ T) @ y)
    assert abs(out.levels[0][0] - expected) < 1e-12
    assert np.all(annihilate(x, vacuum(), f).levels[0] == 0)


def test_annihilate_level_two_q_swap():
    d, q = 2, 0.4
    f = TruncatedFock(FockGenerators(1, d, family_q_swap(d, q), family_zero_T(d)), 2)
    e = np.eye(d)
    for i, j, k in itertools.product(range(d), repeat=3):
        out = annihilate(e[i], homogeneous(np.kron(e[j], e[k]), 2, d), f)
        # (id + q Swap) e_j (x) e_k = e_j (x) e_k + q e_k (x) e_j, then contract the first slot
        expected = (i == j) * e[k] + q * (i == k) * e[j]
        np.testing.assert_allclose(out.levels[1], expected)


def test_create_then_annihilate_is_delta_for_zero_T():
    d = 3
    f = TruncatedFock(FockGenerators(2, d, family_q_twist(Q3), family_zero_T(d)), 2)
    e = np.eye(d)
    for i in range(d):
        for j in range(d):
            out = annihilate(e[i], create(e[j], vacuum(), f), f)
            assert out.levels[0][0] == pytest.approx(float(i == j))


def test_truncation_flag():
    f = free_fock(2, 2)
    e1 = np.eye(2)[0]
    out = create(e1, homogeneous(np.kron(e1, e1), 2, 2), f)
    assert out.truncated
    assert out.top == 2 and np.all(out.levels[2] == 0)
    out = create(e1, homogeneous(e1, 1, 2), f)
    assert not out.truncated
    with pytest.raises(InvalidInputError):
        create(e1, homogeneous(np.zeros(8), 3, 2), f)


def test_fock_vector_json(rng):
    v = random_fock(rng, 2, 3)
    back = FockVector.from_json(v.to_json())
    for a, b in zip(v.levels, back.levels):
        np.testing.assert_array_equal(a, b)


# ---------------------------------------------------------------- inner product


def test_inner_G_examples(rng):
    d, t = 2, 0.35
    f = TruncatedFock(FockGenerators(2, d, family_q_swap(d, 0.3), t * np.eye(d)), 3)
    assert inner_G(vacuum(), vacuum(), f) == 1
    x, y = cvec(rng, d), cvec(rng, d)
    val = inner_G(homogeneous(x, 1, d), homogeneous(y, 1, d), f)
    assert abs(val - (1 + t) * np.vdot(x, y)) < 1e-12
    for _ in range(20):
        X, Y = random_fock(rng, d, 3), random_fock(rng, d, 3)
        assert abs(inner_G(X, Y, f) - np.conj(inner_G(Y, X, f))) < 1e-10
        assert inner_G(X, X, f).real > 0


def test_inner_G_levels_orthogonal(rng):
    f = TruncatedFock(strict_families(2, 2)["q-twist/diag-t"], 3)
    assert inner_G(homogeneous(cvec(rng, 2), 1, 2), homogeneous(cvec(rng, 4), 2, 2), f) == 0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_grams_cholesky(m):
    for d in (1, 2, 3):
        for name, gen in strict_families(d, m).items():
            f = TruncatedFock(gen, 4 if d < 3 else 3)
            assert f.grams[0].shape == (1, 1) and f.grams[0][0, 0] == 1
            for P in f.grams:
                np.linalg.cholesky((P + P.conj().T) / 2)


def test_gram_recursion():
    for m in (1, 2, 3):
        for name, gen in strict_families(2, m).items():
            f = TruncatedFock(gen, 4)
            for k in range(4):
                lhs = f.grams[k + 1]
                rhs = np.kron(np.eye(2), f.grams[k]) @ f.R(k + 1)
                assert ops.op_norm(lhs - rhs) <= 1e-10 * ops.op_norm(lhs), (name, m, k)


def test_intertwining(rng):
    d = 2
    S = family_q_twist(Q3[:2, :2])
    T = family_diag_T([0.4, -0.2])
    for _ in range(5):
        x = cvec(rng, d)
        f = free_fock(d, 4)
        for k in range(2, 4):
            L = f.creation_matrix(x, k)
            for i in range(1, k):
                lhs = L @ ops.embed(S, i, k, d, 2)
                rhs = ops.embed(S, i + 1, k + 1, d, 2) @ L
                np.testing.assert_allclose(lhs, rhs, atol=1e-12)
            for j in range(1, k + 1):
                lhs = L @ ops.embed(T, j, k, d, 1)
                rhs = ops.embed(T, j + 1, k + 1, d, 1) @ L
                np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_R_norm_bound():
    for m in (1, 2, 3):
        for gen in strict_families(2, m).values():
            s, t = gen.s_norm, gen.t_norm
            t_factor = sum(t**j for j in range(m))
            for k in range(1, 5):
                bound = sum(s**i for i in range(k)) * t_factor
                assert ops.op_norm(build_R(k, gen)) <= bound + 1e-12


# ---------------------------------------------------------------- adjointness


def test_adjoint_examples(rng):
    f = TruncatedFock(strict_families(2, 2)["q-swap(-0.4)/diag-t"], 3)
    x, y = cvec(rng, 2), cvec(rng, 2)
    assert adjoint_residual(x, vacuum(), homogeneous(y, 1, 2), f) < 1e-14
    X = homogeneous(cvec(rng, 2), 1, 2)
    Y = homogeneous(cvec(rng, 2), 1, 2)
    assert inner_G(create(x, X, f), Y, f) == 0
    assert inner_G(X, annihilate(x, Y, f), f) == 0
    assert adjoint_residual(x, X, Y, f) == 0


def test_adjoint_random(rng):
    N, d = 4, 2
    for m in (1, 2, 3):
        for name, gen in strict_families(d, m).items():
            f = TruncatedFock(gen, N)
            for _ in range(10):
                x = cvec(rng, d)
                X, Y = random_fock(rng, d, N - 1), random_fock(rng, d, N)
                scale = 1 + np.sqrt(inner_G(X, X, f).real * inner_G(Y, Y, f).real) * np.linalg.norm(x)
                assert adjoint_residual(x, X, Y, f) <= 1e-10 * scale, name


def test_adjoint_rejects_top_level(rng):
    f = free_fock(2, 2)
    with pytest.raises(InvalidInputError):
        adjoint_residual(np.ones(2), random_fock(rng, 2, 2), random_fock(rng, 2, 2), f)


# ---------------------------------------------------------------- norm bound


def test_g_op_norm_free_case(rng):
    f = free_fock(3, 4)
    for _ in range(5):
        x = cvec(rng, 3)
        assert abs(g_op_norm(x, f) - np.linalg.norm(x)) <= 1e-10
        assert norm_bound(x, f.gen) == pytest.approx(np.linalg.norm(x))


def test_g_op_norm_half_swap(rng):
    gen = FockGenerators(1, 2, family_q_swap(2, 0.5), family_zero_T(2))
    f = TruncatedFock(gen, 3)
    for _ in range(10):
        x = cvec(rng, 2)
        assert g_op_norm(x, f) <= np.linalg.norm(x) * np.sqrt(2) + 1e-9


def test_g_op_norm_grid(rng):
    x = cvec(rng, 2)
    for q in (0, 0.3, 0.6):
        gen = FockGenerators(2, 2, family_q_swap(2, q), family_diag_T([0.5, -0.5]))
        f = TruncatedFock(gen, 4)
        assert g_op_norm(x, f) <= norm_bound(x, gen) + 1e-9


def test_g_op_norm_matches_sampled_ratio(rng):
    # sup over sampled vectors of ||d*(x) X||_G / ||X||_G never exceeds the computed norm
    f = TruncatedFock(strict_families(2, 2)["q-twist/diag-t"], 3)
    x = cvec(rng, 2)
    norm = g_op_norm(x, f)
    best = 0.0
    for _ in range(300):
        X = random_fock(rng, 2, 2)
        Y = create(x, X, f)
        best = max(best, np.sqrt(inner_G(Y, Y, f).real / inner_G(X, X, f).real))
    assert best <= norm * (1 + 1e-12)


def test_norm_bound_needs_strict():
    gen = FockGenerators(1, 2, family_q_swap(2, 1.0), family_zero_T(2))
    with pytest.raises(InvalidInputError):
        norm_bound(np.ones(2), gen)


def test_per_vector_ratio_squared_inequality(rng):
    for gen in strict_families(2, 2).values():
        f = TruncatedFock(gen, 3)
        for k in range(3):
            lhs, rhs = per_vector_ratio(cvec(rng, 2), cvec(rng, 2**k), k, f)
            assert lhs <= rhs * (1 + 1e-10)


# ---------------------------------------------------------------- q_ij relations


def _oracle_S(t, i, Q):
    """S_i on a basis tuple: S(e_a (x) e_b) = Q[b, a] e_b (x) e_a at 1-based slots i, i+1."""
    a, b = t[i - 1], t[i]
    return {t[: i - 1] + (b, a) + t[i + 1 :]: Q[b, a]}


def _oracle_apply(op, vec):
    out = {}
    for t, c in vec.items():
        for s, v in op(t).items():
            out[s] = out.get(s, 0) + c * v
    return out


def _oracle_R(vec, Q):
    """(id + S_1 + S_1 S_2 + ... ) on a dict over basis tuples (T = 0)."""
    out = dict(vec)
    for t, c in vec.items():
        n = len(t)
        for j in range(1, n):
            w = {t: c}
            for i in range(j, 0, -1):
                w = _oracle_apply(lambda s, i=i: _oracle_S(s, i, Q), w)
            for s, v in w.items():
                out[s] = out.get(s, 0) + v
    return out


def _oracle_d(i, vec, Q):
    out = {}
    for t, c in _oracle_R(vec, Q).items():
        if t and t[0] == i:
            out[t[1:]] = out.get(t[1:], 0) + c
    return out


def _oracle_dstar(j, vec):
    return {(j,) + t: c for t, c in vec.items()}


def _oracle_qij_residual(i, j, Q, d, N):
    worst = 0.0
    for k in range(N - 1):
        for t in itertools.product(range(d), repeat=k):
            v = {t: 1.0}
            lhs = _oracle_d(i, _oracle_dstar(j, v), Q)
            for s, c in _oracle_dstar(j, _oracle_d(i, v, Q)).items():
                lhs[s] = lhs.get(s, 0) - Q[i, j] * c
            if i == j:
                lhs[t] = lhs.get(t, 0) - 1
            worst = max([worst] + [abs(c) for c in lhs.values()])
    return worst


def _q_matrices():
    for q in (-0.9, 0.0, 0.5):
        for d in (2, 3):
            yield f"q={q},d={d}", np.full((d, d), q, dtype=complex)
    Q = np.array([[0.2, 0.3 + 0.4j], [0.3 - 0.4j, -0.5]])
    yield "complex2", Q
    yield "complex3", Q3


@pytest.mark.parametrize("name,Q", list(_q_matrices()))
def test_qij_oracle_and_library(name, Q):
    d, N = Q.shape[0], 3
    f = TruncatedFock(FockGenerators(2, d, family_q_twist(Q), family_zero_T(d)), N)
    for i in range(d):
        for j in range(d):
            assert _oracle_qij_residual(i, j, Q, d, N) <= 1e-12
            assert qij_residual(i, j, f, Q) <= 1e-10


def test_qij_oracle_matches_annihilation_matrix():
    d, Q = 3, Q3
    f = TruncatedFock(FockGenerators(1, d, family_q_twist(Q), family_zero_T(d)), 3)
    for i in range(d):
        for k in range(1, 4):
            basis = list(itertools.product(range(d), repeat=k))
            lower = {t: r for r, t in enumerate(itertools.product(range(d), repeat=k - 1))}
            M = np.zeros((d ** (k - 1), d**k), dtype=complex)
            for col, t in enumerate(basis):
                for s, c in _oracle_d(i, {t: 1.0}, Q).items():
                    M[lower[s], col] += c
            np.testing.assert_allclose(f.annihilation_matrix(np.eye(d)[i], k), M, atol=1e-14)


def test_qij_transposed_convention_fails():
    # the other index convention for the twist breaks the relation for complex Q
    Q = np.array([[0.2, 0.3 + 0.4j], [0.3 - 0.4j, -0.5]])
    f = TruncatedFock(FockGenerators(1, 2, family_q_twist(Q.T), family_zero_T(2)), 3)
    assert max(qij_residual(i, j, f, Q.T) for i in range(2) for j in range(2)) <= 1e-10
    worst = 0.0
    for i in range(2):
        for j in range(2):
            lhs = f.annihilation_matrix(np.eye(2)[i], 2) @ f.creation_matrix(np.eye(2)[j], 1)
            lhs = lhs - Q[i, j] * f.creation_matrix(np.eye(2)[j], 0) @ f.annihilation_matrix(np.eye(2)[i], 1)
            worst = max(worst, ops.op_norm(lhs - (i == j) * np.eye(2)))
    assert worst > 0.1


def test_qij_free_case():
    f = free_fock(2, 3, m=1)
    for i in range(2):
        assert qij_residual(i, i, f, np.zeros((2, 2))) == 0


def test_qij_wrong_family():
    f = TruncatedFock(strict_families(2, 2)["q-swap(-0.4)/diag-t"], 3)
    with pytest.raises(InvalidInputError):
        qij_residual(0, 1, f, np.full((2, 2), -0.4))
    f = TruncatedFock(FockGenerators(2, 2, family_q_swap(2, 0.3), family_zero_T(2)), 3)
    with pytest.raises(InvalidInputError):
        qij_residual(0, 1, f, np.full((2, 2), 0.5))


# ---------------------------------------------------------------- degeneration


def test_free_degeneration(rng):
    f = free_fock(2, 3)
    for P in f.grams:
        np.testing.assert_array_equal(P, np.eye(P.shape[0]))
    X, Y = random_fock(rng, 2, 3), random_fock(rng, 2, 3)
    standard = sum(np.vdot(a, b) for a, b in zip(X.levels, Y.levels))
    assert abs(inner_G(X, Y, f) - standard) < 1e-12
    x = cvec(rng, 2)
    for a, b in zip(annihilate(x, Y, f).levels, free_annihilate(x, Y, f).levels):
        np.testing.assert_allclose(a, b)
