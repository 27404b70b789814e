import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_model, dense_power_norm, dense_sparse, triple_loop
from symtc.errors import (
    BoundsError,
    ConvergenceError,
    DomainError,
    ParseError,
    PreconditionError,
    RankError,
    ScaleError,
    ShapeError,
)
from symtc.sampling import sample_bernoulli
from symtc.tensor_core import (
    FactorModel,
    SparseSymmetricTensor,
    align_factors,
    apply_trilinear,
    canonical_triples,
    eval_entry,
    frobenius_error_bound_check,
    frobenius_norm,
    generate_correlated_model,
    generate_orthogonal_model,
    incoherence,
    max_coherence,
    n_canonical,
    operator_norm_estimate,
    orbit_sizes,
    parse_tensor,
    read_model,
    read_tensor,
    rmse,
    write_model,
    write_tensor,
)


def basis(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def random_model(n, r, seed, orthogonal=False):
    if orthogonal:
        return generate_orthogonal_model(n, r, np.random.default_rng(seed).uniform(0.5, 2, r), seed)
    rng = np.random.default_rng(seed)
    return FactorModel.normalized(rng.uniform(0.5, 2, r), rng.standard_normal((n, r)))


# --- canonical storage -------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_canonical_triples_enumerates_sorted_triples(n):
    idx = canonical_triples(n)
    expected = [t for t in itertools.product(range(n), repeat=3) if t[0] <= t[1] <= t[2]]
    assert [tuple(r) for r in idx.tolist()] == expected
    assert len(idx) == n_canonical(n) == n * (n + 1) * (n + 2) // 6


def test_orbit_sizes():
    assert orbit_sizes(np.array([[0, 0, 0], [0, 0, 1], [0, 1, 1], [0, 1, 2]])).tolist() == [1, 3, 3, 6]


def test_sparse_lookup_is_permutation_invariant():
    T = SparseSymmetricTensor.from_dict(5, {(3, 1, 2): 1.5, (0, 0, 4): -2.0, (2, 2, 2): 7.0})
    for perm in itertools.permutations((1, 2, 3)):
        assert T[perm] == 1.5
    for perm in itertools.permutations((0, 0, 4)):
        assert T.get(*perm) == -2.0
    assert (4, 0, 0) in T
    assert (0, 1, 2) not in T
    assert T.get(0, 1, 2) is None
    with pytest.raises(KeyError):
        T[0, 1, 2]
    assert T.nnz == 3


def test_sparse_rejects_bad_input():
    with pytest.raises(ShapeError):
        SparseSymmetricTensor(3, [[0, 1, 2], [2, 1, 0]], [1.0, 2.0])
    with pytest.raises(BoundsError):
        SparseSymmetricTensor(3, [[0, 1, 3]], [1.0])
    with pytest.raises(BoundsError):
        SparseSymmetricTensor.empty(3).get(0, 0, 3)
    with pytest.raises(ShapeError):
        SparseSymmetricTensor(3, [[0, 1, 2]], [1.0, 2.0])
    with pytest.raises(DomainError):
        SparseSymmetricTensor(3, [[0, 1, 2]], [np.nan])


def test_closure_lists_each_permutation_once():
    T = SparseSymmetricTensor.from_dict(4, {(0, 0, 0): 1.0, (0, 0, 1): 2.0, (0, 1, 2): 3.0})
    I, J, K, V = T.closure
    triples = list(zip(I.tolist(), J.tolist(), K.tolist()))
    assert len(triples) == len(set(triples)) == 1 + 3 + 6
    dense, mask = dense_sparse(T)
    for (i, j, k), v in zip(triples, V):
        assert dense[i, j, k] == v
    assert mask.sum() == 10


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 7), p=st.floats(0.05, 1.0), seed=st.integers(0, 2**31))
def test_sparse_contractions_match_dense(n, p, seed):
    rng = np.random.default_rng(seed)
    idx = canonical_triples(n)
    keep = idx[rng.random(len(idx)) < p]
    T = SparseSymmetricTensor(n, keep, rng.standard_normal(len(keep)))
    D, _ = dense_sparse(T)
    x, y, z = rng.standard_normal((3, n))
    assert np.allclose(T.contract_pair(x), np.einsum("ijk,j,k->i", D, x, x), atol=1e-12)
    X = rng.standard_normal((n, 4))
    assert np.allclose(T.contract_pair(X), np.einsum("ijk,jl,kl->il", D, X, X), atol=1e-12)
    assert math.isclose(apply_trilinear(T, x, y, z), np.einsum("ijk,i,j,k->", D, x, y, z),
                        rel_tol=1e-10, abs_tol=1e-10)
    assert math.isclose(T.frobenius_norm(), np.linalg.norm(D), rel_tol=1e-12, abs_tol=1e-14)


# --- factor models -----------------------------------------------------------

def test_factor_model_invariants():
    with pytest.raises(DomainError):
        FactorModel([1.0], np.ones((3, 1)))
    with pytest.raises(DomainError):
        FactorModel([np.inf], basis(3, 0))
    with pytest.raises(ShapeError):
        FactorModel([1.0, 2.0], basis(3, 0))
    U = np.column_stack([basis(3, 0), (basis(3, 0) + basis(3, 1)) / np.sqrt(2)])
    with pytest.raises(DomainError):
        FactorModel([1, 1], U, orthogonal=True)
    FactorModel([1, 1], U)


def test_eval_entry_basis_examples():
    m = FactorModel([2.0], basis(5, 0))
    assert eval_entry(m, 0, 0, 0) == 2.0
    assert eval_entry(m, 0, 0, 1) == 0.0
    with pytest.raises(BoundsError):
        eval_entry(m, 0, 0, 5)


def test_eval_entry_matches_dense_reconstruction():
    m = generate_orthogonal_model(4, 2, None, 3)
    D = dense_model(m)
    for i, j, k in itertools.product(range(4), repeat=3):
        assert math.isclose(eval_entry(m, i, j, k), D[i, j, k], abs_tol=1e-14)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), i=st.integers(0, 5), j=st.integers(0, 5), k=st.integers(0, 5))
def test_eval_entry_exactly_symmetric(seed, i, j, k):
    m = random_model(6, 3, seed)
    vals = {eval_entry(m, *perm) for perm in itertools.permutations((i, j, k))}
    assert len(vals) == 1


def test_apply_trilinear_examples():
    rng = np.random.default_rng(0)
    u = rng.standard_normal(6)
    u /= np.linalg.norm(u)
    m = FactorModel([1.7], u)
    assert math.isclose(apply_trilinear(m, u, u, u), 1.7, rel_tol=1e-12)
    assert apply_trilinear(m, np.zeros(6), u, u) == 0.0
    m2 = random_model(5, 2, 1)
    x, y, z = rng.standard_normal((3, 5))
    assert math.isclose(apply_trilinear(m2, x, y, z), triple_loop(dense_model(m2), x, y, z),
                        rel_tol=1e-10, abs_tol=1e-10)
    with pytest.raises(ShapeError):
        apply_trilinear(m2, x, y, np.ones(4))


def test_incoherence_examples():
    assert incoherence(FactorModel([1.0], basis(9, 0))) == pytest.approx(3.0)
    assert incoherence(FactorModel([1.0], np.ones(16) / 4)) == pytest.approx(1.0)
    m = generate_orthogonal_model(50, 3, None, 0)
    assert incoherence(m) == np.sqrt(50) * max(abs(v) for v in m.U.ravel())


def test_frobenius_norm_examples():
    assert frobenius_norm(FactorModel([3.0], basis(4, 2))) == pytest.approx(3.0)
    m = generate_orthogonal_model(5, 2, [1.0, 1.0], 0)
    assert frobenius_norm(m) == pytest.approx(np.sqrt(2), abs=1e-12)
    g = random_model(6, 2, 7)
    assert math.isclose(frobenius_norm(g), np.linalg.norm(dense_model(g)), rel_tol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), r=st.integers(1, 5))
def test_orthogonal_model_identities(seed, r):
    m = generate_orthogonal_model(12, r, np.random.default_rng(seed).uniform(-2, 2, r), seed)
    assert math.isclose(frobenius_norm(m) ** 2, float(np.sum(m.sigmas**2)), rel_tol=1e-10,
                        abs_tol=1e-10)
    for l in range(r):
        u = m.U[:, l]
        assert abs(apply_trilinear(m, u, u, u) - m.sigmas[l]) <= 1e-10


# --- operator norm -----------------------------------------------------------

def test_operator_norm_rank_one_and_orthogonal():
    u = np.random.default_rng(1).standard_normal(10)
    m = FactorModel.normalized([2.5], u)
    assert operator_norm_estimate(m, restarts=3, iters=50, seed=0) == pytest.approx(2.5, abs=1e-8)
    m2 = generate_orthogonal_model(10, 2, [2.0, 1.0], 4)
    assert operator_norm_estimate(m2, restarts=10, iters=100, seed=0) == pytest.approx(2.0, abs=1e-6)


def test_operator_norm_zero_tensor_and_validation():
    assert operator_norm_estimate(SparseSymmetricTensor.empty(4), 3, 5, 0) == 0.0
    with pytest.raises(DomainError):
        operator_norm_estimate(SparseSymmetricTensor.empty(4), 0, 5, 0)


def test_operator_norm_dominates_random_probes():
    rng = np.random.default_rng(5)
    idx = canonical_triples(8)
    keep = idx[rng.random(len(idx)) < 0.4]
    T = SparseSymmetricTensor(8, keep, rng.standard_normal(len(keep)))
    est = operator_norm_estimate(T, restarts=20, iters=200, seed=1)
    D, _ = dense_sparse(T)
    X = rng.standard_normal((10_000, 8))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    probes = np.abs(np.einsum("ijk,ti,tj,tk->t", D, X, X, X))
    assert est >= probes.max()
    assert est <= dense_power_norm(D) + 1e-9


def test_operator_norm_near_sphere_grid_maximum():
    rng = np.random.default_rng(2)
    idx = canonical_triples(3)
    T = SparseSymmetricTensor(3, idx, rng.standard_normal(len(idx)))
    D, _ = dense_sparse(T)
    th, ph = np.meshgrid(np.linspace(0, np.pi, 400), np.linspace(0, 2 * np.pi, 800))
    X = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1).reshape(-1, 3)
    grid = np.abs(np.einsum("ijk,ti,tj,tk->t", D, X, X, X)).max()
    est = operator_norm_estimate(T, restarts=10, iters=200, seed=0)
    assert abs(est - grid) <= 0.05 * grid


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), a=st.integers(1, 6), b=st.integers(1, 6))
def test_operator_norm_monotone_in_restarts(seed, a, b):
    rng = np.random.default_rng(seed)
    idx = canonical_triples(6)
    keep = idx[rng.random(len(idx)) < 0.5]
    T = SparseSymmetricTensor(6, keep, rng.standard_normal(len(keep)))
    lo, hi = sorted((a, b))
    assert operator_norm_estimate(T, lo, 20, seed) <= operator_norm_estimate(T, hi, 20, seed)


# --- alignment and errors ----------------------------------------------------

def test_align_identity_and_permutation_sign():
    m = generate_orthogonal_model(20, 3, [3.0, 2.0, 1.0], 0)
    assert align_factors(m, m).d_infinity == 0.0
    perm = [2, 0, 1]
    signs = np.array([1.0, -1.0, 1.0])
    est = FactorModel(m.sigmas[perm] * signs, m.U[:, perm] * signs)
    rep = align_factors(est, m)
    assert rep.d_infinity == 0.0
    assert rep.permutation == (2, 0, 1)
    assert rep.signs.tolist() == [1.0, -1.0, 1.0]


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), r=st.integers(1, 5))
def test_align_invariant_under_permutation_and_signs(seed, r):
    rng = np.random.default_rng(seed)
    m = generate_orthogonal_model(10, r, rng.uniform(0.5, 2, r), seed)
    perm = rng.permutation(r)
    s = rng.choice([-1.0, 1.0], size=r)
    est = FactorModel(m.sigmas[perm] * s, m.U[:, perm] * s)
    rep = align_factors(est, m)
    assert rep.d_infinity <= 1e-12
    assert sorted(rep.permutation) == list(range(r))
    assert rmse(est, m) <= 1e-12


def test_align_reports_direct_vector_error():
    m = generate_orthogonal_model(15, 2, None, 1)
    rng = np.random.default_rng(0)
    w = rng.standard_normal(15)
    w -= (w @ m.U[:, 0]) * m.U[:, 0]
    w *= 0.1 / np.linalg.norm(w)
    u0 = m.U[:, 0] + w
    u0 /= np.linalg.norm(u0)
    est = FactorModel(m.sigmas, np.column_stack([u0, m.U[:, 1]]))
    rep = align_factors(est, m)
    assert abs(rep.per_component_vector_error[0] - np.linalg.norm(u0 - m.U[:, 0])) <= 1e-9
    assert rep.d_infinity == pytest.approx(
        max(rep.per_component_vector_error + rep.per_component_sigma_error))
    with pytest.raises(ShapeError):
        align_factors(FactorModel([1.0], m.U[:, 0]), m)


def test_rmse_examples():
    m = generate_orthogonal_model(10, 3, None, 0)
    assert rmse(m, m) == 0.0
    assert rmse(FactorModel(2 * m.sigmas, m.U), m) == pytest.approx(1.0, abs=1e-12)
    a, b = random_model(6, 2, 1), random_model(6, 2, 2)
    Da, Db = dense_model(a), dense_model(b)
    assert math.isclose(rmse(a, b), np.linalg.norm(Da - Db) / np.linalg.norm(Db), rel_tol=1e-10)
    with pytest.raises(ScaleError):
        rmse(m, FactorModel(np.zeros(3), m.U))


def test_rmse_resolves_tiny_errors():
    m = generate_orthogonal_model(30, 3, None, 0)
    U = m.U.copy()
    U[:, 0] += 1e-11 * np.random.default_rng(0).standard_normal(30)
    est = FactorModel.normalized(m.sigmas, U)
    d = np.linalg.norm(est.U[:, 0] - m.U[:, 0])
    # first order: |T - T_hat|_F ~ sqrt(3) |d| against |T|_F = sqrt(3)
    assert rmse(est, m) == pytest.approx(d, rel=1e-3)


def test_frobenius_bound_examples():
    m = generate_orthogonal_model(10, 2, None, 0)
    assert frobenius_error_bound_check(m, m, 0.0)
    u = np.random.default_rng(0).standard_normal(8)
    u /= np.linalg.norm(u)
    truth = FactorModel([1.0], u)
    v = u + 0.01 * np.random.default_rng(1).standard_normal(8)
    v /= np.linalg.norm(v)
    eps = np.linalg.norm(u - v)
    est = FactorModel([1.0], v)
    assert frobenius_error_bound_check(truth, est, eps)
    measured = np.linalg.norm(dense_model(truth) - dense_model(est))
    assert measured <= 4 * eps * np.linalg.norm(dense_model(truth))


def test_frobenius_bound_random_sweep():
    rng = np.random.default_rng(11)
    for _ in range(100):
        truth = generate_orthogonal_model(20, 3, rng.uniform(0.5, 2, 3), rng.integers(2**31))
        cols = []
        for l in range(3):
            w = rng.standard_normal(20)
            w -= (w @ truth.U[:, l]) * truth.U[:, l]
            w /= np.linalg.norm(w)
            th = 2 * np.arcsin(0.05 * rng.random() / 2)
            cols.append(np.cos(th) * truth.U[:, l] + np.sin(th) * w)
        sig = truth.sigmas * (1 + 0.05 * rng.uniform(-1, 1, 3))
        assert frobenius_error_bound_check(truth, FactorModel(sig, np.column_stack(cols)), 0.05)


def test_frobenius_bound_precondition_errors():
    m = generate_orthogonal_model(10, 2, None, 0)
    far = FactorModel(m.sigmas * 1.5, m.U)
    with pytest.raises(PreconditionError):
        frobenius_error_bound_check(m, far, 0.1)
    skew = FactorModel.normalized([1, 1], np.column_stack([m.U[:, 0], m.U[:, 0] + m.U[:, 1]]))
    with pytest.raises(PreconditionError):
        frobenius_error_bound_check(skew, skew, 0.1)


# --- generators --------------------------------------------------------------

def test_orthogonal_generator():
    m = generate_orthogonal_model(50, 3, None, 9)
    G = m.U.T @ m.U
    assert np.abs(G - np.diag(np.diag(G))).max() <= 1e-10
    assert np.abs(np.linalg.norm(m.U, axis=0) - 1).max() <= 1e-12
    assert m.sigmas.tolist() == [1.0, 1.0, 1.0]
    assert m == generate_orthogonal_model(50, 3, None, 9)
    assert generate_orthogonal_model(5, 2, [4.0, 2.0], 0).sigmas.tolist() == [4.0, 2.0]
    with pytest.raises(RankError):
        generate_orthogonal_model(3, 4, None, 0)


def test_orthogonal_generator_coherence_scale():
    mus = [incoherence(generate_orthogonal_model(50, 3, None, s)) for s in range(1000)]
    mean = float(np.mean(mus))
    # maximum of 150 roughly standard normal magnitudes
    assert 0.8 * np.sqrt(2 * np.log(150)) <= mean <= 1.2 * np.sqrt(2 * np.log(150))


@pytest.mark.parametrize("rho", [0.0, 0.1, 0.3, 0.6])
def test_correlated_generator(rho):
    m = generate_correlated_model(50, 3, rho, None, 5)
    assert np.abs(np.linalg.norm(m.U, axis=0) - 1).max() <= 1e-12
    if rho == 0:
        assert m.orthogonal and max_coherence(m.U) <= 1e-10
    else:
        assert not m.orthogonal
        assert abs(max_coherence(m.U) - rho) <= 0.01


def test_correlated_generator_rejects_bad_rho():
    with pytest.raises((DomainError, ConvergenceError)):
        generate_correlated_model(10, 3, 1.0, None, 0)


# --- file formats ------------------------------------------------------------

def test_tensor_file_roundtrip(tmp_path):
    m = generate_orthogonal_model(8, 2, None, 0)
    T = sample_bernoulli(m, 0.3, 1)
    path = tmp_path / "t.txt"
    write_tensor(T, path)
    assert path.read_text().splitlines()[0] == f"symtensor3 n=8 nnz={T.nnz}"
    assert read_tensor(path) == T


@pytest.mark.parametrize(
    "text, line",
    [
        ("symtensor3 n=3 nnz=1\n0 1 x 1.0\n", 2),
        ("symtensor3 n=3 nnz=2\n0 1 2 1.0\n0 1 5 1.0\n", 3),
        ("tensor n=3\n", 1),
        ("symtensor3 n=3 nnz=2\n0 1 2 1.0\n", None),
        ("symtensor3 n=3 nnz=2\n0 1 2 1.0\n2 1 0 1.0\n", 3),
    ],
)
def test_tensor_parse_errors(text, line):
    with pytest.raises(ParseError) as err:
        parse_tensor(text.splitlines())
    if line is not None:
        assert err.value.line == line
        assert f"line {line}" in str(err.value)


def test_model_json_roundtrip(tmp_path):
    m = random_model(7, 3, 4)
    path = tmp_path / "m.json"
    write_model(m, path)
    back = read_model(path)
    assert back == m
    assert FactorModel.from_json(m.to_json()) == m
