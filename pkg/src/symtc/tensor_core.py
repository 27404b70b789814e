"""Symmetric sparse tensors, CP factor models and the metrics defined on them.

Indices are zero-based. A :class:`SparseSymmetricTensor` stores one value per
canonical triple ``i <= j <= k``; every permutation of a stored triple denotes
the same entry. A :class:`FactorModel` represents
``sum_l sigma_l * u_l (x) u_l (x) u_l`` without materializing the ``n**3``
array.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    BoundsError,
    ConvergenceError,
    DomainError,
    ParseError,
    PreconditionError,
    RankError,
    ScaleError,
    ShapeError,
)

UNIT_TOL = 1e-12
ORTHO_TOL = 1e-10


@lru_cache(maxsize=8)
def canonical_triples(n: int) -> np.ndarray:
    """All triples ``i <= j <= k`` in ``[0, n)``, lexicographically ordered."""
    j, k = np.triu_indices(n)
    # triu_indices is sorted by row, so the pairs with j >= i form a suffix
    starts = np.searchsorted(j, np.arange(n))
    blocks = [
        np.column_stack([np.full(len(j) - s, i), j[s:], k[s:]]) for i, s in enumerate(starts)
    ]
    out = np.concatenate(blocks).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def _triu(n):
    return np.triu_indices(n)


def n_canonical(n: int) -> int:
    return n * (n + 1) * (n + 2) // 6


def orbit_sizes(idx: np.ndarray) -> np.ndarray:
    """Number of distinct permutations (1, 3 or 6) of each canonical triple."""
    idx = np.asarray(idx).reshape(-1, 3)
    eq01 = idx[:, 0] == idx[:, 1]
    eq12 = idx[:, 1] == idx[:, 2]
    sizes = np.full(len(idx), 6, dtype=np.int64)
    sizes[eq01 ^ eq12] = 3
    sizes[eq01 & eq12] = 1
    return sizes


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class SparseSymmetricTensor:
    """Observed entries of a symmetric 3-mode tensor.

    ``indices`` is an ``(m, 3)`` array of canonical triples and ``values`` the
    matching entry values. Rows are sorted on construction, so any permutation
    may be passed in; duplicate canonical keys are rejected.
    """

    def __init__(self, n: int, indices, values):
        n = int(n)
        if n <= 0:
            raise ShapeError("dimension must be positive")
        idx = np.asarray(indices, dtype=np.int64).reshape(-1, 3)
        vals = np.asarray(values, dtype=float).reshape(-1)
        if len(idx) != len(vals):
            raise ShapeError(f"{len(idx)} index triples but {len(vals)} values")
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise BoundsError(f"index out of range [0, {n})")
        if not np.all(np.isfinite(vals)):
            raise DomainError("tensor values must be finite")
        idx = np.sort(idx, axis=1)
        keys = self._encode(idx, n)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if len(keys) > 1 and np.any(keys[1:] == keys[:-1]):
            raise ShapeError("duplicate canonical triple")
        self.n = n
        self.indices = idx[order]
        self.values = vals[order]
        self._keys = keys
        for a in (self.indices, self.values, self._keys):
            a.setflags(write=False)

    @staticmethod
    def _encode(idx, n):
        return (idx[:, 0] * n + idx[:, 1]) * n + idx[:, 2]

    @classmethod
    def from_dict(cls, n: int, entries: Mapping[tuple, float]) -> "SparseSymmetricTensor":
        idx = np.array(list(entries.keys()), dtype=np.int64).reshape(-1, 3)
        return cls(n, idx, np.fromiter(entries.values(), dtype=float, count=len(entries)))

    @classmethod
    def empty(cls, n: int) -> "SparseSymmetricTensor":
        return cls(n, np.zeros((0, 3), dtype=np.int64), np.zeros(0))

    @property
    def nnz(self) -> int:
        return len(self.values)

    def __len__(self):
        return self.nnz

    def __repr__(self):
        return f"SparseSymmetricTensor(n={self.n}, nnz={self.nnz})"

    def __eq__(self, other):
        if not isinstance(other, SparseSymmetricTensor):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def _locate(self, i, j, k):
        for a in (i, j, k):
            if not 0 <= a < self.n:
                raise BoundsError(f"index {a} out of range [0, {self.n})")
        key = self._encode(np.array([sorted((i, j, k))]), self.n)[0]
        pos = np.searchsorted(self._keys, key)
        if pos < len(self._keys) and self._keys[pos] == key:
            return pos
        return None

    def __contains__(self, triple) -> bool:
        return self._locate(*triple) is not None

    def get(self, i: int, j: int, k: int, default=None):
        """Value stored for any permutation of ``(i, j, k)``, else ``default``."""
        pos = self._locate(i, j, k)
        return default if pos is None else float(self.values[pos])

    def __getitem__(self, triple) -> float:
        pos = self._locate(*triple)
        if pos is None:
            raise KeyError(triple)
        return float(self.values[pos])

    def items(self):
        for (i, j, k), v in zip(self.indices.tolist(), self.values.tolist()):
            yield (i, j, k), v

    def support(self) -> set:
        return {tuple(t) for t in self.indices.tolist()}

    @cached_property
    def orbit_weights(self) -> np.ndarray:
        return orbit_sizes(self.indices)

    @cached_property
    def closure(self):
        """``(I, J, K, V)`` listing every distinct permutation of every entry."""
        idx = self.indices
        parts = []
        for perm in permutations(range(3)):
            parts.append(idx[:, perm])
        allp = np.concatenate(parts, axis=0)
        vals = np.tile(self.values, 6)
        keys = self._encode(allp, self.n)
        _, first = np.unique(keys, return_index=True)
        first.sort()
        allp, vals = allp[first], vals[first]
        return allp[:, 0].copy(), allp[:, 1].copy(), allp[:, 2].copy(), vals

    @cached_property
    def _half_unfolding(self) -> sp.csr_matrix:
        # mode-1 unfolding restricted to columns (j, k) with j <= k; the
        # off-diagonal columns carry weight 2 for the (k, j) twin
        i, j, k, v = self.closure
        n = self.n
        keep = j <= k
        i, j, k, v = i[keep], j[keep], k[keep], v[keep]
        col = j * n - j * (j - 1) // 2 + (k - j)
        w = np.where(j == k, 1.0, 2.0) * v
        return sp.csr_matrix((w, (i, col)), shape=(n, n * (n + 1) // 2))

    def contract_pair(self, x: np.ndarray) -> np.ndarray:
        """``T[:, x, x]`` for a vector, or column-wise for an ``(n, L)`` matrix."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise ShapeError(f"expected leading dimension {self.n}, got {x.shape[0]}")
        tj, tk = _triu(self.n)
        return self._half_unfolding @ (x[tj] * x[tk])

    def trilinear(self, x, y, z) -> float:
        i, j, k, v = self.closure
        return float(np.sum(v * x[i] * y[j] * z[k]))

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.orbit_weights * self.values**2)))


class FactorModel:
    """Rank-r symmetric CP model ``sum_l sigma_l u_l (x) u_l (x) u_l``.

    ``vectors`` is an ``(n, r)`` matrix whose columns are the unit vectors.
    When ``orthogonal`` is set the columns must be pairwise orthogonal.
    """

    def __init__(self, sigmas, vectors, orthogonal: bool = False):
        sig = np.array(sigmas, dtype=float).reshape(-1)
        U = np.array(vectors, dtype=float)
        if U.ndim == 1:
            U = U[:, None]
        if U.ndim != 2 or U.shape[1] != len(sig):
            raise ShapeError(f"vectors of shape {U.shape} do not match {len(sig)} sigmas")
        if U.shape[0] == 0:
            raise ShapeError("dimension must be positive")
        if not (np.all(np.isfinite(sig)) and np.all(np.isfinite(U))):
            raise DomainError("sigmas and vectors must be finite")
        norms = np.linalg.norm(U, axis=0)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise DomainError(f"factor vectors must have unit norm, got {norms}")
        if orthogonal and len(sig) > 1:
            G = U.T @ U
            off = np.abs(G - np.diag(np.diag(G))).max()
            if off > ORTHO_TOL:
                raise DomainError(f"vectors flagged orthogonal have inner product {off:.3g}")
        sig.setflags(write=False)
        U.setflags(write=False)
        self.sigmas = sig
        self.U = U
        self.orthogonal = bool(orthogonal)

    @classmethod
    def normalized(cls, sigmas, vectors, orthogonal: bool = False) -> "FactorModel":
        """Build a model after rescaling each column of ``vectors`` to unit length."""
        U = np.array(vectors, dtype=float)
        if U.ndim == 1:
            U = U[:, None]
        return cls(sigmas, U / np.linalg.norm(U, axis=0), orthogonal=orthogonal)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def r(self) -> int:
        return self.U.shape[1]

    @property
    def vectors(self) -> list:
        return [self.U[:, l] for l in range(self.r)]

    def __repr__(self):
        return f"FactorModel(n={self.n}, r={self.r}, sigmas={self.sigmas.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, FactorModel):
            return NotImplemented
        return np.array_equal(self.sigmas, other.sigmas) and np.array_equal(self.U, other.U)

    __hash__ = None

    def values_at(self, idx) -> np.ndarray:
        """Entries at an ``(m, 3)`` array of triples."""
        idx = np.sort(np.asarray(idx, dtype=np.int64).reshape(-1, 3), axis=1)
        U = self.U
        return (U[idx[:, 0]] * U[idx[:, 1]] * U[idx[:, 2]]) @ self.sigmas

    def contract_pair(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise ShapeError(f"expected leading dimension {self.n}, got {x.shape[0]}")
        proj = self.U.T @ x
        if x.ndim == 1:
            return self.U @ (self.sigmas * proj**2)
        return self.U @ (self.sigmas[:, None] * proj**2)

    def trilinear(self, x, y, z) -> float:
        U = self.U
        return float(np.sum(self.sigmas * (U.T @ x) * (U.T @ y) * (U.T @ z)))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "r": self.r,
                "sigmas": self.sigmas.tolist(),
                "vectors": self.U.T.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FactorModel":
        data = json.loads(text)
        U = np.array(data["vectors"], dtype=float).T.reshape(int(data["n"]), int(data["r"]))
        return cls(data["sigmas"], U)


class LinearCombination:
    """Lazy ``sum_a c_a * T_a`` over objects exposing ``contract_pair``."""

    def __init__(self, terms: Sequence[tuple]):
        self.terms = list(terms)
        self.n = self.terms[0][1].n

    def contract_pair(self, x):
        out = None
        for c, t in self.terms:
            y = c * t.contract_pair(x)
            out = y if out is None else out + y
        return out


@dataclass(frozen=True)
class AlignmentReport:
    permutation: tuple
    signs: np.ndarray
    per_component_vector_error: np.ndarray
    per_component_sigma_error: np.ndarray
    d_infinity: float


def _check_index(model, *idx):
    for a in idx:
        if not 0 <= a < model.n:
            raise BoundsError(f"index {a} out of range [0, {model.n})")


def eval_entry(model: FactorModel, i: int, j: int, k: int) -> float:
    _check_index(model, i, j, k)
    return float(model.values_at([[i, j, k]])[0])


def apply_trilinear(tensor, x, y, z) -> float:
    """``T[x, y, z] = sum_abc T_abc x_a y_b z_c``."""
    vecs = [np.asarray(v, dtype=float).reshape(-1) for v in (x, y, z)]
    for v in vecs:
        if len(v) != tensor.n:
            raise ShapeError(f"vector of length {len(v)} for dimension {tensor.n}")
    return tensor.trilinear(*vecs)


def incoherence(model: FactorModel) -> float:
    return float(np.sqrt(model.n) * np.abs(model.U).max())


def frobenius_norm(model: FactorModel) -> float:
    G = model.U.T @ model.U
    s = model.sigmas
    return float(np.sqrt(max(s @ (G**3) @ s, 0.0)))


def operator_norm_estimate(tensor, restarts: int = 10, iters: int = 100, seed=None) -> float:
    """Best-of-restarts lower bound on ``max_{|x|=1} |T[x, x, x]|``.

    Runs the symmetric power iteration ``x <- T[:, x, x] / |T[:, x, x]|`` from
    ``restarts`` Gaussian starts and returns the largest ``|T[x, x, x]|`` seen
    at any iterate. Start vectors are drawn row by row, so a larger
    ``restarts`` with the same seed extends the previous set of starts.
    """
    if restarts < 1 or iters < 1:
        raise DomainError("restarts and iters must be at least 1")
    rng = _as_rng(seed)
    X = rng.standard_normal((restarts, tensor.n)).T
    X /= np.linalg.norm(X, axis=0)
    best = 0.0
    for _ in range(iters):
        Y = tensor.contract_pair(X)
        best = max(best, float(np.abs(np.sum(X * Y, axis=0)).max()))
        norms = np.linalg.norm(Y, axis=0)
        alive = norms > 0
        if not alive.any():
            break
        X = Y[:, alive] / norms[alive]
    Y = tensor.contract_pair(X)
    return max(best, float(np.abs(np.sum(X * Y, axis=0)).max()))


def _greedy_match(A: np.ndarray, B: np.ndarray) -> list:
    """Pairs ``(a, b)`` of columns chosen greedily by largest ``|<A_a, B_b>|``."""
    S = np.abs(A.T @ B)
    pairs = []
    free_a, free_b = set(range(A.shape[1])), set(range(B.shape[1]))
    while free_a and free_b:
        fa, fb = sorted(free_a), sorted(free_b)
        sub = S[np.ix_(fa, fb)]
        a, b = np.unravel_index(np.argmax(sub), sub.shape)
        pairs.append((fa[a], fb[b]))
        free_a.discard(fa[a])
        free_b.discard(fb[b])
    return pairs


def align_factors(estimate: FactorModel, truth: FactorModel) -> AlignmentReport:
    """Match estimated components to true ones and report the per-component errors.

    A sign flip negates both the vector and its sigma, which leaves the
    represented tensor unchanged.
    """
    if estimate.n != truth.n or estimate.r != truth.r:
        raise ShapeError(
            f"cannot align (n={estimate.n}, r={estimate.r}) with (n={truth.n}, r={truth.r})"
        )
    r = truth.r
    perm = [0] * r
    signs = np.ones(r)
    vec_err = np.zeros(r)
    sig_err = np.zeros(r)
    for a, b in _greedy_match(estimate.U, truth.U):
        perm[a] = b
        s = 1.0 if estimate.U[:, a] @ truth.U[:, b] >= 0 else -1.0
        signs[a] = s
        vec_err[a] = np.linalg.norm(s * estimate.U[:, a] - truth.U[:, b])
        sig_err[a] = abs(s * estimate.sigmas[a] - truth.sigmas[b]) / abs(truth.sigmas[b])
    return AlignmentReport(
        permutation=tuple(perm),
        signs=signs,
        per_component_vector_error=vec_err,
        per_component_sigma_error=sig_err,
        d_infinity=float(np.max(vec_err + sig_err)),
    )


def _difference_terms(truth: FactorModel, estimate: FactorModel, pairs):
    """Rank-1 (coef, a, b, c) terms summing exactly to ``truth - estimate``.

    A matched pair is expanded as
    ``(s* - s) u*^3 + s (d u* u* + u d u* + u u d)`` with ``d = u* - u``, so
    every term is small when the estimate is close. This keeps the Gram-based
    norm accurate far below sqrt(machine epsilon).
    """
    terms = []
    used_t, used_e = set(), set()
    for e, t in pairs:
        u_t, u_e = truth.U[:, t], estimate.U[:, e]
        s_t, s_e = truth.sigmas[t], estimate.sigmas[e]
        if u_t @ u_e < 0:
            u_e, s_e = -u_e, -s_e
        d = u_t - u_e
        terms.append((s_t - s_e, u_t, u_t, u_t))
        terms.append((s_e, d, u_t, u_t))
        terms.append((s_e, u_e, d, u_t))
        terms.append((s_e, u_e, u_e, d))
        used_t.add(t)
        used_e.add(e)
    for t in range(truth.r):
        if t not in used_t:
            u = truth.U[:, t]
            terms.append((truth.sigmas[t], u, u, u))
    for e in range(estimate.r):
        if e not in used_e:
            u = estimate.U[:, e]
            terms.append((-estimate.sigmas[e], u, u, u))
    return terms


def _terms_norm(terms) -> float:
    coef = np.array([t[0] for t in terms])
    A = np.stack([t[1] for t in terms], axis=1)
    B = np.stack([t[2] for t in terms], axis=1)
    C = np.stack([t[3] for t in terms], axis=1)
    G = (A.T @ A) * (B.T @ B) * (C.T @ C)
    return float(np.sqrt(max(coef @ G @ coef, 0.0)))


def difference_norm(truth: FactorModel, estimate: FactorModel, pairs=None) -> float:
    """``|truth - estimate|_F`` from factors only."""
    if truth.n != estimate.n:
        raise ShapeError(f"dimension mismatch {truth.n} != {estimate.n}")
    if pairs is None:
        pairs = _greedy_match(estimate.U, truth.U)
    return _terms_norm(_difference_terms(truth, estimate, pairs))


def rmse(estimate: FactorModel, truth: FactorModel) -> float:
    """Normalized error ``|T - T_hat|_F / |T|_F``."""
    scale = frobenius_norm(truth)
    if scale == 0:
        raise ScaleError("truth has zero Frobenius norm")
    return difference_norm(truth, estimate) / scale


def frobenius_error_bound_check(truth: FactorModel, estimate: FactorModel, eps_tilde: float) -> bool:
    """Whether ``|T - T_hat|_F <= 4 sqrt(r) |T|_F eps_tilde`` for index-matched factors.

    Raises :class:`PreconditionError` unless every ``|u_q - u*_q| <= eps_tilde``
    and ``|sigma_q - sigma*_q| <= |sigma*_q| eps_tilde`` and the truth is
    orthogonal.
    """
    if truth.n != estimate.n or truth.r != estimate.r:
        raise ShapeError("models must share n and r")
    if eps_tilde < 0:
        raise PreconditionError("eps_tilde must be nonnegative")
    G = truth.U.T @ truth.U
    if np.abs(G - np.eye(truth.r)).max() > ORTHO_TOL:
        raise PreconditionError("truth must be orthogonal")
    slack = 1e-12 * (1 + eps_tilde)
    dvec = np.linalg.norm(estimate.U - truth.U, axis=0)
    dsig = np.abs(estimate.sigmas - truth.sigmas)
    if np.any(dvec > eps_tilde + slack) or np.any(dsig > np.abs(truth.sigmas) * eps_tilde + slack):
        raise PreconditionError("estimate is not within eps_tilde of truth")
    pairs = [(q, q) for q in range(truth.r)]
    diff = _terms_norm(_difference_terms(truth, estimate, pairs))
    return diff <= 4 * np.sqrt(truth.r) * frobenius_norm(truth) * eps_tilde


def generate_orthogonal_model(n: int, r: int, sigma_spec=None, seed=None) -> FactorModel:
    """Haar-random orthonormal factors from the QR of an ``n x r`` Gaussian matrix."""
    if r > n:
        raise RankError(f"rank {r} exceeds dimension {n}")
    sig = _sigmas(sigma_spec, r)
    rng = _as_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, r)))
    # fix the QR sign ambiguity so the distribution is exactly Haar
    Q = Q * np.sign(np.diag(R))
    Q /= np.linalg.norm(Q, axis=0)
    return FactorModel(sig, Q, orthogonal=True)


def _sigmas(sigma_spec, r):
    if sigma_spec is None:
        return np.ones(r)
    sig = np.asarray(sigma_spec, dtype=float).reshape(-1)
    if len(sig) == 1:
        sig = np.repeat(sig, r)
    if len(sig) != r:
        raise ShapeError(f"{len(sig)} sigmas for rank {r}")
    return sig


def max_coherence(U: np.ndarray) -> float:
    """``max_{i != j} <u_i, u_j>`` over the columns of ``U``."""
    if U.shape[1] < 2:
        return 0.0
    G = U.T @ U
    np.fill_diagonal(G, -np.inf)
    return float(G.max())


def generate_correlated_model(
    n: int, r: int, rho_target: float, sigma_spec=None, seed=None, tol: float = 0.01
) -> FactorModel:
    """Unit factors whose largest pairwise inner product is close to ``rho_target``.

    Each column is ``(1 - w) q_l + w g`` renormalized, with ``q_l`` an
    orthonormal frame and ``g`` a shared random unit direction; ``w`` is found
    by bisection.
    """
    if r > n:
        raise RankError(f"rank {r} exceeds dimension {n}")
    if not 0 <= rho_target < 1:
        raise DomainError("rho_target must lie in [0, 1)")
    rng = _as_rng(seed)
    base = generate_orthogonal_model(n, r, sigma_spec, rng)
    if rho_target == 0 or r == 1:
        return base
    Q = base.U
    g = rng.standard_normal(n)
    if r < n:
        g -= Q @ (Q.T @ g)
    g /= np.linalg.norm(g)

    def blend(w):
        V = (1 - w) * Q + w * g[:, None]
        return V / np.linalg.norm(V, axis=0)

    lo, hi = 0.0, 1.0
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        V = blend(mid)
        rho = max_coherence(V)
        if abs(rho - rho_target) <= tol / 10:
            return FactorModel(base.sigmas, V)
        if rho < rho_target:
            lo = mid
        else:
            hi = mid
    V = blend(0.5 * (lo + hi))
    if abs(max_coherence(V) - rho_target) > tol:
        raise ConvergenceError(f"could not reach rho={rho_target} by bisection")
    return FactorModel(base.sigmas, V)


def write_tensor(tensor: SparseSymmetricTensor, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"symtensor3 n={tensor.n} nnz={tensor.nnz}\n")
        for (i, j, k), v in tensor.items():
            fh.write(f"{i} {j} {k} {v!r}\n")


def parse_tensor(lines: Iterable[str]) -> SparseSymmetricTensor:
    it = iter(lines)
    header = None
    lineno = 0
    for line in it:
        lineno += 1
        if line.strip():
            header = line.split()
            break
    if header is None:
        raise ParseError("missing header", lineno or 1)
    try:
        if header[0] != "symtensor3" or len(header) != 3:
            raise ValueError
        n = int(header[1].removeprefix("n="))
        nnz = int(header[2].removeprefix("nnz="))
    except (ValueError, IndexError):
        raise ParseError("expected 'symtensor3 n=<n> nnz=<count>'", lineno) from None
    idx, vals = [], []
    seen = {}
    for line in it:
        lineno += 1
        if not line.strip():
            continue
        parts = line.split()
        try:
            if len(parts) != 4:
                raise ValueError
            i, j, k = (int(p) for p in parts[:3])
            v = float(parts[3])
        except ValueError:
            raise ParseError(f"malformed entry {line.strip()!r}", lineno) from None
        if not all(0 <= a < n for a in (i, j, k)):
            raise ParseError(f"index out of range in {line.strip()!r}", lineno)
        if not math.isfinite(v):
            raise ParseError(f"non-finite value in {line.strip()!r}", lineno)
        key = tuple(sorted((i, j, k)))
        if key in seen:
            raise ParseError(f"duplicate entry {key} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        idx.append((i, j, k))
        vals.append(v)
    if len(vals) != nnz:
        raise ParseError(f"header declares {nnz} entries, found {len(vals)}", lineno)
    try:
        return SparseSymmetricTensor(n, np.array(idx, dtype=np.int64).reshape(-1, 3), vals)
    except (ShapeError, DomainError) as exc:
        raise ParseError(str(exc)) from None


def read_tensor(path) -> SparseSymmetricTensor:
    with open(path) as fh:
        return parse_tensor(fh)


def write_model(model: FactorModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(model.to_json())
        fh.write("\n")


def read_model(path) -> FactorModel:
    with open(path) as fh:
        return FactorModel.from_json(fh.read())
