"""Spectral concentration of sampled tensors and random-hypergraph audits."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .tensor_core import (
    FactorModel,
    LinearCombination,
    SparseSymmetricTensor,
    _as_rng,
    n_canonical,
    operator_norm_estimate,
)

log = logging.getLogger(__name__)

EXACT_TMAX_LIMIT = 400


def t_max(model: FactorModel, exact_limit: int = EXACT_TMAX_LIMIT, top: int = 32):
    """Largest entry magnitude ``max_ijk |T_ijk|`` and whether it is an estimate.

    Up to ``exact_limit`` every entry is evaluated, one slice ``T[i, :, :]`` at
    a time. Larger models scan only the triples built from the ``top`` largest
    coordinates of each component, which may miss the maximum.
    """
    U, s = model.U, model.sigmas
    if model.n <= exact_limit:
        best = 0.0
        for i in range(model.n):
            slab = (U * (s * U[i])) @ U.T
            best = max(best, float(np.abs(slab).max()))
        return best, False
    cand = set()
    for l in range(model.r):
        cand.update(np.argsort(-np.abs(U[:, l]))[:top].tolist())
    cand = np.array(sorted(cand))
    Us = U[cand]
    best = 0.0
    for a in range(len(cand)):
        slab = (Us * (s * Us[a])) @ Us.T
        best = max(best, float(np.abs(slab).max()))
    return best, True


def centered_norm_ratio(truth: FactorModel, omega: SparseSymmetricTensor, p: float,
                        restarts: int = 10, iters: int = 50, seed=None) -> float:
    """``|P_Omega(T) - p T|_2 / (T_max n^1.5 p)`` with the norm estimated by power iteration."""
    if not 0 < p <= 1:
        raise DomainError(f"p={p} outside (0, 1]")
    if truth.n != omega.n:
        raise ShapeError("truth and samples differ in dimension")
    n = truth.n
    if p == 1 and omega.nnz == n_canonical(n):
        return 0.0
    centered = LinearCombination([(1.0, omega), (-p, truth)])
    norm = operator_norm_estimate(centered, restarts, iters, seed)
    tm, _ = t_max(truth)
    return norm / (tm * n**1.5 * p)


@dataclass(frozen=True)
class HypergraphStats:
    n1: int
    n2: int
    n3: int
    edge_count: int
    max_deg1: int
    max_deg2: int
    max_deg3: int
    max_deg12: int
    max_deg13: int
    max_deg23: int

    @property
    def p_hat(self) -> float:
        return self.edge_count / (self.n1 * self.n2 * self.n3)


def _edges_and_dims(edges, dims=None):
    if isinstance(edges, SparseSymmetricTensor):
        dims = dims or (edges.n,) * 3
        E = edges.indices
    else:
        E = np.asarray(edges, dtype=np.int64).reshape(-1, 3)
    if dims is None:
        raise ShapeError("dims are required for an edge list")
    dims = tuple(int(d) for d in dims)
    if len(E) and (np.any(E < 0) or np.any(E >= np.array(dims))):
        raise ShapeError("edge outside the part sizes")
    return E, dims


def random_tripartite_edges(dims, p: float, seed=None) -> np.ndarray:
    """Each of the ``n1 n2 n3`` possible edges kept independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    rng = _as_rng(seed)
    total = int(np.prod(dims))
    flat = np.flatnonzero(rng.random(total) < p)
    return np.column_stack(np.unravel_index(flat, dims)).astype(np.int64)


def hypergraph_stats(edges, dims=None) -> HypergraphStats:
    E, (n1, n2, n3) = _edges_and_dims(edges, dims)

    def mx(keys, size):
        return int(np.bincount(keys, minlength=size).max()) if len(E) else 0

    a, b, c = E[:, 0], E[:, 1], E[:, 2]
    return HypergraphStats(
        n1, n2, n3, len(E),
        mx(a, n1), mx(b, n2), mx(c, n3),
        mx(a * n2 + b, n1 * n2), mx(a * n3 + c, n1 * n3), mx(b * n3 + c, n2 * n3),
    )


@dataclass(frozen=True)
class DegreeAudit:
    deg1: bool
    deg2: bool
    deg3: bool
    deg12: bool
    deg13: bool
    deg23: bool

    @property
    def all_pass(self) -> bool:
        return all(asdict(self).values())


def degree_bounds(stats: HypergraphStats, p: float, delta: float) -> dict:
    """Right-hand sides of the six high-probability degree bounds."""
    n1, n2, n3 = stats.n1, stats.n2, stats.n3
    c = 8.0 / 3.0
    return {
        "deg1": 2 * p * n2 * n3 + c * math.log(3 * n1 / delta),
        "deg2": 2 * p * n1 * n3 + c * math.log(3 * n2 / delta),
        "deg3": 2 * p * n1 * n2 + c * math.log(3 * n3 / delta),
        "deg12": 2 * p * n3 + c * math.log(3 * n1 * n2 / delta),
        "deg13": 2 * p * n2 + c * math.log(3 * n1 * n3 / delta),
        "deg23": 2 * p * n1 + c * math.log(3 * n2 * n3 / delta),
    }


def degree_bound_audit(stats: HypergraphStats, p: float, delta: float) -> DegreeAudit:
    if not 0 < delta <= 1 / math.e:
        raise DomainError("delta must lie in (0, 1/e]")
    bounds = degree_bounds(stats, p, delta)
    return DegreeAudit(
        deg1=stats.max_deg1 <= bounds["deg1"],
        deg2=stats.max_deg2 <= bounds["deg2"],
        deg3=stats.max_deg3 <= bounds["deg3"],
        deg12=stats.max_deg12 <= bounds["deg12"],
        deg13=stats.max_deg13 <= bounds["deg13"],
        deg23=stats.max_deg23 <= bounds["deg23"],
    )


@dataclass(frozen=True)
class DiscrepancySample:
    sizes: tuple
    e_observed: int
    e_expected: float
    check1_pass: bool
    check2_pass: bool
    sampler: str = "random"

    @property
    def holds(self) -> bool:
        return self.check1_pass or self.check2_pass

    def to_json(self) -> str:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        d["holds"] = self.holds
        return json.dumps(d)


def discrepancy_checks(e: int, sizes, dims, p: float, xi1: float, xi2: float):
    """Evaluate both discrepancy inequalities for one subset triple."""
    e_bar = p * sizes[0] * sizes[1] * sizes[2]
    check1 = e <= xi1 * e_bar
    if e <= e_bar:
        check2 = True
    else:
        entropy = max(a * math.log(math.e * n / a) for a, n in zip(sizes, dims))
        check2 = e * math.log(e / e_bar) <= xi2 * entropy
    return e_bar, check1, check2


def _random_masks(rng, n, count):
    sizes = rng.integers(1, n + 1, size=count)
    ranks = np.argsort(rng.random((count, n)), axis=1).argsort(axis=1)
    return ranks < sizes[:, None]


def _level_set_masks(rng, n, count):
    # dyadic magnitude bands of a random unit vector: band b holds the
    # coordinates with 2^b <= sqrt(n) |x_i| < 2^(b+1)
    X = rng.standard_normal((count, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    with np.errstate(divide="ignore"):
        bands = np.floor(np.log2(np.sqrt(n) * np.abs(X)))
    bands = np.maximum(bands, -20)
    masks = np.zeros((count, n), dtype=bool)
    for t in range(count):
        present = np.unique(bands[t])
        masks[t] = bands[t] == rng.choice(present)
    return masks


def discrepancy_audit(edges, dims, p: float, xi1: float = 8.0, xi2: float = 40.0,
                      subset_sampler: str = "random", samples: int = 1000, seed=None,
                      batch: int = 500) -> list:
    """Sampled audit of the discrepancy property.

    ``subset_sampler`` is ``"random"`` (uniform subsets of uniform random
    sizes), ``"level-set"`` (dyadic magnitude bands of random unit vectors) or
    ``"both"`` (alternating). Subset triples with an empty part are skipped.
    """
    if samples < 1:
        raise DomainError("samples must be at least 1")
    if xi1 <= 0 or xi2 <= 0:
        raise DomainError("xi1 and xi2 must be positive")
    if subset_sampler not in ("random", "level-set", "both"):
        raise DomainError(f"unknown subset sampler {subset_sampler!r}")
    E, dims = _edges_and_dims(edges, dims)
    rng = _as_rng(seed)
    out, skipped = [], 0
    done = 0
    while done < samples:
        count = min(batch, samples - done)
        kinds = []
        if subset_sampler == "both":
            kinds = ["random" if (done + t) % 2 == 0 else "level-set" for t in range(count)]
        else:
            kinds = [subset_sampler] * count
        masks = []
        for n in dims:
            m = np.empty((count, n), dtype=bool)
            sel = np.array([k == "random" for k in kinds])
            if sel.any():
                m[sel] = _random_masks(rng, n, int(sel.sum()))
            if (~sel).any():
                m[~sel] = _level_set_masks(rng, n, int((~sel).sum()))
            masks.append(m)
        if len(E):
            hit = masks[0][:, E[:, 0]] & masks[1][:, E[:, 1]] & masks[2][:, E[:, 2]]
            counts = hit.sum(axis=1)
        else:
            counts = np.zeros(count, dtype=np.int64)
        sizes = np.stack([m.sum(axis=1) for m in masks], axis=1)
        for t in range(count):
            sz = tuple(int(a) for a in sizes[t])
            if min(sz) == 0:
                skipped += 1
                continue
            e = int(counts[t])
            e_bar, c1, c2 = discrepancy_checks(e, sz, dims, p, xi1, xi2)
            out.append(DiscrepancySample(sz, e, e_bar, c1, c2, kinds[t]))
        done += count
    if skipped:
        log.info("skipped %d subset triples with an empty part", skipped)
    return out


def discrepancy_sample(edges, dims, p: float, subsets, xi1: float = 8.0, xi2: float = 40.0):
    """Audit one explicit subset triple ``(A1, A2, A3)``; ``None`` if a part is empty."""
    E, dims = _edges_and_dims(edges, dims)
    masks = []
    for A, n in zip(subsets, dims):
        m = np.zeros(n, dtype=bool)
        m[np.asarray(list(A), dtype=np.int64)] = True
        masks.append(m)
    sz = tuple(int(m.sum()) for m in masks)
    if min(sz) == 0:
        return None
    e = int(np.sum(masks[0][E[:, 0]] & masks[1][E[:, 1]] & masks[2][E[:, 2]])) if len(E) else 0
    e_bar, c1, c2 = discrepancy_checks(e, sz, dims, p, xi1, xi2)
    return DiscrepancySample(sz, e, e_bar, c1, c2, "explicit")
