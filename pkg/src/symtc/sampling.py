"""Bernoulli sampling of symmetric index sets and sample splitting."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSplitError, DomainError, MembershipError
from .tensor_core import FactorModel, SparseSymmetricTensor, _as_rng, canonical_triples


def derive_seed(master_seed: int, *index: int) -> int:
    """Per-trial seed from a master seed and an integer key such as a trial index.

    Uses ``SeedSequence(master_seed, spawn_key=index)`` so trial streams are
    independent and do not depend on execution order.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_bernoulli(truth: FactorModel, p: float, seed=None) -> SparseSymmetricTensor:
    """Keep each canonical triple ``i <= j <= k`` independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise DomainError(f"sampling probability {p} outside [0, 1]")
    rng = _as_rng(seed)
    idx = canonical_triples(truth.n)
    keep = rng.random(len(idx)) < p
    chosen = idx[keep]
    return SparseSymmetricTensor(truth.n, chosen, truth.values_at(chosen))


@dataclass(frozen=True)
class SamplePlan:
    """Observed tensor together with a random split of its support.

    ``partitions`` holds arrays of row positions into ``full_omega.indices``.
    """

    full_omega: SparseSymmetricTensor
    partitions: tuple
    p: float | None = None
    seed: int | None = None

    @property
    def parts(self) -> int:
        return len(self.partitions)

    def part_triples(self, q: int) -> np.ndarray:
        return self.full_omega.indices[self.partitions[q]]

    def part(self, q: int) -> SparseSymmetricTensor:
        rows = self.partitions[q]
        om = self.full_omega
        return SparseSymmetricTensor(om.n, om.indices[rows], om.values[rows])

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "seed": self.seed,
                "parts": [self.part_triples(q).tolist() for q in range(self.parts)],
            }
        )

    @classmethod
    def from_json(cls, text: str, omega: SparseSymmetricTensor) -> "SamplePlan":
        data = json.loads(text)
        parts = []
        for triples in data["parts"]:
            parts.append(_rows_of(omega, np.asarray(triples, dtype=np.int64).reshape(-1, 3)))
        return cls(omega, tuple(parts), data.get("p"), data.get("seed"))


def split_samples(omega: SparseSymmetricTensor, parts: int, seed=None, p=None) -> SamplePlan:
    """Uniformly random balanced partition of the support into ``parts`` pieces."""
    if parts < 1:
        raise DegenerateSplitError("parts must be at least 1")
    if parts > omega.nnz:
        raise DegenerateSplitError(f"cannot split {omega.nnz} samples into {parts} parts")
    rng = _as_rng(seed)
    order = rng.permutation(omega.nnz)
    pieces = tuple(np.sort(chunk) for chunk in np.array_split(order, parts))
    return SamplePlan(omega, pieces, p, seed if isinstance(seed, (int, np.integer)) else None)


def reuse_plan(omega: SparseSymmetricTensor, p=None) -> SamplePlan:
    """Plan with a single part holding every sample."""
    return SamplePlan(omega, (np.arange(omega.nnz),), p, None)


def _rows_of(omega: SparseSymmetricTensor, triples: np.ndarray) -> np.ndarray:
    triples = np.sort(triples, axis=1)
    keys = omega._encode(triples, omega.n)
    pos = np.searchsorted(omega._keys, keys)
    pos_c = np.minimum(pos, max(omega.nnz - 1, 0))
    ok = (pos < omega.nnz) & (omega._keys[pos_c] == keys) if omega.nnz else np.zeros(len(keys), bool)
    if not np.all(ok):
        bad = triples[~ok][0].tolist()
        raise MembershipError(f"triple {tuple(bad)} is not in the support")
    return pos


def restrict(omega: SparseSymmetricTensor, part) -> SparseSymmetricTensor:
    """Sub-tensor holding exactly the canonical triples in ``part``."""
    triples = np.asarray(list(part) if isinstance(part, (set, frozenset)) else part, dtype=np.int64)
    triples = triples.reshape(-1, 3)
    rows = _rows_of(omega, triples)
    return SparseSymmetricTensor(omega.n, omega.indices[rows], omega.values[rows])
