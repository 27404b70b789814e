"""Planted MAX-3LIN instances solved as rank-1 tensor completion.

Variables take values in ``{+1, -1}`` with ``-1`` meaning *true*, so the
GF(2) sum of three variables is their product and an equation reads
``x_i x_j x_k = rhs``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import DomainError, ParseError, ScaleError, ShapeError
from .pipeline import CompletionConfig, complete
from .tensor_core import SparseSymmetricTensor, _as_rng

BRUTE_FORCE_LIMIT = 24


@dataclass(frozen=True)
class Lin3Instance:
    n: int
    triples: np.ndarray
    rhs: np.ndarray
    planted: np.ndarray | None = None

    def __post_init__(self):
        T = np.asarray(self.triples, dtype=np.int64).reshape(-1, 3)
        b = np.asarray(self.rhs, dtype=np.int64).reshape(-1)
        if len(T) != len(b):
            raise ShapeError("one right-hand side per equation is required")
        if len(T):
            if not (np.all(T[:, 0] < T[:, 1]) and np.all(T[:, 1] < T[:, 2])):
                raise DomainError("equation variables must be strictly increasing")
            if T.min() < 0 or T.max() >= self.n:
                raise DomainError(f"variable index outside [0, {self.n})")
            if len(np.unique(T, axis=0)) != len(T):
                raise DomainError("duplicate equation")
        if not np.all(np.isin(b, (-1, 1))):
            raise DomainError("right-hand sides must be +1 or -1")
        object.__setattr__(self, "triples", T)
        object.__setattr__(self, "rhs", b)
        if self.planted is not None:
            x = np.asarray(self.planted, dtype=np.int64)
            if len(x) != self.n or not np.all(np.isin(x, (-1, 1))):
                raise DomainError("planted assignment must be a +-1 vector of length n")
            if not satisfies(self, x):
                raise DomainError("planted assignment violates an equation")
            object.__setattr__(self, "planted", x)

    @property
    def m(self) -> int:
        return len(self.rhs)

    @classmethod
    def from_equations(cls, n: int, equations: Iterable, planted=None) -> "Lin3Instance":
        eqs = list(equations)
        T = np.array([e[:3] for e in eqs], dtype=np.int64).reshape(-1, 3)
        return cls(n, T, np.array([e[3] for e in eqs], dtype=np.int64), planted)

    def to_tensor(self) -> SparseSymmetricTensor:
        """Observed entries of ``x (x) x (x) x`` on the equation triples."""
        return SparseSymmetricTensor(self.n, self.triples, self.rhs.astype(float))


def satisfied_count(instance: Lin3Instance, x) -> int:
    x = np.asarray(x)
    T = instance.triples
    return int(np.sum(x[T[:, 0]] * x[T[:, 1]] * x[T[:, 2]] == instance.rhs))


def satisfies(instance: Lin3Instance, x) -> bool:
    return satisfied_count(instance, x) == instance.m


def generate_planted(n: int, p: float, seed=None) -> Lin3Instance:
    """Uniform planted ``x*``; each ``i < j < k`` kept with probability ``p``."""
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    rng = _as_rng(seed)
    x = rng.choice(np.array([-1, 1]), size=n)
    T = np.array(list(combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    T = T[rng.random(len(T)) < p]
    rhs = x[T[:, 0]] * x[T[:, 1]] * x[T[:, 2]]
    return Lin3Instance(n, T, rhs, x)


@dataclass(frozen=True)
class SolveResult:
    assignment: np.ndarray | None
    success: bool
    satisfied: int
    error: str | None = None


def round_to_assignment(u: np.ndarray, instance: Lin3Instance) -> np.ndarray:
    """Sign-round ``u`` (zeros to +1), then keep whichever of ``x, -x`` satisfies more."""
    x = np.where(np.asarray(u) < 0, -1, 1)
    if satisfied_count(instance, -x) > satisfied_count(instance, x):
        x = -x
    return x


def solve_as_completion(instance: Lin3Instance, mu: float | None = 1.0, outer_iters: int = 50,
                        seed=None, **config) -> SolveResult:
    """Recover an assignment via rank-1 completion of ``x (x) x (x) x``.

    The planted tensor has incoherence 1, hence the default clipping level.
    Success means every equation is satisfied.
    """
    if instance.m == 0:
        raise DomainError("instance has no equations")
    p = instance.m / math.comb(instance.n, 3)
    cfg = CompletionConfig(rank=1, outer_iters=outer_iters, p=min(p, 1.0), mu=mu, seed=seed,
                           **config)
    res = complete(instance.to_tensor(), cfg)
    if res.model is None:
        return SolveResult(None, False, 0, res.error)
    x = round_to_assignment(res.model.U[:, 0], instance)
    sat = satisfied_count(instance, x)
    return SolveResult(x, sat == instance.m, sat)


def brute_force_solutions(instance: Lin3Instance) -> list:
    """Every assignment satisfying all equations, by exhaustive search.

    Assignments are enumerated as integers with variable 0 in the most
    significant bit and bit value 1 meaning ``-1``; results come out in that
    order.
    """
    n = instance.n
    if n > BRUTE_FORCE_LIMIT:
        raise ScaleError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {n}")
    cand = np.arange(2**n, dtype=np.uint32)
    shift = lambda v: np.uint32(n - 1 - v)  # noqa: E731
    for (i, j, k), b in zip(instance.triples.tolist(), instance.rhs.tolist()):
        parity = ((cand >> shift(i)) ^ (cand >> shift(j)) ^ (cand >> shift(k))) & np.uint32(1)
        cand = cand[parity == (1 if b == -1 else 0)]
        if len(cand) == 0:
            break
    bits = (cand[:, None] >> np.arange(n - 1, -1, -1, dtype=np.uint32)) & np.uint32(1)
    return [np.where(row == 1, -1, 1) for row in bits]


def propagation_connected(instance: Lin3Instance):
    """Search for an edge ordering in which every new edge meets the covered nodes in exactly two.

    Returns ``(connected, sequence)`` where ``sequence`` lists the equation
    triples in order, or ``None``. From a fixed seed edge the reachable node set
    only grows and an edge that can extend a set can extend any larger set
    not containing its third node, so greedy extension finds the maximal
    reachable set; every seed edge is tried.
    """
    if instance.m == 0:
        raise DomainError("instance has no equations")
    edges = [tuple(e) for e in instance.triples.tolist()]
    for seed_edge in edges:
        covered = set(seed_edge)
        seq = [seed_edge]
        progress = True
        while progress and len(covered) < instance.n:
            progress = False
            for e in edges:
                if sum(v in covered for v in e) == 2:
                    covered.update(e)
                    seq.append(e)
                    progress = True
        if len(covered) == instance.n:
            return True, seq
    return False, None


def example_instance() -> Lin3Instance:
    """Three chained equations on five variables with four solutions."""
    return Lin3Instance.from_equations(5, [(0, 1, 2, 1), (1, 2, 3, -1), (2, 3, 4, 1)])


def counterexample_report() -> dict:
    inst = example_instance()
    connected, seq = propagation_connected(inst)
    sols = brute_force_solutions(inst)
    for x in sols:
        assert satisfies(inst, x)
    assert connected and len(sols) == 4, "counterexample does not reproduce"
    return {
        "connected": connected,
        "solution_count": len(sols),
        "sequence": [[v + 1 for v in e] for e in seq],
        "solutions": [x.tolist() for x in sols],
    }


def write_instance(instance: Lin3Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"p 3lin {instance.n} {instance.m}\n")
        for (i, j, k), b in zip(instance.triples.tolist(), instance.rhs.tolist()):
            fh.write(f"{i + 1} {j + 1} {k + 1} {b:+d}\n")


def parse_instance(lines: Iterable[str]) -> Lin3Instance:
    """Read the ``p 3lin n m`` format; indices in the file are 1-based."""
    n = m = None
    eqs = []
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if n is None:
            if len(parts) != 4 or parts[:2] != ["p", "3lin"]:
                raise ParseError("expected 'p 3lin <n> <m>'", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer header field", lineno) from None
            continue
        try:
            if len(parts) != 4:
                raise ValueError
            i, j, k, b = (int(v) for v in parts)
        except ValueError:
            raise ParseError(f"malformed equation {line.strip()!r}", lineno) from None
        if b not in (-1, 1) or not all(1 <= v <= n for v in (i, j, k)):
            raise ParseError(f"invalid equation {line.strip()!r}", lineno)
        eqs.append(tuple(sorted((i - 1, j - 1, k - 1))) + (b,))
    if n is None:
        raise ParseError("missing header", 1)
    if len(eqs) != m:
        raise ParseError(f"header declares {m} equations, found {len(eqs)}")
    try:
        return Lin3Instance.from_equations(n, eqs)
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def read_instance(path) -> Lin3Instance:
    with open(path) as fh:
        return parse_instance(fh)
