"""Initialization: robust tensor power method with deflation, then clipping."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirectionError, DomainError, InitializationError
from .tensor_core import FactorModel, LinearCombination, SparseSymmetricTensor, _as_rng


def default_trials(n: int, r: int) -> int:
    return max(1, math.ceil((r * math.log(n)) ** 2))


def default_iters(n: int, r: int, p: float, c: float = 10.0, minimum: int = 5) -> int:
    # C (ln r + ln ln(p n^1.5)); the inner log is floored at 1 so tiny
    # sampling rates do not produce a zero or negative budget
    alpha = p * n**1.5
    loglog = math.log(max(math.log(alpha), 1.0)) if alpha > 1 else 0.0
    return max(minimum, math.ceil(c * (math.log(r) + loglog)))


@dataclass(frozen=True)
class RtpmConfig:
    """Budget for the power method.

    ``trials`` (L) random starts are run per component for ``iters`` (N)
    steps each; ``None`` selects the defaults ``ceil((r ln n)^2)`` and
    ``ceil(10 (ln r + ln ln(p n^1.5)))``. ``restart_budget_multiplier`` is the
    number of fresh batches of starts tried before giving up when every trial
    degenerates. ``rescale`` is the sampling probability used for the ``1/p``
    scaling.
    """

    rank: int
    rescale: float = 1.0
    trials: int | None = None
    iters: int | None = None
    restart_budget_multiplier: int = 3
    seed: int | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise DomainError("rank must be at least 1")
        if not 0 < self.rescale <= 1:
            raise DomainError(f"rescale probability {self.rescale} outside (0, 1]")
        for name in ("trials", "iters"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise DomainError(f"{name} must be at least 1")
        if self.restart_budget_multiplier < 1:
            raise DomainError("restart_budget_multiplier must be at least 1")

    def budget(self, n: int) -> tuple[int, int]:
        L = self.trials if self.trials is not None else default_trials(n, self.rank)
        N = self.iters if self.iters is not None else default_iters(n, self.rank, self.rescale)
        return L, N


def power_step(tensor, u: np.ndarray, rescale: float = 1.0) -> np.ndarray:
    """One step ``u <- T[:, u, u] / |T[:, u, u]|`` on the ``1/p``-rescaled tensor."""
    y = tensor.contract_pair(np.asarray(u, dtype=float)) / rescale
    nrm = np.linalg.norm(y)
    if not np.isfinite(nrm) or nrm == 0:
        raise DegenerateDirectionError("power step produced the zero vector")
    return y / nrm


def _deflated(tensor, rescale, found):
    terms = [(1.0 / rescale, tensor)]
    if found:
        sig, vecs = zip(*found)
        terms.append((-1.0, FactorModel(sig, np.column_stack(vecs))))
    return LinearCombination(terms)


def _batch_power(op, X, iters):
    alive = np.ones(X.shape[1], dtype=bool)
    for _ in range(iters):
        Y = op.contract_pair(X)
        norms = np.linalg.norm(Y, axis=0)
        ok = np.isfinite(norms) & (norms > 0)
        alive &= ok
        X = np.where(ok, Y / np.where(ok, norms, 1.0), X)
    return X, alive


def rtpm_extract(tensor: SparseSymmetricTensor, config: RtpmConfig) -> FactorModel:
    """Rank-``r`` estimate of ``(1/p) P_Omega(T)`` by power iteration with deflation.

    For each component, ``L`` random unit starts are iterated ``N`` times on the
    deflated tensor; the trial with the largest Rayleigh value
    ``T_defl[u, u, u]`` wins (first index on ties) and gets ``N`` more polish
    steps. Found components are subtracted lazily during contraction.
    Components are returned in decreasing ``|sigma|`` order.
    """
    if tensor.nnz == 0:
        raise InitializationError("cannot initialize from an empty tensor")
    n = tensor.n
    L, N = config.budget(n)
    rng = _as_rng(config.seed)
    found = []
    for _ in range(config.rank):
        op = _deflated(tensor, config.rescale, found)
        winner = None
        for _attempt in range(config.restart_budget_multiplier):
            X = rng.standard_normal((n, L))
            X /= np.linalg.norm(X, axis=0)
            X, alive = _batch_power(op, X, N)
            if alive.any():
                lam = np.sum(X * op.contract_pair(X), axis=0)
                lam[~alive] = -np.inf
                winner = X[:, int(np.argmax(lam))]
                break
        if winner is None:
            raise InitializationError("every power-method trial degenerated")
        u = winner
        try:
            for _ in range(N):
                u = power_step(op, u)
        except DegenerateDirectionError:
            pass
        sigma = float(u @ op.contract_pair(u))
        found.append((sigma, u))
    found.sort(key=lambda c: -abs(c[0]))
    sig, vecs = zip(*found)
    U = np.column_stack(vecs)
    return FactorModel(sig, U / np.linalg.norm(U, axis=0))


def clip_to_incoherent(model: FactorModel, mu: float) -> FactorModel:
    """Cap entries at ``mu / sqrt(n)`` in magnitude and renormalize each column.

    Columns that need no clipping are returned bit-for-bit unchanged.
    """
    if mu <= 0:
        raise DomainError("mu must be positive")
    cap = mu / np.sqrt(model.n)
    U = model.U.copy()
    for l in range(model.r):
        col = U[:, l]
        over = np.abs(col) > cap
        if not over.any():
            continue
        col = np.where(over, np.sign(col) * cap, col)
        nrm = np.linalg.norm(col)
        if nrm == 0:
            raise AssertionError("clipping produced a zero vector")
        U[:, l] = col / nrm
    return FactorModel(model.sigmas, U, orthogonal=False)
