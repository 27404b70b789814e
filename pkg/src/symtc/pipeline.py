"""End-to-end completion: power-method initialization, clipping, refinement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .altmin import AltMinConfig, ConvergenceTrace, outer_loop
from .errors import CompletionError, DomainError, RankError
from .rtpm import RtpmConfig, clip_to_incoherent, rtpm_extract
from .sampling import reuse_plan, split_samples
from .tensor_core import FactorModel, SparseSymmetricTensor, n_canonical


def sampling_probability(alpha: float, n: int, r: int, rho: float = 0.0) -> float:
    """``p = alpha sqrt(r) ln n / ((1 - rho) n^1.5)``, unclamped."""
    return alpha * math.sqrt(r) * math.log(n) / ((1 - rho) * n**1.5)


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


@dataclass(frozen=True)
class CompletionConfig:
    """Settings for :func:`complete`.

    ``p`` defaults to the observed fraction of canonical triples. When ``mu``
    is ``None`` the clipping step is skipped.
    """

    rank: int
    outer_iters: int = 100
    p: float | None = None
    mu: float | None = None
    seed: int | None = None
    epsilon: float = 1e-9
    sample_mode: str = "reuse"
    min_denominator: float = 1e-14
    rtpm_trials: int | None = None
    rtpm_iters: int | None = None
    gauss_seidel: bool = False
    reclip: bool = False

    def __post_init__(self):
        if self.p is not None and not 0 < self.p <= 1:
            raise DomainError(f"p={self.p} outside (0, 1]")
        if self.mu is not None and self.mu <= 0:
            raise DomainError("mu must be positive")


@dataclass
class CompletionResult:
    model: FactorModel | None
    init: FactorModel | None
    trace: ConvergenceTrace
    error: str | None = None

    @property
    def final_fit(self) -> float:
        return self.trace.fit_error[-1] if len(self.trace) else math.inf

    @property
    def final_rmse(self):
        return self.trace.rmse[-1] if len(self.trace) else None


def complete(omega: SparseSymmetricTensor, config: CompletionConfig,
             truth: FactorModel | None = None, init: FactorModel | None = None) -> CompletionResult:
    """Recover a rank-``r`` model from observed entries.

    Numerical breakdowns (degenerate power steps or updates) are reported in
    ``CompletionResult.error`` rather than raised; invalid inputs still raise.
    """
    if config.rank > omega.n:
        raise RankError(f"rank {config.rank} exceeds dimension {omega.n}")
    p = config.p if config.p is not None else omega.nnz / n_canonical(omega.n)
    seeds = _seed_sequence(config.seed).spawn(2)
    trace = ConvergenceTrace()
    start = None
    try:
        if init is None:
            rcfg = RtpmConfig(
                rank=config.rank,
                rescale=p if p > 0 else 1.0,
                trials=config.rtpm_trials,
                iters=config.rtpm_iters,
                seed=seeds[0],
            )
            start = rtpm_extract(omega, rcfg)
            if config.mu is not None:
                start = clip_to_incoherent(start, config.mu)
        else:
            start = init
        acfg = AltMinConfig(
            outer_iters=config.outer_iters,
            rank=config.rank,
            epsilon=config.epsilon,
            sample_mode=config.sample_mode,
            min_denominator=config.min_denominator,
            gauss_seidel=config.gauss_seidel,
            reclip_mu=config.mu if config.reclip else None,
        )
        if config.sample_mode == "split":
            plan = split_samples(omega, config.rank * config.outer_iters, seeds[1], p)
        else:
            plan = reuse_plan(omega, p)
        model, trace = outer_loop(plan, start, acfg, truth)
    except CompletionError as exc:
        if isinstance(exc, (RankError, DomainError)):
            raise
        return CompletionResult(None, start, trace, error=f"{type(exc).__name__}: {exc}")
    return CompletionResult(model, start, trace)
