"""Monte-Carlo drivers behind the command-line harness."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .pipeline import CompletionConfig, complete, sampling_probability
from .sampling import derive_seed, sample_bernoulli
from .spectral import centered_norm_ratio
from .tensor_core import (
    FactorModel,
    generate_correlated_model,
    generate_orthogonal_model,
    incoherence,
)

RECOVERY_THRESHOLD = 1e-7


def make_truth(n, r, rho, sigma_spec, seed):
    if rho == 0:
        return generate_orthogonal_model(n, r, sigma_spec, seed)
    return generate_correlated_model(n, r, rho, sigma_spec, seed)


@dataclass(frozen=True)
class TrialSpec:
    n: int
    r: int
    rho: float
    alpha: float
    seed: int
    outer_iters: int = 100
    sample_mode: str = "reuse"
    threshold: float = RECOVERY_THRESHOLD
    sigma_spec: tuple | None = None
    rtpm_trials: int | None = None
    rtpm_iters: int | None = None


def run_trial(spec: TrialSpec) -> dict:
    """Generate, sample and complete one instance; report whether it was recovered."""
    p_raw = sampling_probability(spec.alpha, spec.n, spec.r, spec.rho)
    p = min(max(p_raw, 0.0), 1.0)
    s_model, s_sample, s_fit = np.random.SeedSequence(spec.seed).spawn(3)
    truth = make_truth(spec.n, spec.r, spec.rho, spec.sigma_spec, s_model)
    omega = sample_bernoulli(truth, p, s_sample)
    out = {"p": p, "clamped": p != p_raw, "nnz": omega.nnz, "rmse": math.inf}
    if omega.nnz == 0:
        out["recovered"] = False
        return out
    cfg = CompletionConfig(
        rank=spec.r,
        outer_iters=spec.outer_iters,
        p=p,
        mu=incoherence(truth),
        seed=s_fit,
        sample_mode=spec.sample_mode,
        rtpm_trials=spec.rtpm_trials,
        rtpm_iters=spec.rtpm_iters,
    )
    res = complete(omega, cfg, truth)
    if res.model is not None:
        out["rmse"] = res.final_rmse
    out["iters"] = len(res.trace) - 1
    out["recovered"] = bool(out["rmse"] < spec.threshold)
    return out


def _map(fn, items, threads):
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items, chunksize=4))
    return [fn(x) for x in items]


@dataclass(frozen=True)
class PhaseSweepConfig:
    n_list: tuple = (50,)
    r_list: tuple = (3,)
    rho_list: tuple = (0.0,)
    alphas: tuple = field(default_factory=lambda: tuple(np.linspace(1, 12, 12).tolist()))
    trials: int = 40
    threshold: float = RECOVERY_THRESHOLD
    seed: int = 0
    sample_mode: str = "reuse"
    outer_iters: int = 100
    rtpm_trials: int | None = None
    rtpm_iters: int | None = None

    def __post_init__(self):
        for name in ("n_list", "r_list", "rho_list", "alphas"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")


def alpha_grid(lo: float, hi: float, steps: int) -> tuple:
    return tuple(np.linspace(lo, hi, int(steps)).tolist())


def phase_sweep(cfg: PhaseSweepConfig, threads: int = 1) -> list:
    """Recovery rate at every grid point, rows sorted by ``(n, r, rho, alpha)``.

    The trial seeds depend only on ``(n, r, rho index, trial)``, so the same
    instances are reused along the alpha axis and a point's outcome does not
    depend on which other points are in the grid.
    """
    jobs, keys = [], []
    for n in cfg.n_list:
        for r in cfg.r_list:
            for ir, rho in enumerate(cfg.rho_list):
                for alpha in cfg.alphas:
                    for t in range(cfg.trials):
                        seed = derive_seed(cfg.seed, n, r, ir, t)
                        jobs.append(TrialSpec(n, r, rho, alpha, seed, cfg.outer_iters,
                                              cfg.sample_mode, cfg.threshold, None,
                                              cfg.rtpm_trials, cfg.rtpm_iters))
                        keys.append((n, r, rho, alpha))
    results = _map(run_trial, jobs, threads)
    agg = {}
    for key, res in zip(keys, results):
        a = agg.setdefault(key, {"hits": 0, "trials": 0, "p": res["p"], "clamped": res["clamped"]})
        a["hits"] += res["recovered"]
        a["trials"] += 1
    rows = []
    for (n, r, rho, alpha) in sorted(agg):
        a = agg[(n, r, rho, alpha)]
        rows.append({
            "n": n, "r": r, "rho": rho, "alpha": alpha, "p": a["p"],
            "recovery_rate": a["hits"] / a["trials"], "trials": a["trials"],
            "clamped": a["clamped"],
        })
    return rows


def convergence_run(n: int, r: int, alpha: float, seed: int, outer_iters: int = 200,
                    epsilon: float = 1e-15, init_truth: bool = False, sample_mode="reuse"):
    """Single recovery run with the truth retained; returns ``(result, truth)``."""
    p = min(sampling_probability(alpha, n, r), 1.0)
    s_model, s_sample, s_fit = np.random.SeedSequence(seed).spawn(3)
    truth = generate_orthogonal_model(n, r, None, s_model)
    omega = sample_bernoulli(truth, p, s_sample)
    cfg = CompletionConfig(rank=r, outer_iters=outer_iters, p=p, mu=incoherence(truth),
                           seed=s_fit, epsilon=epsilon, sample_mode=sample_mode)
    res = complete(omega, cfg, truth, init=truth if init_truth else None)
    return res, truth


def rank_one_incoherent(n: int, seed) -> FactorModel:
    """Unit-sigma rank-1 model with a random sign-flat (incoherence 1) vector."""
    rng = np.random.default_rng(seed)
    u = rng.choice(np.array([-1.0, 1.0]), size=n) / math.sqrt(n)
    return FactorModel.normalized([1.0], u[:, None], orthogonal=True)


def spectral_study(n: int, alphas, seeds: int, master_seed: int = 0, restarts: int = 10,
                   iters: int = 50, r: int = 1, threads: int = 1) -> list:
    """Centered operator-norm ratio for rank-``r`` incoherent tensors at ``p = alpha / n^1.5``."""
    jobs = []
    for alpha in alphas:
        for s in range(seeds):
            jobs.append((n, r, float(alpha), s, derive_seed(master_seed, n, r, s), restarts, iters))
    return _map(_spectral_job, jobs, threads)


def _spectral_job(job):
    n, r, alpha, s, seed, restarts, iters = job
    p = min(alpha / n**1.5, 1.0)
    s_model, s_sample, s_norm = np.random.SeedSequence(seed).spawn(3)
    if r == 1:
        truth = rank_one_incoherent(n, s_model)
    else:
        truth = generate_orthogonal_model(n, r, None, s_model)
    omega = sample_bernoulli(truth, p, s_sample)
    ratio = centered_norm_ratio(truth, omega, p, restarts, iters, s_norm)
    return {"n": n, "p": p, "alpha": alpha, "ratio": ratio, "seed": s}


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def median_by(rows, key, value):
    groups = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row[value])
    return {k: float(np.median(v)) for k, v in sorted(groups.items())}


def config_dict(obj) -> dict:
    return asdict(obj)
