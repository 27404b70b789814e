"""Alternating-minimization refinement with closed-form per-component updates."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateUpdateError, DomainError, ScaleError
from .rtpm import clip_to_incoherent
from .sampling import SamplePlan
from .tensor_core import FactorModel, SparseSymmetricTensor, align_factors, rmse

SAMPLE_MODES = ("reuse", "split")


@dataclass(frozen=True)
class AltMinConfig:
    """Outer-loop settings.

    ``epsilon`` is the fit-error level at which the loop stops early.
    ``gauss_seidel`` commits each component as soon as it is updated instead
    of at the end of the outer iteration, and ``reclip_mu`` re-applies the
    incoherence clipping after every outer iteration.
    """

    outer_iters: int
    rank: int
    epsilon: float = 1e-9
    sample_mode: str = "reuse"
    min_denominator: float = 1e-14
    seed: int | None = None
    gauss_seidel: bool = False
    reclip_mu: float | None = None

    def __post_init__(self):
        if self.outer_iters < 1:
            raise DomainError("outer_iters must be at least 1")
        if self.rank < 1:
            raise DomainError("rank must be at least 1")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if self.min_denominator < 0:
            raise DomainError("min_denominator must be nonnegative")
        if self.sample_mode not in SAMPLE_MODES:
            raise DomainError(f"sample_mode must be one of {SAMPLE_MODES}")


@dataclass
class ConvergenceTrace:
    """Per-outer-iteration diagnostics; iteration 0 is the initial estimate."""

    iters: list = field(default_factory=list)
    fit_error: list = field(default_factory=list)
    rmse: list = field(default_factory=list)
    d_infinity: list = field(default_factory=list)
    seconds: list = field(default_factory=list)

    def append(self, it, fit, err=None, dinf=None, secs=0.0):
        self.iters.append(it)
        self.fit_error.append(fit)
        self.rmse.append(err)
        self.d_infinity.append(dinf)
        self.seconds.append(secs)

    def __len__(self):
        return len(self.iters)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "fit_error", "rmse", "d_infinity", "seconds"])
        for row in zip(self.iters, self.fit_error, self.rmse, self.d_infinity, self.seconds):
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceTrace":
        tr = cls()
        for row in csv.DictReader(io.StringIO(text)):
            opt = lambda s: float(s) if s != "" else None  # noqa: E731
            tr.append(int(row["iter"]), float(row["fit_error"]), opt(row["rmse"]),
                      opt(row["d_infinity"]), float(row["seconds"]))
        return tr


def fit_error(omega: SparseSymmetricTensor, model: FactorModel) -> float:
    """``|P_Omega(T - T_hat)|_F / |P_Omega(T)|_F`` over the symmetry-closed samples."""
    w = omega.orbit_weights
    denom = np.sum(w * omega.values**2)
    if denom == 0:
        raise ScaleError("observed entries have zero norm")
    diff = omega.values - model.values_at(omega.indices)
    return float(np.sqrt(np.sum(w * diff**2) / denom))


def _component_products(omega, U):
    I, J, K, _ = omega.closure
    return U[I] * U[J] * U[K]


def _solve(omega, sigmas, U, q, min_denominator, products=None):
    I, J, K, V = omega.closure
    if products is None:
        products = _component_products(omega, U)
    others = [l for l in range(len(sigmas)) if l != q]
    R = V - products[:, others] @ sigmas[others] if others else V
    a = U[J, q] * U[K, q]
    n = U.shape[0]
    num = np.bincount(I, a * R, minlength=n)
    den = np.bincount(I, a * a, minlength=n)
    ok = (den > 0) & (den >= min_denominator)
    u_hat = np.zeros(n)
    u_hat[ok] = num[ok] / den[ok]
    nrm = float(np.linalg.norm(u_hat))
    if nrm == 0 or not np.isfinite(nrm):
        raise DegenerateUpdateError(f"update of component {q} vanished")
    return u_hat, nrm


def inner_update(omega_part: SparseSymmetricTensor, model: FactorModel, q: int,
                 min_denominator: float = 1e-14):
    """Least-squares update of component ``q`` with the others held fixed.

    Solves ``min_v |P(T - v (x) u_q (x) u_q - sum_{l != q} s_l u_l^3)|_F^2``,
    which separates over the first index: ``v(i)`` is the ratio of
    ``sum u_q(j) u_q(k) R_ijk`` to ``sum u_q(j)^2 u_q(k)^2`` over the observed
    ``(j, k)`` in row ``i``. Rows whose denominator falls below
    ``min_denominator`` are set to zero. Returns ``(v, |v|)``.
    """
    if not 0 <= q < model.r:
        raise IndexError(f"component {q} out of range for rank {model.r}")
    return _solve(omega_part, model.sigmas, model.U, q, min_denominator)


def outer_loop(plan: SamplePlan, init: FactorModel, config: AltMinConfig,
               truth: FactorModel | None = None):
    """Run ``config.outer_iters`` sweeps of per-component updates.

    In ``split`` mode sweep ``t`` uses part ``t * r + q`` for component ``q``;
    in ``reuse`` mode every update sees all samples. Returns the final model
    and its :class:`ConvergenceTrace`.
    """
    r = config.rank
    if init.r != r:
        raise ConfigurationError(f"initial model has rank {init.r}, expected {r}")
    if config.sample_mode == "split" and plan.parts < r * config.outer_iters:
        raise ConfigurationError(
            f"split mode needs {r * config.outer_iters} sample parts, plan has {plan.parts}"
        )
    full = plan.full_omega
    if config.sample_mode == "split":
        part_tensors = [plan.part(i) for i in range(r * config.outer_iters)]

    start = time.perf_counter()
    trace = ConvergenceTrace()

    def record(it, model):
        err = dinf = None
        if truth is not None:
            err = rmse(model, truth)
            if truth.r == model.r:
                dinf = align_factors(model, truth).d_infinity
        fit = fit_error(full, model)
        trace.append(it, fit, err, dinf, time.perf_counter() - start)
        return fit

    sig = np.array(init.sigmas, dtype=float)
    U = np.array(init.U, dtype=float)
    model = init
    fit = record(0, model)
    for t in range(config.outer_iters):
        if fit <= config.epsilon:
            break
        new_sig, new_U = sig.copy(), U.copy()
        products = None
        for q in range(r):
            omega = full if config.sample_mode == "reuse" else part_tensors[t * r + q]
            if config.gauss_seidel:
                u_hat, nrm = _solve(omega, new_sig, new_U, q, config.min_denominator)
            else:
                if config.sample_mode == "split" or products is None:
                    products = _component_products(omega, U)
                u_hat, nrm = _solve(omega, sig, U, q, config.min_denominator, products)
            new_sig[q] = nrm
            new_U[:, q] = u_hat / nrm
        sig, U = new_sig, new_U
        model = FactorModel(sig, U)
        if config.reclip_mu is not None:
            model = clip_to_incoherent(model, config.reclip_mu)
            sig, U = np.array(model.sigmas), np.array(model.U)
        fit = record(t + 1, model)
    return model, trace
