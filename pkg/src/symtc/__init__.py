"""Exact completion of low-rank symmetric 3-mode tensors by alternating minimization."""

from .altmin import AltMinConfig, ConvergenceTrace, fit_error, inner_update, outer_loop
from .pipeline import CompletionConfig, CompletionResult, complete, sampling_probability
from .rtpm import RtpmConfig, clip_to_incoherent, power_step, rtpm_extract
from .sampling import SamplePlan, derive_seed, restrict, sample_bernoulli, split_samples
from .tensor_core import (
    AlignmentReport,
    FactorModel,
    SparseSymmetricTensor,
    align_factors,
    apply_trilinear,
    eval_entry,
    frobenius_error_bound_check,
    frobenius_norm,
    generate_correlated_model,
    generate_orthogonal_model,
    incoherence,
    operator_norm_estimate,
    rmse,
)

__version__ = "0.1.0"
