"""Optimal verification of maximally entangled qudits with mutually unbiased bases."""

from ._backend import NAME as BACKEND
from .device import (
    DeviceModel,
    NoiseChannel,
    RandomStream,
    RunLedger,
    TestRecord,
    build_device,
    pass_probability,
    run_copies,
    sample_copy,
)
from .errors import *  # noqa: F401,F403
from .linalg import EigenDecomposition, fidelity_pure, hermitian_eigen, tensor
from .mub import (
    MubSet,
    VerificationStrategy,
    build_mub,
    build_strategy,
    conjugate_vector,
    maximally_entangled_state,
    min_copies,
    worst_case_pass_probability,
)
from .stats import (
    ScalingFit,
    aggregate_trials,
    asymptotic_epsilon,
    confidence_delta,
    fit_scaling,
    kl_divergence,
    slope_sigma_excess,
    solve_epsilon,
)

__version__ = "0.1.0"
