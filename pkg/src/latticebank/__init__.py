"""Adaptive multirate synthesis filter banks via exact LS circular lattices.

The package identifies, sample by sample, the M-channel FIR synthesis bank
that best predicts a delayed signal from M subband sequences. The fast
path is a time- and order-recursive least-squares lattice over the
interleaved input; a deliberately simple brute-force oracle, a coefficient
extractor, a whitening front-end, sklearn-style estimators, and an
experiment CLI round out the library.
"""

from .bank import (
    FilterBank,
    SerializedFilterBank,
    deinterleave,
    deserialize_filters,
    interleave,
    polyphase_components,
    residual_direct,
    serialize_filters,
    synthesize,
    synthesize_serialized,
)
from .errors import IllConditionedError, InsufficientDataError
from .estimators import SubbandWhitener, SynthesisBankEstimator
from .experiments import (
    ExperimentConfig,
    apply_named_filter,
    gen_excitation,
    nmse_db,
    run_generate,
    run_reconstruct,
    run_recover,
    run_verify,
)
from .extractor import OpCount, coefficients_by_order, extract_filters, predictors
from .lattice import EngineConfig, LatticeEngine, LatticeSnapshot
from .oracle import (
    band_desired_row,
    block_data_matrix,
    build_data_matrix,
    project_residual,
    project_residual_qr,
    solve_coefficients,
)
from .whitening import WhitenerConfig, whiten

__version__ = "0.1.0"

__all__ = [
    "EngineConfig",
    "ExperimentConfig",
    "FilterBank",
    "IllConditionedError",
    "InsufficientDataError",
    "LatticeEngine",
    "LatticeSnapshot",
    "OpCount",
    "SerializedFilterBank",
    "SubbandWhitener",
    "SynthesisBankEstimator",
    "WhitenerConfig",
    "apply_named_filter",
    "band_desired_row",
    "block_data_matrix",
    "build_data_matrix",
    "coefficients_by_order",
    "deinterleave",
    "deserialize_filters",
    "extract_filters",
    "gen_excitation",
    "interleave",
    "nmse_db",
    "polyphase_components",
    "predictors",
    "project_residual",
    "project_residual_qr",
    "residual_direct",
    "run_generate",
    "run_reconstruct",
    "run_recover",
    "run_verify",
    "serialize_filters",
    "solve_coefficients",
    "synthesize",
    "synthesize_serialized",
    "whiten",
]
