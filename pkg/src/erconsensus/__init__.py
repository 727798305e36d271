"""Consensus over switching directed Erdős–Rényi graphs.

Averaging dynamics x(k) = W_k x(k-1) with a fresh random graph every
step drive all states to a common random value. This package computes
the closed-form mean and variance of that value from (n, p, x0), and
ships two independent validation routes: exhaustive enumeration of small
ensembles and seeded Monte Carlo simulation.
"""

from .dynamics import (
    ConsensusOutcome,
    NonConvergenceError,
    run_consensus,
    step,
    weight_matrix,
)
from .graphs import (
    DirectedGraph,
    GraphSeed,
    ModelParams,
    enumerate_graphs,
    sample_graph,
)
from .moments import (
    PatternMap,
    VarianceReport,
    WeightSecondMoments,
    consensus_mean,
    consensus_variance,
    expected_kron_matrix,
    expected_neighbor_weight,
    expected_self_weight,
    expected_self_weight_sq,
    expected_weight_matrix,
    kron_apply_left,
    kron_left_eigenvector,
    kron_row_sums,
    pattern_map,
    peak_size,
    second_moments,
    self_weight_sq_series,
    variance_coefficients,
    variance_factor,
)
from .montecarlo import (
    EnsembleStats,
    ExperimentConfig,
    FactorRow,
    SweepRow,
    factor_sweep,
    jackknife_variance_stderr,
    resolve_x0,
    run_ensemble,
    sweep_fixed_degree,
)
from .oracle import (
    EigenvectorEstimate,
    OracleReport,
    enumerate_expected_matrices,
    exact_variance,
    left_unit_eigenvector,
    oracle_report,
    slem,
)

__version__ = "0.1.0"

__all__ = [
    "ConsensusOutcome",
    "DirectedGraph",
    "EigenvectorEstimate",
    "EnsembleStats",
    "ExperimentConfig",
    "FactorRow",
    "GraphSeed",
    "ModelParams",
    "NonConvergenceError",
    "OracleReport",
    "PatternMap",
    "SweepRow",
    "VarianceReport",
    "WeightSecondMoments",
    "consensus_mean",
    "consensus_variance",
    "enumerate_expected_matrices",
    "enumerate_graphs",
    "exact_variance",
    "expected_kron_matrix",
    "expected_neighbor_weight",
    "expected_self_weight",
    "expected_self_weight_sq",
    "expected_weight_matrix",
    "factor_sweep",
    "jackknife_variance_stderr",
    "kron_apply_left",
    "kron_left_eigenvector",
    "kron_row_sums",
    "left_unit_eigenvector",
    "oracle_report",
    "pattern_map",
    "peak_size",
    "resolve_x0",
    "run_consensus",
    "run_ensemble",
    "sample_graph",
    "second_moments",
    "self_weight_sq_series",
    "slem",
    "step",
    "sweep_fixed_degree",
    "variance_coefficients",
    "variance_factor",
    "weight_matrix",
]
