"""Decentralized collaborative mean estimation over pruned random graphs.

Agents observe noisy scalar streams, learn online which neighbors share
their distribution mean by pruning edges whose confidence intervals
separate, and fuse estimates over the surviving graph with either a
doubly stochastic consensus (c-colme) or a division-free Laplacian
smoothing step (cl-colme).
"""

__version__ = "0.1.0"

from .estimators import (ConfidenceInterval, ConsensusWeights, EstimatorRun,
                         LocalMeanState, alpha_schedule, c_colme_step,
                         cl_colme_step, confidence_radius, intervals_intersect,
                         metropolis_weights, oracle_estimate, separation_time)
from .graphs import (ComponentPartition, Graph, LaplacianOperator,
                     build_random_graph, connected_components, laplacian,
                     prune_edges)
from .harness import (ALL_VARIANTS, VARIANT_C, VARIANT_CL, VARIANT_LOCAL,
                      VARIANT_ORACLE, BenchReport, ExperimentConfig, MseTrace,
                      ReplicationResult, benchmark_variants, run_experiment,
                      run_replication)
from .sampling import ClassConfig, ObservationStream, ObservationVector, sample_step
from .spectral import (EigenDecomposition, consensus_limit_check,
                       eigendecompose_laplacian, lambda_max_bound, select_beta)

__all__ = [
    "__version__",
    "ALL_VARIANTS", "VARIANT_C", "VARIANT_CL", "VARIANT_LOCAL", "VARIANT_ORACLE",
    "BenchReport", "ClassConfig", "ComponentPartition", "ConfidenceInterval",
    "ConsensusWeights", "EigenDecomposition", "EstimatorRun", "ExperimentConfig",
    "Graph", "LaplacianOperator", "LocalMeanState", "MseTrace",
    "ObservationStream", "ObservationVector", "ReplicationResult",
    "alpha_schedule", "benchmark_variants", "build_random_graph", "c_colme_step",
    "cl_colme_step", "confidence_radius", "connected_components",
    "consensus_limit_check", "eigendecompose_laplacian", "intervals_intersect",
    "lambda_max_bound", "laplacian", "metropolis_weights", "oracle_estimate",
    "prune_edges", "run_experiment", "run_replication", "sample_step",
    "select_beta", "separation_time",
]
