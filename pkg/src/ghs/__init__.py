"""Graphical horseshoe estimation of sparse precision matrices.

A block Gibbs sampler with horseshoe priors on the off-diagonal entries of
the precision matrix, plus the simulation, metrics, selection, and
diagnostics machinery around it.
"""

from .archive import load_chain, save_chain
from .gibbs import (
    Chain,
    GhsConfig,
    SamplerState,
    ShrinkageState,
    credible_interval_select,
    posterior_mean,
    run_ghs,
)
from .linalg import ColumnPartition, cholesky_pd_check, inverse_block_from_sigma, partition, reassemble
from .metrics import ConfusionReport, LossReport, RocCurve, confusion, frobenius_error, roc_from_chain, steins_loss
from .samplers import RngHandle, sample_gamma, sample_inverse_gamma, sample_mvn
from .shrinkage import BiasCheckInput, empirical_shrinkage_check, shrinkage_bound
from .structures import (
    PRESETS,
    GroundTruth,
    ScatterMatrix,
    StructureKind,
    StructureSpec,
    gen_structure,
    scatter,
    simulate_data,
)

__all__ = [
    "Chain",
    "GhsConfig",
    "SamplerState",
    "ShrinkageState",
    "RngHandle",
    "ColumnPartition",
    "ConfusionReport",
    "LossReport",
    "RocCurve",
    "GroundTruth",
    "ScatterMatrix",
    "StructureKind",
    "StructureSpec",
    "BiasCheckInput",
    "PRESETS",
    "cholesky_pd_check",
    "partition",
    "reassemble",
    "inverse_block_from_sigma",
    "sample_gamma",
    "sample_inverse_gamma",
    "sample_mvn",
    "run_ghs",
    "posterior_mean",
    "credible_interval_select",
    "steins_loss",
    "frobenius_error",
    "confusion",
    "roc_from_chain",
    "shrinkage_bound",
    "empirical_shrinkage_check",
    "gen_structure",
    "simulate_data",
    "scatter",
    "save_chain",
    "load_chain",
]
