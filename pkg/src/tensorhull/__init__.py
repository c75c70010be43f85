"""Exact multiresolution dictionaries, approximation ladders, sparse-grid
tensor spaces and covering-number experiments for absolute convex hulls of
truncated-power families."""

from .errors import CapacityError, DomainError
from .exactpoly import DyadicPiecewisePoly, affine_pullback, evaluate, inner_product, norm2
from .mrabasis import OrthonormalDictionary, analyze, build_dictionary, synthesize
from .approx import (
    ApproximationLadder,
    TruncatedPowerFamily,
    approximation_number,
    m_epsilon,
    projection_residual,
    projection_residual2,
    residual_profile,
    truncated_power,
)
from .covering import CoveringReport, FarthestPointTraversal, greedy_cover
from .sparsegrid import (
    SparseGridSpace,
    TensorPoint,
    choose_K,
    dimension_rate,
    hyperbolic_cross,
    tail_bound,
    tensor_residual,
)
from .hull import (
    DesignMatrix,
    DiscreteLadder,
    HullPoint,
    ScalingConfig,
    covering_estimate,
    discrete_design,
    discrete_tv,
    local_to_global_bound,
    maurey_mse,
    maurey_sparsify,
    scaling_experiment,
    two_scale_cover,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "DyadicPiecewisePoly",
    "affine_pullback",
    "evaluate",
    "inner_product",
    "norm2",
    "OrthonormalDictionary",
    "analyze",
    "build_dictionary",
    "synthesize",
    "ApproximationLadder",
    "TruncatedPowerFamily",
    "approximation_number",
    "m_epsilon",
    "projection_residual",
    "projection_residual2",
    "residual_profile",
    "truncated_power",
    "CoveringReport",
    "FarthestPointTraversal",
    "greedy_cover",
    "SparseGridSpace",
    "TensorPoint",
    "choose_K",
    "dimension_rate",
    "hyperbolic_cross",
    "tail_bound",
    "tensor_residual",
    "DesignMatrix",
    "DiscreteLadder",
    "HullPoint",
    "ScalingConfig",
    "covering_estimate",
    "discrete_design",
    "discrete_tv",
    "local_to_global_bound",
    "maurey_mse",
    "maurey_sparsify",
    "scaling_experiment",
    "two_scale_cover",
]
