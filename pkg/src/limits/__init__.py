"""Inductive-limit numerics over uniform dyadic refinements."""
from .refinement import (
    CONV_TOL,
    MAX_DEPTH,
    MIN_LEVELS,
    CovarianceResult,
    block_inner,
    covariance,
    covariance_with_results,
    depth_estimate,
    lifted_inner,
    partition_inner,
)

__all__ = [
    'CONV_TOL',
    'MAX_DEPTH',
    'MIN_LEVELS',
    'CovarianceResult',
    'block_inner',
    'covariance',
    'covariance_with_results',
    'depth_estimate',
    'lifted_inner',
    'partition_inner',
]
