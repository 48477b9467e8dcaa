"""Complex dense linear algebra primitives."""
from .tolerance import Tolerance, CHECK_FACTOR
from .ops import (
    as_matrix,
    as_vector,
    contraction_check,
    gram_quotient,
    hermitian_part,
    is_isometry,
    isometry_residual,
    kron,
    matexp,
    numerical_rank,
    pinv_factor,
    psd_floor,
    spectral_norm,
    superop_left_right,
    unvec,
    vec,
)

__all__ = [
    'Tolerance',
    'CHECK_FACTOR',
    'as_matrix',
    'as_vector',
    'contraction_check',
    'gram_quotient',
    'hermitian_part',
    'is_isometry',
    'isometry_residual',
    'kron',
    'matexp',
    'numerical_rank',
    'pinv_factor',
    'psd_floor',
    'spectral_norm',
    'superop_left_right',
    'unvec',
    'vec',
]
