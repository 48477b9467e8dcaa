"""Amalgamated sums H (+)_D K."""
from .space import (
    AmalgamatedSpace,
    amalgamate,
    embed_tensor,
    recover_contraction,
    tensor_amalgamation,
)

__all__ = [
    'AmalgamatedSpace',
    'amalgamate',
    'embed_tensor',
    'recover_contraction',
    'tensor_amalgamation',
]
