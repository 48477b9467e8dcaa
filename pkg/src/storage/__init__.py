"""Persistence helpers."""
from .fiber_cache import FiberCache, decode_matrix, encode_matrix

__all__ = [
    'FiberCache',
    'decode_matrix',
    'encode_matrix',
]
