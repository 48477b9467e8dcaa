"""Inclusion systems, morphisms, units and their checks."""
from ..linalg_core import Tolerance
from .base import Fiber, FiberLike, InclusionSystem, product
from .morphisms import MorphismFamily, identity_morphism, left_embedding, right_embedding, scaled_morphism
from .systems import (
    AmalgamatedSystem,
    CpInclusionSystem,
    Example2System,
    ScaledSystem,
    TrivialSystem,
    amalgamate_systems,
    example2_system,
    from_cp,
    scaled_system,
    trivial_system,
)
from .checks import CheckReport, check_axioms, check_strong_morphism, check_weak_morphism
from .units import (
    GridUnit,
    check_strong_unit,
    check_unit,
    compose_unit,
    decompose_unit,
    deepen_unit,
    embed_unit_left,
    embed_unit_right,
    example2_unit,
    exponential_unit,
    intertwiner_unit,
    pullback_unit,
    rank_one_morphism,
    seeds_unit,
    unit_at,
    unit_square_root,
)
from .compare import match_discrepancy, powers_frames, powers_units, standard_frame, tt_frame

__all__ = [
    'Fiber',
    'FiberLike',
    'InclusionSystem',
    'product',
    'MorphismFamily',
    'identity_morphism',
    'left_embedding',
    'right_embedding',
    'scaled_morphism',
    'AmalgamatedSystem',
    'CpInclusionSystem',
    'Example2System',
    'ScaledSystem',
    'TrivialSystem',
    'amalgamate_systems',
    'example2_system',
    'from_cp',
    'scaled_system',
    'trivial_system',
    'CheckReport',
    'check_axioms',
    'check_strong_morphism',
    'check_weak_morphism',
    'GridUnit',
    'check_strong_unit',
    'check_unit',
    'compose_unit',
    'decompose_unit',
    'deepen_unit',
    'embed_unit_left',
    'embed_unit_right',
    'example2_unit',
    'exponential_unit',
    'intertwiner_unit',
    'pullback_unit',
    'rank_one_morphism',
    'seeds_unit',
    'unit_at',
    'unit_square_root',
    'match_discrepancy',
    'powers_frames',
    'powers_units',
    'standard_frame',
    'tt_frame',
    'get_inclusion_system'
]


def get_inclusion_system(kind: str, **config) -> InclusionSystem:
    """Factory function to get an inclusion system.

    Args:
        kind: Type of system ('trivial', 'example2', 'cp', 'amalgam')
        **config: System-specific configuration

    Returns:
        Inclusion system instance

    Raises:
        ValueError: If the system kind is not supported
    """
    kind = kind.lower()

    if kind == 'trivial':
        return TrivialSystem(name=config.get('name', 'trivial'))

    elif kind == 'example2':
        return Example2System(name=config.get('name', 'example2'))

    elif kind == 'cp':
        return from_cp(
            config['semigroup'],
            tol=config.get('tol', Tolerance()),
            cache=config.get('cache'),
            name=config.get('name')
        )

    elif kind == 'amalgam':
        return amalgamate_systems(
            config['e'],
            config['f'],
            config['d'],
            tol=config.get('tol', Tolerance()),
            name=config.get('name')
        )

    else:
        raise ValueError(f"Unsupported inclusion system: {kind}")
