"""CP semigroups, Choi/Kraus machinery and GNS inclusion-system data."""
from .semigroup import CpSemigroup, apply, example_tt, hamiltonian_generator, identity_semigroup
from .choi import ChoiMatrix, choi, choi_from_map, kraus, kraus_apply
from .gns import GnsFiber, gns_beta, gns_fiber, gns_gram, gns_vector
from .blocks import CpValidation, PowersData, block_cp_semigroup, powers_corner, validate_cp

__all__ = [
    'CpSemigroup',
    'apply',
    'example_tt',
    'hamiltonian_generator',
    'identity_semigroup',
    'ChoiMatrix',
    'choi',
    'choi_from_map',
    'kraus',
    'kraus_apply',
    'GnsFiber',
    'gns_beta',
    'gns_fiber',
    'gns_gram',
    'gns_vector',
    'CpValidation',
    'PowersData',
    'block_cp_semigroup',
    'powers_corner',
    'validate_cp',
]
