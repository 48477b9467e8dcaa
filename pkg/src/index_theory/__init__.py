"""Covariance kernels, index estimates and the exponential reference system."""
from .kernel import (
    CovKernel,
    canonical_gauge,
    centered,
    centered_spectrum,
    cov_kernel,
    defect_p,
    gauge_centered,
    index_estimate,
    predicted_amalgam_index,
    validate_kernel,
)
from .fock import Automorphism, ExpUnit, adjoint, apply_automorphism, exp_cov, exp_kernel, fock_generated_index

__all__ = [
    'CovKernel',
    'canonical_gauge',
    'centered',
    'centered_spectrum',
    'cov_kernel',
    'defect_p',
    'gauge_centered',
    'index_estimate',
    'predicted_amalgam_index',
    'validate_kernel',
    'Automorphism',
    'ExpUnit',
    'adjoint',
    'apply_automorphism',
    'exp_cov',
    'exp_kernel',
    'fock_generated_index',
]
