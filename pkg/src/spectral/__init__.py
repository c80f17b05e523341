"""Clamped-plate eigenvalue, linearized stability and weighted stability constants.

Modules:
    models: EigenPair, ConvergenceError, SingularWeightError, CertificateDomainError
    quadrature: radial-measure weights and inner products
    eigen: nu1(), mu1(), weighted_beta(), beam_oracle()
"""

from src.spectral.eigen import beam_oracle, certificate_weight, mu1, nu1, stability_weight, weighted_beta
from src.spectral.models import CertificateDomainError, ConvergenceError, EigenPair, SingularWeightError
from src.spectral.quadrature import ball_volume, inner, integrate, norm, radial_weights, sphere_area

__all__ = [
    "beam_oracle",
    "certificate_weight",
    "mu1",
    "nu1",
    "stability_weight",
    "weighted_beta",
    "CertificateDomainError",
    "ConvergenceError",
    "EigenPair",
    "SingularWeightError",
    "ball_volume",
    "inner",
    "integrate",
    "norm",
    "radial_weights",
    "sphere_area",
]
