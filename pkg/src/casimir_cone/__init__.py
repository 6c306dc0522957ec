"""Casimir-Polder energies of a polarizable particle near a perfectly
conducting cone or wedge, from the analytically continued angular-momentum
representation of the electromagnetic Green's function.

Energies are dimensionless: ``u_hat = U r**4 / (alpha * hbar * c)``.
"""

from .cone import (
    ConeConfig,
    ConeDomainError,
    EnergyResult,
    TMatrixPair,
    cone_energy,
    cone_energy_on_axis,
    cone_kappa_integrand,
    cone_lambda_integrand,
    cone_tmatrix,
    ghost_term,
    scaled_energy,
)
from .quadrature import Estimate, QuadSpec
from .thermal import PolarizabilityModel, ThermalConfig, thermal_energy
from .wedge import WedgeConfig, wedge_energy_closed, wedge_energy_relative

__version__ = "0.1.0"

__all__ = [
    "ConeConfig",
    "ConeDomainError",
    "EnergyResult",
    "Estimate",
    "PolarizabilityModel",
    "QuadSpec",
    "TMatrixPair",
    "ThermalConfig",
    "WedgeConfig",
    "cone_energy",
    "cone_energy_on_axis",
    "cone_kappa_integrand",
    "cone_lambda_integrand",
    "cone_tmatrix",
    "ghost_term",
    "scaled_energy",
    "thermal_energy",
    "wedge_energy_closed",
    "wedge_energy_relative",
]
