"""Spectral projector kernels of toy Schroedinger operators near a turning line.

Exact kernels of ``1/2 h^2 D^2 - x_1`` (and of a magnetic generalization)
from Airy fiber integrals and from finite differences, the Weyl
approximation, the Airy-type correction and h-sweeps comparing them.
"""
from .errors import (
    AccuracyError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    FitError,
    StudyError,
)
from .model import Kind, OperatorSpec, PointPair, ZoneLabel, ell, make_pair, zone_classify
from .oracle import GridOracleConfig, grid_oracle_1d, grid_oracle_2d, toy_kernel, toy_kernel_mollified
from .oscint import ReducedArgs, corr_diag, corr_term, dtau_J, dtau_J_kappa, kernel_J
from .specfn import BACKEND, airy, bessel_j
from .study import StudyConfig, StudyReport, fit_exponent, run_study
from .weyl import weyl_diag, weyl_kernel

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BACKEND",
    "ConfigurationError",
    "ConvergenceError",
    "DomainError",
    "FitError",
    "GridOracleConfig",
    "Kind",
    "OperatorSpec",
    "PointPair",
    "ReducedArgs",
    "StudyConfig",
    "StudyError",
    "StudyReport",
    "ZoneLabel",
    "airy",
    "bessel_j",
    "corr_diag",
    "corr_term",
    "dtau_J",
    "dtau_J_kappa",
    "ell",
    "fit_exponent",
    "grid_oracle_1d",
    "grid_oracle_2d",
    "kernel_J",
    "make_pair",
    "run_study",
    "toy_kernel",
    "toy_kernel_mollified",
    "weyl_diag",
    "weyl_kernel",
    "zone_classify",
]
