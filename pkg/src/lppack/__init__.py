"""Packing bounds for unit-separated points in balls of l_p spaces."""

from .bounds import (
    BoundResult,
    DomainError,
    conjugate,
    critical_radius,
    psi,
    psi_one,
    psi_two,
    rankin_bound,
)
from .constructions import (
    Certificate,
    HadamardMatrix,
    ResourceError,
    basis_config,
    hadamard_config,
    sylvester_hadamard,
)
from .lp_core import (
    InvalidInputError,
    PointConfig,
    ValidationReport,
    aggregate_norm,
    as_exponent,
    distance_p,
    norm_p,
    validate,
)
from .packing_search import SearchParams, SearchReport, empirical_N, penalty, search
from .phi_operator import (
    PhiNormReport,
    apply_phi,
    n2_identity_residual,
    phi_norm_estimate,
    phi_norm_exact,
    phi_norm_upper,
)

__version__ = "0.1.0"

__all__ = [
    "aggregate_norm",
    "apply_phi",
    "as_exponent",
    "basis_config",
    "BoundResult",
    "Certificate",
    "conjugate",
    "critical_radius",
    "distance_p",
    "DomainError",
    "empirical_N",
    "hadamard_config",
    "HadamardMatrix",
    "InvalidInputError",
    "n2_identity_residual",
    "norm_p",
    "penalty",
    "phi_norm_estimate",
    "phi_norm_exact",
    "phi_norm_upper",
    "PhiNormReport",
    "PointConfig",
    "psi",
    "psi_one",
    "psi_two",
    "rankin_bound",
    "ResourceError",
    "search",
    "SearchParams",
    "SearchReport",
    "sylvester_hadamard",
    "validate",
    "ValidationReport",
]
