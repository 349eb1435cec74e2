"""Symplectic polar duality, quantum admissibility, capacities, geometric states and Gaussian beams."""

from .admissibility import (
    AdmissibilityReport,
    NarcowichReport,
    admissibility_report,
    admissible_by_inclusion,
    admissible_by_spectrum,
    admissible_by_tomography,
    covariance_ellipsoid,
    hardy_check,
    info_ellipsoid,
    is_quantum_blob,
    legendre_dual,
    narcowich_report,
    positivity_check,
    purity,
    rs_check,
)
from .beams import (
    BeamState,
    Hamiltonian,
    KineticPlusPotential,
    Quadratic,
    beam_propagate,
    beam_snapshots,
    blob_transport_check,
    flow,
    phase,
    variational_flow,
)
from .capacity import CapacityResult, capacity_dual, capacity_ellipsoid, cmax_product, state_capacities
from .ellipsoid import (
    Ellipsoid,
    Subspace,
    ball,
    contains,
    intersect_subspace,
    john_of_product,
    loewner_of_product,
    mahler_volume,
    plane_section_area,
    plane_section_symplectic_area,
    polar_dual,
    project,
    symplectic_polar_dual,
    volume,
)
from .errors import DomainError, NumericalError, SympolarError
from .lagrangian import (
    GaussianState,
    GeometricState,
    LagrangianFrame,
    LagrangianPlane,
    MixedGeometricState,
    act,
    act_affine,
    canonical_form,
    from_gaussian,
    john_of_state,
    lagrangian_polar_dual,
    metaplectic_act,
    to_gaussian,
    wigner_matrix,
)
from .symplectic import (
    complete_symplectic_basis,
    is_symplectic,
    pre_iwasawa,
    standard_J,
    symplectic_eigenvalues,
    williamson,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BeamState",
    "CapacityResult",
    "DomainError",
    "Ellipsoid",
    "GaussianState",
    "GeometricState",
    "Hamiltonian",
    "KineticPlusPotential",
    "LagrangianFrame",
    "LagrangianPlane",
    "MixedGeometricState",
    "NarcowichReport",
    "NumericalError",
    "Quadratic",
    "Subspace",
    "SympolarError",
    "act",
    "act_affine",
    "admissibility_report",
    "admissible_by_inclusion",
    "admissible_by_spectrum",
    "admissible_by_tomography",
    "ball",
    "beam_propagate",
    "beam_snapshots",
    "blob_transport_check",
    "canonical_form",
    "capacity_dual",
    "capacity_ellipsoid",
    "cmax_product",
    "complete_symplectic_basis",
    "contains",
    "covariance_ellipsoid",
    "flow",
    "from_gaussian",
    "hardy_check",
    "info_ellipsoid",
    "intersect_subspace",
    "is_quantum_blob",
    "is_symplectic",
    "john_of_product",
    "john_of_state",
    "lagrangian_polar_dual",
    "legendre_dual",
    "loewner_of_product",
    "mahler_volume",
    "metaplectic_act",
    "narcowich_report",
    "phase",
    "plane_section_area",
    "plane_section_symplectic_area",
    "polar_dual",
    "positivity_check",
    "pre_iwasawa",
    "project",
    "purity",
    "rs_check",
    "standard_J",
    "state_capacities",
    "symplectic_eigenvalues",
    "symplectic_polar_dual",
    "to_gaussian",
    "variational_flow",
    "volume",
    "wigner_matrix",
    "williamson",
]
