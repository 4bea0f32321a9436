"""Constrained quantum dynamics on the manifold of pure states.

Evaluates the Kähler structures of projective state space in an
action-angle chart, builds the metric-projected constrained flow and its
Lagrange multipliers, integrates trajectories, and runs the diagnostics
that decide whether the projected flow is Hamiltonian for a modified
symplectic structure.
"""

from .constraints import (
    Constraint,
    GramMatrix,
    algebraic_constraint,
    covariance_matrix,
    finite_difference_gradient,
    gram_covariance_check,
    gram_matrix,
    observable_constraint,
    two_constraint_determinant,
)
from .dynamics import (
    HamiltonianFunction,
    SpectrumData,
    Trajectory,
    constrained_field,
    exact_unitary_oracle,
    integrate,
    multipliers,
    schrodinger_field,
)
from .equivalence import (
    EquivalenceReport,
    annihilation_check,
    equivalence_report,
    j_invariance_residual,
    modified_symplectic,
    mu_tensor,
    single_constraint_orthogonality,
    tau_analysis,
)
from .errors import (
    ChartDomainError,
    ConfigError,
    DegenerateGeometryError,
    EigenstateDegenerateError,
    OffSurfaceError,
    SingularGramError,
)
from .geometry import (
    ChartPoint,
    PointGeometry,
    StateVector,
    chart_from_state,
    embed,
    embed_jacobian,
    embed_jacobian_fd,
    fubini_study_distance,
    geometry_at,
    nijenhuis_residual,
    nijenhuis_tensor,
    pullback_tensors,
    type_decompose,
)
from .systems import (
    AngularPoint,
    SystemDefinition,
    angular_oracle_field,
    diagonal_system,
    from_angular,
    product_surface_sample,
    pushforward_to_angular,
    sample_interior_point,
    single_spin_conserved_sx,
    system_from_name,
    to_angular,
    two_qubit_product_system,
)

__version__ = "0.1.0"

__all__ = [
    "AngularPoint",
    "ChartDomainError",
    "ChartPoint",
    "ConfigError",
    "Constraint",
    "DegenerateGeometryError",
    "EigenstateDegenerateError",
    "EquivalenceReport",
    "GramMatrix",
    "HamiltonianFunction",
    "OffSurfaceError",
    "PointGeometry",
    "SingularGramError",
    "SpectrumData",
    "StateVector",
    "SystemDefinition",
    "Trajectory",
    "algebraic_constraint",
    "angular_oracle_field",
    "annihilation_check",
    "chart_from_state",
    "constrained_field",
    "covariance_matrix",
    "diagonal_system",
    "embed",
    "embed_jacobian",
    "embed_jacobian_fd",
    "equivalence_report",
    "exact_unitary_oracle",
    "finite_difference_gradient",
    "from_angular",
    "fubini_study_distance",
    "geometry_at",
    "gram_covariance_check",
    "gram_matrix",
    "integrate",
    "j_invariance_residual",
    "modified_symplectic",
    "mu_tensor",
    "multipliers",
    "nijenhuis_residual",
    "nijenhuis_tensor",
    "observable_constraint",
    "product_surface_sample",
    "pullback_tensors",
    "pushforward_to_angular",
    "sample_interior_point",
    "schrodinger_field",
    "single_constraint_orthogonality",
    "single_spin_conserved_sx",
    "system_from_name",
    "tau_analysis",
    "to_angular",
    "two_constraint_determinant",
    "two_qubit_product_system",
    "type_decompose",
]
