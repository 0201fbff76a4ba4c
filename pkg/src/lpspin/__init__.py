"""so(k,m) Lie-Poisson spin dynamics realized on a canonical phase space.

The map ``J = 2(omega pi^T - pi omega^T)`` carries canonical brackets of
``(omega, pi)`` onto the Lie-Poisson bracket of ``so(k, m)``. Fixing the three
scalar products of ``omega`` and ``pi`` cuts out a surface whose image is the
spin surface; the leftover one-dimensional freedom is a gauge symmetry.
"""
from .algebra import (
    Signature,
    as_bivector,
    bivector_from_components,
    casimir_quadratic,
    lie_poisson_bracket,
    lie_poisson_matrix,
    so_structure_constants,
)
from .constraints import (
    MultiplierState,
    constraint_bracket_matrix,
    first_class_combination,
    resolve_multipliers,
)
from .dynamics import (
    GaugeProfile,
    Trajectory,
    integrate_constrained,
    integrate_lie_poisson,
    projection_equivalence,
)
from .fiber import fiber_reconstruct, membership, spin_surface_point
from .gauge import classify_case, finite_gauge_transform, infinitesimal_gauge
from .phasespace import (
    ConstraintParams,
    HamiltonianSpec,
    PhasePoint,
    constraints_eval,
    map_f,
    wedge,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintParams",
    "GaugeProfile",
    "HamiltonianSpec",
    "MultiplierState",
    "PhasePoint",
    "Signature",
    "Trajectory",
    "as_bivector",
    "bivector_from_components",
    "casimir_quadratic",
    "classify_case",
    "constraint_bracket_matrix",
    "constraints_eval",
    "fiber_reconstruct",
    "finite_gauge_transform",
    "first_class_combination",
    "infinitesimal_gauge",
    "integrate_constrained",
    "integrate_lie_poisson",
    "lie_poisson_bracket",
    "lie_poisson_matrix",
    "map_f",
    "membership",
    "projection_equivalence",
    "resolve_multipliers",
    "so_structure_constants",
    "spin_surface_point",
    "wedge",
]
