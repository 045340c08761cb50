"""Holistic finite-difference discretisation of Burgers' equation with boundary closures."""

from .assembly import DomainConfig, HolisticOperator, assemble, rhs, spectral_bound
from .closures import (
    CORRECTED,
    DIRICHLET,
    NEUMANN,
    PRINTED,
    BoundarySignal,
    BoundarySpec,
    ClosureTables,
    boundary_rhs,
    closure_for,
    dirichlet_closure,
    mirror_closure,
    neumann_midpoint_closure,
    resolve_signs,
)
from .integrate import BlowUpError, IntegratorConfig, integrate, rk4_step
from .interior import equivalent_pde_rhs, interior_rhs, subgrid_field
from .oracles import (
    KinkProblem,
    convergence_study,
    fit_order,
    kink_solution,
    reference_solve,
    verify_structural,
)
from .stencil import BandedMatrix, GridField, centred_difference

__version__ = "0.1.0"
