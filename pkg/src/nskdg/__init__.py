"""Energy-consistent DG solver for 1D isothermal Korteweg-type flow."""

from ._accel import BACKEND
from .driver import (CustomIC, DiagnosticsRow, EocRow, EocTable, ErrorTracker,
                     RunConfig, RunResult, StepIC, TanhSteady, eoc_sweep,
                     n_time_steps, run)
from .mesh import Face, Mesh1D, build_uniform, faces
from .physics import (DoubleWell, PhysParams, energy, mass, momentum,
                      pressure, steady_tanh, step_ic)
from .scheme import (AuditReport, FluxFamily, SchemeConfig, StepAssembler,
                     StepState, UnknownVector, assemble_jacobian,
                     assemble_residual, audit_flux_conditions, flux_f1,
                     flux_f2, flux_f3, flux_f4, get_layout, lift_gradient,
                     sigma_min, sip_form, sip_matrix)
from .solver import (NewtonConfig, NonConvergence, SingularLinearSystem,
                     SolveReport, linear_solve, newton_solve)
from .space import (DgSpace, FieldCoeffs, QuadratureRule, TracePair,
                    gauss_legendre, gauss_lobatto_nodes, jump_avg,
                    l2_project, lagrange_basis, lagrange_basis_deriv, trace)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Mesh1D", "Face", "build_uniform", "faces",
    "DgSpace", "FieldCoeffs", "QuadratureRule", "TracePair",
    "gauss_legendre", "gauss_lobatto_nodes", "jump_avg", "l2_project",
    "lagrange_basis", "lagrange_basis_deriv", "trace",
    "DoubleWell", "PhysParams", "energy", "mass", "momentum", "pressure",
    "steady_tanh", "step_ic",
    "AuditReport", "FluxFamily", "SchemeConfig", "StepAssembler", "StepState",
    "UnknownVector", "assemble_jacobian", "assemble_residual",
    "audit_flux_conditions", "flux_f1", "flux_f2", "flux_f3", "flux_f4",
    "get_layout", "lift_gradient", "sigma_min", "sip_form", "sip_matrix",
    "NewtonConfig", "NonConvergence", "SingularLinearSystem", "SolveReport",
    "linear_solve", "newton_solve",
    "CustomIC", "DiagnosticsRow", "EocRow", "EocTable", "ErrorTracker",
    "RunConfig", "RunResult", "StepIC", "TanhSteady", "eoc_sweep",
    "n_time_steps", "run",
    "__version__",
]
