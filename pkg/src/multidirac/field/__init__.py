"""Implicit field equations: residuals, solvers and diagnostics."""
from .grid import DiagnosticsReport, GridState, MultiplierTrace, grid_derivative
from .klein_gordon import (ConvergenceTable, KGConfig, KGResult, analytic_solution, convergence_study,
                           discrete_energy, kg_section, solve_klein_gordon)
from .maxwell import (MaxwellSample, maxwell_residual, plane_wave, sample_analytic, sample_finite_difference,
                      witness_potential)
from .mechanics import (AffineConstraints, MechanicsModel, MechanicsResult, affine_vy1, contact_constraint,
                        free_particle, no_constraints, solve_nonholonomic_mechanics)
from .residuals import (GROUPS, LagrangeDiracVerdict, contract_closed_form, energy_conservation_check,
                        implicit_el_residual, lagrange_dirac_check, lagrange_dirac_on_state, partial_multivector)

__all__ = [
    "AffineConstraints", "ConvergenceTable", "DiagnosticsReport", "GROUPS", "GridState", "KGConfig", "KGResult",
    "LagrangeDiracVerdict", "MaxwellSample", "MechanicsModel", "MechanicsResult", "MultiplierTrace",
    "affine_vy1", "analytic_solution", "contact_constraint", "contract_closed_form", "convergence_study",
    "discrete_energy", "energy_conservation_check", "free_particle", "grid_derivative", "implicit_el_residual",
    "kg_section", "lagrange_dirac_check", "lagrange_dirac_on_state", "maxwell_residual", "no_constraints",
    "partial_multivector", "plane_wave", "sample_analytic", "sample_finite_difference",
    "solve_klein_gordon", "solve_nonholonomic_mechanics", "witness_potential",
]
