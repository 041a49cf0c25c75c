"""Planar piecewise-smooth systems: event-driven simulation and focus boundary-equilibrium
bifurcation analysis for impacting, Filippov and sweeping-process models."""

from .bifurcation import (BifurcationReport, ReducedCycle, ReducedHybridSystem, build_reduced,
                          check_filippov, check_impacting, check_sweeping, check_system,
                          confirm_cycle, convergence_study, reduced_cycle, return_time_map,
                          transversality)
from .boundary import (check_outward_condition, classify_point,
                       filippov_pseudo_equilibrium_derivative, solve_filippov_pseudo_equilibrium,
                       solve_sweeping_boundary_equilibrium, solve_tangency,
                       sweeping_equilibrium_derivative, tangency_derivative)
from .builtins import filippov_normal_form, make_builtin, neuron, sweeping_halfplane
from .config import parse_config, render
from .integrate import (IntegratorOptions, Trajectory, catch_up, filippov_sliding_field,
                        integrate_smooth, locate_event, simulate_filippov, simulate_impacting,
                        simulate_sweeping, sweeping_sliding_field, sweeping_step)
from .model import (FilippovSystem, ImpactingSystem, SweepingProcess, SwitchingSurface,
                    VectorField2, rotate_to_normal_form, validate_setup)
from .normal_form import (AxisSpec, filippov_region_test, neuron_region_test, psi, region_grid,
                          solve_return_point, sweeping_region_test, sweeping_threshold)

__version__ = "0.1.0"

__all__ = [
    "BifurcationReport",
    "ReducedCycle",
    "ReducedHybridSystem",
    "build_reduced",
    "check_filippov",
    "check_impacting",
    "check_sweeping",
    "check_system",
    "confirm_cycle",
    "convergence_study",
    "reduced_cycle",
    "return_time_map",
    "transversality",
    "check_outward_condition",
    "classify_point",
    "filippov_pseudo_equilibrium_derivative",
    "solve_filippov_pseudo_equilibrium",
    "solve_sweeping_boundary_equilibrium",
    "solve_tangency",
    "sweeping_equilibrium_derivative",
    "tangency_derivative",
    "filippov_normal_form",
    "make_builtin",
    "neuron",
    "sweeping_halfplane",
    "parse_config",
    "render",
    "IntegratorOptions",
    "Trajectory",
    "catch_up",
    "filippov_sliding_field",
    "integrate_smooth",
    "locate_event",
    "simulate_filippov",
    "simulate_impacting",
    "simulate_sweeping",
    "sweeping_sliding_field",
    "sweeping_step",
    "FilippovSystem",
    "ImpactingSystem",
    "SweepingProcess",
    "SwitchingSurface",
    "VectorField2",
    "rotate_to_normal_form",
    "validate_setup",
    "AxisSpec",
    "filippov_region_test",
    "neuron_region_test",
    "psi",
    "region_grid",
    "solve_return_point",
    "sweeping_region_test",
    "sweeping_threshold",
]
