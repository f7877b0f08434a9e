"""Seed-reproducible corner-growth / exclusion-process simulation toolkit."""

from .competition import (InterfaceTrace, Label, LabelGrid, angle_estimate,
                          competition_interface, f_of_theta,
                          interface_trace_hashed, label_clusters, psi_at,
                          speed_point, theta_cdf)
from .errors import (ClockCollision, CouplingViolation, IncompleteRectangle,
                     OutOfGrid, OutOfHorizon, RectangleTooLarge,
                     SimulationError, TieDetected, Truncated, WindowBreach)
from .exclusion import (ClockSet, CouplingReport, DrivenTrajectory,
                        ExclusionState, HarrisResult, coupling_map,
                        harris_simulate, initial_config, lpp_driven_simulate,
                        splice_clocks, staircase_boundary, verify_coupling)
from .geodesics import (GeodesicPath, GeodesicTree, coalescence_point,
                        curvature_gap, directional_geodesic, geodesic,
                        geodesic_tree, real_point_target, shape_fluctuation,
                        transversal_deviation)
from .lpp import (PassageGrid, brute_force_passage, build_grid,
                  build_grid_from_array, growth_interface, passage_last_row,
                  shape_mu)
from .stats import ExperimentReport, ks_statistic, run_experiment
from .weights import WeightField, weight_at

__version__ = "0.1.0"

__all__ = [
    "WeightField", "weight_at",
    "PassageGrid", "build_grid", "build_grid_from_array",
    "brute_force_passage", "growth_interface", "passage_last_row", "shape_mu",
    "Label", "LabelGrid", "InterfaceTrace", "label_clusters",
    "competition_interface", "interface_trace_hashed", "psi_at",
    "angle_estimate", "theta_cdf", "f_of_theta", "speed_point",
    "GeodesicPath", "GeodesicTree", "geodesic", "geodesic_tree",
    "real_point_target", "directional_geodesic", "coalescence_point",
    "transversal_deviation", "shape_fluctuation", "curvature_gap",
    "ClockSet", "ExclusionState", "HarrisResult", "DrivenTrajectory",
    "CouplingReport", "initial_config", "harris_simulate",
    "lpp_driven_simulate", "splice_clocks", "coupling_map",
    "verify_coupling", "staircase_boundary",
    "ExperimentReport", "ks_statistic", "run_experiment",
    "SimulationError", "TieDetected", "RectangleTooLarge", "Truncated",
    "OutOfHorizon", "OutOfGrid", "WindowBreach", "IncompleteRectangle",
    "ClockCollision", "CouplingViolation",
]
