"""Analytic shaping of multi-revolution low-thrust rendezvous trajectories.

Element histories between two osculating states are clamped cubic
splines in a swept-longitude parameter; the flight-time constraint is
solved in closed form through one free spline knot, thrust follows from
inverse dynamics, and higher layers optimize free knots under a thrust
ceiling or search departure/arrival epochs for whole missions.
"""
from .constrained import (ConstraintGrid, OptimizedShape, assemble_shape,
                          free_param_count, initial_guess_from_rapid,
                          optimize, penalized_objective, thrust_violations)
from .elements import (AU, DAY_S, G0, MU_SUN, YEAR_S, Body, CartesianState,
                       ClassicalElements, Epoch, Meoe, classical_to_meoe,
                       eccentric_to_true, meoe_to_cartesian,
                       meoe_to_classical, orbital_period, propagate_body,
                       solve_kepler, true_longitude_span, true_to_eccentric)
from .lambert import (LambertNoSolution, LambertSolution, lambert_all,
                      lambert_max_revs, solve_lambert)
from .mission import (LAMBERT, RAPID_SHAPE, LegEstimate, LegResult, LegSpec,
                      MissionSpec, PsoConfig, SearchResult, estimate_leg,
                      evaluate_mission, leg_departures, leg_durations,
                      pso_minimize, pso_search)
from .rapid import (BoundaryConditions, NoFeasibleRevolution,
                    RevolutionChoice, best_revolution, boundary_conditions,
                    default_p_min, shape_rapid)
from .splines import CubicSpline, add_splines, build_clamped_spline, two_segment_bump
from .timesolve import (FeasibilityReport, TimeQuadratic,
                        quadratic_coeffs_direct, quadratic_coeffs_sampled,
                        solve_free_knot)
from .trajectory import (DegenerateShapeError, PathGrid, PathSample,
                         ShapedTrajectory, Spacecraft, TrajectoryMetrics,
                         eval_grid, eval_state, mass_and_metrics,
                         mass_profile, transfer_time, with_feasibility)

__version__ = "0.1.0"

__all__ = [
    "AU", "DAY_S", "G0", "LAMBERT", "MU_SUN", "RAPID_SHAPE", "YEAR_S",
    "Body", "BoundaryConditions", "CartesianState", "ClassicalElements",
    "ConstraintGrid", "CubicSpline", "DegenerateShapeError", "Epoch",
    "FeasibilityReport", "LambertNoSolution", "LambertSolution",
    "LegEstimate", "LegResult", "LegSpec", "Meoe", "MissionSpec",
    "NoFeasibleRevolution", "OptimizedShape", "PathGrid", "PathSample",
    "PsoConfig", "RevolutionChoice", "SearchResult", "ShapedTrajectory",
    "Spacecraft", "TimeQuadratic", "TrajectoryMetrics", "add_splines",
    "assemble_shape", "best_revolution", "boundary_conditions",
    "build_clamped_spline", "classical_to_meoe", "default_p_min",
    "eccentric_to_true", "estimate_leg", "eval_grid", "eval_state",
    "evaluate_mission", "free_param_count", "initial_guess_from_rapid",
    "lambert_all", "lambert_max_revs", "leg_departures", "leg_durations",
    "mass_and_metrics", "mass_profile", "meoe_to_cartesian",
    "meoe_to_classical", "optimize", "orbital_period", "penalized_objective",
    "propagate_body", "pso_minimize", "pso_search",
    "quadratic_coeffs_direct", "quadratic_coeffs_sampled", "shape_rapid",
    "solve_free_knot", "solve_kepler", "thrust_violations", "transfer_time",
    "true_longitude_span", "true_to_eccentric", "two_segment_bump",
    "with_feasibility",
]
