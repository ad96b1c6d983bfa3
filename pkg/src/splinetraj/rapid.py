"""Fast analytic shaping between two osculating states.

Five elements follow single boundary-to-boundary cubics with zero end
slopes; the semi-latus rectum gets a midpoint knot chosen in closed form
so the shape meets the required flight time. A scan over candidate
revolution counts picks the cheapest transfer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import Epoch, Meoe, true_longitude_span
from .splines import build_clamped_spline
from .timesolve import (FeasibilityReport, quadratic_coeffs_direct,
                        solve_free_knot)
from .trajectory import (DegenerateShapeError, ShapedTrajectory, Spacecraft,
                         TrajectoryMetrics, mass_and_metrics, with_feasibility)


class NoFeasibleRevolution(ValueError):
    """No revolution count in the scan range admits a feasible shape."""


@dataclass(frozen=True)
class BoundaryConditions:
    """Osculating endpoint states and the transfer window."""
    oe0: Meoe
    oef: Meoe
    hmag0: float
    hmagf: float
    t0: Epoch
    tf: Epoch
    revs: int

    def __post_init__(self) -> None:
        if self.tf.mjd <= self.t0.mjd:
            raise ValueError("arrival epoch must follow departure epoch")
        if self.revs < 0:
            raise ValueError("revolution count must be nonnegative")
        if self.hmag0 <= 0.0 or self.hmagf <= 0.0:
            raise ValueError("angular momentum magnitudes must be positive")
        if self.sweep <= 0.0:
            raise ValueError("longitude sweep must be positive")

    @property
    def sweep(self) -> float:
        return true_longitude_span(self.oe0.L, self.oef.L, self.revs)

    @property
    def tof_sec(self) -> float:
        return self.tf.seconds_from(self.t0)


def boundary_conditions(oe0: Meoe, oef: Meoe, t0: Epoch, tf: Epoch,
                        revs: int, mu: float) -> BoundaryConditions:
    """Boundary data with angular momenta consistent with the endpoints."""
    return BoundaryConditions(
        oe0=oe0, oef=oef,
        hmag0=math.sqrt(mu * oe0.p), hmagf=math.sqrt(mu * oef.p),
        t0=t0, tf=tf, revs=revs)


@dataclass(frozen=True)
class RevolutionChoice:
    revs: int
    trajectory: ShapedTrajectory
    metrics: TrajectoryMetrics
    report: FeasibilityReport


def default_p_min(p0: float, pf: float) -> float:
    return 0.2 * min(p0, pf)


def shape_rapid(bc: BoundaryConditions, mu: float,
                p_min: float | None = None,
                nodes: int | None = None,
                ) -> tuple[ShapedTrajectory, FeasibilityReport]:
    """Shape one transfer; the free p knot comes from the time quadratic.

    When the quadratic has no admissible root the report says so and the
    midpoint knot falls back to the departure value, which keeps the
    boundary conditions but misses the flight time.
    """
    traj, report, _ = _shape_with_cost(bc, mu, p_min, nodes)
    return traj, report


def _shape_with_cost(bc: BoundaryConditions, mu: float,
                     p_min: float | None, nodes: int | None,
                     probe_nodes: int | None = None,
                     ) -> tuple[ShapedTrajectory, FeasibilityReport, float | None]:
    """shape_rapid plus the chosen root's delta-v when already evaluated.

    Avoids re-integrating the control history in revolution scans; the
    cost is None when root selection never needed a delta-v comparison.
    probe_nodes, when given, sets a cheaper quadrature for the root
    comparison only; the shape itself is unaffected.
    """
    oe0, oef = bc.oe0, bc.oef
    dL = bc.sweep
    if nodes is None:
        nodes = max(2000, 500 * (int(dL // (2.0 * math.pi)) + 1))
    if p_min is None:
        p_min = default_p_min(oe0.p, oef.p)

    pair = lambda y0, yf: build_clamped_spline([y0, yf])
    f_sp = pair(oe0.f, oef.f)
    g_sp = pair(oe0.g, oef.g)
    h_sp = pair(oe0.h, oef.h)
    k_sp = pair(oe0.k, oef.k)
    hm_sp = pair(bc.hmag0, bc.hmagf)

    # p(s) is the three-knot clamped spline through [p0, p1, pf]; spline
    # construction is linear in knot values, so p = gamma1 * p1 + gamma2
    gamma1_sp = build_clamped_spline([0.0, 1.0, 0.0])
    gamma2_sp = build_clamped_spline([oe0.p, 0.0, oef.p])

    def make_traj(p1: float) -> ShapedTrajectory:
        return ShapedTrajectory(
            p=build_clamped_spline([oe0.p, p1, oef.p]),
            f=f_sp, g=g_sp, h=h_sp, k=k_sp, hmag=hm_sp,
            L0=oe0.L, dL=dL, t0=bc.t0, tf=bc.tf, mu=mu)

    quad = quadratic_coeffs_direct(
        gamma1_sp.value, gamma2_sp.value, f_sp, g_sp, hm_sp,
        oe0.L, dL, 0.0, bc.tof_sec, nodes)

    costs: dict[float, float] = {}

    def delta_v_of(p1: float) -> float:
        try:
            dv = mass_and_metrics(make_traj(p1), None,
                                  probe_nodes or nodes).delta_v_mps
        except DegenerateShapeError:
            dv = math.inf
        costs[p1] = dv
        return dv

    report = solve_free_knot(quad, p_min, delta_v_of)
    p1 = report.chosen if report.chosen is not None else oe0.p
    return make_traj(p1), report, costs.get(p1)


def best_revolution(oe0: Meoe, oef: Meoe, t0: Epoch, tf: Epoch, mu: float,
                    rev_range: tuple[int, int] | None = None,
                    p_min: float | None = None,
                    nodes: int | None = None,
                    sc: Spacecraft | None = None,
                    probe_nodes: int | None = None) -> RevolutionChoice:
    """Scan revolution counts and keep the cheapest feasible shape.

    Infeasible or degenerate candidates are skipped; ties go to fewer
    revolutions. Raises NoFeasibleRevolution if nothing survives. The
    winner's metrics always use the full quadrature; probe_nodes, when
    given, lowers only the fidelity of the delta-v comparisons that rank
    candidates (useful inside epoch searches).
    """
    if rev_range is None:
        a0 = oe0.p / (1.0 - oe0.f**2 - oe0.g**2)
        period = 2.0 * math.pi * math.sqrt(a0**3 / mu)
        upper = math.ceil(1.5 * tf.seconds_from(t0) / period)
        rev_range = (0, upper)
    lo, hi = rev_range
    if lo < 0 or hi < lo:
        raise ValueError("revolution range must satisfy 0 <= lo <= hi")

    best: tuple[float, int, ShapedTrajectory, FeasibilityReport] | None = None
    for revs in range(lo, hi + 1):
        try:
            bc = boundary_conditions(oe0, oef, t0, tf, revs, mu)
            traj, report, cost = _shape_with_cost(bc, mu, p_min, nodes,
                                                  probe_nodes)
            if not report.feasible:
                continue
            if cost is None:
                cost = mass_and_metrics(traj, None,
                                        probe_nodes or nodes).delta_v_mps
        except (DegenerateShapeError, ValueError):
            continue
        if math.isinf(cost):
            continue
        if best is None or cost < best[0]:
            best = (cost, revs, traj, report)
    if best is None:
        raise NoFeasibleRevolution(
            f"no feasible shape for revolutions in [{lo}, {hi}]")
    _, revs, traj, report = best
    metrics = with_feasibility(mass_and_metrics(traj, sc, nodes),
                               report.delta_t, report.delta_p)
    return RevolutionChoice(revs=revs, trajectory=traj, metrics=metrics,
                            report=report)
