"""Thrust-constrained shaping with n uniform segments per element.

All six element histories become clamped cubic splines on one uniform
knot grid. Each evaluation eliminates the first interior knot of the
semi-latus rectum analytically through the flight-time quadratic; the
remaining interior knots are decision variables for a derivative-free
local optimizer that minimizes propellant subject to a thrust ceiling
enforced at equally spaced path points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .rapid import BoundaryConditions, default_p_min, shape_rapid
from .splines import build_clamped_spline
from .timesolve import (FeasibilityReport, quadratic_coeffs_sampled,
                        solve_free_knot)
from .trajectory import (DegenerateShapeError, ShapedTrajectory, Spacecraft,
                         TrajectoryMetrics, eval_grid, mass_and_metrics,
                         mass_profile, with_feasibility)

PENALTY_RHO = 1.0e4  # kg per unit of feasibility shortfall
DEFAULT_TOL_REL = 1.0e-4
DEFAULT_MAX_EVALS = 5000


@dataclass(frozen=True)
class ConstraintGrid:
    """Equally spaced thrust-check points: c per segment plus s = 0."""
    n: int
    c: int

    def __post_init__(self) -> None:
        if self.n < 2 or self.c < 1:
            raise ValueError("need n >= 2 segments and c >= 1 checks each")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n * self.c + 1)


def free_param_count(n: int) -> int:
    """Interior knots of six splines, less the time-solved p knot."""
    return 6 * (n - 1) - 1


def _split_params(z: np.ndarray, n: int) -> tuple[np.ndarray, ...]:
    m = n - 1
    zp = z[:m - 1]
    rest = z[m - 1:]
    return (zp,) + tuple(rest[i * m:(i + 1) * m] for i in range(5))


def assemble_shape(bc: BoundaryConditions, z, n: int, mu: float,
                   p_min: float | None = None, nodes: int | None = None,
                   probe_nodes: int | None = None,
                   ) -> tuple[ShapedTrajectory, FeasibilityReport]:
    """Build the six-spline trajectory for one free-parameter vector.

    z holds the interior knots [p(2/n)..p((n-1)/n)] then the n-1
    interiors of f, g, h, k, hmag. The remaining p knot at s = 1/n comes
    from three probe evaluations of the flight-time quadrature, which is
    exactly quadratic in that knot. With no admissible root it falls
    back to the departure value and the report carries the shortfalls.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (free_param_count(n),):
        raise ValueError(f"expected {free_param_count(n)} free parameters "
                         f"for n={n}, got shape {z.shape}")
    oe0, oef = bc.oe0, bc.oef
    dL = bc.sweep
    if nodes is None:
        nodes = max(2000, 500 * (bc.revs + 1))
    if p_min is None:
        p_min = default_p_min(oe0.p, oef.p)
    zp, zf, zg, zh, zk, zhm = _split_params(z, n)

    f_sp = build_clamped_spline([oe0.f, *zf, oef.f])
    g_sp = build_clamped_spline([oe0.g, *zg, oef.g])
    h_sp = build_clamped_spline([oe0.h, *zh, oef.h])
    k_sp = build_clamped_spline([oe0.k, *zk, oef.k])
    hm_sp = build_clamped_spline([bc.hmag0, *zhm, bc.hmagf])

    s = np.linspace(0.0, 1.0, nodes + 1)
    hm = hm_sp.value(s)
    L = oe0.L + s * dL
    w = 1.0 + f_sp.value(s) * np.cos(L) + g_sp.value(s) * np.sin(L)
    if np.any(hm <= 0.0) or np.any(w <= 0.0):
        raise DegenerateShapeError(
            "time integrand undefined: hmag and the longitude equation "
            "denominator must stay positive")
    weight = dL / (hm * w**2)

    def p_spline(p1: float):
        return build_clamped_spline([oe0.p, p1, *zp, oef.p])

    def time_of(p1: float) -> float:
        return float(np.trapezoid(p_spline(p1).value(s)**2 * weight, s))

    p_next = float(zp[0]) if n >= 3 else oef.p
    quad = quadratic_coeffs_sampled(time_of, oe0.p, p_next, 0.0, bc.tof_sec)

    def make_traj(p1: float) -> ShapedTrajectory:
        return ShapedTrajectory(p=p_spline(p1), f=f_sp, g=g_sp, h=h_sp,
                                k=k_sp, hmag=hm_sp, L0=oe0.L, dL=dL,
                                t0=bc.t0, tf=bc.tf, mu=mu)

    def delta_v_of(p1: float) -> float:
        try:
            return mass_and_metrics(make_traj(p1), None,
                                    probe_nodes or nodes).delta_v_mps
        except DegenerateShapeError:
            return math.inf

    report = solve_free_knot(quad, p_min, delta_v_of)
    p1 = report.chosen if report.chosen is not None else oe0.p
    return make_traj(p1), report


def penalized_objective(traj: ShapedTrajectory, report: FeasibilityReport,
                        sc: Spacecraft, nodes: int | None = None) -> float:
    """Propellant mass plus linear penalties on feasibility shortfalls."""
    metrics = mass_and_metrics(traj, sc, nodes)
    dm = sc.m0_kg - metrics.m_final_kg
    return (dm - PENALTY_RHO * min(report.delta_t, 0.0)
            - PENALTY_RHO * min(report.delta_p, 0.0))


def thrust_violations(traj: ShapedTrajectory, sc: Spacecraft,
                      grid: ConstraintGrid, nodes: int | None = None,
                      ) -> list[tuple[float, float]]:
    """(s, thrust - t_max) at each check point; positive means violated.

    Control acceleration is exact at the points; mass interpolates the
    forward quadrature on the fine grid.
    """
    pts = grid.points
    path = eval_grid(traj, pts)
    s_fine, m_fine = mass_profile(traj, sc, nodes)
    mass = np.interp(pts, s_fine, m_fine)
    thrust = mass * path.u_norm
    return [(float(sv), float(tv - sc.t_max_n))
            for sv, tv in zip(pts, thrust)]


def initial_guess_from_rapid(bc: BoundaryConditions, mu: float, n: int,
                             p_min: float | None = None,
                             nodes: int | None = None) -> np.ndarray:
    """Free parameters sampled from the two-segment rapid shape."""
    traj, _ = shape_rapid(bc, mu, p_min=p_min, nodes=nodes)
    si = np.arange(1, n) / n
    return np.concatenate([
        traj.p.value(np.arange(2, n) / n),
        traj.f.value(si), traj.g.value(si), traj.h.value(si),
        traj.k.value(si), traj.hmag.value(si)])


@dataclass(frozen=True)
class OptimizedShape:
    trajectory: ShapedTrajectory
    metrics: TrajectoryMetrics
    report: FeasibilityReport
    objective_kg: float
    init_objective_kg: float
    evaluations: int
    capped: bool
    feasible: bool  # discrete thrust constraints met at the returned point


def optimize(bc: BoundaryConditions, sc: Spacecraft, mu: float, n: int,
             c: int, init: np.ndarray | None = None,
             tol_rel: float = DEFAULT_TOL_REL,
             max_evals: int = DEFAULT_MAX_EVALS,
             p_min: float | None = None, nodes: int | None = None,
             probe_nodes: int | None = None, opt_nodes: int | None = None,
             rhobeg: float = 0.5, restarts: int = 12) -> OptimizedShape:
    """Minimize propellant over the free knots under the thrust ceiling.

    Boundary osculation and the flight time hold analytically at every
    iterate, so the optimizer only sees the free interior knots (scaled
    to comparable magnitudes) and the discrete thrust constraints. Runs
    linear-approximation trust-region rounds, restarting from the best
    point with a halved initial radius whenever a round stalls, until
    the evaluation budget or the restart cap is spent. The best point
    seen is returned, never worse than the initial guess; feasible
    points are preferred over lower penalized objectives.

    nodes sets the fidelity of the returned metrics; opt_nodes (default
    min(nodes, 1200)) the cheaper quadrature used inside the search.
    """
    grid = ConstraintGrid(n=n, c=c)
    if nodes is None:
        nodes = max(2000, 500 * (bc.revs + 1))
    if opt_nodes is None:
        opt_nodes = min(nodes, 1200)
    if probe_nodes is None:
        probe_nodes = min(opt_nodes, 300)
    if init is None:
        init = initial_guess_from_rapid(bc, mu, n, p_min=p_min, nodes=nodes)
    init = np.asarray(init, dtype=float)

    p_scale = 0.5 * (bc.oe0.p + bc.oef.p)
    hm_scale = 0.5 * (bc.hmag0 + bc.hmagf)
    m = n - 1
    scales = np.concatenate([
        np.full(m - 1, p_scale), np.ones(4 * m), np.full(m, hm_scale)])

    s_fine = np.linspace(0.0, 1.0, opt_nodes + 1)
    pts = grid.points
    exhaust = sc.exhaust_velocity
    cache: dict[bytes, tuple[float, np.ndarray]] = {}
    evals = 0
    bad_cons = np.full(len(pts), -1.0)

    def evaluate(zs: np.ndarray) -> tuple[float, np.ndarray]:
        """Penalized objective and scaled thrust margins at one point."""
        nonlocal evals
        key = zs.tobytes()
        hit = cache.get(key)
        if hit is not None:
            return hit
        evals += 1
        try:
            traj, report = assemble_shape(bc, zs * scales, n, mu,
                                          p_min=p_min, nodes=opt_nodes,
                                          probe_nodes=probe_nodes)
            path = eval_grid(traj, s_fine)
            dv_density = path.u_norm * path.t_prime
            dv_cum = np.concatenate((
                [0.0], np.cumsum(np.diff(s_fine)
                                 * 0.5 * (dv_density[1:] + dv_density[:-1]))))
            dm = sc.m0_kg * (1.0 - math.exp(-dv_cum[-1] / exhaust))
            cost = (dm - PENALTY_RHO * min(report.delta_t, 0.0)
                    - PENALTY_RHO * min(report.delta_p, 0.0))
            mass = sc.m0_kg * np.exp(-np.interp(pts, s_fine, dv_cum)
                                     / exhaust)
            thrust = mass * eval_grid(traj, pts).u_norm
            cons = (sc.t_max_n - thrust) / sc.t_max_n
        except DegenerateShapeError:
            cost, cons = 1.0e12, bad_cons
        out = (cost, cons)
        cache[key] = out
        return out

    best: dict[str, tuple[float, np.ndarray] | None] = {
        "feasible": None, "any": None}

    def note(zs: np.ndarray, cost: float, cons: np.ndarray) -> None:
        if best["any"] is None or cost < best["any"][0]:
            best["any"] = (cost, zs.copy())
        if np.all(cons >= -1e-9):
            if best["feasible"] is None or cost < best["feasible"][0]:
                best["feasible"] = (cost, zs.copy())

    def objective(zs: np.ndarray) -> float:
        cost, cons = evaluate(zs)
        note(zs, cost, cons)
        return cost

    def incumbent() -> tuple[float, np.ndarray]:
        return (best["feasible"] if best["feasible"] is not None
                else best["any"])

    z0 = init / scales
    init_cost, init_cons = evaluate(z0)
    note(z0, init_cost, init_cons)

    x = z0
    rho = rhobeg
    capped = False
    for _ in range(restarts):
        left = max_evals - evals
        if left <= 1:
            capped = True
            break
        before = incumbent()[0]
        res = minimize(objective, x, method="COBYLA",
                       constraints=[{"type": "ineq",
                                     "fun": lambda zs: evaluate(zs)[1]}],
                       tol=tol_rel,
                       options={"rhobeg": rho, "maxiter": left})
        after, x = incumbent()
        if res.nfev >= left:
            # the round consumed its whole allowance; only cache credit
            # remains, so the budget ended the search unless a later
            # round stops on its own
            capped = True
            continue
        capped = False
        gain = before - after
        if res.nfev < 10 or gain <= tol_rel * max(abs(after), 1.0):
            break
        rho = max(0.5 * rho, 0.05)

    cost_star, z_star = incumbent()
    traj, report = assemble_shape(bc, z_star * scales, n, mu, p_min=p_min,
                                  nodes=nodes, probe_nodes=probe_nodes)
    _, cons_star = evaluate(z_star)
    metrics = with_feasibility(mass_and_metrics(traj, sc, nodes),
                               report.delta_t, report.delta_p)
    return OptimizedShape(
        trajectory=traj, metrics=metrics, report=report,
        objective_kg=float(cost_star), init_objective_kg=float(init_cost),
        evaluations=evals, capped=capped or evals >= max_evals,
        feasible=bool(np.all(cons_star >= -1e-9)))
