"""Preliminary mission design: epoch search over propellant estimates.

A mission is a chain of legs between bodies. Each leg's propellant is
estimated either by the rapid shaper (continuous thrust, best revolution
count) or by a two-impulse Keplerian arc (best revolution count and
branch). A particle swarm searches the departure/arrival epochs; mass is
carried across legs through the rocket equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .elements import Body, Epoch, propagate_body
from .lambert import LambertNoSolution, lambert_all
from .rapid import NoFeasibleRevolution, best_revolution
from .trajectory import (DegenerateShapeError, ShapedTrajectory, Spacecraft,
                         TrajectoryMetrics)

RAPID_SHAPE = "rapid_shape"
LAMBERT = "lambert"

# quadrature fidelity used inside epoch searches; final reporting uses
# the full default node counts
SEARCH_NODES = 500
SEARCH_PROBE_NODES = 150


@dataclass(frozen=True)
class PsoConfig:
    """Global-best particle swarm settings (constriction form)."""
    swarm: int = 20
    iters: int = 100
    seed: int = 0
    inertia: float = 0.7298
    cognitive: float = 1.49618
    social: float = 1.49618
    velocity_fraction: float = 0.2  # clamp, fraction of each bound span

    def __post_init__(self) -> None:
        if self.swarm < 1 or self.iters < 1:
            raise ValueError("swarm and iters must be at least 1")
        if not 0.0 < self.velocity_fraction <= 1.0:
            raise ValueError("velocity_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class LegSpec:
    """One transfer leg and the windows for its endpoint epochs."""
    from_body: Body
    to_body: Body
    t0_bounds: tuple[Epoch, Epoch]
    tf_bounds: tuple[Epoch, Epoch]
    estimator: str = RAPID_SHAPE

    def __post_init__(self) -> None:
        if self.estimator not in (RAPID_SHAPE, LAMBERT):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.t0_bounds[1].mjd < self.t0_bounds[0].mjd:
            raise ValueError("empty departure window")
        if self.tf_bounds[1].mjd < self.tf_bounds[0].mjd:
            raise ValueError("empty arrival window")
        if self.tf_bounds[1].mjd <= self.t0_bounds[0].mjd:
            raise ValueError("arrival window must extend past departure")


@dataclass(frozen=True)
class MissionSpec:
    """Chained legs with dwell times at intermediate arrivals.

    stay_days holds one entry per gap between consecutive legs: the dwell
    between arriving leg i and departing leg i+1. A scalar is broadcast
    to every gap.
    """
    legs: tuple[LegSpec, ...]
    spacecraft: Spacecraft
    stay_days: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.legs:
            raise ValueError("mission needs at least one leg")
        stays = self.stay_days
        if isinstance(stays, (int, float)):
            stays = (float(stays),) * (len(self.legs) - 1)
            object.__setattr__(self, "stay_days", stays)
        else:
            stays = tuple(float(v) for v in stays)
            object.__setattr__(self, "stay_days", stays)
        if len(self.stay_days) != len(self.legs) - 1:
            raise ValueError("need one stay per gap between legs")
        if any(v < 0.0 for v in self.stay_days):
            raise ValueError("stays must be nonnegative")


@dataclass(frozen=True)
class LegEstimate:
    delta_m_kg: float
    revs: int | None
    delta_v_mps: float
    metrics: TrajectoryMetrics | None = None
    trajectory: ShapedTrajectory | None = None  # None for impulsive legs

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.delta_m_kg)


INFEASIBLE_ESTIMATE = LegEstimate(delta_m_kg=math.inf, revs=None,
                                  delta_v_mps=math.inf)


def estimate_leg(leg: LegSpec, t0: Epoch, tf: Epoch, m_start: float,
                 sc: Spacecraft, nodes: int | None = None,
                 probe_nodes: int | None = None,
                 rev_range: tuple[int, int] | None = None) -> LegEstimate:
    """Propellant estimate for one leg at fixed endpoint epochs.

    Rapid-shape legs scan revolution counts of the continuous-thrust
    shape; two-impulse legs take the best Keplerian arc over revolution
    counts and branches. Infeasible geometry returns an infinite estimate
    so searches are driven away rather than aborted.
    """
    if tf.mjd <= t0.mjd:
        raise ValueError("arrival must follow departure")
    exhaust = sc.exhaust_velocity
    _, oe0, state0 = propagate_body(leg.from_body, t0)
    _, oef, statef = propagate_body(leg.to_body, tf)
    mu = leg.from_body.mu_central

    if leg.estimator == RAPID_SHAPE:
        try:
            choice = best_revolution(oe0, oef, t0, tf, mu,
                                     rev_range=rev_range, nodes=nodes,
                                     probe_nodes=probe_nodes)
        except (NoFeasibleRevolution, DegenerateShapeError):
            return INFEASIBLE_ESTIMATE
        dv = choice.metrics.delta_v_mps
        dm = m_start * (1.0 - math.exp(-dv / exhaust))
        return LegEstimate(delta_m_kg=dm, revs=choice.revs, delta_v_mps=dv,
                           metrics=choice.metrics,
                           trajectory=choice.trajectory)

    max_revs = rev_range[1] if rev_range is not None else None
    try:
        solutions = lambert_all(state0.r, statef.r, tf.seconds_from(t0), mu,
                                max_revs=max_revs)
    except (LambertNoSolution, ValueError):
        return INFEASIBLE_ESTIMATE
    best: LegEstimate | None = None
    for sol in solutions:
        dv = (float(np.linalg.norm(sol.v1_mps - state0.v))
              + float(np.linalg.norm(statef.v - sol.v2_mps)))
        dm = m_start * (1.0 - math.exp(-dv / exhaust))
        if best is None or dm < best.delta_m_kg:
            best = LegEstimate(delta_m_kg=dm, revs=sol.revs, delta_v_mps=dv)
    return best if best is not None else INFEASIBLE_ESTIMATE


def leg_departures(epochs: Sequence[float],
                   stay_days: Sequence[float]) -> list[float]:
    """Departure MJD of each leg: first epoch, then arrival plus dwell.

    Missing trailing dwell entries count as zero days.
    """
    deps = [epochs[0]]
    for i in range(len(epochs) - 2):
        stay = stay_days[i] if i < len(stay_days) else 0.0
        deps.append(epochs[i + 1] + stay)
    return deps


def leg_durations(epochs: Sequence[float],
                  stay_days: Sequence[float]) -> list[float]:
    """Flight days per leg (dwell excluded) from the epoch vector."""
    deps = leg_departures(epochs, stay_days)
    return [epochs[i + 1] - deps[i] for i in range(len(epochs) - 1)]


@dataclass(frozen=True)
class LegResult:
    index: int
    t_dep_mjd: float
    t_arr_mjd: float
    m_start_kg: float
    delta_m_kg: float
    m_end_kg: float
    revs: int | None
    delta_v_mps: float
    metrics: TrajectoryMetrics | None
    trajectory: ShapedTrajectory | None = None


def evaluate_mission(mission: MissionSpec, epochs: Sequence[float],
                     nodes: int | None = None,
                     probe_nodes: int | None = None) -> list[LegResult]:
    """Per-leg estimates along an epoch vector, mass carried across legs.

    epochs holds len(legs)+1 MJD values: the first departure and every
    arrival. Raises on chaining violations (a leg of nonpositive
    duration).
    """
    if len(epochs) != len(mission.legs) + 1:
        raise ValueError("need one epoch per leg boundary")
    deps = leg_departures(epochs, mission.stay_days)
    results: list[LegResult] = []
    mass = mission.spacecraft.m0_kg
    for i, leg in enumerate(mission.legs):
        dep, arr = deps[i], float(epochs[i + 1])
        if arr <= dep:
            raise ValueError(f"leg {i} duration is not positive "
                             f"(departure {dep} MJD, arrival {arr} MJD)")
        est = estimate_leg(leg, Epoch(dep), Epoch(arr), mass,
                           mission.spacecraft, nodes=nodes,
                           probe_nodes=probe_nodes)
        m_end = mass - est.delta_m_kg
        results.append(LegResult(
            index=i, t_dep_mjd=dep, t_arr_mjd=arr, m_start_kg=mass,
            delta_m_kg=est.delta_m_kg, m_end_kg=m_end, revs=est.revs,
            delta_v_mps=est.delta_v_mps, metrics=est.metrics,
            trajectory=est.trajectory))
        mass = m_end
        if not math.isfinite(mass):
            break
    return results


@dataclass(frozen=True)
class SearchResult:
    epochs_mjd: list[float]
    best_dm_kg: float
    history: list[float]  # best value after each iteration
    evaluations: int


def _epoch_bounds(mission: MissionSpec) -> tuple[np.ndarray, np.ndarray]:
    lo = [mission.legs[0].t0_bounds[0].mjd]
    hi = [mission.legs[0].t0_bounds[1].mjd]
    for leg in mission.legs:
        lo.append(leg.tf_bounds[0].mjd)
        hi.append(leg.tf_bounds[1].mjd)
    return np.asarray(lo), np.asarray(hi)


def _chain_project(x: np.ndarray, stays: Sequence[float],
                   lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Push each epoch up to honor dwell chaining, then re-clamp."""
    e = np.clip(x, lo, hi)
    for i in range(1, len(e)):
        floor = e[i - 1] + (stays[i - 1] if i - 1 < len(stays) else 0.0)
        if e[i] < floor:
            e[i] = min(floor, hi[i])
    return e


def pso_minimize(objective: Callable[[np.ndarray], float],
                 lower: np.ndarray, upper: np.ndarray, cfg: PsoConfig,
                 project: Callable[[np.ndarray], np.ndarray] | None = None,
                 ) -> tuple[np.ndarray, float, list[float]]:
    """Global-best particle swarm over a box, deterministic per seed.

    project, when given, maps a clamped position onto the feasible set
    before evaluation; positions are stored projected.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    span = upper - lower
    vmax = cfg.velocity_fraction * span
    rng = np.random.default_rng(cfg.seed)
    dim = len(lower)

    def repair(x: np.ndarray) -> np.ndarray:
        x = np.clip(x, lower, upper)
        return project(x) if project is not None else x

    pos = np.array([repair(lower + rng.random(dim) * span)
                    for _ in range(cfg.swarm)])
    vel = np.zeros_like(pos)
    pbest = pos.copy()
    pcost = np.array([objective(p) for p in pos])
    g = int(np.argmin(pcost))
    gbest, gcost = pbest[g].copy(), float(pcost[g])

    history: list[float] = []
    for _ in range(cfg.iters):
        for i in range(cfg.swarm):
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            vel[i] = (cfg.inertia * vel[i]
                      + cfg.cognitive * r1 * (pbest[i] - pos[i])
                      + cfg.social * r2 * (gbest - pos[i]))
            vel[i] = np.clip(vel[i], -vmax, vmax)
            pos[i] = repair(pos[i] + vel[i])
            cost = objective(pos[i])
            if cost < pcost[i]:
                pcost[i] = cost
                pbest[i] = pos[i].copy()
                if cost < gcost:
                    gcost = float(cost)
                    gbest = pos[i].copy()
        history.append(gcost)
    return gbest, gcost, history


def pso_search(mission: MissionSpec, cfg: PsoConfig,
               nodes: int = SEARCH_NODES,
               probe_nodes: int = SEARCH_PROBE_NODES,
               objective: Callable[[np.ndarray], float] | None = None,
               ) -> SearchResult:
    """Search the mission's epoch vector for minimum total propellant.

    The default objective sums leg estimates with mass carried across
    legs (reduced quadrature fidelity, see SEARCH_NODES); pass a custom
    objective to reuse the swarm machinery on another figure of merit.
    """
    lo, hi = _epoch_bounds(mission)
    evals = 0

    def mission_cost(x: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        deps = leg_departures(x, mission.stay_days)
        mass = mission.spacecraft.m0_kg
        total = 0.0
        for i, leg in enumerate(mission.legs):
            dep, arr = deps[i], float(x[i + 1])
            if arr <= dep:
                return math.inf
            est = estimate_leg(leg, Epoch(dep), Epoch(arr), mass,
                               mission.spacecraft, nodes=nodes,
                               probe_nodes=probe_nodes)
            if not est.feasible:
                return math.inf
            total += est.delta_m_kg
            mass -= est.delta_m_kg
        return total

    cost_fn = objective if objective is not None else mission_cost
    gbest, gcost, history = pso_minimize(
        cost_fn, lo, hi, cfg,
        project=lambda x: _chain_project(x, mission.stay_days, lo, hi))
    return SearchResult(epochs_mjd=[float(v) for v in gbest],
                        best_dm_kg=gcost, history=history, evaluations=evals)
