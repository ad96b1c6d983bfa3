"""Shaped-trajectory evaluation: states, controls, time, mass, metrics.

A shaped trajectory is six splines over the normalized path variable
s in [0, 1]: the five slow equinoctial elements plus the magnitude of
orbital angular momentum, with true longitude linear in s
(L = L0 + s*dL). The angular-momentum spline ties s to physical time
through ds/dt = hmag / (r^2 * dL).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .elements import G0, Epoch, Meoe
from .partials import (
    position_grid,
    position_partials_grid,
    position_second_partials_grid,
    radius_partials_grid,
)
from .splines import CubicSpline


class DegenerateShapeError(ValueError):
    """Shape leaves the physical domain (radius, p, or hmag not positive)."""


@dataclass(frozen=True)
class Spacecraft:
    """Propulsion and mass data. SI units."""
    m0_kg: float
    isp_s: float
    t_max_n: float

    def __post_init__(self) -> None:
        if self.m0_kg <= 0 or self.isp_s <= 0 or self.t_max_n <= 0:
            raise ValueError("spacecraft parameters must be positive")

    @property
    def exhaust_velocity(self) -> float:
        return self.isp_s * G0


@dataclass(frozen=True)
class ShapedTrajectory:
    """Six element splines plus the longitude sweep and endpoints."""
    p: CubicSpline
    f: CubicSpline
    g: CubicSpline
    h: CubicSpline
    k: CubicSpline
    hmag: CubicSpline
    L0: float
    dL: float
    t0: Epoch
    tf: Epoch
    mu: float

    @property
    def revolutions(self) -> int:
        return int(self.dL // (2.0 * np.pi))

    def default_nodes(self) -> int:
        return max(2000, 500 * (self.revolutions + 1))

    def elements_at(self, s) -> np.ndarray:
        """Stacked [p, f, g, h, k, L] rows for samples of s."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.stack([
            self.p.value(s), self.f.value(s), self.g.value(s),
            self.h.value(s), self.k.value(s), self.L0 + s * self.dL,
        ], axis=-1)


@dataclass(frozen=True)
class PathSample:
    """Full state at one path point."""
    s: float
    t_sec: float  # elapsed since departure
    L_rad: float
    r_m: np.ndarray
    v_mps: np.ndarray
    a_mps2: np.ndarray
    u_mps2: np.ndarray  # thrust acceleration
    t_prime: float  # dt/ds


@dataclass(frozen=True)
class PathGrid:
    """Vectorized samples along increasing s (t measured from s[0])."""
    s: np.ndarray
    t_sec: np.ndarray
    L_rad: np.ndarray
    r_m: np.ndarray
    v_mps: np.ndarray
    a_mps2: np.ndarray
    u_mps2: np.ndarray
    t_prime: np.ndarray

    @property
    def u_norm(self) -> np.ndarray:
        return np.linalg.norm(self.u_mps2, axis=-1)


@dataclass(frozen=True)
class TrajectoryMetrics:
    delta_v_mps: float
    u_max_mps2: float
    m_final_kg: float | None = None
    thrust_max_n: float | None = None
    delta_t: float | None = None
    delta_p: float | None = None


def eval_grid(traj: ShapedTrajectory, s) -> PathGrid:
    """Evaluate kinematics, control, and time density on an s grid.

    Elapsed time integrates dt/ds by trapezoid over the given grid, so it
    is relative to the first sample.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    oe = np.empty((len(s), 6))
    d1 = np.empty_like(oe)
    d2 = np.empty_like(oe)
    for j, sp in enumerate((traj.p, traj.f, traj.g, traj.h, traj.k)):
        oe[:, j] = sp.value(s)
        d1[:, j] = sp.deriv1(s)
        d2[:, j] = sp.deriv2(s)
    oe[:, 5] = traj.L0 + s * traj.dL
    d1[:, 5] = traj.dL
    d2[:, 5] = 0.0
    hm = traj.hmag.value(s)
    hm1 = traj.hmag.deriv1(s)

    p, f, g = oe[:, 0], oe[:, 1], oe[:, 2]
    w = 1.0 + f * np.cos(oe[:, 5]) + g * np.sin(oe[:, 5])
    if np.any(p <= 0.0) or np.any(w <= 0.0) or np.any(hm <= 0.0):
        raise DegenerateShapeError(
            "shape leaves the physical domain (p, hmag, and the longitude "
            "equation denominator must stay positive)")

    args = (oe[:, 0], oe[:, 1], oe[:, 2], oe[:, 3], oe[:, 4], oe[:, 5])
    rv = position_grid(*args)
    jac = position_partials_grid(*args)
    hess = position_second_partials_grid(*args)
    drad = radius_partials_grid(*args)

    radius = p / w
    s_dot = hm / (radius**2 * traj.dL)
    # chain rule for the path accel: s'' = s_dot/(r^2 dL) * (hmag' - 2 hmag/r * dr/ds)
    drad_ds = np.einsum("mj,mj->m", drad, d1)
    s_ddot = s_dot / (radius**2 * traj.dL) * (hm1 - 2.0 * hm / radius * drad_ds)

    jd1 = np.einsum("mcj,mj->mc", jac, d1)
    jd2 = np.einsum("mcj,mj->mc", jac, d2)
    curv = np.einsum("mi,mcij,mj->mc", d1, hess, d1)
    v = s_dot[:, None] * jd1
    a = s_ddot[:, None] * jd1 + (s_dot**2)[:, None] * (jd2 + curv)
    u = a + traj.mu * rv / radius[:, None] ** 3

    t_prime = radius**2 * traj.dL / hm
    t_sec = np.concatenate((
        [0.0],
        np.cumsum(0.5 * (t_prime[1:] + t_prime[:-1]) * np.diff(s)),
    ))
    return PathGrid(s=s, t_sec=t_sec, L_rad=oe[:, 5], r_m=rv, v_mps=v,
                    a_mps2=a, u_mps2=u, t_prime=t_prime)


def eval_state(traj: ShapedTrajectory, s: float, nodes: int | None = None) -> PathSample:
    """Single-point state; elapsed time integrated from s = 0."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    nodes = nodes if nodes is not None else traj.default_nodes()
    count = max(2, int(np.ceil(nodes * s)) + 1) if s > 0.0 else 2
    grid = eval_grid(traj, np.linspace(0.0, max(s, 0.0), count) if s > 0.0
                     else np.array([0.0, 0.0]))
    i = -1 if s > 0.0 else 0
    return PathSample(
        s=s, t_sec=float(grid.t_sec[i]) if s > 0.0 else 0.0,
        L_rad=float(grid.L_rad[i]), r_m=grid.r_m[i], v_mps=grid.v_mps[i],
        a_mps2=grid.a_mps2[i], u_mps2=grid.u_mps2[i],
        t_prime=float(grid.t_prime[i]))


def transfer_time(traj: ShapedTrajectory, nodes: int | None = None) -> float:
    """Total flight time in seconds by trapezoid quadrature of dt/ds.

    `nodes` counts trapezoid intervals (nodes + 1 sample points).
    """
    nodes = nodes if nodes is not None else traj.default_nodes()
    s = np.linspace(0.0, 1.0, nodes + 1)
    p = traj.p.value(s)
    f = traj.f.value(s)
    g = traj.g.value(s)
    hm = traj.hmag.value(s)
    L = traj.L0 + s * traj.dL
    w = 1.0 + f * np.cos(L) + g * np.sin(L)
    if np.any(p <= 0.0) or np.any(w <= 0.0) or np.any(hm <= 0.0):
        raise DegenerateShapeError(
            "shape leaves the physical domain (p, hmag, and the longitude "
            "equation denominator must stay positive)")
    t_prime = (p / w) ** 2 * traj.dL / hm
    return float(np.trapezoid(t_prime, s))


def mass_and_metrics(traj: ShapedTrajectory, sc: Spacecraft | None = None,
                     nodes: int | None = None) -> TrajectoryMetrics:
    """Integral metrics over the whole path.

    delta-v is the time-weighted path integral of the control magnitude;
    final mass follows from the rocket equation. Mass-dependent fields are
    None when no spacecraft is given.
    """
    nodes = nodes if nodes is not None else traj.default_nodes()
    grid = eval_grid(traj, np.linspace(0.0, 1.0, nodes + 1))
    unorm = grid.u_norm
    integrand = unorm * grid.t_prime
    dv_cum = np.concatenate((
        [0.0],
        np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(grid.s)),
    ))
    delta_v = float(dv_cum[-1])
    u_max = float(unorm.max())
    if sc is None:
        return TrajectoryMetrics(delta_v_mps=delta_v, u_max_mps2=u_max)
    mass = sc.m0_kg * np.exp(-dv_cum / sc.exhaust_velocity)
    thrust = mass * unorm
    return TrajectoryMetrics(
        delta_v_mps=delta_v, u_max_mps2=u_max,
        m_final_kg=float(mass[-1]), thrust_max_n=float(thrust.max()))


def mass_profile(traj: ShapedTrajectory, sc: Spacecraft,
                 nodes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(s grid, mass at each grid point) by forward quadrature."""
    nodes = nodes if nodes is not None else traj.default_nodes()
    grid = eval_grid(traj, np.linspace(0.0, 1.0, nodes + 1))
    integrand = grid.u_norm * grid.t_prime
    dv_cum = np.concatenate((
        [0.0],
        np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(grid.s)),
    ))
    return grid.s, sc.m0_kg * np.exp(-dv_cum / sc.exhaust_velocity)


def with_feasibility(metrics: TrajectoryMetrics, delta_t: float,
                     delta_p: float) -> TrajectoryMetrics:
    return replace(metrics, delta_t=delta_t, delta_p=delta_p)
