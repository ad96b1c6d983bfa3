"""Two-point boundary value solver for Keplerian arcs.

Universal-variable formulation on the Lancaster-Blanchard x iterate with
Householder refinement, covering zero and multiple revolutions. For each
revolution count above zero the time-of-flight curve is U-shaped, so two
conjugate solutions exist whenever the flight time clears the curve's
minimum; they are labeled by the `branch` argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class LambertNoSolution(ValueError):
    """Requested revolution count admits no solution for this flight time."""


@dataclass(frozen=True)
class LambertSolution:
    v1_mps: np.ndarray
    v2_mps: np.ndarray
    revs: int
    branch: str  # "low" = smaller x iterate, "high" = larger
    x: float


def _geometry(r1, r2, prograde: bool):
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    n1 = float(np.linalg.norm(r1))
    n2 = float(np.linalg.norm(r2))
    chord = float(np.linalg.norm(r2 - r1))
    if n1 <= 0.0 or n2 <= 0.0:
        raise ValueError("boundary positions must be nonzero")
    s = 0.5 * (n1 + n2 + chord)
    ir1, ir2 = r1 / n1, r2 / n2
    ih = np.cross(ir1, ir2)
    nh = np.linalg.norm(ih)
    if nh < 1e-12:
        raise ValueError("collinear boundary positions leave the transfer "
                         "plane undefined")
    ih = ih / nh
    lam = math.sqrt(1.0 - chord / s)
    if ih[2] < 0.0:  # transfer angle above pi when traversed prograde
        lam = -lam
        it1, it2 = np.cross(ir1, ih), np.cross(ir2, ih)
    else:
        it1, it2 = np.cross(ih, ir1), np.cross(ih, ir2)
    if not prograde:
        lam = -lam
        it1, it2 = -it1, -it2
    return n1, n2, chord, s, lam, ir1, ir2, it1, it2


def _hyp2f1b(z: float, tol: float = 1e-13) -> float:
    """Gauss hypergeometric series 2F1(3, 1; 5/2; z) for |z| < 1."""
    sj, cj = 1.0, 1.0
    for j in range(200):
        cj = cj * (3.0 + j) * (1.0 + j) / (2.5 + j) * z / (j + 1.0)
        sj += cj
        if abs(cj) < tol:
            break
    return sj


def _x_to_tof(x: float, n_revs: int, lam: float) -> float:
    """Nondimensional time of flight for iterate x (Lancaster-Blanchard).

    Switches between the Lagrange expression, a series expansion around
    the parabola, and the direct form depending on how close x is to 1.
    """
    battin, lagrange = 0.01, 0.2
    dist = abs(x - 1.0)
    if battin < dist < lagrange:
        a = 1.0 / (1.0 - x * x)
        if a > 0.0:
            alfa = 2.0 * math.acos(x)
            beta = 2.0 * math.asin(math.sqrt(lam * lam / a))
            if lam < 0.0:
                beta = -beta
            return (a * math.sqrt(a)
                    * ((alfa - math.sin(alfa)) - (beta - math.sin(beta))
                       + 2.0 * math.pi * n_revs)) / 2.0
        alfa = 2.0 * math.acosh(x)
        beta = 2.0 * math.asinh(math.sqrt(-lam * lam / a))
        if lam < 0.0:
            beta = -beta
        return (-a * math.sqrt(-a)
                * ((beta - math.sinh(beta)) - (alfa - math.sinh(alfa)))) / 2.0
    k = lam * lam
    e = x * x - 1.0
    rho = abs(e)
    z = math.sqrt(1.0 + k * e)
    if dist < battin:
        eta = z - lam * x
        s1 = 0.5 * (1.0 - lam - x * eta)
        q = 4.0 / 3.0 * _hyp2f1b(s1)
        return ((eta**3 * q + 4.0 * lam * eta) / 2.0
                + n_revs * math.pi / rho**1.5)
    y = math.sqrt(rho)
    g = x * z - lam * e
    if e < 0.0:
        d = n_revs * math.pi + math.acos(g)
    else:
        d = math.log(max(y * (z - lam * x) + g, 1e-300))
    return (x - lam * z - d / y) / e


def _tof_derivs(x: float, tof: float, lam: float) -> tuple[float, float, float]:
    """First three derivatives of the nondimensional tof curve at x."""
    l2 = lam * lam
    l3 = l2 * lam
    umx2 = 1.0 - x * x
    y = math.sqrt(1.0 - l2 * umx2)
    y3 = y**3
    dt = (3.0 * tof * x - 2.0 + 2.0 * l3 * x / y) / umx2
    ddt = (3.0 * tof + 5.0 * x * dt + 2.0 * (1.0 - l2) * l3 / y3) / umx2
    dddt = (7.0 * x * ddt + 8.0 * dt
            - 6.0 * (1.0 - l2) * l2 * l3 * x / (y3 * y * y)) / umx2
    return dt, ddt, dddt


def _householder(tof_target: float, x0: float, n_revs: int, lam: float,
                 eps: float = 1e-13, max_iter: int = 30) -> float:
    x = x0
    for _ in range(max_iter):
        tof = _x_to_tof(x, n_revs, lam)
        dt, ddt, dddt = _tof_derivs(x, tof, lam)
        delta = tof - tof_target
        dt2 = dt * dt
        denom = dt * (dt2 - delta * ddt) + dddt * delta * delta / 6.0
        x_new = x - delta * (dt2 - delta * ddt / 2.0) / denom
        if abs(x - x_new) < eps:
            return x_new
        x = x_new
    return x


def _max_revolutions(tof_nd: float, lam: float) -> int:
    """Largest revolution count with solutions at this nondimensional tof."""
    n_max = int(tof_nd / math.pi)
    t00 = math.acos(lam) + lam * math.sqrt(1.0 - lam * lam)
    if n_max > 0 and tof_nd < t00 + n_max * math.pi:
        # Halley iteration for the minimum of the n_max-rev tof curve
        t_min = t00 + n_max * math.pi
        x_old = 0.0
        for _ in range(13):
            dt, ddt, dddt = _tof_derivs(x_old, t_min, lam)
            if dt != 0.0:
                x_new = x_old - dt * ddt / (ddt * ddt - dt * dddt / 2.0)
            else:
                x_new = x_old
            if abs(x_old - x_new) < 1e-13:
                break
            t_min = _x_to_tof(x_new, n_max, lam)
            x_old = x_new
        if t_min > tof_nd:
            n_max -= 1
    return n_max


def lambert_max_revs(r1_m, r2_m, tof_sec: float, mu: float,
                     prograde: bool = True) -> int:
    """Largest revolution count for which the transfer has a solution."""
    if tof_sec <= 0.0 or mu <= 0.0:
        raise ValueError("flight time and mu must be positive")
    *_, s, lam, _, _, _, _ = _geometry(r1_m, r2_m, prograde)
    return _max_revolutions(tof_sec * math.sqrt(2.0 * mu / s**3), lam)


def solve_lambert(r1_m, r2_m, tof_sec: float, mu: float, revs: int = 0,
                  branch: str = "low", prograde: bool = True) -> LambertSolution:
    """Terminal velocities of the Keplerian arc joining two positions.

    For revs >= 1 the `branch` selects between the two conjugate
    solutions: "low" is the one with the smaller x iterate, "high" the
    larger. Raises LambertNoSolution when the flight time is below the
    minimum for the requested revolution count.
    """
    if tof_sec <= 0.0 or mu <= 0.0:
        raise ValueError("flight time and mu must be positive")
    if revs < 0:
        raise ValueError("revolution count must be nonnegative")
    if branch not in ("low", "high"):
        raise ValueError("branch must be 'low' or 'high'")
    n1, n2, chord, s, lam, ir1, ir2, it1, it2 = _geometry(r1_m, r2_m, prograde)
    tof_nd = tof_sec * math.sqrt(2.0 * mu / s**3)

    if revs > _max_revolutions(tof_nd, lam):
        raise LambertNoSolution(
            f"flight time below the minimum for {revs} revolutions")

    if revs == 0:
        t00 = math.acos(lam) + lam * math.sqrt(1.0 - lam * lam)
        t1 = 2.0 / 3.0 * (1.0 - lam**3)
        if tof_nd >= t00:
            x0 = -(tof_nd - t00) / (tof_nd - t00 + 4.0)
        elif tof_nd <= t1:
            x0 = t1 * (t1 - tof_nd) / (0.4 * (1.0 - lam**5) * tof_nd) + 1.0
        else:
            x0 = (tof_nd / t00) ** (math.log(2.0) / math.log(t1 / t00)) - 1.0
        x = _householder(tof_nd, x0, 0, lam)
    else:
        tmp = ((revs * math.pi + math.pi) / (8.0 * tof_nd)) ** (2.0 / 3.0)
        x_left = _householder(tof_nd, (tmp - 1.0) / (tmp + 1.0), revs, lam)
        tmp = (8.0 * tof_nd / (revs * math.pi)) ** (2.0 / 3.0)
        x_right = _householder(tof_nd, (tmp - 1.0) / (tmp + 1.0), revs, lam)
        lo, hi = sorted((x_left, x_right))
        x = lo if branch == "low" else hi

    gamma = math.sqrt(mu * s / 2.0)
    rho = (n1 - n2) / chord
    sigma = math.sqrt(1.0 - rho * rho)
    y = math.sqrt(1.0 - lam * lam + lam * lam * x * x)
    vr1 = gamma * ((lam * y - x) - rho * (lam * y + x)) / n1
    vr2 = -gamma * ((lam * y - x) + rho * (lam * y + x)) / n2
    vt = gamma * sigma * (y + lam * x)
    return LambertSolution(
        v1_mps=vr1 * ir1 + (vt / n1) * it1,
        v2_mps=vr2 * ir2 + (vt / n2) * it2,
        revs=revs, branch=branch, x=float(x))


def lambert_all(r1_m, r2_m, tof_sec: float, mu: float,
                max_revs: int | None = None,
                prograde: bool = True) -> list[LambertSolution]:
    """Every solution up to max_revs (geometry-limited when None)."""
    limit = lambert_max_revs(r1_m, r2_m, tof_sec, mu, prograde)
    if max_revs is not None:
        limit = min(limit, max_revs)
    out = [solve_lambert(r1_m, r2_m, tof_sec, mu, 0, "low", prograde)]
    for revs in range(1, limit + 1):
        for branch in ("low", "high"):
            out.append(solve_lambert(r1_m, r2_m, tof_sec, mu, revs, branch,
                                     prograde))
    return out
