"""Closed-form solution of the flight-time constraint.

Because spline interpolation is linear in its knot values, the
semi-latus-rectum history splits as p(s) = gamma1(s) * p1 + gamma2(s)
where p1 is the one free knot. Flight time is a quadrature of
p(s)^2 * dL / (hmag * w^2), quadratic in p1, so matching a required
flight time reduces to one scalar quadratic. Coefficients come either
from that quadrature directly or from three probe evaluations of any
black-box time function (exact for a quadratic).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .splines import CubicSpline
from .trajectory import DegenerateShapeError


@dataclass(frozen=True)
class TimeQuadratic:
    """a_t x^2 + b_t x + c_t = 0 with x = p1 - x_offset."""
    a_t: float
    b_t: float
    c_t: float
    x_offset: float = 0.0

    @property
    def discriminant(self) -> float:
        return self.b_t**2 - 4.0 * self.a_t * self.c_t


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the free-knot solve.

    delta_t: quadratic discriminant (negative means no real root).
    delta_p: largest root minus the p floor (negative means every root
        violates the floor); zero when no real roots exist.
    roots: real roots as p1 values, largest first.
    chosen: selected p1, or None when infeasible.
    """
    delta_t: float
    delta_p: float
    roots: tuple[float, ...]
    chosen: float | None

    @property
    def feasible(self) -> bool:
        return self.chosen is not None


def quadratic_coeffs_direct(
    gamma1: Callable[[np.ndarray], np.ndarray],
    gamma2: Callable[[np.ndarray], np.ndarray],
    f: CubicSpline,
    g: CubicSpline,
    hmag: CubicSpline,
    L0: float,
    dL: float,
    t0_sec: float,
    tf_sec: float,
    nodes: int,
) -> TimeQuadratic:
    """Quadratic coefficients by trapezoid quadrature of the time integrand.

    gamma1/gamma2 map an s grid to the p1-linear split of p(s). The
    quadratic variable is p1 itself (x_offset = 0).
    """
    s = np.linspace(0.0, 1.0, nodes + 1)
    g1 = gamma1(s)
    g2 = gamma2(s)
    hm = hmag.value(s)
    L = L0 + s * dL
    w = 1.0 + f.value(s) * np.cos(L) + g.value(s) * np.sin(L)
    if np.any(hm <= 0.0) or np.any(w <= 0.0):
        raise DegenerateShapeError(
            "time integrand undefined: hmag and the longitude equation "
            "denominator must stay positive")
    weight = dL / (hm * w**2)
    a_t = float(np.trapezoid(g1**2 * weight, s))
    b_t = float(np.trapezoid(2.0 * g1 * g2 * weight, s))
    c_t = float(np.trapezoid(g2**2 * weight, s)) + t0_sec - tf_sec
    return TimeQuadratic(a_t=a_t, b_t=b_t, c_t=c_t, x_offset=0.0)


def quadratic_coeffs_sampled(
    time_of_p1: Callable[[float], float],
    p0: float,
    p2: float,
    t0_sec: float,
    tf_sec: float,
) -> TimeQuadratic:
    """Quadratic coefficients from three probe evaluations.

    Probes sit at the midpoint of the neighboring knots p0 and p2 and at
    +/- half their gap, so the quadratic variable is the offset
    x = p1 - (p0 + p2)/2. Exact whenever time_of_p1 is quadratic.
    """
    mid = 0.5 * (p0 + p2)
    dp = 0.5 * (p2 - p0)
    if dp == 0.0:
        dp = 0.1 * p0  # degenerate neighbor knots; any nonzero probe works
    t_plus = time_of_p1(mid + dp)
    t_minus = time_of_p1(mid - dp)
    t_mid = time_of_p1(mid)
    return TimeQuadratic(
        a_t=(t_plus + t_minus - 2.0 * t_mid) / (2.0 * dp**2),
        b_t=(t_plus - t_minus) / (2.0 * dp),
        c_t=t_mid + t0_sec - tf_sec,
        x_offset=mid,
    )


def _stable_roots(a: float, b: float, c: float) -> tuple[float, float]:
    """Real roots of a x^2 + b x + c, largest first, without cancellation."""
    disc = b * b - 4.0 * a * c
    sq = math.sqrt(max(disc, 0.0))
    if b == 0.0 and c == 0.0:
        return 0.0, 0.0
    q = -0.5 * (b + math.copysign(sq, b if b != 0.0 else 1.0))
    r1, r2 = q / a, (c / q if q != 0.0 else -q / a)
    return (r1, r2) if r1 >= r2 else (r2, r1)


def solve_free_knot(
    quad: TimeQuadratic,
    p_min: float,
    delta_v_of: Callable[[float], float] | None = None,
) -> FeasibilityReport:
    """Pick the free semi-latus-rectum knot from the time quadratic.

    Roots below p_min are discarded. When both roots survive, the one
    with the smaller delta-v wins (evaluated through delta_v_of); on a
    tie, or with no evaluator, the larger root wins.
    """
    if quad.a_t <= 0.0:
        raise ValueError("time quadratic must open upward (a_t > 0)")
    delta_t = quad.discriminant
    if delta_t < 0.0:
        return FeasibilityReport(delta_t=delta_t, delta_p=0.0, roots=(),
                                 chosen=None)
    x_hi, x_lo = _stable_roots(quad.a_t, quad.b_t, quad.c_t)
    roots = (x_hi + quad.x_offset, x_lo + quad.x_offset)
    delta_p = roots[0] - p_min
    candidates = [r for r in roots if r >= p_min]
    if not candidates:
        return FeasibilityReport(delta_t=delta_t, delta_p=delta_p,
                                 roots=roots, chosen=None)
    if len(candidates) == 1 or delta_v_of is None:
        chosen = candidates[0]
    else:
        dv = [delta_v_of(r) for r in candidates]
        scale = max(abs(dv[0]), abs(dv[1]), 1.0)
        if abs(dv[0] - dv[1]) <= 1e-9 * scale:
            chosen = candidates[0]  # tie: keep the larger root
        else:
            chosen = candidates[int(np.argmin(dv))]
    return FeasibilityReport(delta_t=delta_t, delta_p=delta_p, roots=roots,
                             chosen=chosen)
