"""Clamped cubic splines on uniform knots over [0, 1].

Each segment stores coefficients of the cubic in the *global* variable s
(value = a*s^3 + b*s^2 + c*s + d), so a single segment is a plain cubic
polynomial. End slopes are zero by construction, which is what makes the
shaped boundary elements osculate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded


@dataclass(frozen=True)
class CubicSpline:
    """C2 piecewise cubic on uniform knots 0 = s_0 < ... < s_n = 1."""
    knots: np.ndarray  # (n+1,)
    coeffs: np.ndarray  # (n, 4) rows [a, b, c, d], global-s polynomials
    values: np.ndarray  # (n+1,) knot values

    @property
    def n_segments(self) -> int:
        return len(self.knots) - 1

    def _segment_index(self, s: np.ndarray) -> np.ndarray:
        n = self.n_segments
        return np.clip((np.asarray(s) * n).astype(int), 0, n - 1)

    def value(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        a, b, c, d = self.coeffs[self._segment_index(s)].T
        return ((a * s + b) * s + c) * s + d

    def deriv1(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        a, b, c, _ = self.coeffs[self._segment_index(s)].T
        return (3.0 * a * s + 2.0 * b) * s + c

    def deriv2(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        a, b, _, _ = self.coeffs[self._segment_index(s)].T
        return 6.0 * a * s + 2.0 * b


def build_clamped_spline(values) -> CubicSpline:
    """Interpolating cubic spline with zero slope at both ends.

    `values` are the knot values at the n+1 uniform knots. Interior knot
    slopes come from the standard C2 tridiagonal system; each segment is
    then the Hermite cubic re-expanded in global s.
    """
    y = np.asarray(values, dtype=float)
    n = len(y) - 1
    if n < 1:
        raise ValueError("need at least two knot values")
    dx = 1.0 / n
    slopes = np.zeros(n + 1)
    if n > 1:
        # m_{i-1} + 4 m_i + m_{i+1} = 3 (y_{i+1} - y_{i-1}) / dx, m_0 = m_n = 0
        rhs = 3.0 * (y[2:] - y[:-2]) / dx
        band = np.zeros((3, n - 1))
        band[0, 1:] = 1.0
        band[1, :] = 4.0
        band[2, :-1] = 1.0
        slopes[1:n] = solve_banded((1, 1), band, rhs)
    return CubicSpline(
        knots=np.linspace(0.0, 1.0, n + 1),
        coeffs=_hermite_to_global(y, slopes, dx),
        values=y,
    )


def _hermite_to_global(y: np.ndarray, m: np.ndarray, dx: float) -> np.ndarray:
    """Global-s cubic coefficients per segment from knot values and slopes."""
    n = len(y) - 1
    x = np.arange(n) * dx  # left knot of each segment
    # local cubic in tau = (s - x_i)/dx: A t^3 + B t^2 + C t + D
    A = 2.0 * (y[:-1] - y[1:]) + dx * (m[:-1] + m[1:])
    B = 3.0 * (y[1:] - y[:-1]) - dx * (2.0 * m[:-1] + m[1:])
    C = dx * m[:-1]
    D = y[:-1]
    lam = 1.0 / dx
    a3 = A * lam**3
    b2 = B * lam**2
    c1 = C * lam
    coeffs = np.empty((n, 4))
    coeffs[:, 0] = a3
    coeffs[:, 1] = -3.0 * a3 * x + b2
    coeffs[:, 2] = 3.0 * a3 * x**2 - 2.0 * b2 * x + c1
    coeffs[:, 3] = -a3 * x**3 + b2 * x**2 - c1 * x + D
    return coeffs


def two_segment_bump(delta: float) -> CubicSpline:
    """The two-segment C2 bump with unit half-knots and clamped ends.

    Zero at s = 0 and s = 1 with zero end slopes, value `delta` at
    s = 0.5. Adding it to a single boundary-to-boundary cubic yields the
    parameter-free two-segment semi-latus-rectum shape.
    """
    coeffs = delta * np.array([
        [-16.0, 12.0, 0.0, 0.0],
        [16.0, -36.0, 24.0, -4.0],
    ])
    return CubicSpline(
        knots=np.array([0.0, 0.5, 1.0]),
        coeffs=coeffs,
        values=np.array([0.0, delta, 0.0]),
    )


def add_splines(base: CubicSpline, other: CubicSpline) -> CubicSpline:
    """Sum of two splines on identical knot grids."""
    if len(base.knots) != len(other.knots):
        raise ValueError("knot grids differ")
    return CubicSpline(
        knots=base.knots,
        coeffs=base.coeffs + other.coeffs,
        values=base.values + other.values,
    )
