"""Closed-form partial derivatives of Cartesian position w.r.t. equinoctial elements.

Element ordering is [p, f, g, h, k, L] throughout. The *_grid functions
are vectorized over trailing sample axes and back the trajectory
evaluator; the Meoe wrappers serve point queries.
"""
from __future__ import annotations

import numpy as np

from .elements import Meoe

__all__ = [
    "position_grid",
    "position_partials",
    "position_partials_grid",
    "position_second_partials",
    "position_second_partials_grid",
    "radius_partials",
    "radius_partials_grid",
]


def _intermediates(p, f, g, h, k, L):
    cl, sl = np.cos(L), np.sin(L)
    w = 1.0 + f * cl + g * sl  # radius denominator
    a2 = h * h - k * k
    b2 = 1.0 + h * h + k * k
    r = p / w
    return cl, sl, w, a2, b2, r


def position_grid(p, f, g, h, k, L) -> np.ndarray:
    """Cartesian position, shape (..., 3)."""
    cl, sl, w, a2, b2, r = _intermediates(p, f, g, h, k, L)
    scale = r / b2
    return np.stack([
        scale * ((1.0 + a2) * cl + 2.0 * h * k * sl),
        scale * ((1.0 - a2) * sl + 2.0 * h * k * cl),
        scale * 2.0 * (h * sl - k * cl),
    ], axis=-1)


def position_partials_grid(p, f, g, h, k, L) -> np.ndarray:
    """First partials of position w.r.t. [p,f,g,h,k,L], shape (..., 3, 6)."""
    cl, sl, w, a2, b2, r = _intermediates(p, f, g, h, k, L)
    rv = position_grid(p, f, g, h, k, L)  # (..., 3)
    n2 = (f * sl - g * cl) / w
    n4 = h * sl - k * cl
    n5 = h * cl + k * sl

    out = np.empty(rv.shape[:-1] + (3, 6))
    out[..., 0] = rv / p[..., None]
    out[..., 1] = rv * (-cl / w)[..., None]
    out[..., 2] = rv * (-sl / w)[..., None]
    two_r_b2 = (2.0 * r / b2)[..., None]
    out[..., 3] = rv * (-2.0 * h / b2)[..., None] + two_r_b2 * np.stack([n5, -n4, sl], axis=-1)
    out[..., 4] = rv * (-2.0 * k / b2)[..., None] + two_r_b2 * np.stack([n4, n5, -cl], axis=-1)
    # in-plane rotation term of d r/dL
    rot = np.stack([
        2.0 * h * k * cl - (1.0 + a2) * sl,
        (1.0 - a2) * cl - 2.0 * h * k * sl,
        2.0 * n5,
    ], axis=-1)
    out[..., 5] = rv * n2[..., None] + rot * (r / b2)[..., None]
    return out


def position_second_partials_grid(p, f, g, h, k, L) -> np.ndarray:
    """Second partials of position, shape (..., 3, 6, 6), symmetric in the last two axes."""
    cl, sl, w, a2, b2, r = _intermediates(p, f, g, h, k, L)
    rv = position_grid(p, f, g, h, k, L)
    d1 = position_partials_grid(p, f, g, h, k, L)
    n2 = (f * sl - g * cl) / w
    n3 = (f * cl + g * sl) / w
    n4 = h * sl - k * cl
    n5 = h * cl + k * sl
    n6 = h * cl - k * sl
    n7 = sl - n2 * cl
    n8 = cl + n2 * sl
    n9 = 2.0 * n2 * n2 + n3 - 1.0

    def col(x, y, z):
        return np.stack([x, y, z], axis=-1)

    e = lambda x: x[..., None]  # append component axis for scalar fields

    out = np.zeros(rv.shape[:-1] + (3, 6, 6))

    def put(i, j, val):
        out[..., i, j] = val
        if i != j:
            out[..., j, i] = val

    dr_dh = d1[..., 3]
    dr_dk = d1[..., 4]
    dr_dL = d1[..., 5]

    # d2r/dp dx = (1/p) dr/dx for x != p; d2r/dp2 = 0
    for j in range(1, 6):
        put(0, j, d1[..., j] / e(p))

    put(1, 1, 2.0 * rv * e(cl * cl / w**2))
    put(2, 2, 2.0 * rv * e(sl * sl / w**2))
    put(1, 2, rv * e(2.0 * sl * cl / w**2))

    four_r_b4 = e(4.0 * r / b2**2)
    put(3, 3, rv * e(8.0 * h * h / b2**2)
        - four_r_b4 * col(2.0 * h * n5 + k * n4, sl + k * n5 - 2.0 * h * n4, 2.0 * h * sl + n4))
    put(4, 4, rv * e(8.0 * k * k / b2**2)
        - four_r_b4 * col(cl + h * n5 + 2.0 * k * n4, 2.0 * k * n5 - h * n4, n4 - 2.0 * k * cl))
    put(3, 4, rv * e(8.0 * h * k / b2**2)
        + e(2.0 * r / b2**2) * col((2.0 - b2) * sl, (2.0 - b2) * cl, 2.0 * n6))

    rot = col(2.0 * h * k * cl - (1.0 + a2) * sl, (1.0 - a2) * cl - 2.0 * h * k * sl, 2.0 * n5)
    put(5, 5, rv * e(n9) + rot * e(2.0 * r * n2 / b2))

    put(1, 3, dr_dh * e(-cl / w))
    put(1, 4, dr_dk * e(-cl / w))
    put(2, 3, dr_dh * e(-sl / w))
    put(2, 4, dr_dk * e(-sl / w))

    put(1, 5, rv * e(n7 / w) + dr_dL * e(-cl / w))
    put(2, 5, -rv * e(n8 / w) + dr_dL * e(-sl / w))
    two_r_b2 = e(2.0 * r / b2)
    put(3, 5, dr_dL * e(-2.0 * h / b2) + two_r_b2 * col(n2 * n5 - n4, -n2 * n4 - n5, n8))
    put(4, 5, dr_dL * e(-2.0 * k / b2) + two_r_b2 * col(n2 * n4 + n5, n2 * n5 - n4, n7))
    return out


def radius_partials_grid(p, f, g, h, k, L) -> np.ndarray:
    """Partials of the radius magnitude r = p/w, shape (..., 6)."""
    cl, sl, w, a2, b2, r = _intermediates(p, f, g, h, k, L)
    zero = np.zeros_like(r)
    return np.stack([
        r / p,
        -r * cl / w,
        -r * sl / w,
        zero,
        zero,
        r * (f * sl - g * cl) / w,
    ], axis=-1)


def _as_arrays(oe: Meoe):
    return tuple(np.asarray(x, dtype=float) for x in (oe.p, oe.f, oe.g, oe.h, oe.k, oe.L))


def position_partials(oe: Meoe) -> np.ndarray:
    """3x6 Jacobian of position w.r.t. the elements at a single point."""
    return position_partials_grid(*_as_arrays(oe))


def position_second_partials(oe: Meoe) -> np.ndarray:
    """3x6x6 symmetric tensor of second partials at a single point."""
    return position_second_partials_grid(*_as_arrays(oe))


def radius_partials(oe: Meoe) -> np.ndarray:
    """6-vector of radius-magnitude partials at a single point."""
    return radius_partials_grid(*_as_arrays(oe))
