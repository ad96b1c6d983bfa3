"""Two-point boundary value solver checked by Keplerian propagation."""
import math

import numpy as np
import pytest

from splinetraj import (AU, DAY_S, MU_SUN, Epoch, LambertNoSolution,
                        lambert_all, lambert_max_revs, propagate_body,
                        solve_lambert)

from conftest import random_meoe
from splinetraj import meoe_to_cartesian


def _stumpff_c(z):
    if z > 1e-8:
        return (1.0 - math.cos(math.sqrt(z))) / z
    if z < -1e-8:
        return (math.cosh(math.sqrt(-z)) - 1.0) / (-z)
    return 0.5 - z / 24.0 + z * z / 720.0


def _stumpff_s(z):
    if z > 1e-8:
        sq = math.sqrt(z)
        return (sq - math.sin(sq)) / (z * sq)
    if z < -1e-8:
        sq = math.sqrt(-z)
        return (math.sinh(sq) - sq) / ((-z) * sq)
    return 1.0 / 6.0 - z / 120.0 + z * z / 5040.0


def kepler_propagate(r0, v0, dt, mu):
    """Universal-variable two-body propagation (independent oracle)."""
    r0 = np.asarray(r0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    r0n = float(np.linalg.norm(r0))
    vr0 = float(r0 @ v0) / r0n
    alpha = 2.0 / r0n - float(v0 @ v0) / mu
    sqmu = math.sqrt(mu)
    chi = sqmu * abs(alpha) * dt
    for _ in range(200):
        z = alpha * chi * chi
        c, s = _stumpff_c(z), _stumpff_s(z)
        fval = (r0n * vr0 / sqmu * chi * chi * c
                + (1.0 - alpha * r0n) * chi**3 * s + r0n * chi - sqmu * dt)
        dval = (r0n * vr0 / sqmu * chi * (1.0 - z * s)
                + (1.0 - alpha * r0n) * chi * chi * c + r0n)
        step = fval / dval
        chi -= step
        if abs(step) < 1e-11 * max(abs(chi), 1.0):
            break
    z = alpha * chi * chi
    c, s = _stumpff_c(z), _stumpff_s(z)
    f = 1.0 - chi * chi / r0n * c
    g = dt - chi**3 / sqmu * s
    r = f * r0 + g * v0
    rn = float(np.linalg.norm(r))
    fdot = sqmu / (r0n * rn) * chi * (z * s - 1.0)
    gdot = 1.0 - chi * chi / rn * c
    return r, fdot * r0 + gdot * v0


def test_oracle_self_consistency():
    # the propagation oracle must hold orbits: one full period returns
    # the state, so later failures implicate the solver, not the oracle
    rng = np.random.default_rng(60)
    for _ in range(20):
        oe = random_meoe(rng)
        st = meoe_to_cartesian(oe, MU_SUN)
        a = oe.p / (1.0 - oe.f**2 - oe.g**2)
        period = 2.0 * math.pi * math.sqrt(a**3 / MU_SUN)
        r, v = kepler_propagate(st.r, st.v, period, MU_SUN)
        assert np.linalg.norm(r - st.r) <= 1e-8 * np.linalg.norm(st.r)
        assert np.linalg.norm(v - st.v) <= 1e-8 * np.linalg.norm(st.v)


def test_circular_arc_recovered_exactly():
    # boundary points on one circular orbit with the matching arc time:
    # the solution is that circular orbit
    radius = 1.3 * AU
    v_circ = math.sqrt(MU_SUN / radius)
    mean_motion = v_circ / radius
    for theta in (0.7, 2.0, 4.2):
        r1 = np.array([radius, 0.0, 0.0])
        r2 = radius * np.array([math.cos(theta), math.sin(theta), 0.0])
        sol = solve_lambert(r1, r2, theta / mean_motion, MU_SUN)
        assert np.allclose(sol.v1_mps, [0.0, v_circ, 0.0],
                           atol=1e-9 * v_circ)
        assert np.allclose(sol.v2_mps,
                           v_circ * np.array([-math.sin(theta),
                                              math.cos(theta), 0.0]),
                           atol=1e-9 * v_circ)


def test_circular_multirev_branch():
    # with 2 extra turns added to the arc time, one conjugate branch is
    # again the circular orbit
    radius = 0.9 * AU
    v_circ = math.sqrt(MU_SUN / radius)
    mean_motion = v_circ / radius
    theta = 1.1
    tof = (theta + 2.0 * 2.0 * math.pi) / mean_motion
    sols = lambert_all(np.array([radius, 0.0, 0.0]),
                       radius * np.array([math.cos(theta), math.sin(theta),
                                          0.0]), tof, MU_SUN)
    best = min(np.linalg.norm(s.v1_mps - [0.0, v_circ, 0.0])
               for s in sols if s.revs == 2)
    assert best <= 1e-8 * v_circ


def _closure(sol, r1, r2, tof, mu):
    r_end, v_end = kepler_propagate(r1, sol.v1_mps, tof, mu)
    scale_r = max(np.linalg.norm(r1), np.linalg.norm(r2))
    assert np.linalg.norm(r_end - r2) <= 1e-7 * scale_r
    assert np.linalg.norm(v_end - sol.v2_mps) \
        <= 1e-7 * np.linalg.norm(sol.v2_mps)


def test_zero_rev_closure_random_geometry():
    rng = np.random.default_rng(61)
    checked = 0
    while checked < 25:
        st1 = meoe_to_cartesian(random_meoe(rng), MU_SUN)
        st2 = meoe_to_cartesian(random_meoe(rng), MU_SUN)
        if np.linalg.norm(np.cross(st1.r, st2.r)) < 1e-6 * AU * AU:
            continue
        tof = rng.uniform(50.0, 800.0) * DAY_S
        for prograde in (True, False):
            sol = solve_lambert(st1.r, st2.r, tof, MU_SUN,
                                prograde=prograde)
            _closure(sol, st1.r, st2.r, tof, MU_SUN)
        checked += 1


def test_multirev_enumeration_and_closure(earth, dionysus):
    _, _, st1 = propagate_body(earth, Epoch(56483.082))
    _, _, st2 = propagate_body(dionysus, Epoch(59299.275))
    tof = (59299.275 - 56483.082) * DAY_S
    limit = lambert_max_revs(st1.r, st2.r, tof, MU_SUN)
    assert limit >= 2
    sols = lambert_all(st1.r, st2.r, tof, MU_SUN)
    assert len(sols) == 1 + 2 * limit
    seen = set()
    for sol in sols:
        seen.add((sol.revs, sol.branch))
        _closure(sol, st1.r, st2.r, tof, MU_SUN)
    assert (0, "low") in seen
    assert (limit, "low") in seen and (limit, "high") in seen
    # conjugate branches are distinct orbits
    for revs in range(1, limit + 1):
        lo = next(s for s in sols if s.revs == revs and s.branch == "low")
        hi = next(s for s in sols if s.revs == revs and s.branch == "high")
        assert lo.x < hi.x
        assert not np.allclose(lo.v1_mps, hi.v1_mps, rtol=1e-6)


def test_max_revs_cap_respected(earth, dionysus):
    _, _, st1 = propagate_body(earth, Epoch(56483.082))
    _, _, st2 = propagate_body(dionysus, Epoch(59299.275))
    tof = (59299.275 - 56483.082) * DAY_S
    sols = lambert_all(st1.r, st2.r, tof, MU_SUN, max_revs=1)
    assert {s.revs for s in sols} == {0, 1}


def test_no_solution_below_minimum_time(earth, dionysus):
    _, _, st1 = propagate_body(earth, Epoch(56483.082))
    _, _, st2 = propagate_body(dionysus, Epoch(56583.082))
    with pytest.raises(LambertNoSolution):
        solve_lambert(st1.r, st2.r, 100.0 * DAY_S, MU_SUN, revs=4)


def test_input_validation():
    r1 = np.array([AU, 0.0, 0.0])
    with pytest.raises(ValueError):
        solve_lambert(r1, 2.0 * r1, 100.0 * DAY_S, MU_SUN)  # collinear
    with pytest.raises(ValueError):
        solve_lambert(r1, np.array([0.0, AU, 0.0]), -1.0, MU_SUN)
    with pytest.raises(ValueError):
        solve_lambert(r1, np.array([0.0, AU, 0.0]), 100.0 * DAY_S, MU_SUN,
                      revs=-1)
    with pytest.raises(ValueError):
        solve_lambert(r1, np.array([0.0, AU, 0.0]), 100.0 * DAY_S, MU_SUN,
                      branch="middle")
