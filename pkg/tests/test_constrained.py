"""Multi-segment shaping: free knots, penalties, and the thrust ceiling."""
import math

import numpy as np
import pytest

from splinetraj import (MU_SUN, YEAR_S, ConstraintGrid, Epoch,
                        FeasibilityReport, Spacecraft, assemble_shape,
                        boundary_conditions, build_clamped_spline, eval_grid,
                        free_param_count, initial_guess_from_rapid,
                        mass_and_metrics, mass_profile, meoe_to_cartesian,
                        optimize, penalized_objective, shape_rapid,
                        thrust_violations, transfer_time)
from splinetraj.constrained import PENALTY_RHO

SC = Spacecraft(m0_kg=4000.0, isp_s=3000.0, t_max_n=0.6)


@pytest.fixture(scope="module")
def bc16(bench_orbits):
    oe0, oef = bench_orbits
    t0 = Epoch(56000.0)
    tf = Epoch(56000.0 + 16.0 * YEAR_S / 86400.0)
    return boundary_conditions(oe0, oef, t0, tf, revs=6, mu=MU_SUN)


@pytest.fixture(scope="module")
def bc8(bench_orbits):
    oe0, oef = bench_orbits
    t0 = Epoch(56000.0)
    tf = Epoch(56000.0 + 8.0 * YEAR_S / 86400.0)
    return boundary_conditions(oe0, oef, t0, tf, revs=3, mu=MU_SUN)


def test_constraint_grid_points():
    grid = ConstraintGrid(n=2, c=2)
    assert np.allclose(grid.points, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert len(ConstraintGrid(n=10, c=10).points) == 101
    with pytest.raises(ValueError):
        ConstraintGrid(n=1, c=2)
    with pytest.raises(ValueError):
        ConstraintGrid(n=2, c=0)


def test_free_param_count():
    # six element histories, n-1 interior knots each, minus the solved p knot
    assert free_param_count(2) == 5
    assert free_param_count(10) == 53
    assert free_param_count(20) == 113


def test_two_segment_assembly_reproduces_rapid_shape(bc16):
    # sampling the two-segment shape at midspan and reassembling with
    # n=2 must give back the same trajectory: clamped interpolants of
    # matching knot values are unique
    rapid_traj, rapid_report = shape_rapid(bc16, MU_SUN)
    z = initial_guess_from_rapid(bc16, MU_SUN, n=2)
    assert z.shape == (5,)
    traj, report = assemble_shape(bc16, z, n=2, mu=MU_SUN)
    assert report.feasible
    assert report.chosen == pytest.approx(rapid_report.chosen, rel=1e-9)
    s = np.linspace(0.0, 1.0, 50)
    assert np.allclose(traj.p.value(s), rapid_traj.p.value(s), rtol=1e-9)
    assert np.allclose(traj.hmag.value(s), rapid_traj.hmag.value(s),
                       rtol=1e-9)
    dv_a = mass_and_metrics(traj, nodes=2000).delta_v_mps
    dv_b = mass_and_metrics(rapid_traj, nodes=2000).delta_v_mps
    assert dv_a == pytest.approx(dv_b, rel=1e-6)


def test_assembled_shape_closes_boundaries_and_time(bc16, bench_orbits):
    oe0, oef = bench_orbits
    rng = np.random.default_rng(70)
    n = 6
    z0 = initial_guess_from_rapid(bc16, MU_SUN, n)
    for _ in range(20):
        # elementwise relative jitter keeps the mixed-unit entries sane
        z = z0 * (1.0 + rng.uniform(-0.02, 0.02, size=z0.shape))
        traj, report = assemble_shape(bc16, z, n, MU_SUN)
        grid = eval_grid(traj, np.array([0.0, 1.0]))
        for idx, oe in ((0, oe0), (1, oef)):
            ref = meoe_to_cartesian(oe, MU_SUN)
            assert np.linalg.norm(grid.r_m[idx] - ref.r) \
                <= 1e-8 * np.linalg.norm(ref.r)
            assert np.linalg.norm(grid.v_mps[idx] - ref.v) \
                <= 1e-8 * np.linalg.norm(ref.v)
        if report.feasible:
            assert transfer_time(traj) == pytest.approx(bc16.tof_sec,
                                                        rel=1e-6)


def test_interior_knots_land_on_free_parameters(bc16):
    # knot values of the assembled splines must be the z entries
    n = 5
    z = initial_guess_from_rapid(bc16, MU_SUN, n)
    traj, _ = assemble_shape(bc16, z, n, MU_SUN)
    m = n - 1
    zp = z[:m - 1]
    zf, zg, zh, zk, zhm = (z[m - 1 + j * m: m - 1 + (j + 1) * m]
                           for j in range(5))
    knots = np.arange(1, n) / n
    assert np.allclose(traj.p.value(knots[1:]), zp, rtol=1e-9)
    assert np.allclose(traj.hmag.value(knots), zhm, rtol=1e-9)
    for sp, want in ((traj.f, zf), (traj.g, zg), (traj.h, zh), (traj.k, zk)):
        assert np.allclose(sp.value(knots), want, atol=1e-9)


def test_assemble_infeasible_window_fallback(bench_orbits):
    oe0, oef = bench_orbits
    bc = boundary_conditions(oe0, oef, Epoch(56000.0), Epoch(56030.0),
                             revs=6, mu=MU_SUN)
    z = initial_guess_from_rapid(bc, MU_SUN, n=4)
    traj, report = assemble_shape(bc, z, n=4, mu=MU_SUN)
    assert not report.feasible
    assert traj.p.value(0.25) == pytest.approx(oe0.p, rel=1e-12)


def test_penalized_objective_arithmetic(bc16):
    traj, report = shape_rapid(bc16, MU_SUN)
    assert report.feasible
    dm = penalized_objective(traj, report, SC)
    metrics = mass_and_metrics(traj, SC)
    assert dm == pytest.approx(SC.m0_kg - metrics.m_final_kg, rel=1e-12)
    # each negative margin adds rho * |margin|
    bad_t = FeasibilityReport(delta_t=-2.0, delta_p=report.delta_p,
                              roots=report.roots, chosen=report.chosen)
    assert penalized_objective(traj, bad_t, SC) == pytest.approx(
        dm + 2.0 * PENALTY_RHO, rel=1e-12)
    bad_both = FeasibilityReport(delta_t=-2.0, delta_p=-0.5,
                                 roots=report.roots, chosen=report.chosen)
    assert penalized_objective(traj, bad_both, SC) == pytest.approx(
        dm + 2.5 * PENALTY_RHO, rel=1e-12)


def test_thrust_violations_sign_and_values(bc8, bc16):
    # the two-segment 8 year shape needs about 4.9 N at departure, far
    # beyond a 0.6 N thruster: its worst violation must be positive
    traj, _ = shape_rapid(bc8, MU_SUN)
    grid_spec = ConstraintGrid(n=10, c=10)
    viols = thrust_violations(traj, SC, grid_spec)
    assert len(viols) == len(grid_spec.points)
    worst = max(v for _, v in viols)
    assert worst > 3.0
    # oracle: recompute thrust from the mass profile at the same points
    nodes = traj.default_nodes()
    s_grid, mass = mass_profile(traj, SC, nodes=nodes)
    pts = grid_spec.points
    u = eval_grid(traj, pts).u_norm
    m_at = np.interp(pts, s_grid, mass)
    want = m_at * u - SC.t_max_n
    got = np.array([v for _, v in viols])
    assert np.allclose(got, want, rtol=1e-9, atol=1e-12)


def test_thrust_violations_negative_for_coasting_shape(bench_orbits):
    oe0, _ = bench_orbits
    const = lambda v: build_clamped_spline([v] * 7)
    from splinetraj import ShapedTrajectory
    traj = ShapedTrajectory(
        p=const(oe0.p), f=const(oe0.f), g=const(oe0.g), h=const(oe0.h),
        k=const(oe0.k), hmag=const(math.sqrt(MU_SUN * oe0.p)),
        L0=oe0.L, dL=6.0 * math.pi, t0=Epoch(56000.0), tf=Epoch(57000.0),
        mu=MU_SUN)
    viols = thrust_violations(traj, SC, ConstraintGrid(4, 3))
    assert all(v == pytest.approx(-SC.t_max_n, abs=1e-6) for _, v in viols)


def test_optimize_small_case_improves_objective(bc16):
    out = optimize(bc16, SC, MU_SUN, n=4, c=4, max_evals=400, nodes=800,
                   probe_nodes=200)
    assert out.objective_kg <= out.init_objective_kg + 1e-9
    assert out.evaluations <= 400 + 10
    assert isinstance(out.capped, bool)
    assert isinstance(out.feasible, bool)
    assert out.metrics.delta_v_mps > 0.0
    # boundaries survive optimization
    grid = eval_grid(out.trajectory, np.array([0.0, 1.0]))
    oe0, oef = bc16.oe0, bc16.oef
    for idx, oe in ((0, oe0), (1, oef)):
        ref = meoe_to_cartesian(oe, MU_SUN)
        assert np.linalg.norm(grid.r_m[idx] - ref.r) \
            <= 1e-8 * np.linalg.norm(ref.r)


def test_optimize_accepts_explicit_start(bc16):
    z0 = initial_guess_from_rapid(bc16, MU_SUN, 4)
    out = optimize(bc16, SC, MU_SUN, n=4, c=4, init=z0, max_evals=150,
                   nodes=800, probe_nodes=200)
    traj0, rep0 = assemble_shape(bc16, z0, 4, MU_SUN, nodes=800,
                                 probe_nodes=200)
    want_init = penalized_objective(traj0, rep0, SC, nodes=800)
    assert out.init_objective_kg == pytest.approx(want_init, rel=1e-6)
