"""Command-line workflow: structured configs in, CSV and JSON out.

Configs are nested key/value documents with units spelled out in the
key names: angles in degrees, epochs in MJD days, lengths in AU. All
internal computation is SI. Exit codes: 0 success, 2 config error,
3 infeasible scenario, 4 optimizer evaluation cap reached. Errors print
one line to stderr starting with a stable machine-parsable code.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from .constrained import DEFAULT_MAX_EVALS, DEFAULT_TOL_REL, optimize
from .elements import (AU, MU_SUN, Body, ClassicalElements, Epoch,
                       classical_to_meoe)
from .mission import (LAMBERT, RAPID_SHAPE, LegSpec, MissionSpec, PsoConfig,
                      SEARCH_NODES, SEARCH_PROBE_NODES, evaluate_mission,
                      leg_durations, pso_search)
from .rapid import (NoFeasibleRevolution, best_revolution,
                    boundary_conditions, shape_rapid)
from .trajectory import (ShapedTrajectory, Spacecraft, eval_grid,
                         mass_and_metrics, with_feasibility)

CSV_HEADER = ("s,t_sec,L_rad,rx,ry,rz,vx,vy,vz,ux,uy,uz,"
              "u_norm,mass_kg,thrust_N")


class ConfigError(Exception):
    """Configuration defect with a machine-parsable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: str, message: str) -> ConfigError:
    return ConfigError(code, message)


def _get(section, key: str, where: str):
    if not isinstance(section, dict) or key not in section:
        raise _fail("CONFIG_MISSING_FIELD", f"missing {where}.{key}"
                    if where else f"missing {key}")
    return section[key]


def _num(section, key: str, where: str) -> float:
    v = _get(section, key, where)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise _fail("CONFIG_BAD_VALUE", f"{where}.{key} must be a number")
    return float(v)


def _opt_num(section, key: str, default: float | None) -> float | None:
    if not isinstance(section, dict) or key not in section:
        return default
    v = section[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise _fail("CONFIG_BAD_VALUE", f"{key} must be a number")
    return float(v)


def _elements(section, where: str) -> ClassicalElements:
    try:
        return ClassicalElements(
            a=_num(section, "a_au", where) * AU,
            e=_num(section, "e", where),
            i=math.radians(_num(section, "i_deg", where)),
            raan=math.radians(_num(section, "raan_deg", where)),
            argp=math.radians(_num(section, "argp_deg", where)),
            nu=math.radians(_num(section, "nu_deg", where)))
    except ValueError as exc:
        raise _fail("CONFIG_BAD_VALUE", f"{where}: {exc}") from exc


def _spacecraft(cfg) -> Spacecraft:
    sec = _get(cfg, "spacecraft", "")
    try:
        return Spacecraft(m0_kg=_num(sec, "m0_kg", "spacecraft"),
                          isp_s=_num(sec, "isp_s", "spacecraft"),
                          t_max_n=_num(sec, "tmax_newton", "spacecraft"))
    except ValueError as exc:
        raise _fail("CONFIG_BAD_VALUE", f"spacecraft: {exc}") from exc


def _transfer(cfg, mu: float):
    orbit = _get(cfg, "orbit", "")
    oe0 = classical_to_meoe(_elements(_get(orbit, "initial", "orbit"),
                                      "orbit.initial"))
    oef = classical_to_meoe(_elements(_get(orbit, "target", "orbit"),
                                      "orbit.target"))
    tr = _get(cfg, "transfer", "")
    t0 = Epoch(_num(tr, "t0_mjd", "transfer"))
    if "tf_mjd" in tr:
        tf = Epoch(_num(tr, "tf_mjd", "transfer"))
    elif "tof_days" in tr:
        tf = Epoch(t0.mjd + _num(tr, "tof_days", "transfer"))
    elif "tof_years" in tr:
        tf = Epoch(t0.mjd + _num(tr, "tof_years", "transfer") * 365.25)
    else:
        raise _fail("CONFIG_MISSING_FIELD",
                    "missing transfer.tf_mjd (or tof_days / tof_years)")
    if tf.mjd <= t0.mjd:
        raise _fail("CONFIG_BAD_VALUE", "transfer must end after it starts")
    return oe0, oef, t0, tf, tr


def _revs(tr) -> int:
    v = _get(tr, "revs", "transfer")
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise _fail("CONFIG_BAD_VALUE",
                    "transfer.revs must be a nonnegative integer")
    return v


def _p_min(tr) -> float | None:
    v = _opt_num(tr, "p_min_au", None)
    return None if v is None else v * AU


def _bodies(cfg) -> dict[str, Body]:
    mu = _opt_num(cfg, "mu_m3_s2", MU_SUN)
    sec = _get(cfg, "bodies", "")
    if not isinstance(sec, dict) or not sec:
        raise _fail("CONFIG_BAD_VALUE", "bodies must be a non-empty map")
    out = {}
    for name, b in sec.items():
        where = f"bodies.{name}"
        out[name] = Body(name=str(name),
                         elements=_elements(b, where),
                         ref_epoch=Epoch(_num(b, "ref_mjd", where)),
                         mu_central=mu)
    return out


def _window(raw, where: str) -> tuple[Epoch, Epoch]:
    if (not isinstance(raw, (list, tuple)) or len(raw) != 2
            or not all(isinstance(v, (int, float)) for v in raw)):
        raise _fail("CONFIG_BAD_VALUE", f"{where} must be [lo_mjd, hi_mjd]")
    return Epoch(float(raw[0])), Epoch(float(raw[1]))


def _mission(cfg) -> MissionSpec:
    bodies = _bodies(cfg)
    raw_legs = _get(cfg, "legs", "")
    if not isinstance(raw_legs, list) or not raw_legs:
        raise _fail("CONFIG_BAD_VALUE", "legs must be a non-empty list")
    legs = []
    for i, rl in enumerate(raw_legs):
        where = f"legs[{i}]"
        names = (_get(rl, "from", where), _get(rl, "to", where))
        for nm in names:
            if nm not in bodies:
                raise _fail("CONFIG_BAD_VALUE", f"{where}: unknown body {nm!r}")
        estimator = rl.get("estimator", RAPID_SHAPE)
        if estimator not in (RAPID_SHAPE, LAMBERT):
            raise _fail("CONFIG_BAD_VALUE",
                        f"{where}.estimator must be "
                        f"{RAPID_SHAPE!r} or {LAMBERT!r}")
        try:
            legs.append(LegSpec(
                from_body=bodies[names[0]], to_body=bodies[names[1]],
                t0_bounds=_window(_get(rl, "t0_mjd", where), f"{where}.t0_mjd"),
                tf_bounds=_window(_get(rl, "tf_mjd", where), f"{where}.tf_mjd"),
                estimator=estimator))
        except ValueError as exc:
            raise _fail("CONFIG_BAD_VALUE", f"{where}: {exc}") from exc
    stays = cfg.get("stay_days", 0.0)
    if not isinstance(stays, (int, float, list, tuple)):
        raise _fail("CONFIG_BAD_VALUE", "stay_days must be a number or list")
    try:
        return MissionSpec(legs=tuple(legs), spacecraft=_spacecraft(cfg),
                           stay_days=stays)
    except ValueError as exc:
        raise _fail("CONFIG_BAD_VALUE", str(exc)) from exc


def _pso_config(cfg, seed_override: int | None) -> PsoConfig:
    sec = cfg.get("pso", {}) or {}
    seed = seed_override if seed_override is not None else sec.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise _fail("CONFIG_BAD_VALUE", "pso.seed must be an integer")
    try:
        return PsoConfig(
            swarm=int(sec.get("swarm", 20)), iters=int(sec.get("iters", 100)),
            seed=seed, inertia=float(sec.get("inertia", 0.7298)),
            cognitive=float(sec.get("cognitive", 1.49618)),
            social=float(sec.get("social", 1.49618)))
    except (TypeError, ValueError) as exc:
        raise _fail("CONFIG_BAD_VALUE", f"pso: {exc}") from exc


def _fmt(v: float) -> str:
    return format(float(v), ".16e")


def emit_profile(traj: ShapedTrajectory, sc: Spacecraft, nodes: int,
                 path: Path, m_start: float | None = None) -> None:
    """Write nodes+1 fixed-schema CSV rows along the trajectory.

    Deterministic 17-significant-digit formatting so identical inputs
    produce identical bytes.
    """
    grid = eval_grid(traj, np.linspace(0.0, 1.0, nodes + 1))
    m0 = sc.m0_kg if m_start is None else m_start
    dens = grid.u_norm * grid.t_prime
    dv_cum = np.concatenate((
        [0.0], np.cumsum(np.diff(grid.s) * 0.5 * (dens[1:] + dens[:-1]))))
    mass = m0 * np.exp(-dv_cum / sc.exhaust_velocity)
    thrust = mass * grid.u_norm
    lines = [CSV_HEADER]
    for i in range(len(grid.s)):
        vals = [grid.s[i], grid.t_sec[i], grid.L_rad[i],
                *grid.r_m[i], *grid.v_mps[i], *grid.u_mps2[i],
                grid.u_norm[i], mass[i], thrust[i]]
        lines.append(",".join(_fmt(v) for v in vals))
    path.write_text("\n".join(lines) + "\n")


def _finite(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _metric_summary(metrics) -> dict:
    return {
        "delta_v_km_s": _finite(metrics.delta_v_mps / 1000.0),
        "u_max_mm_s2": _finite(metrics.u_max_mps2 * 1000.0),
        "m_f_kg": _finite(metrics.m_final_kg),
        "thrust_max_n": _finite(metrics.thrust_max_n),
        "delta_t": _finite(metrics.delta_t),
        "delta_p": _finite(metrics.delta_p),
    }


def _write_summary(outdir: Path, data: dict, started: float) -> None:
    data["wall_time_s"] = time.perf_counter() - started
    text = json.dumps(data, indent=2, sort_keys=True, allow_nan=False)
    (outdir / "summary.json").write_text(text + "\n")


def _error(code: str, message: str) -> None:
    print(f"ERROR {code}: {message}", file=sys.stderr)


def _cmd_shape(cfg, outdir: Path, args, started: float) -> int:
    mu = _opt_num(cfg, "mu_m3_s2", MU_SUN)
    oe0, oef, t0, tf, tr = _transfer(cfg, mu)
    sc = _spacecraft(cfg)
    bc = boundary_conditions(oe0, oef, t0, tf, _revs(tr), mu)
    nodes = args.nodes or int(_opt_num(tr, "nodes", 0)) or None
    traj, report = shape_rapid(bc, mu, p_min=_p_min(tr), nodes=nodes)
    nodes_out = nodes if nodes is not None else traj.default_nodes()
    metrics = with_feasibility(mass_and_metrics(traj, sc, nodes),
                               report.delta_t, report.delta_p)
    summary = {"scenario": "shape", "revs": bc.revs,
               "t0_mjd": t0.mjd, "tf_mjd": tf.mjd,
               "feasible": report.feasible, **_metric_summary(metrics)}
    if not report.feasible:
        _write_summary(outdir, summary, started)
        _error("INFEASIBLE_SHAPE",
               "flight-time constraint has no admissible knot")
        return 3
    emit_profile(traj, sc, nodes_out, outdir / "trajectory.csv")
    _write_summary(outdir, summary, started)
    return 0


def _cmd_scan_revs(cfg, outdir: Path, args, started: float) -> int:
    mu = _opt_num(cfg, "mu_m3_s2", MU_SUN)
    oe0, oef, t0, tf, tr = _transfer(cfg, mu)
    sc = _spacecraft(cfg)
    scan = cfg.get("scan", {}) or {}
    rev_range = None
    if "rev_min" in scan or "rev_max" in scan:
        rev_range = (int(_opt_num(scan, "rev_min", 0)),
                     int(_num(scan, "rev_max", "scan")))
    nodes = args.nodes or int(_opt_num(tr, "nodes", 0)) or None
    try:
        choice = best_revolution(oe0, oef, t0, tf, mu, rev_range=rev_range,
                                 p_min=_p_min(tr), nodes=nodes, sc=sc)
    except NoFeasibleRevolution as exc:
        _write_summary(outdir, {"scenario": "scan_revs", "feasible": False,
                                "t0_mjd": t0.mjd, "tf_mjd": tf.mjd}, started)
        _error("INFEASIBLE_SCAN", str(exc))
        return 3
    traj = choice.trajectory
    nodes_out = nodes if nodes is not None else traj.default_nodes()
    summary = {"scenario": "scan_revs", "revs_opt": choice.revs,
               "revs": choice.revs, "t0_mjd": t0.mjd, "tf_mjd": tf.mjd,
               "feasible": True, **_metric_summary(choice.metrics)}
    emit_profile(traj, sc, nodes_out, outdir / "trajectory.csv")
    _write_summary(outdir, summary, started)
    return 0


def _cmd_optimize(cfg, outdir: Path, args, started: float) -> int:
    mu = _opt_num(cfg, "mu_m3_s2", MU_SUN)
    oe0, oef, t0, tf, tr = _transfer(cfg, mu)
    sc = _spacecraft(cfg)
    bc = boundary_conditions(oe0, oef, t0, tf, _revs(tr), mu)
    sh = _get(cfg, "shaping", "")
    n = int(_num(sh, "n", "shaping"))
    c = int(_num(sh, "c", "shaping"))
    nodes = args.nodes or int(_opt_num(tr, "nodes", 0)) or None
    result = optimize(
        bc, sc, mu, n=n, c=c,
        tol_rel=_opt_num(sh, "tol_rel", DEFAULT_TOL_REL),
        max_evals=int(_opt_num(sh, "max_evals", DEFAULT_MAX_EVALS)),
        p_min=_p_min(tr), nodes=nodes,
        rhobeg=_opt_num(sh, "rhobeg", 0.5))
    nodes_out = (nodes if nodes is not None
                 else result.trajectory.default_nodes())
    summary = {"scenario": "optimize", "revs": bc.revs, "n": n, "c": c,
               "t0_mjd": t0.mjd, "tf_mjd": tf.mjd,
               "objective_kg": _finite(result.objective_kg),
               "init_objective_kg": _finite(result.init_objective_kg),
               "evaluations": result.evaluations,
               "capped": result.capped,
               "feasible": result.report.feasible,
               "thrust_constraints_met": result.feasible,
               **_metric_summary(result.metrics)}
    emit_profile(result.trajectory, sc, nodes_out, outdir / "trajectory.csv")
    _write_summary(outdir, summary, started)
    if not result.report.feasible:
        _error("INFEASIBLE_SHAPE",
               "flight-time constraint infeasible at the returned point")
        return 3
    if result.capped:
        _error("OPTIMIZER_CAPPED",
               "evaluation cap reached; best point so far was written")
        return 4
    return 0


def _leg_summaries(mission: MissionSpec, results) -> list[dict]:
    rows = []
    for r in results:
        rows.append({
            "leg": r.index,
            "from": mission.legs[r.index].from_body.name,
            "to": mission.legs[r.index].to_body.name,
            "estimator": mission.legs[r.index].estimator,
            "t_dep_mjd": r.t_dep_mjd, "t_arr_mjd": r.t_arr_mjd,
            "m_start_kg": _finite(r.m_start_kg),
            "delta_m_kg": _finite(r.delta_m_kg),
            "m_end_kg": _finite(r.m_end_kg),
            "revs": r.revs,
            "delta_v_km_s": _finite(r.delta_v_mps / 1000.0),
        })
    return rows


def _emit_leg_profiles(mission: MissionSpec, results, outdir: Path,
                       nodes: int | None) -> None:
    for r in results:
        if r.trajectory is None or not math.isfinite(r.m_end_kg):
            continue
        count = nodes if nodes is not None else r.trajectory.default_nodes()
        emit_profile(r.trajectory, mission.spacecraft, count,
                     outdir / f"leg{r.index}_trajectory.csv",
                     m_start=r.m_start_kg)


def _cmd_search(cfg, outdir: Path, args, started: float) -> int:
    mission = _mission(cfg)
    pso = _pso_config(cfg, args.seed)
    sec = cfg.get("search", {}) or {}
    nodes = args.nodes or int(_opt_num(sec, "nodes", SEARCH_NODES))
    probe = int(_opt_num(sec, "probe_nodes", SEARCH_PROBE_NODES))
    res = pso_search(mission, pso, nodes=nodes, probe_nodes=probe)
    hist = ["iteration,best_dm_kg"]
    hist += [f"{i + 1},{_fmt(v)}" for i, v in enumerate(res.history)]
    (outdir / "history.csv").write_text("\n".join(hist) + "\n")
    summary = {"scenario": "search", "epochs_mjd": res.epochs_mjd,
               "best_dm_kg": _finite(res.best_dm_kg),
               "evaluations": res.evaluations,
               "iterations": len(res.history), "seed": pso.seed,
               "feasible": math.isfinite(res.best_dm_kg)}
    if not math.isfinite(res.best_dm_kg):
        _write_summary(outdir, summary, started)
        _error("INFEASIBLE_LEG", "no feasible epoch vector found")
        return 3
    results = evaluate_mission(mission, res.epochs_mjd, nodes=nodes,
                               probe_nodes=probe)
    summary["legs"] = _leg_summaries(mission, results)
    summary["m_final_kg"] = _finite(results[-1].m_end_kg)
    _emit_leg_profiles(mission, results, outdir, args.nodes)
    _write_summary(outdir, summary, started)
    return 0


def _cmd_mission(cfg, outdir: Path, args, started: float) -> int:
    mission = _mission(cfg)
    raw = _get(cfg, "epochs_mjd", "")
    if (not isinstance(raw, (list, tuple))
            or len(raw) != len(mission.legs) + 1
            or not all(isinstance(v, (int, float)) for v in raw)):
        raise _fail("CONFIG_BAD_VALUE",
                    "epochs_mjd must list one MJD per leg boundary")
    epochs = [float(v) for v in raw]
    try:
        results = evaluate_mission(mission, epochs, nodes=args.nodes)
    except ValueError as exc:
        raise _fail("CONFIG_BAD_VALUE", str(exc)) from exc
    durations = leg_durations(epochs, mission.stay_days)
    total_dm = sum(r.delta_m_kg for r in results)
    summary = {"scenario": "mission", "epochs_mjd": epochs,
               "stay_days": list(mission.stay_days),
               "durations_days": durations,
               "legs": _leg_summaries(mission, results),
               "total_dm_kg": _finite(total_dm),
               "m_final_kg": _finite(results[-1].m_end_kg),
               "feasible": math.isfinite(total_dm)}
    _emit_leg_profiles(mission, results, outdir, args.nodes)
    _write_summary(outdir, summary, started)
    if not math.isfinite(total_dm):
        _error("INFEASIBLE_LEG", "at least one leg has no feasible estimate")
        return 3
    return 0


_COMMANDS = {
    "shape": ("shape", _cmd_shape),
    "optimize": ("optimize", _cmd_optimize),
    "scan-revs": ("scan_revs", _cmd_scan_revs),
    "search": ("search", _cmd_search),
    "mission": ("mission", _cmd_mission),
}


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _fail("CONFIG_UNREADABLE", f"cannot read {path}: {exc}")
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise _fail("CONFIG_PARSE", f"cannot parse {path}: {exc}")
    if not isinstance(cfg, dict):
        raise _fail("CONFIG_PARSE", "config root must be a key/value map")
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="splinetraj",
        description="Spline-shaped low-thrust trajectory toolbox")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--nodes", type=int, default=None)
    args = parser.parse_args(argv)

    scenario, handler = _COMMANDS[args.command]
    started = time.perf_counter()
    try:
        cfg = _load_config(args.config)
        declared = cfg.get("scenario")
        if declared is not None and declared != scenario:
            raise _fail("CONFIG_BAD_VALUE",
                        f"config declares scenario {declared!r} but the "
                        f"{args.command} command runs {scenario!r}")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        return handler(cfg, outdir, args, started)
    except ConfigError as exc:
        _error(exc.code, str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
