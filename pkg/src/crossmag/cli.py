"""Command-line entry points for runs, sweeps, and phase diagrams.

Every experiment command reads one TOML config (``--config``) and writes its
artifacts plus an echo of the fully resolved config under ``--out``, so a
finished directory is self-describing and re-runnable.  Exit codes: 0 on
success, 2 on usage errors, 1 on anything else.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import RunConfig, dump_config, load_config
from .dynamics import Simulation
from .errors import CrossmagError, IndeterminateError, NonConvergenceError
from .experiments import (classify_state, phase_diagram, seed_state,
                          prepare_state, sweep_current, switching_time,
                          two_pulse_protocol)
from .io import write_phase_records, write_snapshot, write_timeseries
from .macrospin import MacrospinParams, critical_current_density
from .materials import builtin_names, get_material
from .version import __version__


def _setup_logging() -> None:
    level_name = os.environ.get("CROSSMAG_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level,
                        format="%(asctime)s %(name)s %(message)s")


def _ensure_out(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _echo_config(cfg: RunConfig, out: str) -> None:
    with open(os.path.join(out, "config.toml"), "w", encoding="utf-8") as fh:
        fh.write(dump_config(cfg))


def _session(cfg: RunConfig, geom, snapshot_every=None) -> Simulation:
    return Simulation(geom.mesh, cfg.material, mask=geom.mask,
                      regions=geom.regions, H_applied=cfg.H_applied,
                      config=cfg.integrator, sample_dt=cfg.sample_dt,
                      snapshot_dt=snapshot_every, Lambda=cfg.Lambda,
                      eps_prime=cfg.eps_prime, gamma=cfg.gamma)


def _write_snapshots(traj, mesh, out: str) -> None:
    for i, (t, m) in enumerate(traj.snapshots):
        path = os.path.join(out, f"snapshot_{i:04d}.ovf")
        write_snapshot(m, mesh, path, title=f"m at t = {t * 1e9:.6g} ns")


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_out(args)
    _echo_config(cfg, out)
    snap = cfg.snapshot_every
    if args.snapshot_every_ns is not None:
        snap = args.snapshot_every_ns * 1e-9
    geom = cfg.geometry()
    m0 = prepare_state(cfg.initial_state, cfg.material, geom,
                       config=cfg.integrator, H_applied=cfg.H_applied,
                       gamma=cfg.gamma)
    sim = _session(cfg, geom, snapshot_every=snap)
    sim.set_state(m0)
    traj = sim.run_pulse(list(cfg.pulse), post_relax=cfg.post_relax)
    write_timeseries(traj, os.path.join(out, "timeseries.csv"))
    _write_snapshots(traj, geom.mesh, out)
    write_snapshot(sim.m, geom.mesh, os.path.join(out, "final.ovf"),
                   title="final state")
    final = classify_state(sim.m, geom.regions)
    try:
        ts = switching_time(traj, "short_x")
        ts_txt = "none" if ts is None else f"{ts * 1e9:.4f} ns"
    except IndeterminateError:
        ts_txt = "indeterminate (trajectory ends inside the hold window)"
    print(f"final state: {final.name}")
    print(f"switching time (short-arm m_x): {ts_txt}")
    return 0


def _cmd_relax(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_out(args)
    _echo_config(cfg, out)
    geom = cfg.geometry()
    sim = _session(cfg, geom)
    sim.set_state(seed_state(cfg.initial_state, geom))
    code = 0
    try:
        traj = sim.relax()
    except NonConvergenceError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        traj = exc.trajectory
        code = 1
    write_timeseries(traj, os.path.join(out, "timeseries.csv"))
    write_snapshot(sim.m, geom.mesh, os.path.join(out, "final.ovf"),
                   title="relaxed state")
    print(f"final state: {classify_state(sim.m, geom.regions).name}")
    return code


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_out(args)
    _echo_config(cfg, out)
    records = sweep_current(
        cfg.material, cfg.sweep.grid(), cfg.sweep.pulse_ns,
        start_state=cfg.initial_state, geom=cfg.geometry(),
        config=cfg.integrator, post_relax_ns=cfg.post_relax * 1e9,
        sample_ps=cfg.sample_dt * 1e12, H_applied=cfg.H_applied,
        workers=args.workers, Lambda=cfg.Lambda, eps_prime=cfg.eps_prime,
        gamma=cfg.gamma)
    write_phase_records(records, os.path.join(out, "sweep.csv"))
    switched = sum(r.switching_time is not None for r in records)
    print(f"{len(records)} points, {switched} with a switching event")
    return 0


def _cmd_phase(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_out(args)
    _echo_config(cfg, out)
    diagram = phase_diagram(
        cfg.phase.materials, cfg.phase.sweep.grid(), cfg.phase.sweep.pulse_ns,
        geom=cfg.geometry(), config=cfg.integrator,
        post_relax_ns=cfg.post_relax * 1e9, sample_ps=cfg.sample_dt * 1e12,
        workers=args.workers, Lambda=cfg.Lambda, eps_prime=cfg.eps_prime,
        gamma=cfg.gamma)
    write_phase_records(diagram.records, os.path.join(out, "phase.csv"))
    lines = ["material,J_c1_Apm2,J_c2_Apm2"]
    for name in cfg.phase.materials:
        j1, j2 = diagram.thresholds[name]
        lines.append(",".join((
            name,
            "" if j1 is None else f"{j1:.11e}",
            "" if j2 is None else f"{j2:.11e}")))
        print(f"{name}: J_c1 = {j1}  J_c2 = {j2}")
    with open(os.path.join(out, "thresholds.csv"), "w", encoding="utf-8",
              newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    if diagram.anomalies:
        with open(os.path.join(out, "anomalies.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write("\n".join(diagram.anomalies) + "\n")
        print(f"{len(diagram.anomalies)} anomalies noted", file=sys.stderr)
    return 0


def _cmd_twopulse(args) -> int:
    cfg = load_config(args.config)
    out = _ensure_out(args)
    _echo_config(cfg, out)
    tp = cfg.twopulse
    mid, final = two_pulse_protocol(
        cfg.material, tp.J1, tp.J2, tp.pulse_ns, geom=cfg.geometry(),
        config=cfg.integrator, post_relax_ns=cfg.post_relax * 1e9,
        sample_ps=cfg.sample_dt * 1e12, Lambda=cfg.Lambda,
        eps_prime=cfg.eps_prime, gamma=cfg.gamma)
    with open(os.path.join(out, "twopulse.csv"), "w", encoding="utf-8",
              newline="") as fh:
        fh.write("J1_Apm2,J2_Apm2,pulse_ns,intermediate,final\n")
        fh.write(f"{tp.J1:.11e},{tp.J2:.11e},{tp.pulse_ns:.11e},"
                 f"{mid.name},{final.name}\n")
    print(f"after pulse 1: {mid.name}")
    print(f"after pulse 2: {final.name}")
    return 0


def _cmd_jc(args) -> int:
    print(f"{'material':<10}{'J_co_Apm2':>14}")
    for name in builtin_names():
        mat = get_material(name)
        jc = critical_current_density(MacrospinParams(material=mat))
        print(f"{mat.name:<10}{jc:>14.6e}")
    return 0


def _cmd_materials(args) -> int:
    print(f"{'name':<8}{'Ms_Apm':>12}{'A_Jpm':>12}{'P':>8}{'alpha':>8}")
    for name in builtin_names():
        mat = get_material(name)
        print(f"{mat.name:<8}{mat.Ms:>12.4g}{mat.A:>12.4g}"
              f"{mat.P:>8.3g}{mat.alpha:>8.3g}")
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossmag",
        description="Spin-torque switching simulations on a cross-shaped "
                    "free layer.")
    parser.add_argument("--version", action="version",
                        version=f"crossmag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, needs_config=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if needs_config:
            p.add_argument("--config", required=True,
                           help="TOML run configuration")
            p.add_argument("--out", default="out",
                           help="output directory (default: out)")
            p.add_argument("--workers", type=int, default=1,
                           help="worker processes for sweep points")
            p.add_argument("--snapshot-every-ns", type=float, default=None,
                           help="write an OVF snapshot every X ns")
            p.add_argument("--seedless", action="store_true",
                           help="reserved; no stochastic elements exist")
        return p

    add("run", _cmd_run, "apply the configured pulse schedule and relax")
    add("relax", _cmd_relax, "relax the seeded initial state, no current")
    add("sweep", _cmd_sweep, "switching-time sweep over a current grid")
    add("phase", _cmd_phase, "final-state diagram over materials and currents")
    add("twopulse", _cmd_twopulse, "two opposite pulses from the initial state")
    add("jc", _cmd_jc, "print the analytic critical current densities",
        needs_config=False)
    add("materials", _cmd_materials, "list the built-in material parameters",
        needs_config=False)
    return parser


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    _setup_logging()
    try:
        return args.func(args)
    except (CrossmagError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
