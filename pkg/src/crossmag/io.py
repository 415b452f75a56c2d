"""Result serialization: trajectory CSV, phase-record CSV, and OVF snapshots.

All numeric output is locale-independent and uses 12 significant digits, so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io as _io

import numpy as np

from .dynamics import Trajectory
from .errors import InvalidArgumentError
from .experiments import PhaseRecord, StateId
from .mesh import Mesh

TIMESERIES_HEADER = ("t_ns,mx_avg,my_avg,mz_avg,mx_short,my_long,"
                     "E_ex_J,E_d_J,E_z_J")
PHASE_HEADER = "material,J_Apm2,pulse_ns,final_state,t_s_ns,anomaly"


def _num(x: float) -> str:
    return f"{x:.11e}"


def write_timeseries(traj: Trajectory, path) -> None:
    """One CSV row per trajectory sample; times in ns, energies in J."""
    lines = [TIMESERIES_HEADER]
    for i in range(len(traj.t)):
        lines.append(",".join((
            _num(traj.t[i] * 1e9),
            _num(traj.m_avg[i, 0]), _num(traj.m_avg[i, 1]), _num(traj.m_avg[i, 2]),
            _num(traj.mx_short[i]), _num(traj.my_long[i]),
            _num(traj.E_exchange[i]), _num(traj.E_demag[i]), _num(traj.E_zeeman[i]),
        )))
    _write_text(path, "\n".join(lines) + "\n")


def read_timeseries(path) -> Trajectory:
    """Parse a timeseries CSV back into a Trajectory (no snapshots)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if ",".join(header) != TIMESERIES_HEADER:
            raise InvalidArgumentError(f"unexpected timeseries header in {path}")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, 9)
    return Trajectory(t=data[:, 0] * 1e-9, m_avg=data[:, 1:4],
                      mx_short=data[:, 4], my_long=data[:, 5],
                      E_exchange=data[:, 6], E_demag=data[:, 7],
                      E_zeeman=data[:, 8])


def write_phase_records(records, path) -> None:
    """Phase-record table; switching time in ns, empty when absent."""
    lines = [PHASE_HEADER]
    for r in records:
        ts = "" if r.switching_time is None else _num(r.switching_time * 1e9)
        anomaly = r.anomaly.replace(",", ";").replace("\n", " ")
        lines.append(",".join((r.material, _num(r.J),
                               _num(r.pulse_duration * 1e9),
                               r.final_state.name, ts, anomaly)))
    _write_text(path, "\n".join(lines) + "\n")


def read_phase_records(path) -> list[PhaseRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if ",".join(header) != PHASE_HEADER:
            raise InvalidArgumentError(f"unexpected phase header in {path}")
        out = []
        for row in reader:
            if not row:
                continue
            mat, j, pulse, state, ts, anomaly = row
            out.append(PhaseRecord(
                material=mat, J=float(j), pulse_duration=float(pulse) * 1e-9,
                final_state=StateId[state],
                switching_time=None if ts == "" else float(ts) * 1e-9,
                anomaly=anomaly))
    return out


def write_snapshot(m: np.ndarray, mesh: Mesh, path, title: str = "m") -> None:
    """OVF 2.0 text snapshot, x-fastest data order, vacuum cells as zeros."""
    if m.shape != mesh.shape + (3,):
        raise InvalidArgumentError(
            f"state shape {m.shape} does not match mesh grid {mesh.shape}")
    ox, oy, oz = mesh.origin
    buf = _io.StringIO()
    w = buf.write
    w("# OOMMF OVF 2.0\n")
    w("# Segment count: 1\n")
    w("# Begin: Segment\n")
    w("# Begin: Header\n")
    w(f"# Title: {title}\n")
    w("# meshtype: rectangular\n")
    w("# meshunit: m\n")
    w(f"# xmin: {ox:.12g}\n# ymin: {oy:.12g}\n# zmin: {oz:.12g}\n")
    w(f"# xmax: {ox + mesh.nx * mesh.dx:.12g}\n")
    w(f"# ymax: {oy + mesh.ny * mesh.dy:.12g}\n")
    w(f"# zmax: {oz + mesh.nz * mesh.dz:.12g}\n")
    w(f"# xbase: {ox + 0.5 * mesh.dx:.12g}\n")
    w(f"# ybase: {oy + 0.5 * mesh.dy:.12g}\n")
    w(f"# zbase: {oz + 0.5 * mesh.dz:.12g}\n")
    w(f"# xstepsize: {mesh.dx:.12g}\n")
    w(f"# ystepsize: {mesh.dy:.12g}\n")
    w(f"# zstepsize: {mesh.dz:.12g}\n")
    w(f"# xnodes: {mesh.nx}\n# ynodes: {mesh.ny}\n# znodes: {mesh.nz}\n")
    w("# valuedim: 3\n")
    w("# valuelabels: m_x m_y m_z\n")
    w("# valueunits: 1 1 1\n")
    w("# End: Header\n")
    w("# Begin: Data Text\n")
    for iz in range(mesh.nz):
        for iy in range(mesh.ny):
            for ix in range(mesh.nx):
                vx, vy, vz = m[ix, iy, iz]
                w(f"{vx:.12g} {vy:.12g} {vz:.12g}\n")
    w("# End: Data Text\n")
    w("# End: Segment\n")
    _write_text(path, buf.getvalue())


def read_snapshot(path) -> tuple[np.ndarray, dict]:
    """Read an OVF 2.0 text snapshot; returns (m array, header fields)."""
    header: dict = {}
    values = []
    in_data = False
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if "OVF 2" not in first:
            raise InvalidArgumentError(f"{path} is not an OVF 2.0 file")
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("Begin: Data Text"):
                    in_data = True
                elif body.startswith("End: Data"):
                    in_data = False
                elif ":" in body:
                    key, _, val = body.partition(":")
                    header[key.strip()] = val.strip()
            elif in_data and line:
                values.append([float(v) for v in line.split()])
    try:
        nx = int(header["xnodes"])
        ny = int(header["ynodes"])
        nz = int(header["znodes"])
    except KeyError as exc:
        raise InvalidArgumentError(f"{path} lacks node counts") from exc
    data = np.array(values, dtype=float)
    if data.shape != (nx * ny * nz, 3):
        raise InvalidArgumentError(
            f"{path} has {data.shape[0]} data rows, expected {nx * ny * nz}")
    # x-fastest order -> index (ix, iy, iz)
    m = data.reshape(nz, ny, nx, 3).transpose(2, 1, 0, 3)
    return np.ascontiguousarray(m), header


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
