"""Run configuration: strict TOML parsing, defaults, and echo emission.

A minimal config is just `material = "CFAS"`; every other key has a
documented default chosen so that the bare config runs the standard
single-pulse experiment (J = -3e11 A/m^2 for 6 ns, then 4 ns of free
relaxation).  Unknown keys anywhere are rejected with their dotted path.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .constants import GAMMA_LL
from .dynamics import IntegratorConfig, PulseSegment
from .errors import ConfigError, InvalidArgumentError, NotFoundError
from .experiments import StateId, default_sweep_grid
from .materials import Material, builtin_names, get_material

_DEFAULT_MP = (0.92, 0.382, 0.0)
_DEFAULT_PULSE = {"J_Apm2": -3e11, "duration_ns": 6.0}


def _reject_unknown(table: dict, allowed, path: str) -> None:
    for key in table:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown config key '{where}'")


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{path}' must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"'{path}' must be finite, got {value!r}")
    return float(value)


def _pos(value, path: str) -> float:
    out = _num(value, path)
    if out <= 0:
        raise ConfigError(f"'{path}' must be positive, got {value!r}")
    return out


def _vec3(value, path: str) -> tuple:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"'{path}' must be a list of three numbers")
    return tuple(_num(v, f"{path}[{i}]") for i, v in enumerate(value))


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"'{path}' must be a string, got {value!r}")
    return value


def _table(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"'{path}' must be a table")
    return value


@dataclass(frozen=True)
class SweepOptions:
    """Current grid for sweep and phase runs (ascending magnitudes)."""

    J_min: float = 1e10
    J_max: float = 4e12
    points: int = 30
    sign: float = -1.0
    pulse_ns: float = 6.0
    values: tuple = ()

    def grid(self) -> np.ndarray:
        if self.values:
            return np.array(self.values, dtype=float)
        return default_sweep_grid(self.points, self.J_min, self.J_max, self.sign)


@dataclass(frozen=True)
class PhaseOptions:
    materials: tuple = ("Co", "CMS", "CFAS")
    sweep: SweepOptions = field(default_factory=SweepOptions)


@dataclass(frozen=True)
class TwoPulseOptions:
    J1: float = -1e12
    J2: float = 4e11
    pulse_ns: float = 6.0


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings (SI units internally)."""

    material: Material
    box: tuple = (100e-9, 140e-9, 2e-9)
    cell: float = 2e-9
    cross_w: float = 50e-9
    cross_l1: float = 100e-9
    cross_l2: float = 140e-9
    H_applied: tuple = (0.0, 0.0, 0.0)
    pulse: tuple = ()
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    sample_dt: float = 1e-12
    post_relax: float = 4e-9
    Lambda: float = 1.0
    eps_prime: float = 0.06
    gamma: float = GAMMA_LL
    initial_state: StateId = StateId.S1
    snapshot_every: float | None = None
    sweep: SweepOptions = field(default_factory=SweepOptions)
    phase: PhaseOptions = field(default_factory=PhaseOptions)
    twopulse: TwoPulseOptions = field(default_factory=TwoPulseOptions)

    def geometry(self):
        from .experiments import Geometry
        from .mesh import CrossSpec, build_mesh
        mesh = build_mesh(self.box[0], self.box[1], self.box[2], self.cell)
        spec = CrossSpec(w=self.cross_w, l1=self.cross_l1, l2=self.cross_l2)
        return Geometry(mesh=mesh, spec=spec)


def _lookup_material(name: str, path: str) -> Material:
    try:
        return get_material(name)
    except NotFoundError as exc:
        raise ConfigError(f"'{path}': {exc}") from exc


def _parse_material(value) -> Material:
    if isinstance(value, str):
        return _lookup_material(value, "material")
    table = _table(value, "material")
    _reject_unknown(table, {"name", "Ms", "A", "P", "alpha"}, "material")
    try:
        return Material(name=_string(table.get("name", "custom"), "material.name"),
                        Ms=_pos(table.get("Ms"), "material.Ms"),
                        A=_pos(table.get("A"), "material.A"),
                        P=_num(table.get("P"), "material.P"),
                        alpha=_num(table.get("alpha"), "material.alpha"))
    except (TypeError, InvalidArgumentError) as exc:
        raise ConfigError(f"invalid inline material: {exc}") from exc


def _parse_pulse(entries) -> tuple:
    if not isinstance(entries, list) or not entries:
        raise ConfigError("'pulse' must be a non-empty array of tables")
    segments = []
    for i, entry in enumerate(entries):
        path = f"pulse[{i}]"
        table = _table(entry, path)
        _reject_unknown(table, {"J_Apm2", "duration_ns", "mp"}, path)
        if "J_Apm2" not in table:
            raise ConfigError(f"'{path}.J_Apm2' is required")
        J = _num(table["J_Apm2"], f"{path}.J_Apm2")
        dur = _pos(table.get("duration_ns", 6.0), f"{path}.duration_ns")
        mp = _vec3(table.get("mp", list(_DEFAULT_MP)), f"{path}.mp")
        try:
            segments.append(PulseSegment(J=J, duration=dur * 1e-9, m_p=mp))
        except InvalidArgumentError as exc:
            raise ConfigError(f"invalid '{path}': {exc}") from exc
    return tuple(segments)


def _parse_sweep(table: dict, path: str) -> SweepOptions:
    allowed = {"J_min_Apm2", "J_max_Apm2", "points", "sign", "pulse_ns",
               "values_Apm2"}
    _reject_unknown(table, allowed, path)
    values = table.get("values_Apm2", [])
    if values and not isinstance(values, list):
        raise ConfigError(f"'{path}.values_Apm2' must be a list")
    points = table.get("points", 30)
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ConfigError(f"'{path}.points' must be a positive integer")
    sign = _num(table.get("sign", -1.0), f"{path}.sign")
    if sign not in (-1.0, 1.0):
        raise ConfigError(f"'{path}.sign' must be -1 or 1")
    return SweepOptions(
        J_min=_pos(table.get("J_min_Apm2", 1e10), f"{path}.J_min_Apm2"),
        J_max=_pos(table.get("J_max_Apm2", 4e12), f"{path}.J_max_Apm2"),
        points=points, sign=sign,
        pulse_ns=_pos(table.get("pulse_ns", 6.0), f"{path}.pulse_ns"),
        values=tuple(_num(v, f"{path}.values_Apm2[{i}]")
                     for i, v in enumerate(values)))


_TOP_KEYS = {"material", "box_nm", "cell_nm", "cross", "H_applied_Apm",
             "pulse", "integrator", "sample_ps", "post_relax_ns", "torque",
             "gamma_LL", "initial_state", "output", "sweep", "phase",
             "twopulse"}


def parse_config(text: str) -> RunConfig:
    """Parse and validate TOML text into a fully defaulted RunConfig."""
    try:
        raw = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc
    _reject_unknown(raw, _TOP_KEYS, "")
    if "material" not in raw:
        raise ConfigError("'material' is required (one of "
                          f"{', '.join(builtin_names())}, or an inline table)")
    material = _parse_material(raw["material"])

    box_nm = _vec3(raw.get("box_nm", [100.0, 140.0, 2.0]), "box_nm")
    if any(v <= 0 for v in box_nm):
        raise ConfigError("'box_nm' entries must be positive")
    cell_nm = _pos(raw.get("cell_nm", 2.0), "cell_nm")

    cross = _table(raw.get("cross", {}), "cross")
    _reject_unknown(cross, {"w_nm", "l1_nm", "l2_nm"}, "cross")
    w_nm = _pos(cross.get("w_nm", 50.0), "cross.w_nm")
    l1_nm = _pos(cross.get("l1_nm", 100.0), "cross.l1_nm")
    l2_nm = _pos(cross.get("l2_nm", 140.0), "cross.l2_nm")

    H_applied = _vec3(raw.get("H_applied_Apm", [0.0, 0.0, 0.0]), "H_applied_Apm")

    pulse = _parse_pulse(raw.get("pulse", [dict(_DEFAULT_PULSE)]))

    integ = _table(raw.get("integrator", {}), "integrator")
    _reject_unknown(integ, {"rel_tol", "abs_tol", "dt_max_ps"}, "integrator")
    try:
        integrator = IntegratorConfig(
            abs_tol=_pos(integ.get("abs_tol", 1e-7), "integrator.abs_tol"),
            rel_tol=_pos(integ.get("rel_tol", 1e-6), "integrator.rel_tol"),
            dt_max=_pos(integ.get("dt_max_ps", 1.0), "integrator.dt_max_ps") * 1e-12)
    except InvalidArgumentError as exc:
        raise ConfigError(f"invalid integrator settings: {exc}") from exc

    torque = _table(raw.get("torque", {}), "torque")
    _reject_unknown(torque, {"Lambda", "eps_prime"}, "torque")
    Lambda = _num(torque.get("Lambda", 1.0), "torque.Lambda")
    if Lambda < 1.0:
        raise ConfigError("'torque.Lambda' must be >= 1")
    eps_prime = _num(torque.get("eps_prime", 0.06), "torque.eps_prime")

    state_name = _string(raw.get("initial_state", "S1"), "initial_state")
    if state_name not in ("S1", "S2", "S3", "S4"):
        raise ConfigError("'initial_state' must be one of S1, S2, S3, S4")

    output = _table(raw.get("output", {}), "output")
    _reject_unknown(output, {"snapshot_every_ns"}, "output")
    snap = output.get("snapshot_every_ns")
    snapshot_every = None if snap is None else _pos(snap, "output.snapshot_every_ns") * 1e-9

    sweep = _parse_sweep(_table(raw.get("sweep", {}), "sweep"), "sweep")

    phase_tbl = _table(raw.get("phase", {}), "phase")
    _reject_unknown(phase_tbl, {"materials", "sweep"}, "phase")
    mats = phase_tbl.get("materials", ["Co", "CMS", "CFAS"])
    if not isinstance(mats, list) or not mats:
        raise ConfigError("'phase.materials' must be a non-empty list")
    for i, name in enumerate(mats):
        _lookup_material(_string(name, f"phase.materials[{i}]"),
                         f"phase.materials[{i}]")
    phase = PhaseOptions(
        materials=tuple(mats),
        sweep=_parse_sweep(_table(phase_tbl.get("sweep", {}), "phase.sweep"),
                           "phase.sweep"))

    tp = _table(raw.get("twopulse", {}), "twopulse")
    _reject_unknown(tp, {"J1_Apm2", "J2_Apm2", "pulse_ns"}, "twopulse")
    twopulse = TwoPulseOptions(
        J1=_num(tp.get("J1_Apm2", -1e12), "twopulse.J1_Apm2"),
        J2=_num(tp.get("J2_Apm2", 4e11), "twopulse.J2_Apm2"),
        pulse_ns=_pos(tp.get("pulse_ns", 6.0), "twopulse.pulse_ns"))

    return RunConfig(
        material=material,
        box=tuple(v * 1e-9 for v in box_nm),
        cell=cell_nm * 1e-9,
        cross_w=w_nm * 1e-9, cross_l1=l1_nm * 1e-9, cross_l2=l2_nm * 1e-9,
        H_applied=H_applied,
        pulse=pulse,
        integrator=integrator,
        sample_dt=_pos(raw.get("sample_ps", 1.0), "sample_ps") * 1e-12,
        post_relax=_num(raw.get("post_relax_ns", 4.0), "post_relax_ns") * 1e-9,
        Lambda=Lambda, eps_prime=eps_prime,
        gamma=_pos(raw.get("gamma_LL", GAMMA_LL), "gamma_LL"),
        initial_state=StateId[state_name],
        snapshot_every=snapshot_every,
        sweep=sweep, phase=phase, twopulse=twopulse)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# -- echo emission ---------------------------------------------------------

def _display(v: float, k: float) -> float:
    """Display value q with q * k == v exactly, when such a q exists.

    Parsing scales config numbers by k (ns, nm, ps into SI); emitting v / k
    naively can drift by an ulp per round trip.  Searching the few floats
    around v / k for an exact preimage keeps echo -> parse -> echo stable.
    """
    q = v / k
    for _ in range(5):
        if q * k == v:
            return q
        q = math.nextafter(q, math.inf if q * k < v else -math.inf)
    return v / k


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # plain-float repr round-trips exactly and numpy scalars coerce
        return repr(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        inner = ", ".join(f"{k} = {_fmt(v)}" for k, v in value.items())
        return "{" + inner + "}"
    raise TypeError(f"cannot format {value!r}")


def dump_config(cfg: RunConfig) -> str:
    """Emit the resolved config as TOML; parsing it back is an exact round trip."""
    mat = cfg.material
    builtin = mat.name in builtin_names() and get_material(mat.name) == mat
    lines = []
    if builtin:
        lines.append(f"material = {_fmt(mat.name)}")
    lines += [
        f"box_nm = {_fmt([_display(v, 1e-9) for v in cfg.box])}",
        f"cell_nm = {_fmt(_display(cfg.cell, 1e-9))}",
        f"H_applied_Apm = {_fmt(list(cfg.H_applied))}",
        f"sample_ps = {_fmt(_display(cfg.sample_dt, 1e-12))}",
        f"post_relax_ns = {_fmt(_display(cfg.post_relax, 1e-9))}",
        f"gamma_LL = {_fmt(cfg.gamma)}",
        f"initial_state = {_fmt(cfg.initial_state.name)}",
        "pulse = " + _fmt([
            {"J_Apm2": seg.J, "duration_ns": _display(seg.duration, 1e-9),
             "mp": list(seg.m_p)} for seg in cfg.pulse]),
    ]
    if not builtin:
        lines += ["", "[material]"]
        lines += [f"{k} = {_fmt(getattr(mat, k))}"
                  for k in ("name", "Ms", "A", "P", "alpha")]
    lines += [
        "", "[cross]",
        f"w_nm = {_fmt(_display(cfg.cross_w, 1e-9))}",
        f"l1_nm = {_fmt(_display(cfg.cross_l1, 1e-9))}",
        f"l2_nm = {_fmt(_display(cfg.cross_l2, 1e-9))}",
        "", "[integrator]",
        f"rel_tol = {_fmt(cfg.integrator.rel_tol)}",
        f"abs_tol = {_fmt(cfg.integrator.abs_tol)}",
        f"dt_max_ps = {_fmt(_display(cfg.integrator.dt_max, 1e-12))}",
        "", "[torque]",
        f"Lambda = {_fmt(cfg.Lambda)}",
        f"eps_prime = {_fmt(cfg.eps_prime)}",
    ]
    if cfg.snapshot_every is not None:
        lines += ["", "[output]",
                  f"snapshot_every_ns = {_fmt(_display(cfg.snapshot_every, 1e-9))}"]

    def sweep_lines(s: SweepOptions, header: str):
        out = ["", f"[{header}]",
               f"J_min_Apm2 = {_fmt(s.J_min)}",
               f"J_max_Apm2 = {_fmt(s.J_max)}",
               f"points = {_fmt(s.points)}",
               f"sign = {_fmt(s.sign)}",
               f"pulse_ns = {_fmt(s.pulse_ns)}"]
        if s.values:
            out.append(f"values_Apm2 = {_fmt(list(s.values))}")
        return out

    lines += sweep_lines(cfg.sweep, "sweep")
    lines += ["", "[phase]", f"materials = {_fmt(list(cfg.phase.materials))}"]
    lines += sweep_lines(cfg.phase.sweep, "phase.sweep")
    lines += ["", "[twopulse]",
              f"J1_Apm2 = {_fmt(cfg.twopulse.J1)}",
              f"J2_Apm2 = {_fmt(cfg.twopulse.J2)}",
              f"pulse_ns = {_fmt(cfg.twopulse.pulse_ns)}"]
    return "\n".join(lines) + "\n"
