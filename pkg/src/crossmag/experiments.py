"""Switching protocols on the cross-shaped element.

States are labeled by the sign pair of the arm-averaged magnetization:
S1 = (+x, +y), S2 = (-x, +y), S3 = (-x, -y), S4 = (+x, -y), where the x
average runs over the short arm (overlap included) and the y average over
the long arm (overlap included).  A sign only counts when the average
magnitude reaches 0.5; anything less is UNKNOWN.
"""

from __future__ import annotations

import logging
import multiprocessing
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import IntegratorConfig, PulseSegment, Simulation, Trajectory
from .errors import (IndeterminateError, InvalidArgumentError,
                     NonConvergenceError, PreparationError, StiffnessError)
from .materials import Material, get_material
from .mesh import CrossSpec, Mesh, Region, arm_regions, build_mesh, cross_mask
from .fields import kernel_for

_DEFAULT_MP = (0.92, 0.382, 0.0)
logger = logging.getLogger("crossmag.experiments")


class StateId(Enum):
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4
    UNKNOWN = 0


# sign of (short-arm m_x, long-arm m_y) for each labeled state
_STATE_SIGNS = {
    StateId.S1: (1, 1),
    StateId.S2: (-1, 1),
    StateId.S3: (-1, -1),
    StateId.S4: (1, -1),
}
_SIGNS_STATE = {v: k for k, v in _STATE_SIGNS.items()}


@dataclass(frozen=True, eq=False)
class Geometry:
    """Mesh, cross shape, and the derived mask and region labels."""

    mesh: Mesh
    spec: CrossSpec
    mask: np.ndarray = field(init=False)
    regions: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mask", cross_mask(self.mesh, self.spec))
        object.__setattr__(self, "regions", arm_regions(self.mesh, self.spec))

    @classmethod
    def default(cls, cell: float = 2e-9) -> "Geometry":
        spec = CrossSpec()
        mesh = build_mesh(spec.l1, spec.l2, 2e-9, cell)
        return cls(mesh=mesh, spec=spec)


@dataclass
class PhaseRecord:
    """Outcome of one pulse run: final state and switching time, if any."""

    material: str
    J: float
    pulse_duration: float
    final_state: StateId
    switching_time: float | None = None
    anomaly: str = ""

    def __post_init__(self):
        ts = self.switching_time
        if ts is not None and (not np.isfinite(ts) or ts < 0):
            raise InvalidArgumentError(f"switching time must be >= 0, got {ts}")


def classify_state(m: np.ndarray, regions: np.ndarray) -> StateId:
    """Map arm-averaged magnetization signs to a state label."""
    short = (regions == Region.SHORT_ARM) | (regions == Region.OVERLAP)
    long_ = (regions == Region.LONG_ARM) | (regions == Region.OVERLAP)
    mx = float(m[short, 0].mean())
    my = float(m[long_, 1].mean())
    if abs(mx) < 0.5 or abs(my) < 0.5:
        return StateId.UNKNOWN
    return _SIGNS_STATE[(1 if mx > 0 else -1, 1 if my > 0 else -1)]


def seed_state(target: StateId, geom: Geometry) -> np.ndarray:
    """Uniform per-arm sign pattern for a target state (pre-relaxation)."""
    if target is StateId.UNKNOWN:
        raise InvalidArgumentError("cannot seed the UNKNOWN state")
    sx, sy = _STATE_SIGNS[target]
    m = np.zeros(geom.mesh.shape + (3,))
    m[geom.regions == Region.SHORT_ARM] = (float(sx), 0.0, 0.0)
    m[(geom.regions == Region.LONG_ARM) | (geom.regions == Region.OVERLAP)] = \
        (0.0, float(sy), 0.0)
    return m


_prepared_cache: dict[tuple, np.ndarray] = {}

# Damped-relaxation window used to settle a freshly seeded state.  Long
# enough for the arm junction to take on its smooth equilibrium texture,
# short against the slow wall creep that would eventually merge the two
# arms into a single uniform domain.
_PREPARE_WINDOW = 2e-9


def prepare_state(target: StateId, material: Material | str,
                  geom: Geometry | None = None,
                  config: IntegratorConfig | None = None,
                  H_applied=(0.0, 0.0, 0.0), gamma=None) -> np.ndarray:
    """Seed the arms along the target sign pattern and settle the texture.

    The hard-edged seed is smoothed by a fixed window of damped relaxation.
    These configurations are metastable rather than global minima, so the
    stopping torque criterion usually does not fire inside the window; the
    end-of-window state is the prepared state.  Prepared states are memoized
    per (geometry, material, settings) within the process, since sweeps and
    tests keep preparing the same few states.
    """
    if target is StateId.UNKNOWN:
        raise InvalidArgumentError("cannot prepare the UNKNOWN state")
    mat = get_material(material) if isinstance(material, str) else material
    geom = geom or Geometry.default()
    key = (target, mat, geom.mesh, geom.spec, config, tuple(H_applied), gamma)
    hit = _prepared_cache.get(key)
    if hit is not None:
        return hit.copy()
    kw = {} if gamma is None else {"gamma": gamma}
    sim = Simulation(geom.mesh, mat, mask=geom.mask, regions=geom.regions,
                     H_applied=H_applied, config=config, **kw)
    sim.set_state(seed_state(target, geom))
    try:
        sim.relax(max_time=_PREPARE_WINDOW, record=False)
    except NonConvergenceError:
        pass
    achieved = classify_state(sim.m, geom.regions)
    if achieved is not target:
        raise PreparationError(
            f"relaxation from {target.name} seed reached {achieved.name}",
            achieved=achieved)
    _prepared_cache[key] = sim.m.copy()
    return sim.m.copy()


def switching_time(traj: Trajectory, watched: str = "short_x",
                   t_pulse_start: float = 0.0,
                   hold: float = 0.5e-9) -> float | None:
    """First zero crossing after the pulse start that holds for >= hold.

    watched selects the monitored average: "short_x" or "long_y".  Returns
    the crossing time (s), or None when the sign never durably changes.
    A trajectory that ends inside a candidate hold window (for instance when
    the post-pulse relaxation converged early) still counts as held if the
    flipped sign persists to the end over at least half the window;
    otherwise an IndeterminateError says the run is too short to judge.
    """
    if watched == "short_x":
        y = traj.mx_short
    elif watched == "long_y":
        y = traj.my_long
    else:
        raise InvalidArgumentError(f"watched must be short_x or long_y, got {watched!r}")
    t = traj.t
    keep = t >= t_pulse_start - 1e-15
    t = t[keep]
    y = y[keep]
    if len(t) < 2:
        return None
    ref = 0
    for v in y:
        if v != 0.0:
            ref = 1 if v > 0 else -1
            break
    if ref == 0:
        return None

    i = 0
    n = len(t)
    while i < n - 1:
        if y[i] * ref > 0 and y[i + 1] * ref <= 0:
            # crossing between i and i+1
            frac = y[i] / (y[i] - y[i + 1])
            t_c = t[i] + frac * (t[i + 1] - t[i])
            j = i + 1
            held = True
            while j < n and t[j] <= t_c + hold:
                if y[j] * ref > 0:
                    held = False
                    break
                j += 1
            if held:
                if t[-1] < t_c + hold and t[-1] - t_c < 0.5 * hold:
                    raise IndeterminateError(
                        f"trajectory ends {1e9 * (t_c + hold - t[-1]):.3f} ns "
                        "inside the sign-stability window; extend the run")
                return float(t_c)
            i = j
        else:
            i += 1
    return None


def _point_record(mat: Material, J: float, pulse_s: float, geom: Geometry,
                  m0: np.ndarray, post_relax: float, config: IntegratorConfig,
                  sample_dt: float, H_applied, torque_kw) -> PhaseRecord:
    for window in (post_relax, post_relax + 6e-9):
        sim = Simulation(geom.mesh, mat, mask=geom.mask, regions=geom.regions,
                         H_applied=H_applied, config=config, sample_dt=sample_dt,
                         **torque_kw)
        sim.set_state(m0.copy())
        try:
            traj = sim.run_pulse([PulseSegment(J=J, duration=pulse_s, m_p=_DEFAULT_MP)],
                                 post_relax=window)
            ts = switching_time(traj, "short_x", t_pulse_start=0.0)
        except IndeterminateError:
            continue
        except (StiffnessError, NonConvergenceError) as exc:
            return PhaseRecord(mat.name, J, pulse_s, StateId.UNKNOWN,
                               anomaly=f"{type(exc).__name__}: {exc}")
        state = classify_state(sim.m, geom.regions)
        return PhaseRecord(mat.name, J, pulse_s, state, switching_time=ts)
    return PhaseRecord(mat.name, J, pulse_s, StateId.UNKNOWN,
                       anomaly="switching indeterminate after extended run")


def _point_task(args) -> PhaseRecord:
    rec = _point_record(*args)
    logger.info("%s J=%.4e -> %s t_s=%s%s", rec.material, rec.J,
                rec.final_state.name,
                "-" if rec.switching_time is None
                else f"{1e9 * rec.switching_time:.3f}ns",
                f" [{rec.anomaly}]" if rec.anomaly else "")
    return rec


def default_sweep_grid(n: int = 30, J_min: float = 1e10, J_max: float = 4e12,
                       sign: float = -1.0) -> np.ndarray:
    """Log-spaced current-density grid, ascending in magnitude."""
    if n < 1:
        raise InvalidArgumentError("grid needs at least one point")
    return sign * np.logspace(np.log10(J_min), np.log10(J_max), n)


def sweep_current(material: Material | str, J_values, pulse_ns: float,
                  start_state: StateId | np.ndarray = StateId.S1,
                  geom: Geometry | None = None,
                  config: IntegratorConfig | None = None,
                  post_relax_ns: float = 4.0, sample_ps: float = 1.0,
                  H_applied=(0.0, 0.0, 0.0), workers: int = 1,
                  Lambda: float = 1.0, eps_prime: float = 0.06,
                  gamma=None) -> list[PhaseRecord]:
    """One pulse run per current density, all from the same prepared state.

    Runs are independent; with workers > 1 they execute in a process pool.
    Results are ordered like J_values regardless of worker count.
    """
    J_values = list(J_values)
    if not J_values:
        raise InvalidArgumentError("J_values must not be empty")
    mat = get_material(material) if isinstance(material, str) else material
    geom = geom or Geometry.default()
    config = config or IntegratorConfig()
    torque_kw = {"Lambda": Lambda, "eps_prime": eps_prime}
    if gamma is not None:
        torque_kw["gamma"] = gamma
    if isinstance(start_state, StateId):
        m0 = prepare_state(start_state, mat, geom, config=config,
                           H_applied=H_applied, gamma=gamma)
    else:
        m0 = np.asarray(start_state, dtype=float)
    tasks = [(mat, float(J), pulse_ns * 1e-9, geom, m0, post_relax_ns * 1e-9,
              config, sample_ps * 1e-12, tuple(H_applied), torque_kw)
             for J in J_values]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            return pool.map(_point_task, tasks)
    return [_point_task(t) for t in tasks]


@dataclass
class PhaseDiagram:
    """Per-(material, J) final states plus the per-material onsets.

    thresholds maps material name to (J_c1, J_c2): the smallest |J| reaching
    S2 and S3 respectively (None when never reached on the grid).
    """

    records: list[PhaseRecord]
    thresholds: dict[str, tuple[float | None, float | None]]
    anomalies: list[str] = field(default_factory=list)


def phase_diagram(materials, J_grid, pulse_ns: float,
                  geom: Geometry | None = None,
                  config: IntegratorConfig | None = None,
                  post_relax_ns: float = 4.0, sample_ps: float = 1.0,
                  workers: int = 1, Lambda: float = 1.0,
                  eps_prime: float = 0.06, gamma=None) -> PhaseDiagram:
    """Sweep each material over J_grid (ascending |J|) and locate onsets."""
    J_grid = [float(J) for J in J_grid]
    mags = [abs(J) for J in J_grid]
    if mags != sorted(mags):
        raise InvalidArgumentError("J_grid must be sorted ascending in |J|")
    records: list[PhaseRecord] = []
    thresholds: dict[str, tuple[float | None, float | None]] = {}
    anomalies: list[str] = []
    if not J_grid:
        for material in materials:
            mat = get_material(material) if isinstance(material, str) else material
            thresholds[mat.name] = (None, None)
        return PhaseDiagram(records=records, thresholds=thresholds,
                            anomalies=anomalies)
    geom = geom or Geometry.default()
    for material in materials:
        mat = get_material(material) if isinstance(material, str) else material
        recs = sweep_current(mat, J_grid, pulse_ns, geom=geom, config=config,
                             post_relax_ns=post_relax_ns, sample_ps=sample_ps,
                             workers=workers, Lambda=Lambda,
                             eps_prime=eps_prime, gamma=gamma)
        records.extend(recs)
        j_c1 = next((abs(r.J) for r in recs if r.final_state is StateId.S2), None)
        j_c2 = next((abs(r.J) for r in recs if r.final_state is StateId.S3), None)
        thresholds[mat.name] = (j_c1, j_c2)
        if j_c1 is not None and j_c2 is not None and j_c2 < j_c1:
            anomalies.append(
                f"{mat.name}: S3 onset at |J|={j_c2:.4g} precedes S2 onset "
                f"at |J|={j_c1:.4g}")
        for r in recs:
            if r.anomaly:
                anomalies.append(f"{mat.name} J={r.J:.4g}: {r.anomaly}")
    return PhaseDiagram(records=records, thresholds=thresholds,
                        anomalies=anomalies)


def two_pulse_protocol(material: Material | str, J1: float, J2: float,
                       pulse_ns: float,
                       start_state: StateId | np.ndarray = StateId.S1,
                       geom: Geometry | None = None,
                       config: IntegratorConfig | None = None,
                       post_relax_ns: float = 4.0, sample_ps: float = 1.0,
                       Lambda: float = 1.0, eps_prime: float = 0.06,
                       gamma=None) -> tuple[StateId, StateId]:
    """Apply two successive pulses from S1; classify after each.

    Intended for reversing only the long arm: a first pulse strong enough
    for S1 -> S3, then an opposite pulse that flips the short arm back,
    landing in S4.
    """
    if J1 * J2 > 0:
        raise InvalidArgumentError("the two pulses must have opposite signs")
    mat = get_material(material) if isinstance(material, str) else material
    geom = geom or Geometry.default()
    config = config or IntegratorConfig()
    kw = {"Lambda": Lambda, "eps_prime": eps_prime}
    if gamma is not None:
        kw["gamma"] = gamma
    if isinstance(start_state, StateId):
        m0 = prepare_state(start_state, mat, geom, config=config, gamma=gamma)
    else:
        m0 = np.asarray(start_state, dtype=float)
    sim = Simulation(geom.mesh, mat, mask=geom.mask, regions=geom.regions,
                     config=config, sample_dt=sample_ps * 1e-12, **kw)
    sim.set_state(m0)
    sim.run_pulse([PulseSegment(J=J1, duration=pulse_ns * 1e-9, m_p=_DEFAULT_MP)],
                  post_relax=post_relax_ns * 1e-9)
    intermediate = classify_state(sim.m, geom.regions)
    sim.run_pulse([PulseSegment(J=J2, duration=pulse_ns * 1e-9, m_p=_DEFAULT_MP)],
                  post_relax=post_relax_ns * 1e-9)
    final = classify_state(sim.m, geom.regions)
    return intermediate, final
