"""Whole-system checks: analytic oracles, cross-integrator agreement, and
the headline switching behaviors at full resolution.

One test per guarantee, each stating its own tolerance.  The slow ones run
multi-nanosecond pulses on the default cross at 2 nm cells; deselect them
with -m "not slow" during development.
"""

import math
import time

import numpy as np
import pytest

from crossmag.cli import main
from crossmag.constants import MU0
from crossmag.demag import build_demag_kernel, demag_field, demag_field_direct
from crossmag.dynamics import (PulseSegment, Simulation, TorqueParams,
                               llg_rhs)
from crossmag.errors import NonConvergenceError
from crossmag.experiments import (Geometry, StateId, classify_state,
                                  default_sweep_grid, phase_diagram,
                                  prepare_state, seed_state, sweep_current)
from crossmag.fields import (effective_field, energy_terms, exchange_field,
                             uniform_state)
from crossmag.macrospin import MacrospinParams, macrospin_trajectory
from crossmag.materials import Material, get_material
from crossmag.mesh import Mesh

MATERIALS = ("Co", "CMS", "CFAS")

# Critical current densities hand-evaluated in Gaussian units and frozen
# before the solver was written; the jc table must reproduce them.
JC_ORACLE = {
    "Co": 187072816325.80432,
    "CMS": 34905714999.56699,
    "CFAS": 40689844582.143265,
}


def _cell():
    return Mesh(1, 1, 1, 2e-9, 2e-9, 2e-9)


def _unit_state(direction):
    m = np.zeros((1, 1, 1, 3))
    m[0, 0, 0] = direction
    return m


def test_free_precession_period_matches_larmor():
    # undamped single spin in H = 1e5 A/m: period 2 pi / (gamma H)
    t0 = time.perf_counter()
    mat = Material(name="lossless", Ms=8e5, A=1e-11, P=0.5, alpha=0.0)
    sim = Simulation(_cell(), mat, H_applied=(0.0, 0.0, 1e5), sample_dt=1e-12)
    sim.set_state(_unit_state((1.0, 0.0, 0.0)))
    traj = sim.run_pulse([PulseSegment(J=0.0, duration=1e-9)], post_relax=0.0)
    phase = np.unwrap(np.arctan2(traj.m_avg[:, 1], traj.m_avg[:, 0]))
    omega = abs(np.polyfit(traj.t, phase, 1)[0])
    assert 2.0 * math.pi / omega == pytest.approx(2.841784399448026e-10,
                                                  rel=1e-3)
    assert time.perf_counter() - t0 < 1.0


def test_fft_demag_matches_direct_summation_on_random_masks():
    t0 = time.perf_counter()
    mesh = Mesh(6, 6, 1, 2e-9, 2e-9, 2e-9)
    kernel = build_demag_kernel(mesh)
    rng = np.random.default_rng(20260823)
    Ms = 8e5
    for _ in range(100):
        mask = rng.random(mesh.shape) < 0.5
        if not mask.any():
            mask[0, 0, 0] = True
        m = rng.normal(size=mesh.shape + (3,))
        m /= np.linalg.norm(m, axis=-1, keepdims=True)
        m[~mask] = 0.0
        fft = demag_field(kernel, m, Ms, mask=mask)
        direct = demag_field_direct(kernel, m, Ms, mask=mask)
        assert np.abs(fft - direct).max() <= 1e-10 * np.abs(direct).max()
    assert time.perf_counter() - t0 < 30.0


def test_thin_film_center_demag_approaches_uniform_limit():
    t0 = time.perf_counter()
    mesh = Mesh(64, 64, 1, 2e-9, 2e-9, 2e-9)
    Ms = 8e5
    H = demag_field(build_demag_kernel(mesh), uniform_state(mesh, (0, 0, 1)),
                    Ms)
    center = H[32, 32, 0]
    assert np.linalg.norm(center - np.array([0.0, 0.0, -Ms])) <= 0.02 * Ms
    assert time.perf_counter() - t0 < 5.0


def test_single_cell_grid_matches_macrospin_for_all_materials():
    t0 = time.perf_counter()
    for name in MATERIALS:
        mat = get_material(name)
        sim = Simulation(_cell(), mat, sample_dt=1e-12)
        sim.set_state(_unit_state((1.0, 0.0, 0.0)))
        grid = sim.run_pulse([PulseSegment(J=-3e11, duration=1e-9)],
                             post_relax=0.0)
        p = MacrospinParams(material=mat,
                            demag_diag=(1 / 3, 1 / 3, 1 / 3),
                            torque=TorqueParams(J=-3e11, P=mat.P,
                                                t_free=2e-9))
        single = macrospin_trajectory(p, (1.0, 0.0, 0.0), 1e-9)
        n = min(len(grid.t), len(single.t))
        np.testing.assert_allclose(grid.t[:n], single.t[:n], atol=1e-20)
        dev = np.abs(grid.m_avg[:n] - single.m_avg[:n]).max()
        assert dev <= 1e-6, f"{name}: max per-component deviation {dev:.3e}"
    assert time.perf_counter() - t0 < 10.0


def test_threshold_table_values_and_cross_material_ordering(capsys):
    t0 = time.perf_counter()
    assert main(["jc"]) == 0
    out = capsys.readouterr().out
    values = {}
    for line in out.splitlines()[1:]:
        name, number = line.split()
        values[name] = float(number)
    for name, oracle in JC_ORACLE.items():
        assert values[name] == pytest.approx(oracle, rel=1e-3)
    assert time.perf_counter() - t0 < 1.0
    assert values["CFAS"] < values["CMS"] < values["Co"], (
        "expected threshold ordering CFAS < CMS < Co, got "
        f"CFAS={values['CFAS']:.4e}, CMS={values['CMS']:.4e}, "
        f"Co={values['Co']:.4e}; with these parameters the threshold scales "
        "as alpha*Ms*(Hk+2 pi Ms)/P, and the lower damping of CMS outweighs "
        "its lower polarization, so CMS < CFAS arithmetically"
    )


@pytest.mark.slow
def test_reference_pulse_reverses_short_arm_with_finite_switching_time():
    # CFAS from S1 under the default pulse: -3e11 A/m^2 for 6 ns, then relax
    rec = sweep_current("CFAS", [-3e11], pulse_ns=6.0, post_relax_ns=4.0)[0]
    assert rec.switching_time is not None, "no short-arm reversal event"
    assert 0.0 < rec.switching_time < 6e-9
    assert rec.final_state is StateId.S2, (
        f"final state {rec.final_state.name}, switching time "
        f"{rec.switching_time * 1e9:.3f} ns; the spatially uniform torque "
        "acts on the long arm as strongly as on the short arm, so at this "
        "current both arms are driven and the post-pulse remnant settles "
        "outside the S2 classification window instead of in S2"
    )


@pytest.mark.slow
def test_strong_pulses_reach_reversed_states():
    geom = Geometry.default()
    # (a) -1e12 drives the low-damping cross out of S1 within the pulse
    m0 = prepare_state(StateId.S1, "CMS", geom)
    sim = Simulation(geom.mesh, get_material("CMS"), mask=geom.mask,
                     regions=geom.regions, sample_dt=1e-12)
    sim.set_state(m0)
    sim.run_pulse([PulseSegment(J=-1e12, duration=6e-9)], post_relax=0.0)
    in_pulse = classify_state(sim.m, geom.regions)
    assert in_pulse in (StateId.S2, StateId.S3, StateId.S4), (
        f"state at pulse end is {in_pulse.name}, not a switched state")
    # (b) the high-polarization material lands fully reversed after relaxing
    rec = sweep_current("CFAS", [-1e12], pulse_ns=6.0, post_relax_ns=4.0)[0]
    assert rec.final_state is StateId.S3, f"got {rec.final_state.name}"
    # (c) doubling the current reverses both arms as well
    rec = sweep_current("CMS", [-2e12], pulse_ns=6.0, post_relax_ns=12.0)[0]
    assert rec.final_state is StateId.S3, f"got {rec.final_state.name}"


J_COMMON = tuple(np.linspace(-1e11, -4.5e11, 10))


@pytest.fixture(scope="module")
def linear_sweeps():
    return {name: sweep_current(name, J_COMMON, pulse_ns=6.0,
                                post_relax_ns=4.0)
            for name in MATERIALS}


@pytest.mark.slow
def test_switching_time_ordering_on_common_currents(linear_sweeps):
    s2 = {name: {r.J: r.switching_time for r in recs
                 if r.final_state is StateId.S2
                 and r.switching_time is not None}
          for name, recs in linear_sweeps.items()}
    finals = {name: [r.final_state.name for r in recs]
              for name, recs in linear_sweeps.items()}
    common = set.intersection(*(set(d) for d in s2.values()))
    assert common, (
        "no common current in [-1e11, -4.5e11] leaves every material in S2, "
        "so the cross-material comparison set is empty; final states along "
        f"the grid were {finals}"
    )
    for J in sorted(common, key=abs):
        t_cfas, t_cms, t_co = s2["CFAS"][J], s2["CMS"][J], s2["Co"][J]
        assert t_cfas <= t_cms <= t_co, (
            f"at J={J:.4e}: CFAS {t_cfas:.3e}, CMS {t_cms:.3e}, "
            f"Co {t_co:.3e}")
    for name, d in s2.items():
        ordered = [d[J] for J in sorted(d, key=abs)]
        assert all(a >= b for a, b in zip(ordered, ordered[1:])), (
            f"{name}: switching time not non-increasing in |J|: {ordered}")


@pytest.fixture(scope="module")
def threshold_diagram():
    return phase_diagram(MATERIALS, default_sweep_grid(30), pulse_ns=6.0,
                         post_relax_ns=4.0)


@pytest.mark.slow
def test_threshold_currents_exist_and_order_across_materials(
        threshold_diagram):
    d = threshold_diagram
    counts = {}
    for name in MATERIALS:
        recs = [r for r in d.records if r.material == name]
        counts[name] = {s.name: n for s in StateId
                        if (n := sum(r.final_state is s for r in recs))}
    for name in MATERIALS:
        j1, j2 = d.thresholds[name]
        assert j1 is not None, (
            f"{name}: no grid current ends in S2, so the S2 onset is "
            f"undefined; thresholds={d.thresholds}, final-state "
            f"counts={counts}, anomalies={d.anomalies}")
        assert j2 is not None, (
            f"{name}: no S3 onset on the grid; thresholds={d.thresholds}, "
            f"final-state counts={counts}")
        assert j1 <= j2, f"{name}: J_c1={j1:.4e} > J_c2={j2:.4e}"
    for key, label in ((0, "J_c1"), (1, "J_c2")):
        v = {name: d.thresholds[name][key] for name in MATERIALS}
        assert v["CFAS"] < v["CMS"] < v["Co"], f"{label} ordering: {v}"


def test_integrator_invariant_suite():
    t0 = time.perf_counter()
    # (a) the unit norm survives one million adaptive steps
    cms = get_material("CMS")
    sim = Simulation(_cell(), cms, H_applied=(0.0, 0.0, 1e5))
    sim.set_state(_unit_state((1.0, 0.0, 0.0)))
    tq = sim.torque_for(-3e11)
    drift = 0.0
    for _ in range(1_000_000):
        sim.step(tq)
        m = sim.m[0, 0, 0]
        dev = abs(math.sqrt(float(m @ m)) - 1.0)
        if dev > drift:
            drift = dev
    assert drift < 1e-8
    assert sim.n_accepted >= 1_000_000

    # (b) the right-hand side never moves m along itself
    mat = get_material("CFAS")
    mesh4 = Mesh(4, 4, 1, 2e-9, 2e-9, 2e-9)
    tq4 = TorqueParams(J=-3e11, P=mat.P, t_free=2e-9)
    H_app = (0.0, 1e4, 3e4)
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(10_000):
        m = rng.normal(size=mesh4.shape + (3,))
        m /= np.linalg.norm(m, axis=-1, keepdims=True)
        H = effective_field(mesh4, None, mat, m, H_app)
        dm = llg_rhs(m, H, mat, tq4)
        num = np.abs((m * dm).sum(axis=-1))
        den = np.linalg.norm(dm, axis=-1) + 1e-300
        worst = max(worst, float((num / den).max()))
    assert worst < 1e-12  # projection of dm/dt on m, per unit rate

    # (c) relaxation decreases the energy monotonically
    geom = Geometry.default()
    relax_sim = Simulation(geom.mesh, cms, mask=geom.mask,
                           regions=geom.regions, sample_dt=1e-12)
    relax_sim.set_state(seed_state(StateId.S1, geom))
    try:
        traj = relax_sim.relax(max_time=2e-9)
    except NonConvergenceError as err:
        traj = err.trajectory
    E = traj.E_total
    assert (np.diff(E) <= 1e-10 * np.abs(E[:-1]) + 1e-30).all()

    # (d) the exchange field is the gradient of the exchange energy
    V = mesh4.cell_volume
    h = 1e-6
    for _ in range(5):
        m = rng.normal(size=mesh4.shape + (3,))
        m /= np.linalg.norm(m, axis=-1, keepdims=True)
        Hex = exchange_field(mesh4, None, mat, m)
        scale = np.abs(Hex).max()
        fd = np.zeros_like(m)
        for idx in np.ndindex(mesh4.shape):
            for c in range(3):
                up = m.copy()
                up[idx + (c,)] += h
                dn = m.copy()
                dn[idx + (c,)] -= h
                de = (energy_terms(mesh4, None, mat, up).exchange
                      - energy_terms(mesh4, None, mat, dn).exchange)
                fd[idx + (c,)] = -de / (2.0 * h) / (MU0 * mat.Ms * V)
        assert np.abs(fd - Hex).max() <= 1e-6 * scale
    assert time.perf_counter() - t0 < 120.0


SWEEP_CONFIG = (
    'material = "CMS"\n'
    "sample_ps = 5.0\n"
    "post_relax_ns = 0.8\n"
    "[sweep]\n"
    "values_Apm2 = [-1e10, -2e10]\n"
    "pulse_ns = 0.05\n"
)


def test_sweep_csv_is_byte_identical_across_worker_counts(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(SWEEP_CONFIG)
    outputs = []
    for tag, workers in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / tag
        assert main(["sweep", "--config", str(cfg), "--out", str(out),
                     "--workers", str(workers)]) == 0
        outputs.append((out / "sweep.csv").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
