"""Time integration of magnetization dynamics with spin-transfer torque.

The equation of motion is the Gilbert form with a Slonczewski in-plane
torque and a constant field-like term, converted algebraically to the
explicit Landau-Lifshitz form for integration:

    dm/dt = -(gamma / (1 + alpha^2)) * (m x H' + alpha m x (m x H'))
    H'    = H_eff + beta * eps(m . m_p) * (m x m_p) + beta * eps' * m_p

with beta = (hbar / (mu0 e)) * J / (t Ms).  The current density J is signed;
its sign enters solely through beta.  The integrator is an adaptive
Runge-Kutta-Fehlberg 4(5) scheme with per-step renormalization of m.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .constants import E_CHARGE, GAMMA_LL, HBAR, MU0
from .errors import (InvalidArgumentError, NonConvergenceError, NumericError,
                     StiffnessError)
from .fields import effective_field, energy_terms, kernel_for, uniform_state
from .materials import Material
from .mesh import Mesh, Region

# rad/s -> degrees per nanosecond
_DEG_NS = (180.0 / np.pi) * 1e-9
_T_SNAP = 1e-22  # times closer than this are the same instant

# Fehlberg 4(5) tableau; error row is (5th order b) - (4th order b).
_RK_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RK_B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
_RK_ERR = np.array([1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55])


def _unit3(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InvalidArgumentError(f"{name} must be a 3-vector")
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.isfinite(norm):
        raise InvalidArgumentError(f"{name} must be a finite nonzero vector")
    u = v / norm
    # settle to a fixed point so normalizing a unit vector is the identity
    for _ in range(4):
        again = u / float(np.linalg.norm(u))
        if np.array_equal(again, u):
            break
        u = again
    return u


@dataclass(frozen=True)
class TorqueParams:
    """Spin-transfer-torque parameters for one current segment.

    m_p is stored normalized to unit length.  eps_prime is the constant
    field-like coefficient; Lambda is the angular-asymmetry parameter of the
    in-plane torque efficiency.
    """

    J: float
    m_p: np.ndarray = (0.92, 0.382, 0.0)
    P: float = 0.76
    Lambda: float = 1.0
    eps_prime: float = 0.06
    t_free: float = 2e-9

    def __post_init__(self):
        object.__setattr__(self, "m_p", _unit3(self.m_p, "m_p"))
        if not (0.0 < self.P <= 1.0):
            raise InvalidArgumentError(f"P must be in (0, 1], got {self.P}")
        if self.Lambda < 1.0:
            raise InvalidArgumentError(f"Lambda must be >= 1, got {self.Lambda}")
        if self.t_free <= 0.0:
            raise InvalidArgumentError(f"t_free must be positive, got {self.t_free}")


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive RKF45 settings and the equilibrium stopping criterion."""

    abs_tol: float = 1e-7
    rel_tol: float = 1e-6
    dt_init: float = 1e-14
    dt_max: float = 1e-12
    renormalize_every_step: bool = True
    stop_torque_threshold: float = 0.01  # deg/ns

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise InvalidArgumentError("integrator tolerances must be positive")
        if self.dt_init <= 0 or self.dt_init > self.dt_max:
            raise InvalidArgumentError("require 0 < dt_init <= dt_max")
        if self.stop_torque_threshold <= 0:
            raise InvalidArgumentError("stop threshold must be positive")


@dataclass(frozen=True)
class PulseSegment:
    """One pulse-schedule entry: current density J for a duration."""

    J: float
    duration: float
    m_p: np.ndarray = (0.92, 0.382, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "m_p", _unit3(self.m_p, "m_p"))
        if self.duration <= 0:
            raise InvalidArgumentError(f"segment duration must be positive, got {self.duration}")


@dataclass
class Trajectory:
    """Sampled time series of spatial averages, arm averages, and energies."""

    t: np.ndarray
    m_avg: np.ndarray
    mx_short: np.ndarray
    my_long: np.ndarray
    E_exchange: np.ndarray
    E_demag: np.ndarray
    E_zeeman: np.ndarray
    snapshots: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise InvalidArgumentError("trajectory times must be strictly increasing")

    @property
    def E_total(self) -> np.ndarray:
        return self.E_exchange + self.E_demag + self.E_zeeman


def stt_epsilon(m_dot_mp, P: float, Lambda: float):
    """In-plane torque efficiency eps = P L^2 / ((L^2+1) + (L^2-1) m.m_p)."""
    x = np.asarray(m_dot_mp, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-9):
        raise InvalidArgumentError("m_dot_mp must lie in [-1, 1]")
    L2 = Lambda * Lambda
    out = P * L2 / ((L2 + 1.0) + (L2 - 1.0) * x)
    return float(out) if np.isscalar(m_dot_mp) else out


def stt_beta(J: float, t_free: float, Ms: float) -> float:
    """Torque field scale beta = (hbar/(mu0 e)) * J / (t_free Ms), in A/m."""
    if t_free <= 0:
        raise InvalidArgumentError(f"t_free must be positive, got {t_free}")
    if Ms <= 0:
        raise InvalidArgumentError(f"Ms must be positive, got {Ms}")
    return (HBAR / (MU0 * E_CHARGE)) * J / (t_free * Ms)


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross has high overhead on small arrays; spell it out.
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out[..., 0] = a1 * b2 - a2 * b1
    out[..., 1] = a2 * b0 - a0 * b2
    out[..., 2] = a0 * b1 - a1 * b0
    return out


def _first_nan_index(arr: np.ndarray):
    bad = np.argwhere(~np.isfinite(arr))
    return tuple(bad[0]) if len(bad) else None


def llg_rhs(m: np.ndarray, H_eff: np.ndarray, mat: Material,
            torque: TorqueParams | None = None,
            gamma: float = GAMMA_LL) -> np.ndarray:
    """dm/dt (1/s) in the explicit Landau-Lifshitz form.

    Vacuum cells (m = 0) yield exactly zero.  m.(dm/dt) vanishes identically
    up to floating-point roundoff.
    """
    if not np.isfinite(m).all():
        raise NumericError(f"non-finite magnetization at cell {_first_nan_index(m)}")
    if not np.isfinite(H_eff).all():
        raise NumericError(f"non-finite effective field at cell {_first_nan_index(H_eff)}")

    Hp = H_eff
    if torque is not None and torque.J != 0.0:
        beta = stt_beta(torque.J, torque.t_free, mat.Ms)
        mp = torque.m_p
        if torque.Lambda == 1.0:
            eps = 0.5 * torque.P
        else:
            eps = stt_epsilon(m @ mp, torque.P, torque.Lambda)[..., None]
        Hp = H_eff + (beta * eps) * _cross(m, mp) + (beta * torque.eps_prime) * mp

    alpha = mat.alpha
    mxH = _cross(m, Hp)
    mxmxH = _cross(m, mxH)
    pref = -gamma / (1.0 + alpha * alpha)
    return pref * (mxH + alpha * mxmxH)


class _Recorder:
    """Accumulates trajectory samples at a fixed stride."""

    def __init__(self, sim: "Simulation", sample_dt: float,
                 snapshot_dt: float | None):
        self.sim = sim
        self.sample_dt = sample_dt
        self.snapshot_dt = snapshot_dt
        self.next_time = 0.0
        self.last_time = -np.inf
        self._next_snap = 0.0 if snapshot_dt else None
        self.rows: list[tuple] = []
        self.snapshots: list[tuple[float, np.ndarray]] = []

    def record(self, t: float, m: np.ndarray) -> None:
        sim = self.sim
        occ = m[sim.mask]
        avg = occ.mean(axis=0)
        mx_short = float(m[sim.short_mask, 0].mean())
        my_long = float(m[sim.long_mask, 1].mean())
        e = energy_terms(sim.mesh, sim.mask, sim.mat, m, sim.H_applied,
                         kernel=sim.kernel)
        self.rows.append((t, avg[0], avg[1], avg[2], mx_short, my_long,
                          e.exchange, e.demag, e.zeeman))
        if self._next_snap is not None and t >= self._next_snap - _T_SNAP:
            self.snapshots.append((t, m.copy()))
            self._next_snap += self.snapshot_dt
        self.last_time = t
        self.next_time = t + self.sample_dt

    def build(self) -> Trajectory:
        data = np.array(self.rows, dtype=float).reshape(-1, 9)
        return Trajectory(
            t=data[:, 0], m_avg=data[:, 1:4],
            mx_short=data[:, 4], my_long=data[:, 5],
            E_exchange=data[:, 6], E_demag=data[:, 7], E_zeeman=data[:, 8],
            snapshots=self.snapshots,
        )


class Simulation:
    """A simulation session owning one magnetization state on one mesh.

    Sessions are single-writer: the owner steps the state in place.  Distinct
    sessions share nothing mutable and may run concurrently.
    """

    def __init__(self, mesh: Mesh, mat: Material, mask: np.ndarray | None = None,
                 regions: np.ndarray | None = None, H_applied=(0.0, 0.0, 0.0),
                 config: IntegratorConfig | None = None, sample_dt: float = 1e-12,
                 snapshot_dt: float | None = None, Lambda: float = 1.0,
                 eps_prime: float = 0.06, gamma: float = GAMMA_LL,
                 fast_single_spin: bool | None = None):
        self.mesh = mesh
        self.mat = mat
        self.mask = np.ones(mesh.shape, bool) if mask is None else mask.astype(bool)
        if self.mask.shape != mesh.shape:
            raise InvalidArgumentError("mask shape does not match mesh")
        if regions is None:
            self.short_mask = self.mask.copy()
            self.long_mask = self.mask.copy()
        else:
            self.short_mask = (regions == Region.SHORT_ARM) | (regions == Region.OVERLAP)
            self.long_mask = (regions == Region.LONG_ARM) | (regions == Region.OVERLAP)
        self.H_applied = np.asarray(H_applied, dtype=float)
        self.cfg = config or IntegratorConfig()
        self.sample_dt = sample_dt
        self.snapshot_dt = snapshot_dt
        self.Lambda = Lambda
        self.eps_prime = eps_prime
        self.gamma = gamma
        self.kernel = kernel_for(mesh)
        self.t_free = mesh.nz * mesh.dz
        self.t = 0.0
        self.m = uniform_state(mesh, (1.0, 0.0, 0.0), self.mask)
        self._dt = self.cfg.dt_init
        # Explicit RK is only stable while gamma*H_stiff*dt stays order one;
        # the stiffest field comes from the exchange Laplacian's top mode.
        # The precession-free descent flow runs at the damping rate instead,
        # so its stability window is wider by (1+alpha^2)/alpha.
        lap = sum(4.0 / d ** 2 for n, d in
                  zip(mesh.shape, (mesh.dx, mesh.dy, mesh.dz)) if n > 1)
        H_stiff = 2.0 * mat.A / (MU0 * mat.Ms) * lap + mat.Ms \
            + float(np.linalg.norm(self.H_applied))
        self._dt_stab = 2.5 / (self.gamma * H_stiff)
        self._dt_stab_descent = np.inf if mat.alpha == 0.0 \
            else self._dt_stab * (1.0 + mat.alpha ** 2) / mat.alpha
        self._calm = 0
        self.n_accepted = 0
        self.n_rejected = 0
        single_ok = mesh.n_cells == 1 and bool(self.mask.all())
        if fast_single_spin and not single_ok:
            raise InvalidArgumentError("fast_single_spin requires a 1-cell mesh")
        self._single = single_ok if fast_single_spin is None else fast_single_spin

    # -- state management -------------------------------------------------

    def set_state(self, m: np.ndarray, t: float = 0.0) -> None:
        """Install a magnetization state (copied, renormalized) at time t."""
        if m.shape != self.mesh.shape + (3,):
            raise InvalidArgumentError("state shape does not match mesh")
        state = np.array(m, dtype=float)
        norms = np.linalg.norm(state, axis=-1)
        if np.any(np.abs(norms[self.mask] - 1.0) > 1e-6):
            raise InvalidArgumentError("state must be unit length at occupied cells")
        state[self.mask] /= norms[self.mask][:, None]
        state[~self.mask] = 0.0
        self.m = state
        self.t = t
        self._dt = self.cfg.dt_init

    def torque_for(self, J: float, m_p=(0.92, 0.382, 0.0)) -> TorqueParams:
        """Torque parameters for current density J with this session's material."""
        return TorqueParams(J=J, m_p=m_p, P=self.mat.P, Lambda=self.Lambda,
                            eps_prime=self.eps_prime, t_free=self.t_free)

    # -- right-hand sides --------------------------------------------------

    def _rhs_llg(self, torque: TorqueParams | None):
        if self._single:
            return self._rhs_llg_single(torque)

        def rhs(m):
            H = effective_field(self.mesh, self.mask, self.mat, m,
                                self.H_applied, kernel=self.kernel)
            return llg_rhs(m, H, self.mat, torque, gamma=self.gamma)
        return rhs

    def _rhs_llg_single(self, torque: TorqueParams | None):
        """Scalar right-hand side for 1-cell meshes.

        Identical math to the array path (self-demag from the same kernel
        table, no exchange), written out in plain floats because the array
        machinery costs more than the arithmetic at this size.  Skips the
        non-finite input check.
        """
        Nxx, Nyy, Nzz, Nxy, Nxz, Nyz = (float(v) for v in self.kernel.table[0, 0, 0])
        Ms = self.mat.Ms
        alpha = self.mat.alpha
        hx0, hy0, hz0 = (float(v) for v in self.H_applied)
        pref = -self.gamma / (1.0 + alpha * alpha)
        if torque is not None and torque.J != 0.0:
            beta = stt_beta(torque.J, torque.t_free, Ms)
            mpx, mpy, mpz = (float(v) for v in torque.m_p)
            L2 = torque.Lambda * torque.Lambda
            P = torque.P
            bep = beta * torque.eps_prime
        else:
            beta = bep = mpx = mpy = mpz = P = 0.0
            L2 = 1.0

        def rhs(m):
            mx = float(m[0, 0, 0, 0])
            my = float(m[0, 0, 0, 1])
            mz = float(m[0, 0, 0, 2])
            Hx = hx0 - Ms * (Nxx * mx + Nxy * my + Nxz * mz)
            Hy = hy0 - Ms * (Nxy * mx + Nyy * my + Nyz * mz)
            Hz = hz0 - Ms * (Nxz * mx + Nyz * my + Nzz * mz)
            if beta != 0.0:
                eps = P * L2 / ((L2 + 1.0) + (L2 - 1.0) * (mx * mpx + my * mpy + mz * mpz))
                be = beta * eps
                Hx += be * (my * mpz - mz * mpy) + bep * mpx
                Hy += be * (mz * mpx - mx * mpz) + bep * mpy
                Hz += be * (mx * mpy - my * mpx) + bep * mpz
            cx = my * Hz - mz * Hy
            cy = mz * Hx - mx * Hz
            cz = mx * Hy - my * Hx
            out = np.empty((1, 1, 1, 3))
            out[0, 0, 0, 0] = pref * (cx + alpha * (my * cz - mz * cy))
            out[0, 0, 0, 1] = pref * (cy + alpha * (mz * cx - mx * cz))
            out[0, 0, 0, 2] = pref * (cz + alpha * (mx * cy - my * cx))
            return out
        return rhs

    def _rhs_descent(self):
        # Damped equation with the precession term removed: the magnetization
        # rotates toward the local field at the physical Gilbert damping rate
        # alpha*gamma/(1+alpha^2).  Same fixed points, same energy decay per
        # unit time as the damping term of the full equation, and a much less
        # stiff right-hand side (the stability limit scales with 1/alpha).
        coef = -self.gamma * self.mat.alpha / (1.0 + self.mat.alpha ** 2)

        def rhs(m):
            H = effective_field(self.mesh, self.mask, self.mat, m,
                                self.H_applied, kernel=self.kernel)
            return coef * _cross(m, _cross(m, H))
        return rhs

    # -- integrator core ---------------------------------------------------

    def _try_step(self, m, dt, rhs, k1):
        """One RKF45 attempt; returns (m_new, error_ratio)."""
        ks = [k1]
        for row in _RK_A[1:]:
            y = m + (dt * row[0]) * ks[0]
            for a, k in zip(row[1:], ks[1:]):
                if a != 0.0:
                    y += (dt * a) * k
            ks.append(rhs(y))
        K = np.stack(ks)
        dm = dt * np.tensordot(_RK_B5, K, axes=1)
        err = dt * np.tensordot(_RK_ERR, K, axes=1)
        tol = self.cfg.abs_tol + self.cfg.rel_tol * np.abs(dm)
        ratio = float(np.max(np.abs(err) / tol))
        m_new = m + dm
        if self.cfg.renormalize_every_step:
            norms = np.sqrt((m_new * m_new).sum(axis=-1))
            np.divide(m_new, np.where(norms > 0.25, norms, 1.0)[..., None],
                      out=m_new)
        return m_new, ratio

    def _accepted_step(self, rhs, t_bound, dt_cap, k1, dt_stab=None):
        """Advance one accepted step, not beyond t_bound."""
        dt_cap = min(dt_cap, self._dt_stab if dt_stab is None else dt_stab)
        while True:
            dt = min(self._dt, dt_cap, t_bound - self.t)
            clamped = dt < min(self._dt, dt_cap) * (1.0 - 1e-12)
            m_new, ratio = self._try_step(self.m, dt, rhs, k1)
            if ratio <= 1.0:
                break
            self.n_rejected += 1
            self._calm = 3
            self._dt = dt * max(0.2, 0.9 * ratio ** -0.2)
            if self._dt < 1e-18:
                raise StiffnessError(
                    f"step size underflow ({self._dt:.3e} s)", t=self.t)
        self.m = m_new
        self.t = self.t + dt
        self.n_accepted += 1
        if t_bound - self.t < _T_SNAP:
            self.t = t_bound
        if not clamped:
            # Right after a rejection, creep instead of jumping back into it.
            cap = 1.1 if self._calm > 0 else 5.0
            self._calm = max(0, self._calm - 1)
            grow = cap if ratio == 0.0 else min(cap, 0.9 * ratio ** -0.2)
            self._dt = min(dt_cap, dt * grow)

    def step(self, torque: TorqueParams | None = None) -> float:
        """Take a single accepted adaptive step; returns the new time."""
        rhs = self._rhs_llg(torque)
        self._accepted_step(rhs, np.inf, self.cfg.dt_max, rhs(self.m))
        return self.t

    def _advance(self, t_end, rhs, rec: _Recorder | None = None,
                 stop_deg_ns: float | None = None,
                 dt_cap: float | None = None,
                 dt_stab: float | None = None) -> bool:
        """Integrate to t_end; True if the stop criterion fired first."""
        dt_cap = self.cfg.dt_max if dt_cap is None else dt_cap
        while self.t < t_end - _T_SNAP:
            k1 = rhs(self.m)
            if stop_deg_ns is not None:
                rate = np.sqrt((k1 * k1).sum(axis=-1)).max()
                if rate * _DEG_NS <= stop_deg_ns:
                    return True
            t_bound = t_end if rec is None else min(t_end, rec.next_time)
            self._accepted_step(rhs, t_bound, dt_cap, k1, dt_stab)
            if rec is not None and rec.next_time - self.t < _T_SNAP:
                rec.record(self.t, self.m)
        return False

    # -- high-level protocols ---------------------------------------------

    def run_pulse(self, schedule, post_relax: float = 4e-9,
                  post_precession: bool = False) -> Trajectory:
        """Apply a pulse schedule, then relax, recording throughout.

        The trajectory covers the schedule plus the current-free relaxation
        window at the session sample stride.  The relaxation stops early once
        the equilibrium torque criterion is met; by default it runs with
        precession disabled like relax().
        """
        if not schedule:
            raise InvalidArgumentError("pulse schedule must not be empty")
        rec = _Recorder(self, self.sample_dt, self.snapshot_dt)
        rec.record(self.t, self.m)
        for seg in schedule:
            torque = TorqueParams(J=seg.J, m_p=seg.m_p, P=self.mat.P,
                                  Lambda=self.Lambda, eps_prime=self.eps_prime,
                                  t_free=self.t_free)
            self._advance(self.t + seg.duration, self._rhs_llg(torque), rec)
        if post_relax > 0:
            rhs = self._rhs_llg(None) if post_precession else self._rhs_descent()
            cap = self.cfg.dt_max if post_precession \
                else max(self.cfg.dt_max, 10e-12)
            stab = None if post_precession else self._dt_stab_descent
            done = self._advance(self.t + post_relax, rhs, rec,
                                 stop_deg_ns=self.cfg.stop_torque_threshold,
                                 dt_cap=cap, dt_stab=stab)
            if done and rec.last_time < self.t:
                rec.record(self.t, self.m)
        return rec.build()

    def relax(self, max_time: float = 50e-9, precession: bool = False,
              sample_dt: float | None = None,
              record: bool = True) -> Trajectory:
        """Integrate current-free damped dynamics until the torque criterion.

        With precession disabled (default) only the damping rotation remains,
        which reaches the same equilibria with a far less stiff right-hand
        side.  Raises NonConvergenceError if the criterion is not met within
        max_time (the partially relaxed state rides on the exception).
        """
        rhs = self._rhs_llg(None) if precession else self._rhs_descent()
        dt_cap = self.cfg.dt_max if precession else max(self.cfg.dt_max, 10e-12)
        stab = None if precession else self._dt_stab_descent
        stride = sample_dt if sample_dt is not None else 10 * self.sample_dt
        rec = _Recorder(self, stride, None) if record else None
        if rec is not None:
            rec.record(self.t, self.m)
        done = self._advance(self.t + max_time, rhs, rec,
                             stop_deg_ns=self.cfg.stop_torque_threshold,
                             dt_cap=dt_cap, dt_stab=stab)
        traj = rec.build() if rec is not None else None
        if not done:
            raise NonConvergenceError(
                f"no equilibrium within {max_time * 1e9:.1f} ns "
                f"(threshold {self.cfg.stop_torque_threshold} deg/ns)",
                state=self.m.copy(), trajectory=traj)
        return traj if traj is not None else _Recorder(self, stride, None).build()

    def minimize(self, max_iters: int = 100_000) -> int:
        """Drive the state to the nearest energy minimum; returns iterations.

        Barzilai-Borwein steepest descent along the damping rotation
        m x (m x H), with the step length set by the secant condition and m
        renormalized each iteration.  Same fixed points and stop criterion as
        relax(), at roughly one field evaluation per iteration, but no
        physical time axis: self.t is left untouched and nothing is recorded.
        Note that metastable arrangements which relax() preserves over
        nanosecond windows are passed through: this finds true minima.
        """
        m = self.m
        coef = -self.gamma * self.mat.alpha / (1.0 + self.mat.alpha ** 2)
        tau = 1e-12
        prev_m = prev_T = None
        threshold = self.cfg.stop_torque_threshold
        for it in range(max_iters):
            H = effective_field(self.mesh, self.mask, self.mat, m,
                                self.H_applied, kernel=self.kernel)
            T = coef * _cross(m, _cross(m, H))
            rate = np.sqrt((T * T).sum(axis=-1)).max()
            if rate * _DEG_NS <= threshold:
                self.m = m
                return it
            if prev_m is not None:
                s = m - prev_m
                y = T - prev_T
                denom = abs(float((s * y).sum()))
                if denom > 0.0:
                    tau = float((s * s).sum()) / denom
                tau = min(max(tau, 1e-15), 3e-8)
            prev_m, prev_T = m, T
            m = m + tau * T
            norms = np.sqrt((m * m).sum(axis=-1))
            np.divide(m, np.where(norms > 0.25, norms, 1.0)[..., None], out=m)
        self.m = m
        raise NonConvergenceError(
            f"no equilibrium within {max_iters} minimizer iterations "
            f"(threshold {threshold} deg/ns)", state=m.copy())
