"""Time integration of the Lie-Poisson flow on ``J`` and of the constrained
canonical flow on ``(omega, pi)``, and the check that the latter projects
onto the former for every choice of the free multiplier.
"""
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .algebra import Signature, casimir_quadratic
from .constraints import MultiplierState, gauge_direction
from .phasespace import (
    ConstraintParams,
    HamiltonianSpec,
    PhasePoint,
    constraints_eval,
    hamiltonian_pullback_gradients,
    wedge,
)

ON_SURFACE_TOL = 1e-10
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 20


class OffSurfaceError(ValueError):
    pass


class ProjectionError(RuntimeError):
    """Newton projection onto the constraint surface did not converge; the step is rejected."""


@dataclass(frozen=True)
class GaugeProfile:
    """Free multiplier as a function of time: ``zero``, ``constant`` or ``sinusoid``.

    ``sinusoid`` is ``amp * sin(freq * tau + phase)``.
    """

    kind: str = "zero"
    value: float = 0.0
    amp: float = 0.0
    freq: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "sinusoid"):
            raise ValueError(f"unknown gauge profile kind {self.kind!r}")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, c):
        return cls("constant", value=float(c))

    @classmethod
    def sinusoid(cls, amp, freq, phase=0.0):
        return cls("sinusoid", amp=float(amp), freq=float(freq), phase=float(phase))

    def __call__(self, tau):
        if isinstance(tau, float):
            if self.kind == "sinusoid":
                return self.amp * math.sin(self.freq * tau + self.phase)
            return self.value if self.kind == "constant" else 0.0
        tau = np.asarray(tau, dtype=float)
        if self.kind == "constant":
            return np.full_like(tau, self.value)
        if self.kind == "sinusoid":
            return self.amp * np.sin(self.freq * tau + self.phase)
        return np.zeros_like(tau)

    def derivative(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "sinusoid":
            return self.amp * self.freq * np.cos(self.freq * tau + self.phase)
        return np.zeros_like(tau)

    def describe(self):
        if self.kind == "constant":
            return f"constant({self.value:g})"
        if self.kind == "sinusoid":
            return f"sinusoid({self.amp:g},{self.freq:g},{self.phase:g})"
        return "zero"


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    kind: str = "phase"
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.times.ndim != 1 or self.states.shape[0] != self.times.shape[0]:
            raise ValueError("times and states must have matching first dimension")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return self.times.shape[0]

    @property
    def omega(self):
        return self.states[..., 0, :]

    @property
    def pi(self):
        return self.states[..., 1, :]

    def bivectors(self):
        if self.kind == "bivector":
            return self.states
        return wedge(self.omega, self.pi)


def lie_poisson_rhs(J, H: HamiltonianSpec, sig: Signature):
    """``dJ/dtau = {J, H}_LPB``.

    With ``G = dH/dJ`` the bracket sum collapses to ``4(J G eta - eta G J)``.
    """
    J = np.asarray(J, dtype=float)
    G = H.dH_dJ(J, sig)
    eta = sig.eta
    return 4.0 * (J @ G @ eta - eta @ G @ J)


def constrained_rhs(p: PhasePoint, H: HamiltonianSpec, e: MultiplierState, sig: Signature) -> PhasePoint:
    """Velocity of the constrained canonical flow.

    ``omega' = dH/dpi + e3 pi + e5 omega / 2`` and
    ``pi' = -dH/domega - e4 omega - e5 pi / 2`` (gradients raised with eta).
    """
    dw, dq = hamiltonian_pullback_gradients(p, H, sig)
    d = sig.diag
    wdot = d * dq + e.e3 * p.pi + 0.5 * e.e5 * p.omega
    qdot = -d * dw - e.e4 * p.omega - 0.5 * e.e5 * p.pi
    return PhasePoint(wdot, qdot)


def canonical_velocity(y, H: HamiltonianSpec, e, sig: Signature):
    """Array form of ``constrained_rhs``: ``y`` is ``(..., 2, n)``, ``e`` is ``(..., 3)``."""
    return canonical_field(H, sig)(y, e)


def canonical_field(H: HamiltonianSpec, sig: Signature):
    """Precomputed ``velocity(y, e)`` for repeated evaluation inside an integrator."""
    d = sig.diag
    # linear part: omega' += eta(-2 b omega), pi' -= eta(2 b pi)
    lin = None if H.linear is None else -2.0 * (H.linear.T * d[None, :])
    # h'(s) coefficients, highest power first, for Horner evaluation
    dh = [k * c for k, c in enumerate(H.scalar)][1:][::-1]

    def velocity(y, e):
        # velocity = C y + y lin, with C the 2x2 block of scalar coefficients
        e = np.asarray(e, dtype=float)
        C = np.empty(e.shape[:-1] + (2, 2))
        C[..., 0, 0] = 0.5 * e[..., 2]
        C[..., 0, 1] = e[..., 0]
        C[..., 1, 0] = -e[..., 1]
        C[..., 1, 1] = -0.5 * e[..., 2]
        if dh:
            g = (y * d) @ np.swapaxes(y, -1, -2)
            ww, wq, qq = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
            s = 8.0 * (ww * qq - wq * wq)
            hp = dh[0]
            for c in dh[1:]:
                hp = hp * s + c
            k = 16.0 * hp
            # raised gradients: eta dH/dpi = k (ww pi - wq omega), -eta dH/domega = k (wq pi - qq omega)
            C[..., 0, 0] -= k * wq
            C[..., 0, 1] += k * ww
            C[..., 1, 0] -= k * qq
            C[..., 1, 1] += k * wq
        out = C @ y
        if lin is not None:
            out += y @ lin
        return out

    return velocity


def _constraint_values(y, a: ConstraintParams, sig: Signature):
    d = sig.diag
    w, q = y[..., 0, :], y[..., 1, :]
    return np.stack([
        np.sum(d * q * q, axis=-1) + a.a3,
        np.sum(d * w * w, axis=-1) + a.a4,
        np.sum(d * w * q, axis=-1) + a.a5,
    ], axis=-1)


def surface_projector(a: ConstraintParams, sig: Signature, tol=NEWTON_TOL, max_iter=NEWTON_MAX_ITER):
    """Return ``project(y)`` mapping ``(..., 2, n)`` states onto ``T3 = T4 = T5 = 0``.

    Gauss-Newton with the exact constraint Jacobian (minimum-norm correction).
    """
    d = sig.diag
    scale = max(1.0, float(np.max(np.abs(a.as_array()))))

    def project(y):
        y = np.array(y, dtype=float)
        for _ in range(max_iter):
            T = _constraint_values(y, a, sig)
            if np.max(np.abs(T), initial=0.0) <= tol * scale:
                return y
            w, q = y[..., 0, :], y[..., 1, :]
            z = np.zeros_like(w)
            # rows: dT3, dT4, dT5 with respect to (omega, pi)
            D = np.stack([
                np.concatenate([z, 2 * d * q], axis=-1),
                np.concatenate([2 * d * w, z], axis=-1),
                np.concatenate([d * q, d * w], axis=-1),
            ], axis=-2)
            DDt = D @ np.swapaxes(D, -1, -2)
            lam = np.linalg.solve(DDt, T[..., None])[..., 0]
            step = np.einsum("...k,...kj->...j", lam, D)
            n = y.shape[-1]
            y[..., 0, :] -= step[..., :n]
            y[..., 1, :] -= step[..., n:]
        T = _constraint_values(y, a, sig)
        if np.max(np.abs(T), initial=0.0) <= tol * scale:
            return y
        raise ProjectionError(
            f"constraint projection failed after {max_iter} iterations (|T| = {np.max(np.abs(T)):.3e})"
        )

    return project


def integrate(rhs, state0, span, dt, projection=None) -> Trajectory:
    """Fixed-step classical RK4 for ``y' = rhs(tau, y)`` on an array state of any shape.

    ``span = (tau0, tau1)``; the number of steps is ``ceil((tau1 - tau0) / dt)``
    with the step shrunk to land exactly on ``tau1``. ``projection`` is an
    optional callable applied after every step.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0, t1 = float(span[0]), float(span[1])
    if not (np.isfinite(t0) and np.isfinite(t1)) or t1 < t0:
        raise ValueError(f"invalid integration span {span}")
    y = np.array(state0, dtype=float)
    nsteps = int(np.ceil((t1 - t0) / dt - 1e-9)) if t1 > t0 else 0
    h = (t1 - t0) / nsteps if nsteps else 0.0
    times = t0 + h * np.arange(nsteps + 1)
    if nsteps:
        times[-1] = t1
    states = np.empty((nsteps + 1,) + y.shape)
    if projection is not None:
        y = projection(y)
    states[0] = y
    half = 0.5 * h
    for i in range(nsteps):
        t = times[i]
        k1 = rhs(t, y)
        k2 = rhs(t + half, y + half * k1)
        k3 = rhs(t + half, y + half * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if projection is not None:
            y = projection(y)
        states[i + 1] = y
    return Trajectory(times, states)


def integrate_lie_poisson(J0, H: HamiltonianSpec, sig: Signature, span, dt) -> Trajectory:
    """RK4 for ``J' = {J, H}``.

    The Casimir part of ``H`` generates no flow (its contribution to
    ``J G eta - eta G J`` cancels identically), so only the constant linear
    generator enters.
    """
    eta = sig.eta
    A = 2.0 * (H.linear if H.linear is not None else np.zeros((sig.n, sig.n)))
    Ae, eA = A @ eta, eta @ A
    rhs = lambda t, J: J @ Ae - eA @ J  # noqa: E731
    traj = integrate(rhs, J0, span, dt)
    traj.kind = "bivector"
    traj.diagnostics["casimir"] = np.array([casimir_quadratic(J, sig) for J in traj.states])
    return traj


def integrate_constrained(p0: PhasePoint, H: HamiltonianSpec, a: ConstraintParams, gauges, sig: Signature,
                          span, dt, projection=False):
    """Integrate the constrained flow from ``p0`` once per gauge profile (batched).

    Returns one ``Trajectory`` per profile with constraint and Casimir diagnostics.
    """
    gauges = list(gauges)
    direction = gauge_direction(a)
    y0 = np.broadcast_to(p0.as_array(), (len(gauges), 2, p0.n)).copy()

    field_ = canonical_field(H, sig)

    def rhs(t, y):
        g = np.array([prof(t) for prof in gauges])
        return field_(y, g[:, None] * direction)

    proj = surface_projector(a, sig) if projection else None
    batch = integrate(rhs, y0, span, dt, projection=proj)
    out = []
    for i, prof in enumerate(gauges):
        traj = Trajectory(batch.times, batch.states[:, i])
        fill_diagnostics(traj, a, sig)
        traj.diagnostics["gauge"] = prof.describe()
        out.append(traj)
    return out


def fill_diagnostics(traj: Trajectory, a: ConstraintParams, sig: Signature):
    traj.diagnostics["constraints"] = _constraint_values(traj.states, a, sig)
    J = traj.bivectors()
    traj.diagnostics["casimir"] = np.sum(J * sig.lower(J), axis=(-1, -2))
    return traj


@dataclass
class EquivalenceReport:
    deviation: float
    gauge_spread: float
    phase_spread: float
    constraint_drift: float
    casimir_drift: float
    lie_poisson: Trajectory
    canonical: list

    def as_dict(self):
        return {
            "projection_deviation": self.deviation,
            "gauge_spread": self.gauge_spread,
            "phase_spread": self.phase_spread,
            "constraint_drift": self.constraint_drift,
            "casimir_drift": self.casimir_drift,
            "gauges": [t.diagnostics.get("gauge") for t in self.canonical],
        }


def projection_equivalence(p0: PhasePoint, H: HamiltonianSpec, a: ConstraintParams, gauges, span, dt,
                           sig: Signature, projection=False) -> EquivalenceReport:
    """Integrate ``(omega, pi)`` under each gauge and ``J`` directly from ``f(p0)``; compare.

    ``deviation`` is the max over time and gauges of ``|f(omega, pi) - J|_inf``;
    ``gauge_spread`` the max pairwise difference of the projected ``J``;
    ``phase_spread`` the same for the raw ``(omega, pi)``.
    """
    T0 = constraints_eval(p0, a, sig)
    if np.max(np.abs(T0)) > ON_SURFACE_TOL:
        raise OffSurfaceError(f"initial point is off the constraint surface (T = {T0})")
    canon = integrate_constrained(p0, H, a, gauges, sig, span, dt, projection=projection)
    lp = integrate_lie_poisson(wedge(p0.omega, p0.pi), H, sig, span, dt)
    projected = [t.bivectors() for t in canon]
    dev = max((float(np.max(np.abs(Jp - lp.states), initial=0.0)) for Jp in projected), default=0.0)
    spread = max((float(np.max(np.abs(x - y), initial=0.0)) for x, y in combinations(projected, 2)), default=0.0)
    phase = max((float(np.max(np.abs(x.states - y.states), initial=0.0)) for x, y in combinations(canon, 2)),
                default=0.0)
    drift = max((float(np.max(np.abs(t.diagnostics["constraints"]), initial=0.0)) for t in canon), default=0.0)
    cas = max((float(np.max(np.abs(t.diagnostics["casimir"] - a.casimir_value), initial=0.0)) for t in canon),
              default=0.0)
    return EquivalenceReport(dev, spread, phase, drift, cas, lp, canon)
