"""Frozen-spin Lagrangian form.

When the Hamiltonian is a function of the Casimir alone, its derivatives with
respect to ``pi^2``, ``omega^2`` and ``(omega pi)`` can be frozen on the surface
and absorbed into the multipliers. Eliminating ``pi`` then gives a
Lagrangian for ``omega`` with einbein-like variables ``e~_a``.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import Signature
from .constraints import MultiplierState
from .dynamics import constrained_rhs
from .phasespace import ConstraintParams, HamiltonianSpec, PhasePoint

DEN_TOL = 1e-12


class SingularProjectorError(ValueError):
    pass


class SingularEinbeinError(ValueError):
    pass


@dataclass(frozen=True)
class EinbeinState:
    """Absorbed multipliers ``e~3 = e3 + 2 H_pp``, ``e~4 = e4 + 2 H_ww``, ``e~5 = e5 + 2 H_wp``."""
    e3t: float
    e4t: float
    e5t: float

    def __post_init__(self):
        if self.e3t == 0.0:
            raise SingularEinbeinError("e~3 = 0: pi cannot be recovered from the velocity")

    def as_array(self):
        return np.array([self.e3t, self.e4t, self.e5t])


def frozen_spin_coeffs(H: HamiltonianSpec, a: ConstraintParams):
    """``(H_pp, H_wp, H_ww)``: partials of ``H = h(J^2)`` by ``pi^2``, ``(omega pi)``, ``omega^2`` on the surface.

    With ``J^2 = 8[omega^2 pi^2 - (omega pi)^2]`` the chain rule gives
    ``(8 h' omega^2, -16 h' (omega pi), 8 h' pi^2)`` evaluated at
    ``pi^2 = -a3, omega^2 = -a4, (omega pi) = -a5``.
    """
    if not H.is_scalar:
        raise ValueError("frozen-spin coefficients need a Hamiltonian that depends on J^2 only")
    hp = float(H.scalar_poly(a.casimir_value, 1))
    return -8.0 * hp * a.a4, 16.0 * hp * a.a5, -8.0 * hp * a.a3


def absorbed_multipliers(e, H: HamiltonianSpec, a: ConstraintParams):
    """``e~`` from raw ``e = (e3, e4, e5)``; works on arrays with trailing axis 3."""
    hpp, hwp, hww = frozen_spin_coeffs(H, a)
    return np.asarray(e, dtype=float) + 2.0 * np.array([hpp, hww, hwp])


def covariant_derivative(omega_dot, omega, e5t):
    """``D omega = omega' - e~5 omega / 2``; broadcasts over leading axes."""
    e5t = np.asarray(e5t, dtype=float)
    return np.asarray(omega_dot) - 0.5 * e5t[..., None] * np.asarray(omega)


def pi_recovery(omega_dot, omega, e: EinbeinState):
    """Momentum ``pi = D omega / e~3`` implied by the velocity equation."""
    if e.e3t == 0.0:
        raise SingularEinbeinError("e~3 = 0")
    return covariant_derivative(omega_dot, omega, e.e5t) / e.e3t


def velocity_from_pi(omega, pi, e: EinbeinState):
    """Velocity equation in absorbed form: ``omega' = e~3 pi + e~5 omega / 2``."""
    return e.e3t * np.asarray(pi) + 0.5 * e.e5t * np.asarray(omega)


def projector_K(omega, Domega, sig: Signature):
    """``K = 1 - D omega (eta omega)^T / (omega D omega)``.

    ``K`` is idempotent, ``omega_mu K^mu_nu = 0`` and ``K D omega = 0``.
    """
    omega = np.asarray(omega, dtype=float)
    Domega = np.asarray(Domega, dtype=float)
    den = float(sig.inner(omega, Domega))
    if abs(den) <= DEN_TOL * max(1.0, float(np.linalg.norm(omega) * np.linalg.norm(Domega))):
        raise SingularProjectorError("(omega D omega) = 0: projector undefined")
    return np.eye(omega.size) - np.outer(Domega, sig.diag * omega) / den


def _trapezoid(y, dt):
    return float(dt * (np.sum(y) - 0.5 * (y[0] + y[-1])))


def _check_einbein(e3t):
    e3t = np.asarray(e3t)
    if np.any(np.abs(e3t) <= DEN_TOL) or (e3t.size > 1 and np.any(np.sign(e3t[1:]) != np.sign(e3t[:-1]))):
        raise SingularEinbeinError("e~3 vanishes or changes sign along the path")


def lagrangian_action(times, omega, et, a: ConstraintParams, sig: Signature):
    """Discrete ``int (D omega)^2/(2 e~3) - e~4 omega^2/2 - e~_a a_a/2 dtau``.

    ``omega`` has shape ``(N, n)`` and ``et`` the absorbed multipliers ``(N, 3)``
    on a uniform grid. Centred differences for ``omega'``, trapezoid rule.
    """
    times = np.asarray(times, dtype=float)
    et = np.asarray(et, dtype=float)
    _check_einbein(et[:, 0])
    dt = times[1] - times[0]
    omega_dot = np.gradient(omega, dt, axis=0, edge_order=2)
    D = covariant_derivative(omega_dot, omega, et[:, 2])
    d = sig.diag
    integrand = (
        np.sum(d * D * D, axis=-1) / (2.0 * et[:, 0])
        - 0.5 * et[:, 1] * np.sum(d * omega * omega, axis=-1)
        - 0.5 * et @ a.as_array()
    )
    return _trapezoid(integrand, dt)


def hamiltonian_action_frozen(times, omega, pi, e, a: ConstraintParams, H: HamiltonianSpec, sig: Signature):
    """Discrete first-order action with frozen coefficients.

    ``int pi omega' - [H_pp pi^2 + H_wp (omega pi) + H_ww omega^2 + e_a T_a / 2] dtau``
    with raw multipliers ``e`` of shape ``(N, 3)``.
    """
    times = np.asarray(times, dtype=float)
    dt = times[1] - times[0]
    d = sig.diag
    hpp, hwp, hww = frozen_spin_coeffs(H, a)
    omega_dot = np.gradient(omega, dt, axis=0, edge_order=2)
    pp = np.sum(d * pi * pi, axis=-1)
    ww = np.sum(d * omega * omega, axis=-1)
    wp = np.sum(d * omega * pi, axis=-1)
    T = np.stack([pp + a.a3, ww + a.a4, wp + a.a5], axis=-1)
    integrand = (
        np.sum(d * pi * omega_dot, axis=-1)
        - (hpp * pp + hwp * wp + hww * ww)
        - 0.5 * np.sum(np.asarray(e) * T, axis=-1)
    )
    return _trapezoid(integrand, dt)


def legendre_offset(H: HamiltonianSpec, a: ConstraintParams, duration):
    """Constant ``S_H - S_L`` after eliminating ``pi``: ``(H_pp a3 + H_ww a4 + H_wp a5) * duration``.

    It appears because the constant term of the Lagrangian is written with
    the absorbed multipliers ``e~_a`` rather than the raw ones.
    """
    hpp, hwp, hww = frozen_spin_coeffs(H, a)
    return (hpp * a.a3 + hww * a.a4 + hwp * a.a5) * duration


def lagrangian_gauge_variation(times, omega, et, beta_profile, a: ConstraintParams, sig: Signature):
    """``S_L[varied] - S_L`` under the local symmetry, first-order in ``beta``.

    ``delta omega = -beta K omega``, ``delta e~5 = -2 beta'``,
    ``delta e~3 = (beta e~3 omega^2 / (omega D omega))'`` and
    ``delta e~4 = (beta (D omega D omega) / (e~3 (omega D omega)))'``;
    inner derivatives by centred differences. The result is ``O(beta^2)``.
    """
    times = np.asarray(times, dtype=float)
    omega = np.asarray(omega, dtype=float)
    et = np.asarray(et, dtype=float)
    dt = times[1] - times[0]
    b = beta_profile(times)
    bd = beta_profile.derivative(times)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(b))))
    if max(abs(b[0]), abs(b[-1]), abs(bd[0]) * dt, abs(bd[-1]) * dt) > tol:
        raise ValueError("beta profile must vanish with its derivative at both ends of the span")
    d = sig.diag
    omega_dot = np.gradient(omega, dt, axis=0, edge_order=2)
    D = covariant_derivative(omega_dot, omega, et[:, 2])
    wD = np.sum(d * omega * D, axis=-1)
    if np.any(np.abs(wD) <= DEN_TOL):
        raise SingularProjectorError("(omega D omega) vanishes along the path")
    ww = np.sum(d * omega * omega, axis=-1)
    DD = np.sum(d * D * D, axis=-1)
    # K omega = omega - D omega (omega^2 / (omega D omega))
    K_omega = omega - D * (ww / wD)[:, None]
    omega_v = omega - b[:, None] * K_omega
    et_v = et.copy()
    et_v[:, 0] += np.gradient(b * et[:, 0] * ww / wD, dt, edge_order=2)
    et_v[:, 1] += np.gradient(b * DD / (et[:, 0] * wD), dt, edge_order=2)
    et_v[:, 2] += -2.0 * bd
    return lagrangian_action(times, omega_v, et_v, a, sig) - lagrangian_action(times, omega, et, a, sig)


def _as_multipliers(e):
    if isinstance(e, MultiplierState):
        return e
    return MultiplierState(*(float(x) for x in e))


def frozen_rhs(p: PhasePoint, H: HamiltonianSpec, e, a: ConstraintParams, sig: Signature) -> PhasePoint:
    """Equations of motion with frozen coefficients:
    ``omega' = (2 H_pp + e3) pi + (H_wp + e5/2) omega`` and
    ``pi' = -(2 H_ww + e4) omega - (H_wp + e5/2) pi``.
    """
    e3, e4, e5 = (float(x) for x in _as_multipliers(e).e)
    hpp, hwp, hww = frozen_spin_coeffs(H, a)
    wdot = (2 * hpp + e3) * p.pi + (hwp + 0.5 * e5) * p.omega
    qdot = -(2 * hww + e4) * p.omega - (hwp + 0.5 * e5) * p.pi
    return PhasePoint(wdot, qdot)


def eom_equivalence(p: PhasePoint, H: HamiltonianSpec, e, a: ConstraintParams, sig: Signature) -> float:
    """Max difference between the frozen-coefficient and the full constrained equations at ``p``.

    Zero on the constraint surface up to roundoff; off the surface it is
    proportional to the constraint values.
    """
    full = constrained_rhs(p, H, _as_multipliers(e), sig)
    frozen = frozen_rhs(p, H, e, a, sig)
    return float(max(np.max(np.abs(full.omega - frozen.omega)), np.max(np.abs(full.pi - frozen.pi))))
