"""Structure group of the spin fiber and its local (gauge) form.

Every transformation here mixes ``omega`` and ``pi`` inside their common
plane while keeping ``omega^2``, ``pi^2``, ``(omega pi)`` and ``J`` fixed.
Which one-parameter group applies depends on the invariants of the point:

=============================  ==============================================
tag                            condition
=============================  ==============================================
``trigonometric``              same-sign ``omega^2, pi^2``, ratio ``r < 1``
``hyperbolic_mixed``           opposite-sign ``omega^2, pi^2`` (``r <= 0``)
``hyperbolic_same``            same-sign ``omega^2, pi^2``, ratio ``r > 1``
``both_lightlike``             ``omega^2 = pi^2 = 0``, ``(omega pi) != 0``
``omega_lightlike``            ``omega^2 = 0``, ``pi^2 != 0``, ``(omega pi) != 0``
``omega_lightlike_orthogonal`` ``omega^2 = 0``, ``(omega pi) = 0``, ``pi^2 != 0``
=============================  ==============================================

with ``r = (omega pi)^2 / (omega^2 pi^2)``. Points with lightlike ``pi`` and
non-null ``omega`` are handled by exchanging the roles of the two vectors.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import Signature
from .phasespace import ConstraintParams, HamiltonianSpec, PhasePoint, wedge

NULL_TOL = 1e-12

CASES = (
    "trigonometric",
    "hyperbolic_mixed",
    "hyperbolic_same",
    "both_lightlike",
    "omega_lightlike",
    "omega_lightlike_orthogonal",
)
MULTIPLICATIVE = ("both_lightlike", "omega_lightlike")


class UnclassifiableError(ValueError):
    pass


class SingularGaugeError(ValueError):
    pass


@dataclass(frozen=True)
class GaugeCase:
    tag: str
    sigma: float = float("nan")
    swapped: bool = False


def _invariants(p: PhasePoint, sig: Signature):
    return (
        float(sig.inner(p.omega, p.omega)),
        float(sig.inner(p.pi, p.pi)),
        float(sig.inner(p.omega, p.pi)),
    )


def _is_null(x, scale):
    return abs(x) <= NULL_TOL * scale


def classify_case(p: PhasePoint, sig: Signature) -> GaugeCase:
    """Classify the structure-group family acting at ``p``.

    ``sigma`` is the auxiliary angle of the trigonometric and hyperbolic
    families (principal branch, sign following ``(omega pi)`` where it matters).
    """
    ww, qq, wq = _invariants(p, sig)
    scale = max(float(np.dot(p.omega, p.omega)), float(np.dot(p.pi, p.pi)), 1e-300)
    scale2 = float(np.linalg.norm(p.omega) * np.linalg.norm(p.pi)) or 1e-300
    if np.max(np.abs(wedge(p.omega, p.pi)), initial=0.0) <= NULL_TOL * scale2:
        raise UnclassifiableError("J(p) = 0: omega and pi are parallel, no structure group")
    w_null = _is_null(ww, float(np.dot(p.omega, p.omega)) or 1e-300)
    q_null = _is_null(qq, float(np.dot(p.pi, p.pi)) or 1e-300)
    x_null = _is_null(wq, scale2)

    if w_null and q_null:
        if x_null:
            raise UnclassifiableError("omega and pi span a totally null plane")
        return GaugeCase("both_lightlike")
    if w_null or q_null:
        swapped = q_null
        return GaugeCase("omega_lightlike_orthogonal" if x_null else "omega_lightlike", swapped=swapped)

    prod = ww * qq
    if prod < 0:
        sigma = float(np.arcsinh(wq / np.sqrt(-prod)))
        return GaugeCase("hyperbolic_mixed", sigma)
    r = wq * wq / prod
    if abs(r - 1.0) <= 1e-12:
        raise UnclassifiableError("omega and pi span a degenerate plane (r = 1)")
    s = 1.0 if ww > 0 else -1.0
    if r < 1.0:
        c = wq / (s * np.sqrt(prod))
        return GaugeCase("trigonometric", float(np.arccos(np.clip(c, -1.0, 1.0))))
    sigma = float(np.arccosh(np.sqrt(r)))
    return GaugeCase("hyperbolic_same", sigma)


def _transform_unswapped(omega, pi, case, beta, ww, qq, wq):
    if case.tag == "trigonometric":
        sg = np.sin(case.sigma)
        ratio = np.sqrt(ww / qq)
        w2 = -omega * np.sin(beta - case.sigma) / sg + pi * ratio * np.sin(beta) / sg
        q2 = -omega * np.sin(beta) / (ratio * sg) + pi * np.sin(beta + case.sigma) / sg
        return w2, q2
    if case.tag == "hyperbolic_mixed":
        ch = np.cosh(case.sigma)
        # omega^2 sinh(sigma) / (omega pi), regular at (omega pi) = 0
        kw = ww / np.sqrt(-ww * qq)
        kq = qq / np.sqrt(-ww * qq)
        w2 = (omega * np.cosh(beta - case.sigma) + pi * kw * np.sinh(beta)) / ch
        q2 = (-omega * kq * np.sinh(beta) + pi * np.cosh(beta + case.sigma)) / ch
        return w2, q2
    if case.tag == "hyperbolic_same":
        sh = np.sinh(case.sigma)
        ch = np.cosh(case.sigma)
        w2 = (-omega * np.sinh(beta - case.sigma) + pi * ww / wq * np.sinh(beta) * ch) / sh
        q2 = (-omega * qq / wq * np.sinh(beta) * ch + pi * np.sinh(beta + case.sigma)) / sh
        return w2, q2
    if case.tag == "both_lightlike":
        return beta * omega, pi / beta
    if case.tag == "omega_lightlike":
        return omega / beta, (1.0 - beta**2) * qq / (2.0 * beta * wq) * omega + beta * pi
    if case.tag == "omega_lightlike_orthogonal":
        return omega.copy(), beta * omega + pi
    raise ValueError(f"unknown case {case.tag!r}")


def finite_gauge_transform(p: PhasePoint, beta, sig: Signature, case: GaugeCase = None) -> PhasePoint:
    """Apply the structure-group element with parameter ``beta`` to ``p``.

    ``beta`` is additive (identity at 0) except in the ``both_lightlike`` and
    ``omega_lightlike`` families, which are multiplicative (identity at 1,
    ``beta = 0`` forbidden).
    """
    if case is None:
        case = classify_case(p, sig)
    if case.tag in MULTIPLICATIVE and beta == 0:
        raise SingularGaugeError(f"beta = 0 is not allowed in the {case.tag} family")
    if case.tag == "trigonometric" and abs(np.sin(case.sigma)) < 1e-14:
        raise SingularGaugeError("sin(sigma) = 0: omega and pi are parallel")
    omega, pi = p.omega, p.pi
    if case.swapped:
        omega, pi = pi, omega
    ww, qq, wq = (float(sig.inner(omega, omega)), float(sig.inner(pi, pi)), float(sig.inner(omega, pi)))
    w2, q2 = _transform_unswapped(omega, pi, case, beta, ww, qq, wq)
    if case.swapped:
        w2, q2 = q2, w2
    return PhasePoint(w2, q2)


def infinitesimal_gauge(p: PhasePoint, beta, sig: Signature) -> PhasePoint:
    """First-order variation ``delta omega = beta(-omega + pi omega^2/(omega pi))``,
    ``delta pi = beta(-omega pi^2/(omega pi) + pi)``.
    """
    ww, qq, wq = _invariants(p, sig)
    scale = float(np.linalg.norm(p.omega) * np.linalg.norm(p.pi))
    if abs(wq) <= NULL_TOL * max(scale, 1e-300):
        raise SingularGaugeError("(omega pi) = 0: use the finite omega_lightlike_orthogonal or trigonometric form")
    dw = beta * (-p.omega + p.pi * ww / wq)
    dq = beta * (-p.omega * qq / wq + p.pi)
    return PhasePoint(dw, dq)


def _infinitesimal_array(omega, pi, beta, sig):
    d = sig.diag
    ww = np.sum(d * omega * omega, axis=-1)[..., None]
    qq = np.sum(d * pi * pi, axis=-1)[..., None]
    wq = np.sum(d * omega * pi, axis=-1)[..., None]
    b = np.asarray(beta)[..., None]
    return b * (-omega + pi * ww / wq), b * (-omega * qq / wq + pi)


@dataclass(frozen=True)
class CompactBump:
    """``amplitude * sin^2(pi (tau - t0) / (t1 - t0))`` on ``[t0, t1]``; value and slope vanish at the ends."""

    amplitude: float
    t0: float
    t1: float

    @property
    def _k(self):
        return np.pi / (self.t1 - self.t0)

    def __call__(self, tau):
        return self.amplitude * np.sin(self._k * (np.asarray(tau) - self.t0)) ** 2

    def derivative(self, tau):
        x = self._k * (np.asarray(tau) - self.t0)
        return self.amplitude * self._k * np.sin(2 * x)

    def second_derivative(self, tau):
        x = self._k * (np.asarray(tau) - self.t0)
        return 2.0 * self.amplitude * self._k**2 * np.cos(2 * x)


@dataclass(frozen=True)
class MultiplierVariation:
    de3: np.ndarray
    de4: np.ndarray
    de5: np.ndarray
    dl3: np.ndarray = None
    dl4: np.ndarray = None
    dl5: np.ndarray = None


def multiplier_variation(omega, pi, omega_dot, pi_dot, beta, beta_dot, sig: Signature,
                         beta_ddot=None, omega_ddot=None, pi_ddot=None) -> MultiplierVariation:
    """Multiplier variations that cancel the kinetic-term variation of the local symmetry.

    ``delta e3 = (beta omega^2/(omega pi))'``, ``delta e4 = (beta pi^2/(omega pi))'``,
    ``delta e5 = -2 beta'``, differentiated analytically through the supplied
    velocities. ``delta lambda = (delta e)'`` is filled only for ``delta e5``
    (needs ``beta_ddot``) and for the rest when accelerations are given too.
    Arrays broadcast over leading time axes.
    """
    d = sig.diag
    omega, pi = np.asarray(omega, dtype=float), np.asarray(pi, dtype=float)
    omega_dot, pi_dot = np.asarray(omega_dot, dtype=float), np.asarray(pi_dot, dtype=float)
    ww = np.sum(d * omega * omega, axis=-1)
    qq = np.sum(d * pi * pi, axis=-1)
    wq = np.sum(d * omega * pi, axis=-1)
    if np.any(np.abs(wq) <= NULL_TOL):
        raise SingularGaugeError("(omega pi) vanishes along the trajectory")
    ww_dot = 2 * np.sum(d * omega * omega_dot, axis=-1)
    qq_dot = 2 * np.sum(d * pi * pi_dot, axis=-1)
    wq_dot = np.sum(d * (omega_dot * pi + omega * pi_dot), axis=-1)
    beta = np.asarray(beta, dtype=float)
    beta_dot = np.asarray(beta_dot, dtype=float)
    de3 = beta_dot * ww / wq + beta * (ww_dot * wq - ww * wq_dot) / wq**2
    de4 = beta_dot * qq / wq + beta * (qq_dot * wq - qq * wq_dot) / wq**2
    de5 = -2.0 * beta_dot
    dl3 = dl4 = dl5 = None
    if beta_ddot is not None:
        dl5 = -2.0 * np.asarray(beta_ddot, dtype=float)
        if omega_ddot is not None and pi_ddot is not None:
            # second derivatives of x/(omega pi) for x = omega^2, pi^2
            ww_dd = 2 * np.sum(d * (omega_dot * omega_dot + omega * omega_ddot), axis=-1)
            qq_dd = 2 * np.sum(d * (pi_dot * pi_dot + pi * pi_ddot), axis=-1)
            wq_dd = np.sum(d * (omega_ddot * pi + 2 * omega_dot * pi_dot + omega * pi_ddot), axis=-1)

            def second(x, xd, xdd):
                f = x / wq
                fd = (xd * wq - x * wq_dot) / wq**2
                fdd = (xdd - 2 * fd * wq_dot - f * wq_dd) / wq
                return beta_ddot * f + 2 * beta_dot * fd + beta * fdd

            dl3 = second(ww, ww_dot, ww_dd)
            dl4 = second(qq, qq_dot, qq_dd)
    return MultiplierVariation(de3, de4, de5, dl3, dl4, dl5)


def _trapezoid(y, dt):
    return float(dt * (np.sum(y) - 0.5 * (y[0] + y[-1])))


def hamiltonian_action(times, omega, pi, e, a: ConstraintParams, H: HamiltonianSpec, sig: Signature):
    """Discrete ``int pi omega' - [H(J) + e_a T_a / 2] dtau`` on a uniform grid.

    ``omega'`` by second-order centred differences, trapezoidal quadrature.
    ``e`` has shape ``(N, 3)``. The ``pi_ea`` terms vanish on the constraint
    ``pi_ea = 0`` and are omitted.
    """
    times = np.asarray(times, dtype=float)
    dt = times[1] - times[0]
    d = sig.diag
    omega_dot = np.gradient(omega, dt, axis=0, edge_order=2)
    kinetic = np.sum(d * pi * omega_dot, axis=-1)
    J = wedge(omega, pi)
    Hval = np.array([H.value(Jk, sig) for Jk in J]) if (H.linear is not None or len(H.scalar) > 0) else 0.0
    T = np.stack([
        np.sum(d * pi * pi, axis=-1) + a.a3,
        np.sum(d * omega * omega, axis=-1) + a.a4,
        np.sum(d * omega * pi, axis=-1) + a.a5,
    ], axis=-1)
    integrand = kinetic - Hval - 0.5 * np.sum(e * T, axis=-1)
    return _trapezoid(integrand, dt)


def action_gauge_variation(traj, e, beta_profile, a: ConstraintParams, H: HamiltonianSpec, sig: Signature,
                           velocity=None):
    """``S[varied] - S`` for the local spin-plane symmetry with parameter ``beta(tau)``.

    ``traj`` is a phase-space ``Trajectory`` on a uniform grid, ``e`` the
    multiplier samples ``(N, 3)``. The state is varied by the first-order
    symmetry, the multipliers by ``multiplier_variation``. Velocities default
    to centred differences of the samples. The result is ``O(beta^2)``.
    """
    times = traj.times
    b = beta_profile(times)
    bd = beta_profile.derivative(times)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(b))))
    if max(abs(b[0]), abs(b[-1]), abs(bd[0]) * (times[1] - times[0]), abs(bd[-1]) * (times[1] - times[0])) > tol:
        raise ValueError("beta profile must vanish with its derivative at both ends of the span")
    omega, pi = traj.omega, traj.pi
    dt = times[1] - times[0]
    if velocity is None:
        omega_dot = np.gradient(omega, dt, axis=0, edge_order=2)
        pi_dot = np.gradient(pi, dt, axis=0, edge_order=2)
    else:
        omega_dot, pi_dot = velocity
    dw, dq = _infinitesimal_array(omega, pi, b, sig)
    var = multiplier_variation(omega, pi, omega_dot, pi_dot, b, bd, sig)
    de = np.stack([var.de3, var.de4, var.de5], axis=-1)
    e = np.asarray(e, dtype=float)
    S0 = hamiltonian_action(times, omega, pi, e, a, H, sig)
    S1 = hamiltonian_action(times, omega + dw, pi + dq, e + de, a, H, sig)
    return S1 - S0
