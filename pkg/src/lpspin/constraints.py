"""Dirac analysis of the three invariant constraints.

Brackets between constraints close on the constants only, so the on-shell
bracket matrix depends on ``(a3, a4, a5)`` alone. Its one-dimensional kernel
is the first-class direction; the Lagrange multipliers ``(e3, e4, e5)`` must
lie along it for the flow to stay on the surface.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import Signature
from .phasespace import (
    ConstraintParams,
    PhasePoint,
    bracket_matrix,
    constraint_gradients,
    jacobian_f,
)


class InconsistentGaugeError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplierState:
    e3: float
    e4: float
    e5: float
    l3: float = 0.0
    l4: float = 0.0
    l5: float = 0.0

    @property
    def e(self):
        return np.array([self.e3, self.e4, self.e5])

    @property
    def lam(self):
        return np.array([self.l3, self.l4, self.l5])

    def consistency_residuals(self, a: ConstraintParams):
        """Residuals of ``2 e4 a5 + e5 a3 = 0`` and ``2 e3 a5 + e5 a4 = 0`` (and the same for ``lambda``)."""
        return np.array([
            2 * self.e4 * a.a5 + self.e5 * a.a3,
            2 * self.e3 * a.a5 + self.e5 * a.a4,
            2 * self.l4 * a.a5 + self.l5 * a.a3,
            2 * self.l3 * a.a5 + self.l5 * a.a4,
        ])


def constraint_bracket_matrix(a: ConstraintParams):
    """On-shell ``{T_a, T_b}`` in the basis ``(T3, T4, T5)``."""
    a3, a4, a5 = a.a3, a.a4, a.a5
    return np.array([
        [0.0, 4 * a5, 2 * a3],
        [-4 * a5, 0.0, -2 * a4],
        [-2 * a3, 2 * a4, 0.0],
    ])


def constraint_brackets_at(p: PhasePoint, sig: Signature):
    """``{T_a, T_b}`` evaluated at an arbitrary (possibly off-shell) point."""
    g = constraint_gradients(p, sig)
    return bracket_matrix(g, g, sig)


def first_class_combination(a: ConstraintParams):
    """Unit kernel vector ``(a4, a3, -2 a5) / norm`` of the bracket matrix.

    The combination ``v . T`` has vanishing brackets with every constraint on
    the surface.
    """
    v = np.array([a.a4, a.a3, -2.0 * a.a5])
    return v / np.linalg.norm(v)


def resolve_multipliers(e5, a: ConstraintParams, amplitude=0.0, lambda5=0.0) -> MultiplierState:
    """Solve the consistency conditions for ``(e3, e4)`` given the free multiplier.

    For ``a5 != 0`` the free function is ``e5`` itself. For ``a5 == 0`` the
    conditions force ``e5 = 0`` and the freedom moves to ``amplitude`` along
    the unit first-class direction ``(a4, a3, 0)``.
    """
    if a.a5 != 0.0:
        s = -1.0 / (2.0 * a.a5)
        return MultiplierState(
            a.a4 * e5 * s, a.a3 * e5 * s, float(e5),
            a.a4 * lambda5 * s, a.a3 * lambda5 * s, float(lambda5),
        )
    if e5 != 0.0:
        raise InconsistentGaugeError(
            f"a5 = 0 forces e5 = 0 (2 e4 a5 + e5 a3 = {e5 * a.a3:.3e} != 0); "
            "use the amplitude along the first-class direction instead"
        )
    v = first_class_combination(a)
    return MultiplierState(amplitude * v[0], amplitude * v[1], 0.0)


def multipliers_for_gauge(g, a: ConstraintParams, gdot=0.0) -> MultiplierState:
    """Multipliers generated by a free gauge value ``g``.

    ``g`` is ``e5`` when ``a5 != 0`` and the amplitude along the unit
    first-class direction when ``a5 == 0``.
    """
    if a.a5 != 0.0:
        return resolve_multipliers(g, a, lambda5=gdot)
    v = first_class_combination(a)
    return MultiplierState(g * v[0], g * v[1], 0.0, gdot * v[0], gdot * v[1], 0.0)


def gauge_direction(a: ConstraintParams):
    """Multiplier vector per unit gauge value, consistent with ``multipliers_for_gauge``."""
    if a.a5 != 0.0:
        s = -1.0 / (2.0 * a.a5)
        return np.array([a.a4 * s, a.a3 * s, 1.0])
    return first_class_combination(a)


def dirac_correction(p: PhasePoint, sig: Signature) -> float:
    """Max-abs of ``{J, K_a} {K_a, K_b}^{-1} {K_b, J}`` with second-class pair ``K = (T3, T4)``.

    Needs ``{T3, T4} = -4 (omega pi)`` nonzero at ``p``.
    """
    g = constraint_gradients(p, sig)[:2]
    jac = jacobian_f(p)
    KK = bracket_matrix(g, g, sig)
    JK = bracket_matrix(jac, g, sig)
    corr = JK @ np.linalg.solve(KK, JK.T)
    return float(np.max(np.abs(corr), initial=0.0))
