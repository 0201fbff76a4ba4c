"""Canonical phase space R^{2n}, the map to angular momentum and the invariant
constraint surface.

The canonical bracket is ``{omega^mu, pi^nu} = eta^{mu nu}``. Gradients are
returned as plain partial derivatives (lower-index covectors); velocities
and phase points carry upper indices.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import Signature, basis_pairs, casimir_quadratic, lie_poisson_matrix

NONDEGENERACY_TOL = 1e-12
RANK_RTOL = 1e-8


class DegenerateConstraintsError(ValueError):
    pass


@dataclass(frozen=True)
class PhasePoint:
    omega: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        pi = np.array(self.pi, dtype=float)
        if omega.ndim != 1 or omega.shape != pi.shape:
            raise ValueError(f"omega and pi must be equal-length vectors, got {omega.shape} and {pi.shape}")
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(pi))):
            raise ValueError("phase point has non-finite entries")
        omega.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "pi", pi)

    @property
    def n(self):
        return self.omega.shape[0]

    def as_array(self):
        """Stacked ``(2, n)`` array ``[omega, pi]``."""
        return np.stack([self.omega, self.pi])

    def flat(self):
        return np.concatenate([self.omega, self.pi])

    @classmethod
    def from_array(cls, y):
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            n = y.shape[0] // 2
            return cls(y[:n], y[n:])
        return cls(y[0], y[1])


@dataclass(frozen=True)
class ConstraintParams:
    """Constants of the invariant surface ``pi^2 + a3 = omega^2 + a4 = (omega pi) + a5 = 0``."""

    a3: float
    a4: float
    a5: float

    def __post_init__(self):
        for name in ("a3", "a4", "a5"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if abs(self.a3 * self.a4 - self.a5**2) <= NONDEGENERACY_TOL:
            raise DegenerateConstraintsError(
                f"constraint constants are degenerate: a3*a4 - a5^2 = "
                f"{self.a3 * self.a4 - self.a5 ** 2:.3e} (must be nonzero)"
            )

    def as_array(self):
        return np.array([self.a3, self.a4, self.a5])

    @property
    def casimir_value(self):
        """On-surface value ``8(a3 a4 - a5^2)`` of the quadratic Casimir."""
        return 8.0 * (self.a3 * self.a4 - self.a5**2)

    @classmethod
    def from_point(cls, p: PhasePoint, sig: Signature):
        """Constants that put ``p`` exactly on the surface."""
        return cls(
            -float(sig.inner(p.pi, p.pi)),
            -float(sig.inner(p.omega, p.omega)),
            -float(sig.inner(p.omega, p.pi)),
        )


@dataclass(frozen=True)
class HamiltonianSpec:
    """``H(J) = (1/2) b_{mu nu} J^{mu nu} + h(J^2)`` with ``h`` a polynomial of degree <= 4.

    ``linear`` is the antisymmetric matrix ``b`` (or ``None``); ``scalar``
    lists the coefficients of ``h`` in increasing powers of ``J^2``.
    """

    linear: np.ndarray = None
    scalar: tuple = ()
    n: int = field(default=None)

    def __post_init__(self):
        if self.linear is not None:
            b = np.array(self.linear, dtype=float)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValueError("linear coefficients must form a square matrix")
            if np.max(np.abs(b + b.T), initial=0.0) > 1e-14 * max(1.0, np.max(np.abs(b))):
                raise ValueError("linear coefficients b_{mu nu} must be antisymmetric")
            b.setflags(write=False)
            object.__setattr__(self, "linear", b)
            if self.n is None:
                object.__setattr__(self, "n", b.shape[0])
            elif self.n != b.shape[0]:
                raise ValueError("linear coefficient matrix does not match n")
        scalar = tuple(float(x) for x in self.scalar)
        if len(scalar) > 5:
            raise ValueError("scalar part is limited to degree 4 in J^2")
        object.__setattr__(self, "scalar", scalar)

    @classmethod
    def from_components(cls, n, linear=None, scalar=()):
        """``linear`` maps index pairs ``(mu, nu)`` to ``b_{mu nu}`` (antisymmetric partner implied)."""
        b = None
        if linear:
            b = np.zeros((n, n))
            for (mu, nu), val in linear.items():
                b[mu, nu] = val
                b[nu, mu] = -val
        return cls(b, tuple(scalar), n)

    @property
    def is_scalar(self):
        return self.linear is None or not np.any(self.linear)

    def scalar_poly(self, s, order=0):
        """``d^order h / d(J^2)^order`` at ``s``."""
        coeffs = np.array(self.scalar or (0.0,))
        if order:
            coeffs = np.polynomial.polynomial.polyder(coeffs, order)
        if coeffs.size == 0:
            return 0.0 * np.asarray(s)
        return np.polynomial.polynomial.polyval(s, coeffs)

    def value(self, J, sig: Signature):
        J = np.asarray(J, dtype=float)
        val = self.scalar_poly(casimir_quadratic(J, sig))
        if self.linear is not None:
            val = val + 0.5 * np.sum(self.linear * J)
        return float(val)

    def dH_dJ(self, J, sig: Signature):
        """Formal partials ``G_{ab} = dH/dJ^{ab}`` treating all ``n^2`` entries as independent.

        With this convention ``dH = sum_{ab} G_{ab} dJ^{ab}``; ``G`` is antisymmetric.
        """
        J = np.asarray(J, dtype=float)
        G = np.zeros_like(J)
        if self.linear is not None:
            G = G + 0.5 * self.linear
        if len(self.scalar) > 1:
            G = G + 2.0 * self.scalar_poly(casimir_quadratic(J, sig), 1) * sig.lower(J)
        return G


def wedge(omega, pi):
    """``J^{mu nu} = 2(omega^mu pi^nu - omega^nu pi^mu)``; broadcasts over leading axes."""
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    t = omega[..., :, None] * pi[..., None, :]
    return 2.0 * (t - np.swapaxes(t, -1, -2))


def map_f(p: PhasePoint):
    """Angular momentum ``J = f(omega, pi)``."""
    return wedge(p.omega, p.pi)


def canonical_bracket(gradF, gradG, sig: Signature) -> float:
    """``dF/domega eta dG/dpi - dG/domega eta dF/dpi`` for gradients ordered ``(d/domega, d/dpi)``."""
    gradF = np.asarray(gradF, dtype=float)
    gradG = np.asarray(gradG, dtype=float)
    n = sig.n
    if gradF.shape != (2 * n,) or gradG.shape != (2 * n,):
        raise ValueError(f"gradients must have length 2n={2 * n}, got {gradF.shape} and {gradG.shape}")
    return float(sig.inner(gradF[:n], gradG[n:]) - sig.inner(gradG[:n], gradF[n:]))


def bracket_matrix(gradsF, gradsG, sig: Signature):
    """Canonical brackets between two stacks of gradients, shapes ``(A, 2n)`` and ``(B, 2n)``."""
    n = sig.n
    d = sig.diag
    gradsF = np.atleast_2d(gradsF)
    gradsG = np.atleast_2d(gradsG)
    return (gradsF[:, :n] * d) @ gradsG[:, n:].T - (gradsF[:, n:] * d) @ gradsG[:, :n].T


def jacobian_f(p: PhasePoint):
    """``d J^{mu nu} / d(omega, pi)`` for ``mu < nu``, shape ``(n(n-1)/2, 2n)``."""
    n = p.n
    pairs = basis_pairs(n)
    jac = np.zeros((len(pairs), 2 * n))
    for a, (mu, nu) in enumerate(pairs):
        jac[a, mu] += 2.0 * p.pi[nu]
        jac[a, nu] -= 2.0 * p.pi[mu]
        jac[a, n + nu] += 2.0 * p.omega[mu]
        jac[a, n + mu] -= 2.0 * p.omega[nu]
    return jac


def bracket_homomorphism_residual(p: PhasePoint, sig: Signature) -> float:
    """Max deviation between canonical brackets of ``J(omega, pi)`` and the Lie-Poisson ones."""
    jac = jacobian_f(p)
    pb = bracket_matrix(jac, jac, sig)
    lpb = lie_poisson_matrix(map_f(p), sig)
    return float(np.max(np.abs(pb - lpb), initial=0.0))


def constraints_eval(p: PhasePoint, a: ConstraintParams, sig: Signature):
    """``(T3, T4, T5) = (pi^2 + a3, omega^2 + a4, (omega pi) + a5)``."""
    return np.array([
        sig.inner(p.pi, p.pi) + a.a3,
        sig.inner(p.omega, p.omega) + a.a4,
        sig.inner(p.omega, p.pi) + a.a5,
    ])


def constraint_gradients(p: PhasePoint, sig: Signature):
    """Rows ``dT_a/d(omega, pi)`` for ``a = 3, 4, 5``; independent of the constants."""
    d = sig.diag
    z = np.zeros(p.n)
    w, q = d * p.omega, d * p.pi
    return np.array([
        np.concatenate([z, 2.0 * q]),
        np.concatenate([2.0 * w, z]),
        np.concatenate([q, w]),
    ])


def invariance_residual(p: PhasePoint, a: ConstraintParams, sig: Signature) -> float:
    """Max over constraints and ``mu < nu`` of ``|{T_a, J^{mu nu}}|``; vanishes off-shell too."""
    br = bracket_matrix(constraint_gradients(p, sig), jacobian_f(p), sig)
    return float(np.max(np.abs(br), initial=0.0))


def identity_casimir_constraints(p: PhasePoint, a: ConstraintParams, sig: Signature):
    """Both sides of ``J^2 = 8[(T4 - a4) T3 - (T5 - a5)^2 - a3 T4 + a3 a4]``."""
    T3, T4, T5 = constraints_eval(p, a, sig)
    lhs = casimir_quadratic(map_f(p), sig)
    rhs = 8.0 * ((T4 - a.a4) * T3 - (T5 - a.a5) ** 2 - a.a3 * T4 + a.a3 * a.a4)
    return lhs, float(rhs)


def hamiltonian_pullback_gradients(p: PhasePoint, H: HamiltonianSpec, sig: Signature):
    """Partials ``(dH/domega, dH/dpi)`` of ``H(J(omega, pi))``.

    With ``G = dH/dJ`` the chain rule gives ``dH/domega = 4 G pi`` and
    ``dH/dpi = -4 G omega``.
    """
    G = H.dH_dJ(map_f(p), sig)
    return 4.0 * G @ p.pi, -4.0 * G @ p.omega


def pullback_gradients_array(omega, pi, H: HamiltonianSpec, sig: Signature):
    """Batched ``(dH/domega, dH/dpi)`` over leading axes of ``omega``/``pi``.

    The scalar part is differentiated through ``J^2 = 8[omega^2 pi^2 - (omega pi)^2]``
    directly; the linear part contributes ``2 b pi`` and ``-2 b omega``.
    """
    d = sig.diag
    dw = np.zeros_like(omega)
    dq = np.zeros_like(pi)
    if H.linear is not None:
        dw = dw + pi @ H.linear.T * 2.0
        dq = dq - omega @ H.linear.T * 2.0
    if len(H.scalar) > 1:
        ww = np.sum(d * omega * omega, axis=-1)[..., None]
        qq = np.sum(d * pi * pi, axis=-1)[..., None]
        wq = np.sum(d * omega * pi, axis=-1)[..., None]
        hp = H.scalar_poly(8.0 * (ww * qq - wq**2), 1)
        dw = dw + 16.0 * hp * (d * omega * qq - d * pi * wq)
        dq = dq + 16.0 * hp * (d * pi * ww - d * omega * wq)
    return dw, dq


def expected_rank(n, which="map_f"):
    return 2 * n - 3 if which == "map_f" else 2 * n


def numeric_rank(mat, rtol=RANK_RTOL):
    s = np.linalg.svd(np.atleast_2d(mat), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def independent_pairs(p: PhasePoint, count=None):
    """Index pairs of a maximal independent subset ``J'`` of the ``J^{mu nu}(omega, pi)``.

    Chosen greedily by column-pivoted QR on the transposed Jacobian.
    """
    jac = jacobian_f(p)
    if count is None:
        count = numeric_rank(jac)
    _, _, piv = scipy.linalg.qr(jac.T, pivoting=True, mode="economic")
    pairs = basis_pairs(p.n)
    return [pairs[i] for i in sorted(piv[:count])]


def adapted_chart_jacobian(p: PhasePoint, sig: Signature):
    """Jacobian of ``(J', omega^{n-1}, T4, T5)`` with respect to ``(omega, pi)``."""
    n = p.n
    jac = jacobian_f(p)
    _, _, piv = scipy.linalg.qr(jac.T, pivoting=True, mode="economic")
    rows = jac[np.sort(piv[: 2 * n - 3])]
    e_last = np.zeros(2 * n)
    e_last[n - 1] = 1.0
    grads = constraint_gradients(p, sig)
    return np.vstack([rows, e_last, grads[1], grads[2]])


def jacobian_rank(p: PhasePoint, sig: Signature, which="map_f") -> int:
    """Numeric rank of ``dJ/d(omega, pi)`` (``which="map_f"``, generically ``2n - 3``)
    or of the adapted chart ``(J', omega^{n-1}, T4, T5)`` (``"adapted_chart"``, ``2n``).

    Degenerate points simply return a lower rank.
    """
    if which == "map_f":
        return numeric_rank(jacobian_f(p))
    if which == "adapted_chart":
        return numeric_rank(adapted_chart_jacobian(p, sig))
    raise ValueError(f"unknown Jacobian {which!r}")
