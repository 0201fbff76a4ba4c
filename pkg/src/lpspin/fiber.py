"""Spin-surface membership, the so(2,3) chart and reconstruction of fiber points.

A bivector lies in the image of the constraint surface when it is
decomposable (rank 2) and its quadratic Casimir takes the on-surface value.
The preimage of such a bivector is a one-parameter family of pairs in the
plane spanned by its columns.
"""
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
import scipy.linalg

from .algebra import Signature, as_bivector, casimir_quadratic
from .phasespace import (
    ConstraintParams,
    PhasePoint,
    RANK_RTOL,
    constraint_gradients,
    constraints_eval,
    jacobian_f,
    numeric_rank,
    wedge,
)

CASIMIR_RTOL = 1e-9
PLANAR_TOL = 1e-9
ON_SURFACE_TOL = 1e-9

# internal index -> label for so(2,3); both timelike axes come first
SO23_LABELS = ("0", "5", "1", "2", "3")
_SO23_FIVE = 1
_SO23_SPACETIME = (0, 2, 3, 4)


class OffSurfaceError(ValueError):
    pass


class UnsupportedConfigurationError(ValueError):
    pass


class ChartBoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class Membership:
    on_surface: bool
    reason: str = ""
    rank: int = 0
    casimir_residual: float = float("nan")

    def __bool__(self):
        return self.on_surface


@dataclass(frozen=True)
class SpinSurfacePoint:
    J: np.ndarray
    a: ConstraintParams
    certificate: Membership


def bivector_rank(J, sig: Signature):
    """Numeric rank of the mixed-index matrix ``J^mu_nu``."""
    return numeric_rank(np.asarray(J) * sig.diag[None, :], RANK_RTOL)


def plucker_residual(J):
    """Max ``|J^{ab} J^{cd} - J^{ac} J^{bd} + J^{ad} J^{bc}|`` over index quadruples."""
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    worst = 0.0
    for a, b, c, d in combinations(range(n), 4):
        worst = max(worst, abs(J[a, b] * J[c, d] - J[a, c] * J[b, d] + J[a, d] * J[b, c]))
    return worst


def _plane_basis(J, sig: Signature):
    """eta-orthonormal basis ``(u1, u2)``, signs ``(s1, s2)`` and coefficient ``c``
    with ``J = c (u1 u2^T - u2 u1^T)`` and ``c > 0``.
    """
    U, s, _ = np.linalg.svd(J)
    V = U[:, :2]
    g = V.T @ (sig.diag[:, None] * V)
    lam, Q = np.linalg.eigh(g)
    if np.min(np.abs(lam)) <= 1e-10 * max(1.0, np.max(np.abs(lam))):
        raise UnsupportedConfigurationError("the plane of J is degenerate with respect to the metric")
    B = V @ Q / np.sqrt(np.abs(lam))
    signs = np.sign(lam)
    u1, u2 = B[:, 0], B[:, 1]
    s1, s2 = signs
    c = s1 * s2 * float((sig.diag * u1) @ J @ (sig.diag * u2))
    if c < 0:
        u2 = -u2
        c = -c
    return u1, u2, (s1, s2), c


def _vector_with_norm(target, s1, s2):
    """Plane coordinates ``x`` with ``s1 x1^2 + s2 x2^2 = target`` (target != 0), or None."""
    if target == 0.0:
        return None
    sgn = np.sign(target)
    if s1 == sgn:
        return np.array([np.sqrt(abs(target)), 0.0])
    if s2 == sgn:
        return np.array([0.0, np.sqrt(abs(target))])
    return None


def _solve_in_plane(a: ConstraintParams, signs, c):
    """Plane coordinates ``(x, y)`` of ``(omega, pi)`` with the required invariants and
    ``x1 y2 - x2 y1 = c/2``.
    """
    s1, s2 = signs
    half = c / 2.0

    def partner(x, dot):
        # solve s.x . y = dot and x1 y2 - x2 y1 = half for y
        M = np.array([[s1 * x[0], s2 * x[1]], [-x[1], x[0]]])
        return np.linalg.solve(M, np.array([dot, half]))

    x = _vector_with_norm(-a.a4, s1, s2)
    if x is not None:
        return x, partner(x, -a.a5)
    y = _vector_with_norm(-a.a3, s1, s2)
    if y is not None:
        # omega from pi: s.y . x = -a5 and x1 y2 - x2 y1 = half
        M = np.array([[s1 * y[0], s2 * y[1]], [y[1], -y[0]]])
        return np.linalg.solve(M, np.array([-a.a5, half])), y
    if a.a3 == 0.0 and a.a4 == 0.0 and s1 != s2:
        # both lightlike: x = t(1, +-1), y = u(1, -+1)
        for sx in (1.0, -1.0):
            x = np.array([1.0, sx])
            y_dir = np.array([1.0, -sx])
            dot = s1 * x[0] * y_dir[0] + s2 * x[1] * y_dir[1]
            wedge_ = x[0] * y_dir[1] - x[1] * y_dir[0]
            u_dot = -a.a5 / dot
            u_wedge = half / wedge_
            if abs(u_dot - u_wedge) <= 1e-12 * max(1.0, abs(u_dot)):
                return x, u_dot * y_dir
    raise UnsupportedConfigurationError(
        "no pair in the plane of J has the prescribed invariants (metric signs do not allow them)"
    )


def membership(J, a: ConstraintParams, sig: Signature) -> Membership:
    """Decide whether ``J`` lies on the spin surface for constants ``a``.

    Checks rank 2, the Casimir value ``8(a3 a4 - a5^2)`` and, when the plane
    of ``J`` is metric-nondegenerate, that pairs with the prescribed
    invariants exist in it. For so(2,3) the chart equations are cross-checked.
    """
    J = as_bivector(J, sig.n, tol=1e-12)
    rank = bivector_rank(J, sig)
    cas = casimir_quadratic(J, sig)
    target = a.casimir_value
    cres = abs(cas - target) / max(1.0, abs(target))
    if rank != 2:
        return Membership(False, f"decomposability: rank {rank} != 2", rank, cres)
    if cres > CASIMIR_RTOL:
        return Membership(False, f"casimir: J^2 = {cas:.12g}, expected {target:.12g}", rank, cres)
    try:
        _, _, signs, c = _plane_basis(J, sig)
        _solve_in_plane(a, signs, c)
    except UnsupportedConfigurationError as exc:
        if "degenerate" not in str(exc):
            return Membership(False, f"realizability: {exc}", rank, cres)
    if (sig.k, sig.m) == (2, 3):
        eqs = so23_chart_equations(J)
        if np.max(np.abs(eqs)) > 1e-9 * max(1.0, np.max(np.abs(J)) ** 2):
            return Membership(False, "so(2,3) chart equations violated", rank, cres)
    return Membership(True, "", rank, cres)


def spin_surface_point(J, a: ConstraintParams, sig: Signature) -> SpinSurfacePoint:
    """Validated spin-surface point; raises ``OffSurfaceError`` with the membership reason."""
    J = as_bivector(J, sig.n, tol=1e-12)
    verdict = membership(J, a, sig)
    if not verdict:
        raise OffSurfaceError(f"J is not on the spin surface ({verdict.reason})")
    return SpinSurfacePoint(J, a, verdict)


def fiber_reconstruct(point: SpinSurfacePoint, sig: Signature) -> PhasePoint:
    """One preimage ``(omega, pi)`` on the constraint surface of a spin-surface point.

    Works in an eta-orthonormal basis of the column space of ``J``, oriented
    so that ``J = c (u1 u2^T - u2 u1^T)`` with ``c > 0``.
    """
    if not isinstance(point, SpinSurfacePoint):
        raise TypeError("fiber_reconstruct expects a SpinSurfacePoint (see spin_surface_point)")
    u1, u2, signs, c = _plane_basis(point.J, sig)
    # f(x.u, y.u) = 2 (x1 y2 - x2 y1) (u1 u2^T - u2 u1^T)
    x, y = _solve_in_plane(point.a, signs, c)
    return PhasePoint(x[0] * u1 + x[1] * u2, y[0] * u1 + y[1] * u2)


def fiber_dimension_check(p: PhasePoint, a: ConstraintParams, sig: Signature) -> int:
    """Dimension of the kernel of ``df`` restricted to the tangent space of the surface at ``p``."""
    T = constraints_eval(p, a, sig)
    if np.max(np.abs(T)) > ON_SURFACE_TOL * max(1.0, np.max(np.abs(a.as_array()))):
        raise OffSurfaceError(f"point is off the constraint surface (T = {T})")
    tangent = scipy.linalg.null_space(constraint_gradients(p, sig))
    return tangent.shape[1] - numeric_rank(jacobian_f(p) @ tangent)


def planarity_certificate(solutions, J, tol=PLANAR_TOL):
    """Check that every ``(omega, pi)`` lies in the column space of ``J``.

    Returns ``(passed, max_residual)``; an empty list passes vacuously.
    """
    J = np.asarray(J, dtype=float)
    U, _, _ = np.linalg.svd(J)
    P = U[:, :2] @ U[:, :2].T
    worst = 0.0
    for p in solutions:
        for v in (p.omega, p.pi):
            worst = max(worst, float(np.linalg.norm(v - P @ v)))
    return worst <= tol, worst


def _levi_civita4():
    eps = np.zeros((4, 4, 4, 4))
    for perm in permutations(range(4)):
        eps[perm] = np.linalg.det(np.eye(4)[list(perm)])
    return eps


_EPS4 = _levi_civita4()


def so23_chart_equations(J):
    """``F^mu = eps^{mu nu alpha beta} J^5_nu J_{alpha beta}`` for so(2,3).

    Spacetime indices run over the internal axes ``(0, 2, 3, 4)`` with metric
    ``(-, +, +, +)``; the fifth (timelike) axis is internal index 1.
    """
    J = np.asarray(J, dtype=float)
    st = list(_SO23_SPACETIME)
    eta4 = np.array([-1.0, 1.0, 1.0, 1.0])
    J5 = J[_SO23_FIVE, st] * eta4
    J4 = J[np.ix_(st, st)] * eta4[:, None] * eta4[None, :]
    return np.einsum("mnab,n,ab->m", _EPS4, J5, J4)


def so23_chart_rank(J):
    """Numeric rank of ``dF/dJ`` over the 10 independent entries (3 at chart points)."""
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    cols = []
    for i, j in combinations(range(n), 2):
        E = np.zeros((n, n))
        E[i, j], E[j, i] = 1.0, -1.0
        # F is quadratic, so the central difference with unit step is exact
        cols.append(0.5 * (so23_chart_equations(J + E) - so23_chart_equations(J - E)))
    return numeric_rank(np.array(cols).T)


def resolve_dependent_coordinates_so23(J5, J0):
    """Complete a so(2,3) bivector from its chart coordinates.

    ``J5`` holds ``J^{5 mu}`` for ``mu = 0, 1, 2, 3`` and ``J0`` holds ``J^{0 i}``
    for ``i = 1, 2, 3`` (labels, see ``SO23_LABELS``); the remaining entries are
    ``J^{ij} = (J^{50})^{-1} (J^{5i} J^{0j} - J^{5j} J^{0i})``.
    """
    J5 = np.asarray(J5, dtype=float)
    J0 = np.asarray(J0, dtype=float)
    if J5.shape != (4,) or J0.shape != (3,):
        raise ValueError("expected 4 values J^{5 mu} and 3 values J^{0 i}")
    if J5[0] == 0.0:
        raise ChartBoundaryError("J^{50} = 0: outside the chart")
    st = _SO23_SPACETIME
    J = np.zeros((5, 5))

    def put(i, j, v):
        J[i, j] = v
        J[j, i] = -v

    for mu in range(4):
        put(_SO23_FIVE, st[mu], J5[mu])
    for i in range(1, 4):
        put(st[0], st[i], J0[i - 1])
    for i, j in combinations(range(1, 4), 2):
        put(st[i], st[j], (J5[i] * J0[j - 1] - J5[j] * J0[i - 1]) / J5[0])
    return J


def so23_chart_coordinates(J):
    """Inverse of ``resolve_dependent_coordinates_so23``: ``(J^{5 mu}, J^{0 i})``."""
    J = np.asarray(J, dtype=float)
    st = _SO23_SPACETIME
    return J[_SO23_FIVE, list(st)], J[st[0], list(st[1:])]


def preimage_orbit(p: PhasePoint, betas, sig: Signature):
    """Gauge orbit samples of ``p`` (all are preimages of ``f(p)``)."""
    from .gauge import finite_gauge_transform

    return [finite_gauge_transform(p, b, sig) for b in betas]


def round_trip_error(J, a: ConstraintParams, sig: Signature):
    p = fiber_reconstruct(spin_surface_point(J, a, sig), sig)
    return float(np.max(np.abs(wedge(p.omega, p.pi) - J))), p
