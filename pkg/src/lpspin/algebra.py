"""so(k, m) algebra: metric signature, Lie-Poisson bracket, quadratic Casimir,
structure constants and canonical realizations built from linear
representations.

Bivectors are plain ``(n, n)`` float arrays holding the upper-index
components ``J^{mu nu}``. Indices run over ``0..n-1`` with the metric
``diag(-1 x k, +1 x m)``.
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

JACOBI_TOL = 1e-12
CLOSURE_TOL = 1e-10


@dataclass(frozen=True)
class Signature:
    """Metric signature with ``k`` minus and ``m`` plus entries."""

    k: int
    m: int

    def __post_init__(self):
        if self.k < 0 or self.m < 0:
            raise ValueError(f"signature counts must be non-negative, got ({self.k}, {self.m})")
        if self.k + self.m < 2:
            raise ValueError("so(k, m) needs k + m >= 2")

    @property
    def n(self) -> int:
        return self.k + self.m

    @cached_property
    def diag(self) -> np.ndarray:
        d = np.ones(self.n)
        d[: self.k] = -1.0
        d.setflags(write=False)
        return d

    @cached_property
    def eta(self) -> np.ndarray:
        e = np.diag(self.diag)
        e.setflags(write=False)
        return e

    def inner(self, u, v):
        """eta-contraction over the last axis."""
        return np.sum(self.diag * np.asarray(u) * np.asarray(v), axis=-1)

    def lower(self, J):
        """Lower both indices of a bivector."""
        return self.diag[:, None] * np.asarray(J) * self.diag[None, :]

    def __str__(self):
        return f"so({self.k},{self.m})"


def basis_pairs(n):
    """Ordered index pairs ``(mu, nu)`` with ``mu < nu``; the basis of so(k, m)."""
    return list(combinations(range(n), 2))


def as_bivector(J, n=None, tol=0.0):
    """Validate and return ``J`` as an antisymmetric float array."""
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError(f"bivector must be a square matrix, got shape {J.shape}")
    if n is not None and J.shape[0] != n:
        raise ValueError(f"bivector dimension {J.shape[0]} does not match n={n}")
    asym = np.max(np.abs(J + J.T), initial=0.0)
    if asym > tol * max(1.0, np.max(np.abs(J), initial=0.0)):
        raise ValueError(f"bivector is not antisymmetric (|J + J^T| = {asym:.3e})")
    return J


def bivector_from_components(values, n):
    """Build a bivector from a ``{(mu, nu): value}`` mapping (upper triangle or not)."""
    J = np.zeros((n, n))
    for (mu, nu), val in values.items():
        if mu == nu:
            raise ValueError(f"diagonal entry ({mu}, {nu}) of a bivector must vanish")
        J[mu, nu] = val
        J[nu, mu] = -val
    return J


def independent_components(J):
    """Upper-triangle entries ``J^{mu nu}``, ``mu < nu``, in ``basis_pairs`` order."""
    J = np.asarray(J)
    iu = np.triu_indices(J.shape[-1], k=1)
    return J[..., iu[0], iu[1]]


def _check_pair(pair, n):
    mu, nu = pair
    if not (0 <= mu < n and 0 <= nu < n):
        raise IndexError(f"index pair {pair} out of range for n={n}")
    return mu, nu


def lie_poisson_bracket(J, pair1, pair2, sig: Signature) -> float:
    """Lie-Poisson bracket ``{J^{mu nu}, J^{alpha beta}}`` of two coordinate functions.

    Returns ``2(eta^{ma} J^{nb} - eta^{mb} J^{na} - eta^{na} J^{mb} + eta^{nb} J^{ma})``.
    """
    n = sig.n
    J = np.asarray(J, dtype=float)
    mu, nu = _check_pair(pair1, n)
    al, be = _check_pair(pair2, n)
    eta = sig.eta
    return 2.0 * (
        eta[mu, al] * J[nu, be]
        - eta[mu, be] * J[nu, al]
        - eta[nu, al] * J[mu, be]
        + eta[nu, be] * J[mu, al]
    )


def lie_poisson_matrix(J, sig: Signature) -> np.ndarray:
    """All brackets ``{J^a, J^b}`` over ``basis_pairs(n)`` as an ``(N, N)`` array."""
    pairs = basis_pairs(sig.n)
    J = np.asarray(J, dtype=float)
    eta = sig.diag
    out = np.zeros((len(pairs), len(pairs)))
    for a, (mu, nu) in enumerate(pairs):
        for b, (al, be) in enumerate(pairs):
            v = 0.0
            if mu == al:
                v += eta[mu] * J[nu, be]
            if mu == be:
                v -= eta[mu] * J[nu, al]
            if nu == al:
                v -= eta[nu] * J[mu, be]
            if nu == be:
                v += eta[nu] * J[mu, al]
            out[a, b] = 2.0 * v
    return out


def casimir_quadratic(J, sig: Signature) -> float:
    """Quadratic Casimir ``J^{mu nu} J_{mu nu}`` (full double sum)."""
    J = np.asarray(J, dtype=float)
    return float(np.sum(J * sig.lower(J)))


@dataclass(frozen=True)
class StructureConstants:
    """``c[a, b, c]`` with ``{z^a, z^b} = c[a, b, c] z^c``."""

    c: np.ndarray
    labels: tuple = ()

    @property
    def dim(self):
        return self.c.shape[0]

    def jacobi_residual(self):
        return jacobi_residual(self.c)


def so_structure_constants(sig: Signature) -> StructureConstants:
    """Structure constants of so(k, m) in the ``basis_pairs`` basis.

    Obtained by reading the Lie-Poisson bracket of two basis coordinates as a
    linear function of the coordinates.
    """
    pairs = basis_pairs(sig.n)
    index = {p: i for i, p in enumerate(pairs)}
    N = len(pairs)
    c = np.zeros((N, N, N))
    eta = sig.diag

    def add(a, b, coeff, x, y):
        # coeff * J^{xy} expressed on the basis
        if x == y:
            return
        if x < y:
            c[a, b, index[(x, y)]] += coeff
        else:
            c[a, b, index[(y, x)]] -= coeff

    for a, (mu, nu) in enumerate(pairs):
        for b, (al, be) in enumerate(pairs):
            if mu == al:
                add(a, b, 2 * eta[mu], nu, be)
            if mu == be:
                add(a, b, -2 * eta[mu], nu, al)
            if nu == al:
                add(a, b, -2 * eta[nu], mu, be)
            if nu == be:
                add(a, b, 2 * eta[nu], mu, al)
    labels = tuple(f"{mu}{nu}" for mu, nu in pairs)
    return StructureConstants(c, labels)


def jacobi_residual(c) -> float:
    """Max-abs cyclic sum ``c^{ab}_d c^{de}_f + c^{be}_d c^{da}_f + c^{ea}_d c^{db}_f``."""
    c = np.asarray(c, dtype=float)
    t = np.einsum("abd,def->abef", c, c)
    cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.max(np.abs(cyc), initial=0.0))


@dataclass(frozen=True)
class LinearRepresentation:
    """One ``(d, d)`` matrix per basis element; ``matrices[a][alpha, beta]``."""

    matrices: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.matrices.shape[1]

    @property
    def size(self):
        return self.matrices.shape[0]


def closure_residual(rep: LinearRepresentation, c: StructureConstants) -> float:
    """Max-abs entry of ``[phi^a, phi^b] - c^{ab}_c phi^c``."""
    phi = rep.matrices
    comm = np.einsum("aij,bjk->abik", phi, phi)
    comm = comm - np.transpose(comm, (1, 0, 2, 3))
    rhs = np.einsum("abc,cij->abij", c.c, phi)
    return float(np.max(np.abs(comm - rhs), initial=0.0))


def adjoint_representation(c: StructureConstants) -> LinearRepresentation:
    """Matrices ``(phi^a)^b_c = -c^{ab}_c``.

    Closure of these matrices is equivalent to the Jacobi identity, which is
    checked first.
    """
    scale = max(1.0, float(np.max(np.abs(c.c), initial=0.0))) ** 2
    res = jacobi_residual(c.c)
    if res > JACOBI_TOL * scale:
        raise ValueError(f"structure constants violate the Jacobi identity (residual {res:.3e})")
    return LinearRepresentation(-np.array(c.c, dtype=float))


def vector_representation(sig: Signature) -> LinearRepresentation:
    """Defining representation of so(k, m) acting on ``omega^alpha``.

    ``(phi^{mu nu})^alpha_beta = 2(eta^{nu alpha} delta^mu_beta - eta^{mu alpha} delta^nu_beta)``,
    normalized so that the realization ``phi^alpha_beta omega^beta pi_alpha``
    reproduces ``J^{mu nu} = 2(omega^mu pi^nu - omega^nu pi^mu)`` exactly with
    ``pi^nu = eta^{nu alpha} pi_alpha``. The conventional half-normalized
    matrices ``(1/2)(delta^{ik} delta^j_l - delta^{jk} delta^i_l)`` equal
    ``-1/4`` of these in the Euclidean case.
    """
    n = sig.n
    eta = sig.diag
    pairs = basis_pairs(n)
    phi = np.zeros((len(pairs), n, n))
    for a, (mu, nu) in enumerate(pairs):
        phi[a, nu, mu] += 2.0 * eta[nu]
        phi[a, mu, nu] -= 2.0 * eta[mu]
    return LinearRepresentation(phi)


def realize_from_representation(rep: LinearRepresentation, c: StructureConstants, omega, pi):
    """Algebra-valued ``z^a = (phi^a)^alpha_beta omega^beta pi_alpha``.

    ``pi`` carries a lower index: the phase space of the representation has
    ``{omega^alpha, pi_beta} = delta^alpha_beta``.
    """
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if rep.size != c.dim:
        raise ValueError(f"representation has {rep.size} matrices but the algebra has dimension {c.dim}")
    if omega.shape != (rep.dim,) or pi.shape != (rep.dim,):
        raise ValueError(
            f"phase-space vectors must have length {rep.dim}, got {omega.shape} and {pi.shape}"
        )
    res = closure_residual(rep, c)
    if res > CLOSURE_TOL * max(1.0, float(np.max(np.abs(c.c), initial=0.0))):
        raise ValueError(f"representation does not close on the structure constants (residual {res:.3e})")
    return np.einsum("aij,j,i->a", rep.matrices, omega, pi)


def realization_brackets(rep: LinearRepresentation, omega, pi) -> np.ndarray:
    """Canonical brackets ``{z^a, z^b}`` of the realized coordinates.

    Uses the analytic gradients ``dz^a/domega = phi^T pi`` and ``dz^a/dpi = phi omega``.
    """
    phi = rep.matrices
    dz_domega = np.einsum("aij,i->aj", phi, pi)
    dz_dpi = np.einsum("aij,j->ai", phi, omega)
    m = dz_domega @ dz_dpi.T
    return m - m.T
