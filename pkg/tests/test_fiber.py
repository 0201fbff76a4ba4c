import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from lpspin.algebra import Signature
from lpspin.checks import random_surface_point
from lpspin.fiber import (
    ChartBoundaryError,
    OffSurfaceError,
    SpinSurfacePoint,
    UnsupportedConfigurationError,
    bivector_rank,
    fiber_dimension_check,
    fiber_reconstruct,
    membership,
    planarity_certificate,
    plucker_residual,
    preimage_orbit,
    resolve_dependent_coordinates_so23,
    round_trip_error,
    so23_chart_coordinates,
    so23_chart_equations,
    so23_chart_rank,
    spin_surface_point,
)
from lpspin.phasespace import ConstraintParams, PhasePoint, constraints_eval, map_f

SO3 = Signature(0, 3)
SO23 = Signature(2, 3)


def test_membership_of_image(rng, sig):
    for _ in range(10):
        p, a = random_surface_point(rng, sig)
        v = membership(map_f(p), a, sig)
        assert v and v.rank == 2 and v.casimir_residual <= 1e-9


def test_membership_rank_four():
    J = np.zeros((4, 4))
    J[0, 1], J[2, 3] = 1.0, 1.0
    J -= J.T
    v = membership(J, ConstraintParams(-1, -1, 0), Signature(0, 4))
    assert not v
    assert v.rank == 4 and v.reason.startswith("decomposability")


def test_membership_zero_and_casimir():
    a = ConstraintParams(-1, -1, 0)
    v = membership(np.zeros((3, 3)), a, SO3)
    assert not v and "decomposability" in v.reason
    J = map_f(PhasePoint([1, 0, 0], [0, 2, 0]))
    v = membership(J, a, SO3)
    assert not v and v.reason.startswith("casimir")


def test_spin_surface_point_raises():
    with pytest.raises(OffSurfaceError, match="casimir"):
        spin_surface_point(map_f(PhasePoint([1, 0, 0], [0, 2, 0])), ConstraintParams(-1, -1, 0), SO3)


def test_plucker_agrees_with_rank(rng):
    for sig in (Signature(0, 4), Signature(1, 3), SO23):
        for i in range(250):
            if i % 2:
                J = map_f(PhasePoint(rng.standard_normal(sig.n), rng.standard_normal(sig.n)))
            else:
                A = rng.standard_normal((sig.n, sig.n))
                J = A - A.T
            decomposable = plucker_residual(J) <= 1e-9 * max(1.0, np.abs(J).max() ** 2)
            assert decomposable == (bivector_rank(J, sig) == 2)


def test_reconstruct_euclidean_example():
    J = np.zeros((3, 3))
    J[0, 1], J[1, 0] = 2.0, -2.0
    a = ConstraintParams(-1, -1, 0)
    p = fiber_reconstruct(spin_surface_point(J, a, SO3), SO3)
    assert_allclose(map_f(p), J, atol=1e-12)
    # (e0, e1) up to an in-plane rotation
    assert abs(p.omega[2]) < 1e-12 and abs(p.pi[2]) < 1e-12
    assert_allclose([p.omega @ p.omega, p.pi @ p.pi, p.omega @ p.pi], [1, 1, 0], atol=1e-12)


def test_reconstruct_requires_certified_point():
    with pytest.raises(TypeError):
        fiber_reconstruct(np.zeros((3, 3)), SO3)


def test_round_trip(rng, sig):
    for _ in range(20):
        p, a = random_surface_point(rng, sig)
        err, q = round_trip_error(map_f(p), a, sig)
        assert err <= 1e-9
        assert np.max(np.abs(constraints_eval(q, a, sig))) <= 1e-9


def test_degenerate_plane_unsupported():
    s = Signature(1, 3)
    # plane spanned by a null vector and a spacelike vector orthogonal to it
    J = map_f(PhasePoint([1, 1, 0, 0], [0, 0, 1, 0]))
    point = SpinSurfacePoint(J, ConstraintParams(-1, -1, 0.5), None)
    with pytest.raises(UnsupportedConfigurationError):
        fiber_reconstruct(point, s)


def test_orbit_preimages_are_planar(rng):
    p, a = random_surface_point(rng, SO3)
    J = map_f(p)
    q = fiber_reconstruct(spin_surface_point(J, a, SO3), SO3)
    orbit = preimage_orbit(q, np.linspace(-3, 3, 50), SO3)
    for r in orbit:
        assert_allclose(map_f(r), J, atol=1e-10)
    ok, worst = planarity_certificate(orbit, J)
    assert ok and worst <= 1e-9


def test_planarity_detects_noise(rng):
    p, a = random_surface_point(rng, SO3)
    J = map_f(p)
    normal = np.cross(p.omega, p.pi)
    normal /= np.linalg.norm(normal)
    bad = PhasePoint(p.omega + 1e-3 * normal, p.pi)
    ok, worst = planarity_certificate([p, bad], J)
    assert not ok
    assert worst == pytest.approx(1e-3, rel=1e-6)
    assert planarity_certificate([], J) == (True, 0.0)


@pytest.mark.parametrize("sig", [SO3, Signature(1, 3), SO23, Signature(0, 5)])
def test_fiber_dimension_is_one(sig, rng):
    for _ in range(5):
        p, a = random_surface_point(rng, sig)
        assert fiber_dimension_check(p, a, sig) == 1


def test_fiber_dimension_off_surface():
    with pytest.raises(OffSurfaceError):
        fiber_dimension_check(PhasePoint([1, 0, 0], [0, 2, 0]), ConstraintParams(-1, -1, 0), SO3)


def test_so23_chart_round_trip(rng):
    for _ in range(20):
        p, _ = random_surface_point(rng, SO23)
        J = map_f(p)
        J5, J0 = so23_chart_coordinates(J)
        assert_allclose(resolve_dependent_coordinates_so23(J5, J0), J, atol=1e-10 * max(1.0, np.abs(J).max()))
        assert np.max(np.abs(so23_chart_equations(J))) <= 1e-10 * max(1.0, np.abs(J).max() ** 2)
        assert so23_chart_rank(J) == 3


def test_so23_chart_edge_cases():
    J = resolve_dependent_coordinates_so23([2.0, 0, 0, 0], [0.3, -1.0, 0.7])
    _, J0 = so23_chart_coordinates(J)
    assert_allclose(J0, [0.3, -1.0, 0.7])
    assert_array_equal(J[np.ix_([2, 3, 4], [2, 3, 4])], 0.0)
    assert bivector_rank(J, SO23) == 2
    with pytest.raises(ChartBoundaryError):
        resolve_dependent_coordinates_so23([0.0, 1, 0, 0], [1, 0, 0])
    with pytest.raises(ValueError):
        resolve_dependent_coordinates_so23([1.0, 1, 0], [1, 0, 0])


def test_so23_generic_bivector_violates_chart(rng):
    A = rng.standard_normal((5, 5))
    assert np.max(np.abs(so23_chart_equations(A - A.T))) > 1e-3
