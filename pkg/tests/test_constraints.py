import numpy as np
import pytest
from hypothesis import given
from numpy.testing import assert_allclose, assert_array_equal

from lpspin.algebra import Signature
from lpspin.constraints import (
    InconsistentGaugeError,
    MultiplierState,
    constraint_bracket_matrix,
    constraint_brackets_at,
    dirac_correction,
    first_class_combination,
    gauge_direction,
    multipliers_for_gauge,
    resolve_multipliers,
)
from lpspin.dynamics import constrained_rhs
from lpspin.phasespace import ConstraintParams, HamiltonianSpec, PhasePoint, constraint_gradients

from .strategies import constraint_params, surface_points


def test_bracket_matrix_examples():
    assert_array_equal(constraint_bracket_matrix(ConstraintParams(-1, -1, 0)),
                       [[0, 0, -2], [0, 0, 2], [2, -2, 0]])
    M = constraint_bracket_matrix(ConstraintParams(-2, -1, 1))
    assert (M[0, 1], M[0, 2], M[1, 2]) == (4.0, -4.0, 2.0)
    assert constraint_bracket_matrix(ConstraintParams(-2, -1, 0))[0, 1] == 0.0


@pytest.mark.parametrize("k,m", [(0, 3), (1, 3), (2, 3)])
def test_bracket_matrix_from_canonical_brackets(k, m, rng):
    # on-shell brackets evaluated through the canonical bracket depend on a only
    s = Signature(k, m)
    for _ in range(10):
        p = PhasePoint(rng.standard_normal(s.n), rng.standard_normal(s.n))
        a = ConstraintParams.from_point(p, s)
        assert_allclose(constraint_brackets_at(p, s), constraint_bracket_matrix(a), atol=1e-12)


@given(constraint_params())
def test_bracket_matrix_antisymmetric_singular(a):
    M = constraint_bracket_matrix(a)
    assert_array_equal(M, -M.T)
    assert abs(np.linalg.det(M)) <= 1e-12 * max(1.0, np.abs(M).max()) ** 3


@given(constraint_params())
def test_first_class_kernel(a):
    v = first_class_combination(a)
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-15
    assert np.max(np.abs(constraint_bracket_matrix(a) @ v)) <= 1e-13


def test_first_class_examples():
    v = first_class_combination(ConstraintParams(-2, -1, 1))
    assert_allclose(v, np.array([-1, -2, -2]) / 3.0, atol=1e-15)
    assert_allclose(first_class_combination(ConstraintParams(-1, -1, 0)), np.array([-1, -1, 0]) / np.sqrt(2))
    v0 = first_class_combination(ConstraintParams(-3, 2, 0))
    assert v0[2] == 0.0
    assert_allclose(v0, np.array([2, -3, 0]) / np.sqrt(13))


def test_first_class_matches_combination_with_a5():
    # T5 - (a4 / 2 a5) T3 - (a3 / 2 a5) T4 has coefficients parallel to the kernel
    a = ConstraintParams(0.7, -1.3, 0.4)
    coeffs = np.array([-a.a4 / (2 * a.a5), -a.a3 / (2 * a.a5), 1.0])
    v = first_class_combination(a)
    assert np.linalg.norm(np.cross(v, coeffs)) <= 1e-14 * np.linalg.norm(coeffs)


def test_resolve_multipliers_examples():
    a = ConstraintParams(-2, -1, 1)
    m = resolve_multipliers(2.0, a)
    assert (m.e3, m.e4, m.e5) == (1.0, 2.0, 2.0)
    assert_array_equal(m.consistency_residuals(a), 0.0)
    m0 = resolve_multipliers(0.0, a)
    assert m0.e3 == 0.0 and m0.e4 == 0.0
    with pytest.raises(InconsistentGaugeError):
        resolve_multipliers(1.0, ConstraintParams(-1, -1, 0))


def test_resolve_multipliers_a5_zero_family():
    a = ConstraintParams(-1, -1, 0)
    m = resolve_multipliers(0.0, a, amplitude=np.sqrt(2))
    assert_allclose(m.e, [-1.0, -1.0, 0.0])
    assert_array_equal(m.consistency_residuals(a), 0.0)


@given(constraint_params())
def test_multiplier_consistency_exact(a):
    if a.a5 != 0.0:
        m = resolve_multipliers(0.37, a, lambda5=-1.1)
    else:
        m = resolve_multipliers(0.0, a, amplitude=0.37)
    assert np.max(np.abs(m.consistency_residuals(a))) <= 1e-14


def test_gauge_direction_consistent():
    for a in (ConstraintParams(-2, -1, 1), ConstraintParams(-1, -1, 0)):
        m = multipliers_for_gauge(0.8, a, gdot=0.3)
        assert_allclose(m.e, 0.8 * gauge_direction(a), atol=1e-15)
        assert_allclose(m.lam, 0.3 * gauge_direction(a), atol=1e-15)


@pytest.mark.parametrize("k,m", [(0, 3), (1, 3), (2, 3)])
def test_resolved_multipliers_keep_flow_tangent(k, m, rng):
    # dT/dtau = dT . velocity vanishes on the surface for any free multiplier
    s = Signature(k, m)
    B = rng.standard_normal((s.n, s.n))
    H = HamiltonianSpec(B - B.T, (0.0, 0.02), s.n)
    p = PhasePoint(rng.standard_normal(s.n), rng.standard_normal(s.n))
    a = ConstraintParams.from_point(p, s)
    for g in (0.0, 1.0, -2.5):
        v = constrained_rhs(p, H, multipliers_for_gauge(g, a), s)
        rate = constraint_gradients(p, s) @ v.flat()
        assert np.max(np.abs(rate)) <= 1e-12 * max(1.0, np.abs(v.flat()).max() * np.abs(p.flat()).max())


def test_multiplier_state_accessors():
    m = MultiplierState(1, 2, 3, 4, 5, 6)
    assert_array_equal(m.e, [1, 2, 3])
    assert_array_equal(m.lam, [4, 5, 6])


@given(surface_points(Signature(1, 3)))
def test_dirac_correction_vanishes(pa):
    p, a = pa
    if abs(a.a5) < 1e-3:
        return
    assert dirac_correction(p, Signature(1, 3)) <= 1e-10 * max(1.0, np.abs(p.flat()).max()) ** 4
