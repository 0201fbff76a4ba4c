import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from lpspin.algebra import Signature
from lpspin.dynamics import Trajectory
from lpspin.gauge import (
    CompactBump,
    SingularGaugeError,
    UnclassifiableError,
    action_gauge_variation,
    classify_case,
    finite_gauge_transform,
    infinitesimal_gauge,
    multiplier_variation,
)
from lpspin.phasespace import ConstraintParams, HamiltonianSpec, PhasePoint, map_f

SO3 = Signature(0, 3)
SO13 = Signature(1, 3)

# one base point per family, all in signature (1,3)
FAMILIES = {
    "trigonometric": ([0, 1, 0, 0], [0, 0.5, 1, 0]),
    "hyperbolic_mixed": ([0, 1, 0, 0], [2, 1, 0, 1]),
    "hyperbolic_same": ([0, 1, 0, 0], [1, 2, 0, 0]),
    "both_lightlike": ([1, 1, 0, 0], [1, -1, 0, 0]),
    "omega_lightlike": ([1, 1, 0, 0], [0, 1, 1, 0]),
    "omega_lightlike_orthogonal": ([1, 1, 0, 0], [0, 0, 1, 0]),
}
MULT = {"both_lightlike", "omega_lightlike"}


def invariants(p, sig):
    return np.array([sig.inner(p.omega, p.omega), sig.inner(p.pi, p.pi), sig.inner(p.omega, p.pi)])


def boosted(p, rng, sig):
    A = rng.standard_normal((sig.n, sig.n))
    L = expm(0.3 * (A - A.T) @ sig.eta)
    return PhasePoint(L @ p.omega, L @ p.pi)


def test_classify_examples():
    c = classify_case(PhasePoint([1, 0, 0], [0, 1, 0]), SO3)
    assert c.tag == "trigonometric"
    assert c.sigma == pytest.approx(np.pi / 2)
    assert classify_case(PhasePoint([1, 1, 0, 0], [1, -1, 0, 0]), SO13).tag == "both_lightlike"
    assert classify_case(PhasePoint([0, 1, 0, 0], [2, 1, 0, 1]), SO13).tag == "hyperbolic_mixed"
    assert classify_case(PhasePoint([0, 1, 0, 0], [1, 0, 0, 0]), SO13).tag == "hyperbolic_mixed"
    swapped = classify_case(PhasePoint([0, 1, 1, 0], [1, 1, 0, 0]), SO13)
    assert swapped.tag == "omega_lightlike" and swapped.swapped


def test_classify_families(rng):
    for tag, (w, q) in FAMILIES.items():
        p = boosted(PhasePoint(w, q), rng, SO13)
        assert classify_case(p, SO13).tag == tag


def test_unclassifiable():
    with pytest.raises(UnclassifiableError):
        classify_case(PhasePoint([1, 2, 0], [2, 4, 0]), SO3)
    with pytest.raises(UnclassifiableError):
        classify_case(PhasePoint([1, 1, 0, 0], [2, 2, 0, 0]), SO13)
    with pytest.raises(UnclassifiableError):
        # omega^2 = pi^2 = (omega pi) = 0 with independent vectors: totally null plane in (2,2)
        classify_case(PhasePoint([1, 0, 1, 0], [0, 1, 0, 1]), Signature(2, 2))


def test_quarter_turn_example():
    q = finite_gauge_transform(PhasePoint([1, 0, 0], [0, 1, 0]), np.pi / 2, SO3)
    assert_allclose(q.omega, [0, 1, 0], atol=1e-15)
    assert_allclose(q.pi, [-1, 0, 0], atol=1e-15)


def test_both_lightlike_example():
    p = PhasePoint([1, 1, 0, 0], [1, -1, 0, 0])
    q = finite_gauge_transform(p, 3.0, SO13)
    assert_allclose(q.omega, [3, 3, 0, 0])
    assert_allclose(q.pi, [1 / 3, -1 / 3, 0, 0])
    with pytest.raises(SingularGaugeError):
        finite_gauge_transform(p, 0.0, SO13)


@pytest.mark.parametrize("tag", sorted(FAMILIES))
def test_orbits_preserve_J_and_invariants(tag, rng):
    p = boosted(PhasePoint(*FAMILIES[tag]), rng, SO13)
    J = map_f(p)
    inv = invariants(p, SO13)
    betas = np.exp(np.linspace(-1, 1, 9)) if tag in MULT else np.linspace(-1.5, 1.5, 9)
    for b in betas:
        q = finite_gauge_transform(p, b, SO13)
        assert_allclose(map_f(q), J, atol=1e-10)
        assert_allclose(invariants(q, SO13), inv, atol=1e-12 * max(1.0, np.abs(inv).max()))


@pytest.mark.parametrize("tag", sorted(FAMILIES))
def test_group_law(tag, rng):
    p = boosted(PhasePoint(*FAMILIES[tag]), rng, SO13)
    case = classify_case(p, SO13)
    b1, b2 = (1.3, 0.6) if tag in MULT else (0.4, -0.9)
    combined = b1 * b2 if tag in MULT else b1 + b2
    two_steps = finite_gauge_transform(finite_gauge_transform(p, b1, SO13, case), b2, SO13, case)
    one_step = finite_gauge_transform(p, combined, SO13, case)
    assert_allclose(two_steps.as_array(), one_step.as_array(), atol=1e-10)
    identity = 1.0 if tag in MULT else 0.0
    assert_allclose(finite_gauge_transform(p, identity, SO13, case).as_array(), p.as_array(), atol=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 2.8))
def test_trigonometric_group_law_property(b1, b2, angle):
    p = PhasePoint([1.0, 0, 0], [np.cos(angle), 2 * np.sin(angle), 0])
    case = classify_case(p, SO3)
    two = finite_gauge_transform(finite_gauge_transform(p, b1, SO3, case), b2, SO3, case)
    assert_allclose(two.as_array(), finite_gauge_transform(p, b1 + b2, SO3, case).as_array(), atol=1e-9)


def test_infinitesimal_is_tangent_to_orbit():
    p = PhasePoint([0, 1, 0, 0], [2, 1, 0, 1])
    h = 1e-5
    fd = (finite_gauge_transform(p, h, SO13).as_array() - finite_gauge_transform(p, -h, SO13).as_array()) / (2 * h)
    gen = infinitesimal_gauge(p, 1.0, SO13).as_array()
    ratio = fd.ravel() @ gen.ravel() / (gen.ravel() @ gen.ravel())
    assert_allclose(fd, ratio * gen, atol=1e-8)


def test_infinitesimal_first_order_invariance(rng):
    p = PhasePoint(rng.standard_normal(4), rng.standard_normal(4))
    d1 = infinitesimal_gauge(p, 1.0, SO13)
    assert abs(SO13.inner(p.omega, d1.omega)) <= 1e-12
    assert abs(SO13.inner(p.pi, d1.pi)) <= 1e-12
    errs = []
    for beta in (1e-3, 5e-4):
        d = infinitesimal_gauge(p, beta, SO13)
        q = PhasePoint(p.omega + d.omega, p.pi + d.pi)
        errs.append(np.abs(map_f(q) - map_f(p)).max())
    assert 3.5 < errs[0] / errs[1] < 4.5
    with pytest.raises(SingularGaugeError):
        infinitesimal_gauge(PhasePoint([1, 0, 0], [0, 1, 0]), 0.1, SO3)


def test_multiplier_variation_example():
    t = np.linspace(0, 1, 5)
    w = np.stack([np.ones_like(t), np.zeros_like(t), np.zeros_like(t)], 1)
    q = np.stack([np.ones_like(t), np.ones_like(t), np.zeros_like(t)], 1)
    zero = np.zeros_like(w)
    v = multiplier_variation(w, q, zero, zero, np.sin(t), np.cos(t), SO3, beta_ddot=-np.sin(t))
    assert_allclose(v.de5, -2 * np.cos(t))
    assert_allclose(v.dl5, 2 * np.sin(t))
    # static omega, pi: delta e3 = beta' omega^2/(omega pi), delta e4 = beta' pi^2/(omega pi)
    assert_allclose(v.de3, np.cos(t))
    assert_allclose(v.de4, 2 * np.cos(t))
    with pytest.raises(SingularGaugeError):
        multiplier_variation(w, np.roll(w, 1, axis=1), zero, zero, t, t, SO3)


def test_compact_bump():
    b = CompactBump(2.0, 1.0, 3.0)
    assert b(1.0) == 0.0 and abs(b(3.0)) < 1e-15
    assert b(2.0) == pytest.approx(2.0)
    assert abs(b.derivative(1.0)) < 1e-15
    x = np.linspace(1, 3, 11)
    h = 1e-6
    assert_allclose(b.derivative(x), (b(x + h) - b(x - h)) / (2 * h), atol=1e-7)


def _off_shell_path():
    t = np.linspace(0, 4, 4001)
    om = np.stack([1 + 0.3 * np.sin(t), 0.2 * np.cos(1.3 * t), 0.1 * t], 1)
    pi = np.stack([-1 + 0.1 * np.cos(t), 1 + 0.2 * np.sin(0.7 * t), 0.3 * np.sin(t)], 1)
    e = np.tile([0.3, -0.2, 0.5], (len(t), 1))
    return Trajectory(t, np.stack([om, pi], 1)), e


def test_action_variation_quadratic():
    tr, e = _off_shell_path()
    a = ConstraintParams(-2, -1, 1)
    H = HamiltonianSpec.from_components(3, {(0, 1): 0.5})
    assert action_gauge_variation(tr, e, CompactBump(0.0, 0, 4), a, H, SO3) == 0.0
    d = [abs(action_gauge_variation(tr, e, CompactBump(A, 0, 4), a, H, SO3)) for A in (1e-2, 5e-3, 2.5e-3)]
    slopes = np.diff(np.log(d)) / np.diff(np.log([1e-2, 5e-3, 2.5e-3]))
    assert np.all(np.abs(slopes - 2.0) < 0.1)


def test_action_variation_needs_compact_support():
    tr, e = _off_shell_path()
    with pytest.raises(ValueError):
        action_gauge_variation(tr, e, CompactBump(0.1, 0, 3), ConstraintParams(-2, -1, 1),
                               HamiltonianSpec(None, (), 3), SO3)
