"""Hypothesis strategies for phase-space points and constants."""
import numpy as np
from hypothesis import assume
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lpspin.phasespace import ConstraintParams, DegenerateConstraintsError, PhasePoint

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


def vectors(n):
    return arrays(np.float64, n, elements=finite)


@st.composite
def phase_points(draw, n):
    return PhasePoint(draw(vectors(n)), draw(vectors(n)))


@st.composite
def constraint_params(draw, allow_zero_a5=True):
    a3, a4 = draw(finite), draw(finite)
    a5 = draw(st.one_of(st.just(0.0), finite) if allow_zero_a5 else finite)
    assume(abs(a3 * a4 - a5 * a5) > 1e-3)
    try:
        return ConstraintParams(a3, a4, a5)
    except DegenerateConstraintsError:
        assume(False)


@st.composite
def surface_points(draw, sig, min_det=1e-2):
    """``(p, a)`` with ``p`` on the surface of ``a`` (constants read off the point)."""
    p = draw(phase_points(sig.n))
    try:
        a = ConstraintParams.from_point(p, sig)
    except DegenerateConstraintsError:
        assume(False)
    assume(abs(a.a3 * a.a4 - a.a5**2) > min_det)
    return p, a
