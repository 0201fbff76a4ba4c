"""Seeded property checks shared by the command line ``verify`` and ``algebra-check``.

Each check returns a ``CheckResult`` with the worst measured value and the
tolerance it was held to.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import (
    Signature,
    adjoint_representation,
    closure_residual,
    jacobi_residual,
    realization_brackets,
    realize_from_representation,
    so_structure_constants,
    vector_representation,
)
from .constraints import (
    constraint_bracket_matrix,
    dirac_correction,
    first_class_combination,
    resolve_multipliers,
)
from .fiber import (
    fiber_dimension_check,
    fiber_reconstruct,
    planarity_certificate,
    spin_surface_point,
)
from .gauge import CASES, UnclassifiableError, classify_case, finite_gauge_transform
from .phasespace import (
    ConstraintParams,
    DegenerateConstraintsError,
    PhasePoint,
    bracket_homomorphism_residual,
    constraints_eval,
    expected_rank,
    invariance_residual,
    jacobian_rank,
    map_f,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "value": self.value, "tol": self.tol, "passed": self.passed,
                "detail": self.detail}


def _result(name, value, tol, detail=""):
    value = float(value)
    return CheckResult(name, value, tol, bool(value <= tol), detail)


def random_point(rng, sig: Signature):
    return PhasePoint(rng.standard_normal(sig.n), rng.standard_normal(sig.n))


def random_surface_point(rng, sig: Signature, min_det=1e-3):
    """Random ``(p, a)`` with ``p`` exactly on the surface of ``a`` and ``|a3 a4 - a5^2| >= min_det``."""
    while True:
        p = random_point(rng, sig)
        try:
            a = ConstraintParams.from_point(p, sig)
        except DegenerateConstraintsError:
            continue
        if abs(a.a3 * a.a4 - a.a5**2) >= min_det:
            return p, a


def check_homomorphism(sig, rng, count=1000):
    worst = max(bracket_homomorphism_residual(random_point(rng, sig), sig) for _ in range(count))
    return _result(f"bracket_homomorphism[{sig}]", worst, 1e-10)


def check_invariance(sig, rng, count=1000):
    worst = 0.0
    for _ in range(count):
        p = random_point(rng, sig)
        a = ConstraintParams(*(rng.standard_normal(3) + np.array([2.0, 2.0, 0.0])))
        worst = max(worst, invariance_residual(p, a, sig))
    return _result(f"constraint_invariance[{sig}]", worst, 1e-10)


def check_ranks(sig, rng, count=100):
    bad = 0
    for _ in range(count):
        p = random_point(rng, sig)
        bad += jacobian_rank(p, sig, "map_f") != expected_rank(sig.n, "map_f")
        bad += jacobian_rank(p, sig, "adapted_chart") != expected_rank(sig.n, "adapted_chart")
    return _result(f"jacobian_ranks[{sig}]", bad, 0, f"{bad} rank mismatches in {2 * count} evaluations")


def check_fiber_dimension(sig, rng, count=20):
    bad = 0
    for _ in range(count):
        p, a = random_surface_point(rng, sig)
        bad += fiber_dimension_check(p, a, sig) != 1
    return _result(f"fiber_dimension[{sig}]", bad, 0, f"{bad} of {count} points without a 1-dimensional fiber")


def check_multipliers(rng, count=1000):
    worst_res = 0.0
    worst_ker = 0.0
    for i in range(count):
        v = rng.standard_normal(3)
        if i % 10 == 0:
            v[2] = 0.0
        try:
            a = ConstraintParams(*v)
        except DegenerateConstraintsError:
            continue
        if a.a5 != 0.0:
            m = resolve_multipliers(rng.standard_normal(), a, lambda5=rng.standard_normal())
        else:
            m = resolve_multipliers(0.0, a, amplitude=rng.standard_normal())
        worst_res = max(worst_res, float(np.max(np.abs(m.consistency_residuals(a)))))
        worst_ker = max(worst_ker, float(np.max(np.abs(constraint_bracket_matrix(a) @ first_class_combination(a)))))
    return [
        _result("multiplier_consistency", worst_res, 1e-14),
        _result("first_class_kernel", worst_ker, 1e-13),
    ]


def check_dirac(sig, rng, count=100):
    worst = 0.0
    for _ in range(count):
        p, _ = random_surface_point(rng, sig)
        worst = max(worst, dirac_correction(p, sig))
    return _result(f"dirac_correction[{sig}]", worst, 1e-10)


def check_gauge_orbits(sig, rng, count=20, nbeta=20):
    """Finite structure-group action at random points of whatever families the signature produces."""
    worst_J = 0.0
    worst_inv = 0.0
    seen = set()
    for _ in range(count):
        p = random_point(rng, sig)
        try:
            case = classify_case(p, sig)
        except UnclassifiableError:
            continue
        seen.add(case.tag)
        J = map_f(p)
        inv = np.array([sig.inner(p.omega, p.omega), sig.inner(p.pi, p.pi), sig.inner(p.omega, p.pi)])
        for beta in np.linspace(-1.0, 1.0, nbeta):
            if case.tag in ("both_lightlike", "omega_lightlike"):
                beta = np.exp(beta)
            q = finite_gauge_transform(p, beta, sig, case)
            worst_J = max(worst_J, float(np.max(np.abs(map_f(q) - J))))
            inv2 = np.array([sig.inner(q.omega, q.omega), sig.inner(q.pi, q.pi), sig.inner(q.omega, q.pi)])
            worst_inv = max(worst_inv, float(np.max(np.abs(inv2 - inv))) / max(1.0, float(np.max(np.abs(inv)))))
    detail = "families: " + ", ".join(c for c in CASES if c in seen)
    return [
        _result(f"gauge_orbit_J[{sig}]", worst_J, 1e-10, detail),
        _result(f"gauge_orbit_invariants[{sig}]", worst_inv, 1e-12, detail),
    ]


def check_fiber_round_trip(sig, rng, count=100):
    worst = 0.0
    planar = 0.0
    for _ in range(count):
        p, a = random_surface_point(rng, sig)
        J = map_f(p)
        q = fiber_reconstruct(spin_surface_point(J, a, sig), sig)
        worst = max(worst, float(np.max(np.abs(map_f(q) - J))),
                    float(np.max(np.abs(constraints_eval(q, a, sig)))))
        _, res = planarity_certificate([q, p], J)
        planar = max(planar, res)
    return [
        _result(f"fiber_round_trip[{sig}]", worst, 1e-9),
        _result(f"fiber_planarity[{sig}]", planar, 1e-9),
    ]


def check_algebra(sig, rng, count=20):
    c = so_structure_constants(sig)
    out = [_result(f"jacobi[{sig}]", jacobi_residual(c.c), 1e-12)]
    for label, rep in (("adjoint", adjoint_representation(c)), ("vector", vector_representation(sig))):
        out.append(_result(f"{label}_closure[{sig}]", closure_residual(rep, c), 1e-10))
        worst = 0.0
        for _ in range(count):
            w = rng.standard_normal(rep.dim)
            q = rng.standard_normal(rep.dim)
            z = realize_from_representation(rep, c, w, q)
            worst = max(worst, float(np.max(np.abs(realization_brackets(rep, w, q) - np.einsum("abc,c->ab", c.c, z)))))
        out.append(_result(f"{label}_realization[{sig}]", worst, 1e-10))
    return out


def property_suite(sig: Signature, rng, scale=1.0):
    """Full seeded suite for one signature; ``scale`` shrinks the sample counts."""
    n = lambda k: max(1, int(round(k * scale)))  # noqa: E731
    out = [
        check_homomorphism(sig, rng, n(1000)),
        check_invariance(sig, rng, n(1000)),
        check_ranks(sig, rng, n(100)),
        check_fiber_dimension(sig, rng, n(20)),
        check_dirac(sig, rng, n(100)),
    ]
    out += check_multipliers(rng, n(1000))
    out += check_gauge_orbits(sig, rng, n(20))
    out += check_fiber_round_trip(sig, rng, n(100))
    out += check_algebra(sig, rng, n(20))
    return out
