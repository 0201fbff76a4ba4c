"""
Structure-group families in so(1,3)
===================================

With an indefinite metric the transformations that mix ``omega`` and ``pi``
inside their plane are rotations, boosts or null scalings, depending on the
invariants of the pair. This script classifies one point of each kind and
checks that ``J`` and the invariants stay put along the orbit.
"""
import numpy as np

from lpspin import PhasePoint, Signature, map_f
from lpspin.gauge import MULTIPLICATIVE, classify_case, finite_gauge_transform

sig = Signature(1, 3)
points = [
    ([0, 1, 0, 0], [0, 0.5, 1, 0]),
    ([0, 1, 0, 0], [2, 1, 0, 1]),
    ([0, 1, 0, 0], [1, 2, 0, 0]),
    ([1, 1, 0, 0], [1, -1, 0, 0]),
    ([1, 1, 0, 0], [0, 1, 1, 0]),
    ([1, 1, 0, 0], [0, 0, 1, 0]),
]


def invariants(p):
    return np.array([sig.inner(p.omega, p.omega), sig.inner(p.pi, p.pi), sig.inner(p.omega, p.pi)])


for w, q in points:
    p = PhasePoint(w, q)
    case = classify_case(p, sig)
    betas = np.exp(np.linspace(-1, 1, 7)) if case.tag in MULTIPLICATIVE else np.linspace(-2, 2, 7)
    orbit = [finite_gauge_transform(p, beta, sig, case) for beta in betas]
    dJ = max(np.max(np.abs(map_f(r) - map_f(p))) for r in orbit)
    dinv = max(np.max(np.abs(invariants(r) - invariants(p))) for r in orbit)
    print(f"{case.tag:28s} invariants {invariants(p)}  |dJ| {dJ:.1e}  |dinv| {dinv:.1e}")
