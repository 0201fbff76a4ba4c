"""
From a spin bivector back to the phase space
============================================

Given a bivector on the spin surface we rebuild one pair ``(omega, pi)``
mapping onto it, then sweep the structure group to see the whole fiber.
Every orbit point lies in the plane of ``J`` and maps to the same ``J``.
"""
import numpy as np

from lpspin import ConstraintParams, Signature, map_f
from lpspin.fiber import fiber_reconstruct, membership, planarity_certificate, preimage_orbit, spin_surface_point

sig = Signature(0, 3)
a = ConstraintParams(-1.0, -1.0, 0.0)

J = np.zeros((3, 3))
J[0, 1], J[1, 2] = 1.2, 1.6
J = J - J.T

# %%
# Summed over all entries ``J^2 = 2 (1.2^2 + 1.6^2) = 8``, which is the value
# ``8 (a3 a4 - a5^2)`` these constants require. Twice that bivector is not.
print("2 J:", membership(2 * J, a, sig))
print("J:  ", membership(J, a, sig))
point = spin_surface_point(J, a, sig)
p = fiber_reconstruct(point, sig)
print("omega =", p.omega, " pi =", p.pi)
print("round trip error:", np.max(np.abs(map_f(p) - J)))

orbit = preimage_orbit(p, np.linspace(-np.pi, np.pi, 13), sig)
print("max |f(orbit) - J|:", max(np.max(np.abs(map_f(q) - J)) for q in orbit))
print("planarity:", planarity_certificate(orbit, J))

# %%
# A small push out of the plane is caught.
normal = np.cross(p.omega, p.pi)
bent = type(p)(p.omega + 1e-3 * normal / np.linalg.norm(normal), p.pi)
print("with 1e-3 out-of-plane noise:", planarity_certificate([bent], J))
