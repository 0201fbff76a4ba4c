"""
Frozen spin: eliminating the momentum
=====================================

When ``H`` depends on ``J`` only through the Casimir its derivatives are
constants on the surface. They can be moved into the multipliers, after which
``pi`` is eliminated and a Lagrangian in ``omega`` remains. We compare the
two actions on one path and check how the Lagrangian responds to the local
symmetry.
"""
import numpy as np

from lpspin import ConstraintParams, HamiltonianSpec, Signature
from lpspin.gauge import CompactBump
from lpspin.lagrangian import (
    covariant_derivative,
    frozen_spin_coeffs,
    hamiltonian_action_frozen,
    lagrangian_action,
    lagrangian_gauge_variation,
    legendre_offset,
)

sig = Signature(0, 3)
a = ConstraintParams(-2.0, -1.0, 1.0)
H = HamiltonianSpec(None, (0.0, 1 / 8), 3)  # H = J^2 / 8
hpp, hwp, hww = frozen_spin_coeffs(H, a)
print("frozen coefficients (H_pp, H_wp, H_ww) =", (hpp, hwp, hww))

T = np.linspace(0.0, 2.0, 2001)
omega = (np.array([1.0, 0, 0]) + 0.3 * np.sin(T)[:, None] * np.array([0.2, 1, 0.1])
         + 0.2 * np.cos(1.5 * T)[:, None] * np.array([0.1, -0.3, 1]))
et = np.stack([1 + 0.2 * np.sin(T), 0.5 + 0.1 * np.cos(T), -1 + 0.3 * np.sin(2 * T)], 1)

# %%
# Recover ``pi`` from the velocity and undo the absorption to get raw multipliers.
omega_dot = np.gradient(omega, T[1] - T[0], axis=0, edge_order=2)
pi = covariant_derivative(omega_dot, omega, et[:, 2]) / et[:, 0][:, None]
e = et - 2 * np.array([hpp, hww, hwp])

S_H = hamiltonian_action_frozen(T, omega, pi, e, a, H, sig)
S_L = lagrangian_action(T, omega, et, a, sig)
print(f"S_H = {S_H:.6f}  S_L = {S_L:.6f}  difference {S_H - S_L:.6f}  "
      f"expected offset {legendre_offset(H, a, T[-1] - T[0]):.6f}")

# %%
# The symmetry leaves the action unchanged to first order, so halving the
# amplitude of the bump should quarter the change.
for amp in (1e-2, 5e-3, 2.5e-3):
    dS = lagrangian_gauge_variation(T, omega, et, CompactBump(amp, 0.0, 2.0), a, sig)
    print(f"beta_max = {amp:.2e}  dS = {dS:.3e}")
