"""
Gradients of an SU(4) block three ways
======================================

A block exp(i sum_j theta_j P_j) has no simple two-term shift rule for
its individual parameters. Its derivative still has an exact shift form
once the effective generator is known. Here the adjoint derivative, the
generalised shift rule and central differences are compared on a small
circuit.
"""

# %%
import numpy as np

from sunvqc.ansatz import brickwall_layout
from sunvqc.data import haar_state
from sunvqc.gradients import effective_generator, exact_gradient, finite_difference, shift_gradient
from sunvqc.objectives import TrashInfidelity
from sunvqc.pauli import hs_coefficients, su_basis, su_basis_matrices

# %%
# Effective generator of one block for the first basis direction. Its
# Pauli expansion gives the weights of the shifted evaluations.
rng = np.random.default_rng(0)
theta = rng.uniform(-np.pi, np.pi, 15)
basis = su_basis_matrices(2)
omega = effective_generator(np.einsum("j,jab->ab", theta, basis), basis[0])
weights = hs_coefficients(omega, 2) / 4
for word, w in sorted(zip(su_basis(2), weights), key=lambda t: -abs(t[1]))[:5]:
    print(f"{word}: {w:+.4f}")

# %%
# The three gradient routes on a 6-qubit autoencoder circuit.
layout = brickwall_layout(6, 2, "sun", "periodic")
theta = rng.uniform(-np.pi, np.pi, layout.n_params)
psi = haar_state(6, 3)
cost = TrashInfidelity()
exact = exact_gradient(layout, theta, cost, psi)
print("parameters:", layout.n_params)
print("max |shift - exact| =", np.max(np.abs(shift_gradient(layout, theta, cost, psi) - exact)))
print("max |fd - exact|    =", np.max(np.abs(finite_difference(layout, theta, cost, psi) - exact)))
