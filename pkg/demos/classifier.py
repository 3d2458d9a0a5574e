"""
Two moons on four qubits
========================

Each point is min-max scaled to [-1, 1] and angle encoded on four qubits.
The prediction is <Z> on qubit 0 after two brick-wall layers.
"""

# %%
import numpy as np

from sunvqc.data import angle_encode
from sunvqc.training import TrainConfig, train_classifier

# %%
for ansatz in ("sun", "he"):
    res = train_classifier(TrainConfig(ansatz=ansatz, qubits=4, iters=200, eta=0.05, seed=1))
    print(f"{ansatz:>4}: train {res.train_accuracy[-1]:.3f}  test {res.test_accuracy[-1]:.3f}")

# %%
# Both ends of the scaled range encode the same ray, since R_y(pi)|0> and
# R_y(-pi)|0> differ only by a sign. Points sitting at opposite extremes of
# a feature are therefore indistinguishable to any circuit.
a, b = angle_encode([-1.0, 0.2]), angle_encode([1.0, 0.2])
print("|<a|b>| =", abs(np.vdot(a, b)))
