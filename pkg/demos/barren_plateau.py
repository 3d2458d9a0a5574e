"""
Gradient variance against qubit count
=====================================

For each n the derivative of <Z_0> with respect to the first parameter is
sampled over random parameters and random product inputs. Block-local SUN
layers keep the variance roughly flat; the hardware-efficient ansatz loses
it exponentially.
"""

# %%
import numpy as np

from sunvqc.training import TrainConfig, bp_scan, log10_slope

# %%
rows = bp_scan(TrainConfig(bp_qubits="4,6,8", samples=100, input="product"))
for r in rows:
    print(f"{r.ansatz:>4} n={r.n:<2} var={r.variance:.3e}  log10={np.log10(r.variance):+.2f}")

# %%
print("slope sun:", round(log10_slope(rows, "sun"), 3), "per qubit")
print("slope he: ", round(log10_slope(rows, "he"), 3), "per qubit")
