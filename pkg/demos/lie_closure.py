"""
Dynamical Lie algebra dimensions
================================

The closure of a set of Pauli generators under commutators is computed
on symplectic bitmasks, so it never touches a matrix.
"""

# %%
from sunvqc.pauli import lie_closure, lie_closure_dim, su_basis

# A full SU(4) block generates all of su(4).
print("su(4) basis:", lie_closure_dim(su_basis(2)))

# %%
# Two commuting generators stay abelian; adding a local field does not
# always recover everything.
for words in (["XX", "ZZ"], ["XX", "ZI"], ["XX", "YY", "ZZ", "ZI", "IZ"]):
    print(words, "->", lie_closure_dim(words), sorted(lie_closure(words)))

# %%
# Hardware-efficient style generators on a chain: local X and Z fields plus
# nearest-neighbour ZZ couplings reach the full algebra of dimension 4**n - 1.
for n in (2, 3, 4):
    words = ["".join(c if i == q else "I" for i in range(n)) for q in range(n) for c in "XZ"]
    words += ["".join("Z" if i in (q, q + 1) else "I" for i in range(n)) for q in range(n - 1)]
    print(n, lie_closure_dim(words), 4**n - 1)
