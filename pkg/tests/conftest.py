"""Independent oracles shared by the test modules.

Nothing here calls into the statevector kernels of the package: dense
operators are built with ``np.kron`` and matrix exponentials with scipy.
"""

import itertools

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_pauli(word):
    return kron_all([PAULI[c] for c in word])


def dense_1q(u2, q, n):
    return kron_all([u2 if i == q else PAULI["I"] for i in range(n)])


def dense_2q(u4, pair, n):
    """Full ``2**n`` operator for a gate on ``(qa, qb)`` built from Kronecker
    products: U = sum_{ij,kl} U[ij,kl] |i><k|_a (x) |j><l|_b."""
    qa, qb = pair
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for row in range(4):
        for col in range(4):
            if u4[row, col] == 0:
                continue
            ea = np.zeros((2, 2))
            eb = np.zeros((2, 2))
            ea[row >> 1, col >> 1] = 1
            eb[row & 1, col & 1] = 1
            factors = [PAULI["I"]] * n
            factors[qa] = ea
            factors[qb] = eb
            out += u4[row, col] * kron_all(factors)
    return out


def dense_lie_dim(words):
    """Brute-force closure of {iP} over dense matrices, tracking a real basis."""
    def vec(m):
        return np.concatenate([m.real.ravel(), m.imag.ravel()])

    basis, vecs = [], []

    def add(m):
        v = vec(m)
        if np.linalg.norm(v) < 1e-9:
            return False
        if vecs:
            q, _ = np.linalg.qr(np.array(vecs).T)
            v = v - q @ (q.T @ v)
            if np.linalg.norm(v) < 1e-9:
                return False
        vecs.append(vec(m))
        basis.append(m)
        return True

    for w in words:
        add(1j * dense_pauli(w))
    grew = True
    while grew:
        grew = False
        for a, b in itertools.combinations(list(basis), 2):
            if add(a @ b - b @ a):
                grew = True
    return len(basis)


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng)


def random_state(n, rng):
    z = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return z / np.linalg.norm(z)


def random_hermitian(dim, rng):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (z + z.conj().T) / 2


def expi(h):
    return expm(1j * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
