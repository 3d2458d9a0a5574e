"""Pauli-word basis of su(2^k), Hilbert-Schmidt coordinates and Lie closure."""

from __future__ import annotations

from functools import lru_cache, reduce
from itertools import product

import numpy as np

from .linalg import ValidationError, is_hermitian

LETTERS = "IXYZ"

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_word(word: str) -> str:
    word = word.strip().upper()
    if not word or any(c not in LETTERS for c in word):
        raise ValidationError(f"invalid Pauli word {word!r}")
    return word


def pauli_matrix(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word; letter 0 acts on the most significant qubit."""
    word = _check_word(word)
    return reduce(np.kron, (_SINGLE[c] for c in word))


def su_basis(k: int) -> list[str]:
    """The ``4**k - 1`` non-identity Pauli words on ``k`` qubits, lexicographic (I<X<Y<Z)."""
    if not 1 <= k <= 3:
        raise ValidationError("su_basis supports 1 <= k <= 3")
    return ["".join(w) for w in product(LETTERS, repeat=k)][1:]


@lru_cache(maxsize=None)
def su_basis_matrices(k: int) -> np.ndarray:
    """Stacked matrices of :func:`su_basis`, shape ``(4**k - 1, 2**k, 2**k)``."""
    mats = np.array([pauli_matrix(w) for w in su_basis(k)])
    mats.setflags(write=False)
    return mats


def hs_coefficients(m: np.ndarray, k: int) -> np.ndarray:
    """Real coordinates ``omega_j = Tr(P_j M) / 2**k`` in the :func:`su_basis` order.

    The identity component ``Tr(M) / 2**k`` is dropped.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (1 << k, 1 << k):
        raise ValidationError(f"expected a {1 << k}x{1 << k} matrix")
    if not is_hermitian(m):
        raise ValidationError("matrix is not Hermitian")
    basis = su_basis_matrices(k)
    # Tr(P M) = sum_ab P_ab M_ba
    return np.einsum("jab,ba->j", basis, m).real / (1 << k)


def from_hs_coefficients(omega: np.ndarray, k: int, trace: float = 0.0) -> np.ndarray:
    return np.einsum("j,jab->ab", omega, su_basis_matrices(k)) + trace / (1 << k) * np.eye(1 << k)


# Symplectic form: a word is (x, z) bit masks, bit q set for qubit q.
# X -> x, Z -> z, Y -> x and z; phases are dropped.

def to_symplectic(word: str) -> tuple[int, int]:
    word = _check_word(word)
    x = z = 0
    for q, c in enumerate(word):
        if c in "XY":
            x |= 1 << q
        if c in "ZY":
            z |= 1 << q
    return x, z


def from_symplectic(xz: tuple[int, int], n: int) -> str:
    x, z = xz
    return "".join("IXZY"[((x >> q) & 1) | (((z >> q) & 1) << 1)] for q in range(n))


def anticommute(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Pauli words commute iff their symplectic product is even."""
    return (bin(a[0] & b[1]).count("1") + bin(a[1] & b[0]).count("1")) % 2 == 1


def lie_closure(seed_words) -> list[str]:
    """Words spanning the real Lie algebra generated by ``{iP}``.

    Each bracket of two Pauli words is either zero or, up to a phase, another
    Pauli word, so the closure is tracked as a set of words. Returns them in
    canonical order.
    """
    words = [_check_word(w) for w in seed_words]
    if not words:
        raise ValidationError("seed set is empty")
    n = len(words[0])
    if any(len(w) != n for w in words):
        raise ValidationError("Pauli words have mismatched lengths")
    cap = 4**n - 1
    identity = (0, 0)
    found: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for w in words:
        s = to_symplectic(w)
        if s != identity and s not in seen:
            seen.add(s)
            found.append(s)
    worklist = list(found)
    while worklist and len(found) < cap:
        a = worklist.pop()
        for b in list(found):
            if anticommute(a, b):
                c = (a[0] ^ b[0], a[1] ^ b[1])
                if c not in seen:
                    seen.add(c)
                    found.append(c)
                    worklist.append(c)
    rank = {c: i for i, c in enumerate(LETTERS)}
    out = [from_symplectic(s, n) for s in found]
    return sorted(out, key=lambda w: [rank[c] for c in w])


def lie_closure_dim(seed_words) -> int:
    """Dimension of the dynamical Lie algebra generated by Pauli words."""
    return len(lie_closure(seed_words))
