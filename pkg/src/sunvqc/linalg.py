"""Dense statevector primitives.

Qubit 0 is the leftmost factor in ket notation and the most significant bit
of the amplitude index: ``index = sum(bit_q * 2**(n - 1 - q))``.

Statevectors are plain ``complex128`` arrays whose last axis has length
``2**n``. Any leading axes are treated as batch axes and carried through
unchanged, which lets the gradient code push many shifted copies of a state
through the remaining circuit in one call.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_QUBITS = 14
VALIDATION_TOL = 1e-10


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def n_qubits_of(state: np.ndarray) -> int:
    dim = state.shape[-1]
    n = dim.bit_length() - 1
    if dim != 1 << n or n < 1:
        raise ValidationError(f"state dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValidationError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


def is_hermitian(mat: np.ndarray, tol: float = VALIDATION_TOL) -> bool:
    return bool(np.allclose(mat, np.swapaxes(mat, -1, -2).conj(), atol=tol, rtol=0.0))


def unitarity_error(mat: np.ndarray) -> float:
    """Frobenius norm of ``U^dagger U - I``."""
    eye = np.eye(mat.shape[-1])
    return float(np.linalg.norm(mat.conj().T @ mat - eye))


def expi_hermitian(h: np.ndarray) -> np.ndarray:
    """Return ``exp(iH)`` for a Hermitian matrix ``H``.

    The input is symmetrised to ``(H + H^dagger)/2`` before an eigendecomposition
    ``H = V diag(lam) V^dagger``, so the result is unitary to machine precision.

    Raises
    ------
    ValidationError
        If ``H`` is not square or not Hermitian within 1e-10.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError("expected a square matrix")
    if not is_hermitian(h):
        raise ValidationError("matrix is not Hermitian")
    evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (evecs * np.exp(1j * evals)) @ evecs.conj().T


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise ValidationError(f"qubit index {q} out of range for {n} qubits")


def apply_1q(state: np.ndarray, u2: np.ndarray, q: int) -> np.ndarray:
    """Apply a single-qubit gate to qubit ``q``."""
    n = n_qubits_of(state)
    _check_qubit(q, n)
    batch = state.shape[:-1]
    psi = state.reshape(batch + (1 << q, 2, 1 << (n - 1 - q)))
    out = np.einsum("ij,...ajb->...aib", u2, psi)
    return out.reshape(state.shape)


@lru_cache(maxsize=1024)
def _pair_perm(n: int, nb: int, qa: int, qb: int):
    """Axis order moving ``qa, qb`` last (after batch axes), and its inverse."""
    rest = [nb + q for q in range(n) if q not in (qa, qb)]
    perm = tuple(range(nb)) + tuple(rest) + (nb + qa, nb + qb)
    return perm, tuple(np.argsort(perm))


def apply_block(state: np.ndarray, u4: np.ndarray, pair: tuple[int, int], check: bool = False) -> np.ndarray:
    """Apply a two-qubit gate to the ordered qubit pair ``(qa, qb)``.

    ``qa`` indexes the more significant bit of the 4x4 basis. ``u4`` may carry
    leading batch axes that broadcast against those of ``state``.
    """
    qa, qb = pair
    n = n_qubits_of(state)
    _check_qubit(qa, n)
    _check_qubit(qb, n)
    if qa == qb:
        raise ValidationError("block acts on a repeated qubit")
    if check and unitarity_error(u4) > VALIDATION_TOL:
        raise ValidationError("block is not unitary")
    batch = state.shape[:-1]
    perm, inverse = _pair_perm(n, len(batch), qa, qb)
    psi = state.reshape(batch + (2,) * n).transpose(perm)
    moved = psi.shape
    psi = psi.reshape(batch + (-1, 4)) @ np.swapaxes(u4, -1, -2)
    return psi.reshape(moved).transpose(inverse).reshape(state.shape)


def block_environment(state: np.ndarray, cotangent: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Return the 4x4 matrix ``M`` with ``<g|(X (x) I)|psi> = Tr(X M)``.

    Batch axes of both arrays are summed over.
    """
    qa, qb = pair
    n = n_qubits_of(state)
    batch = state.shape[:-1]
    perm, _ = _pair_perm(n, len(batch), qa, qb)
    a = state.reshape(batch + (2,) * n).transpose(perm).reshape(-1, 4)
    g = cotangent.reshape(batch + (2,) * n).transpose(perm).reshape(-1, 4)
    return a.T @ g.conj()


def partial_trace_keep(state: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix of a pure state on the ordered qubit list ``keep``."""
    state = np.asarray(state)
    n = n_qubits_of(state)
    keep = list(keep)
    if not keep:
        raise ValidationError("keep must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValidationError("keep contains repeated qubits")
    for q in keep:
        _check_qubit(q, n)
    rest = [q for q in range(n) if q not in keep]
    psi = np.transpose(state.reshape((2,) * n), keep + rest).reshape(1 << len(keep), -1)
    return psi @ psi.conj().T


def schmidt_singular_values(state: np.ndarray, cut: int) -> np.ndarray:
    """Singular values of the ``2**cut x 2**(n - cut)`` reshaping, descending."""
    n = n_qubits_of(state)
    if not 1 <= cut < n:
        raise ValidationError(f"cut {cut} invalid for {n} qubits")
    return np.linalg.svd(np.asarray(state).reshape(1 << cut, -1), compute_uv=False)


def basis_state(n: int, bits: str | int = 0) -> np.ndarray:
    """Computational basis state, from an index or a bit string like ``"100"``."""
    index = int(bits, 2) if isinstance(bits, str) else bits
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def embed_block(u4: np.ndarray, pair: tuple[int, int], n: int) -> np.ndarray:
    """Dense ``2**n`` operator for a two-qubit gate (column by column)."""
    eye = np.eye(1 << n, dtype=complex)
    return apply_block(eye, u4, pair).T
