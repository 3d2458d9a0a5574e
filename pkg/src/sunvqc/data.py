"""Seeded benchmark inputs.

Random numbers come from Philox-4x64-10 keyed by ``(seed, stream)``, with the
128-bit counter taking the values 1, 2, ... and each block yielding its four
64-bit words in order. Uniforms are ``(word >> 11) * 2**-53``; Gaussians use
Box-Muller on consecutive halves of a uniform batch (see :meth:`Rng.normal`).
Any implementation of these pieces reproduces the same draws. Streams
separate independent uses of one seed.
"""

from __future__ import annotations

import numpy as np

from .linalg import MAX_QUBITS, ValidationError

STREAM_INPUT = 0
STREAM_INIT = 1
STREAM_TRAIN = 2
STREAM_TEST = 3
STREAM_SAMPLE = 4


class Rng:
    """Counter-based generator with Box-Muller normals."""

    def __init__(self, seed: int, stream: int = 0):
        key = np.array([int(seed) & (2**64 - 1), int(stream) & (2**64 - 1)], dtype=np.uint64)
        self._bits = np.random.Philox(key=key)

    def uniform(self, size) -> np.ndarray:
        """Doubles in ``[0, 1)``."""
        count = int(np.prod(size))
        raw = self._bits.random_raw(count).astype(np.uint64)
        return ((raw >> np.uint64(11)).astype(np.float64) * 2.0**-53).reshape(size)

    def normal(self, size) -> np.ndarray:
        """``m = ceil(size / 2)`` pairs from ``2m`` uniforms ``u``: radius from
        ``u[:m]``, angle from ``u[m:]``; cosines first, then sines."""
        count = int(np.prod(size))
        half = (count + 1) // 2
        u = self.uniform((2, half))
        radius = np.sqrt(-2.0 * np.log1p(-u[0]))
        angle = 2.0 * np.pi * u[1]
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        return z[:count].reshape(size)


def haar_state(n_qubits: int, seed: int, stream: int = STREAM_INPUT) -> np.ndarray:
    """Haar-random pure state from normalised complex Gaussian amplitudes."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValidationError(f"n_qubits must be in [1, {MAX_QUBITS}]")
    z = Rng(seed, stream).normal((2, 1 << n_qubits))
    psi = z[0] + 1j * z[1]
    return psi / np.linalg.norm(psi)


def random_product_state(n_qubits: int, seed: int, stream: int = STREAM_INPUT) -> np.ndarray:
    """Tensor product of independent Haar-random single-qubit states."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValidationError(f"n_qubits must be in [1, {MAX_QUBITS}]")
    z = Rng(seed, stream).normal((n_qubits, 4))
    psi = np.ones(1, dtype=complex)
    for row in z:
        q = row[:2] + 1j * row[2:]
        psi = np.kron(psi, q / np.linalg.norm(q))
    return psi


def weak_entangled_state(eps: float, seed: int, stream: int = STREAM_INPUT) -> np.ndarray:
    """``sqrt(1-eps)|a>|b> + sqrt(eps)|a'>|b'>`` on 3+3 qubits with ``a'`` orthogonal to ``a``
    and ``b'`` orthogonal to ``b``; its Schmidt bound is exactly ``eps``."""
    if not 0.0 <= eps <= 0.5:
        raise ValidationError("eps must lie in [0, 0.5]")
    z = Rng(seed, stream).normal((4, 2, 8))
    a, a2, b, b2 = (v[0] + 1j * v[1] for v in z)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    a2 = a2 - np.vdot(a, a2) * a
    b2 = b2 - np.vdot(b, b2) * b
    a2 /= np.linalg.norm(a2)
    b2 /= np.linalg.norm(b2)
    return np.sqrt(1.0 - eps) * np.kron(a, b) + np.sqrt(eps) * np.kron(a2, b2)


def two_moons(n_samples: int, noise: float, seed: int, stream: int = STREAM_TRAIN):
    """Two interleaved half circles.

    The first half of the samples lie on ``(cos p, sin p)`` with label ``-1``,
    the second half on ``(1 - cos p, 0.5 - sin p)`` with label ``+1``, ``p``
    uniform on ``[0, pi]``; isotropic Gaussian noise of width ``noise`` is added.

    Returns
    -------
    X : ndarray of shape (n_samples, 2)
    y : ndarray of shape (n_samples,), entries in {-1, +1}
    """
    if n_samples < 2 or n_samples % 2:
        raise ValidationError("n_samples must be even and positive")
    if noise < 0:
        raise ValidationError("noise must be non-negative")
    rng = Rng(seed, stream)
    half = n_samples // 2
    phi = np.pi * rng.uniform((2, half))
    upper = np.stack([np.cos(phi[0]), np.sin(phi[0])], axis=1)
    lower = np.stack([1.0 - np.cos(phi[1]), 0.5 - np.sin(phi[1])], axis=1)
    X = np.concatenate([upper, lower]) + noise * rng.normal((n_samples, 2))
    y = np.concatenate([-np.ones(half), np.ones(half)])
    return X, y


def fit_minmax(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    return X.min(axis=0), X.max(axis=0)


def minmax_scale(X: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Map ``[lo, hi]`` to ``[-1, 1]`` per feature (values outside extrapolate)."""
    span = np.where(hi > lo, hi - lo, 1.0)
    return 2.0 * (np.asarray(X, dtype=float) - lo) / span - 1.0


def angle_encode(x_scaled: np.ndarray) -> np.ndarray:
    """Four-qubit product state with ``R_y(pi x1)`` on qubits 0, 2 and ``R_y(pi x2)`` on 1, 3.

    ``R_y(t) = exp(i t Y / 2)`` maps ``|0>`` to ``cos(t/2)|0> - sin(t/2)|1>``.
    Accepts a single 2-vector or an ``(m, 2)`` array.
    """
    x = np.asarray(x_scaled, dtype=float)
    if x.shape[-1] != 2 or not np.all(np.isfinite(x)):
        raise ValidationError("features must be finite 2-vectors")
    half = np.pi * x / 2
    qubit = np.stack([np.cos(half), -np.sin(half)], axis=-1).astype(complex)
    q1, q2 = qubit[..., 0, :], qubit[..., 1, :]
    out = np.einsum("...a,...b,...c,...d->...abcd", q1, q2, q1, q2)
    return out.reshape(x.shape[:-1] + (16,))
