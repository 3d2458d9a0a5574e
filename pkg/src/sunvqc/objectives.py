"""Autoencoder and classifier costs, and the Schmidt guideline.

Cost objects are callables on final states that also expose ``cotangent``
for adjoint differentiation (see :func:`sunvqc.gradients.exact_gradient`).
"""

from __future__ import annotations

import numpy as np

from .linalg import ValidationError, n_qubits_of, partial_trace_keep, schmidt_singular_values

TRASH_QUBITS = (3, 4, 5)


def _require_qubits(state: np.ndarray, n: int) -> None:
    if n_qubits_of(state) != n:
        raise ValidationError(f"expected a {n}-qubit state")


def trash_infidelity(state: np.ndarray) -> float:
    """``1 - <000|rho_trash|000>`` with qubits 0-2 traced out and 3-5 the trash register."""
    state = np.asarray(state)
    _require_qubits(state, 6)
    rho = partial_trace_keep(state, TRASH_QUBITS)
    return float(1.0 - rho[0, 0].real)


def trash_infidelity_amplitudes(state: np.ndarray) -> np.ndarray:
    """Same quantity from amplitudes; broadcasts over leading axes."""
    _require_qubits(state, 6)
    kept = state.reshape(state.shape[:-1] + (8, 8))[..., 0]
    return 1.0 - np.sum(np.abs(kept) ** 2, axis=-1)


def schmidt_bound(state: np.ndarray) -> float:
    """``1 - max_j sigma_j**2`` over the 3|3 Schmidt coefficients.

    A lower bound on :func:`trash_infidelity` for circuits that factorise
    across the cut; general circuits can go below it.
    """
    state = np.asarray(state)
    _require_qubits(state, 6)
    weights = schmidt_singular_values(state, 3) ** 2
    # normalising by the total weight keeps round-off in |psi| out of the bound
    return float(1.0 - weights[0] / weights.sum())


def z_expectation(state: np.ndarray, q: int = 0) -> np.ndarray:
    n = n_qubits_of(state)
    probs = np.abs(state.reshape(state.shape[:-1] + (1 << q, 2, 1 << (n - 1 - q)))) ** 2
    return probs[..., 0, :].sum(axis=(-2, -1)) - probs[..., 1, :].sum(axis=(-2, -1))


def classifier_output(state: np.ndarray) -> np.ndarray | float:
    """``<Z>`` on qubit 0 of a 4-qubit state (vectorised over leading axes)."""
    _require_qubits(state, 4)
    out = z_expectation(np.asarray(state), 0)
    return float(out) if out.ndim == 0 else out


def _check_pair(outputs, targets):
    outputs = np.asarray(outputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if outputs.shape != targets.shape:
        raise ValidationError("outputs and targets differ in length")
    if outputs.size == 0:
        raise ValidationError("empty outputs")
    return outputs, targets


def mse_loss(outputs, targets) -> float:
    outputs, targets = _check_pair(outputs, targets)
    return float(np.mean((outputs - targets) ** 2))


def accuracy(outputs, targets) -> float:
    """Fraction of samples with ``sign(output) == target``; ``sign(0)`` counts as ``+1``."""
    outputs, targets = _check_pair(outputs, targets)
    return float(np.mean(np.where(outputs >= 0, 1.0, -1.0) == targets))


class TrashInfidelity:
    """Autoencoder cost ``1 - <psi|P_000|psi>`` on the trash register."""

    n_qubits = 6

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return trash_infidelity_amplitudes(states)

    def cotangent(self, state: np.ndarray) -> np.ndarray:
        g = np.zeros_like(state)
        view = g.reshape(state.shape[:-1] + (8, 8))
        view[..., 0] = -state.reshape(state.shape[:-1] + (8, 8))[..., 0]
        return g


class ZExpectation:
    """``<Z_q>``; used for gradient-variance scans."""

    def __init__(self, q: int = 0):
        self.q = q

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return z_expectation(states, self.q)

    def cotangent(self, state: np.ndarray) -> np.ndarray:
        n = n_qubits_of(state)
        sign = np.ones(1 << n)
        sign.reshape(1 << self.q, 2, -1)[:, 1, :] = -1.0
        return state * sign


class ClassifierLoss:
    """Mean loss of ``<Z_0>`` against ``+/-1`` targets over a batch of encoded states.

    The last state axis before the amplitudes is the sample axis. ``kind`` is
    ``"mse"`` or ``"xent"`` (binary cross-entropy on ``p = (1 + <Z_0>)/2``).
    """

    def __init__(self, targets, kind: str = "mse", clip: float = 1e-12):
        if kind not in ("mse", "xent"):
            raise ValidationError(f"unknown loss {kind!r}")
        self.targets = np.asarray(targets, dtype=float)
        self.kind = kind
        self.clip = clip

    def _loss_and_slope(self, out: np.ndarray):
        t = self.targets
        if self.kind == "mse":
            return np.mean((out - t) ** 2, axis=-1), 2 * (out - t) / t.size
        y = (t + 1) / 2
        p = np.clip((1 + out) / 2, self.clip, 1 - self.clip)
        loss = -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p), axis=-1)
        slope = -(y / p - (1 - y) / (1 - p)) / 2 / t.size
        return loss, slope

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return self._loss_and_slope(z_expectation(states, 0))[0]

    def cotangent(self, state: np.ndarray) -> np.ndarray:
        _, slope = self._loss_and_slope(z_expectation(state, 0))
        return slope[..., None] * ZExpectation(0).cotangent(state)
