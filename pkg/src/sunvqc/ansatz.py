"""Two-qubit block families and brick-wall circuit layouts.

Every block is a 4x4 unitary ``W`` acting on an ordered qubit pair ``(a, b)``,
with ``a`` the more significant factor. Conventions:

* ``sun``: ``W = exp(i sum_j t_j P_j)`` over the 15 two-qubit Pauli words.
* ``cartan``: ``W = K1 A K2`` with ``A = exp(i(a1 XX + a2 YY + a3 ZZ))`` and
  ``K = E(a-angles) (x) E(b-angles)``, ``E = Rz Ry Rz``. Parameters are laid
  out as the 6 angles of ``K2``, then ``a1..a3``, then the 6 angles of ``K1``.
* ``pauli``: ``W = prod_{m=1}^{15} exp(i t_m P_m)``, written left to right.
* ``he``: ``W = CNOT_{a->b} . (E(t4,t5,t6) on b) (x) (E(t1,t2,t3) on a)``.

Single-qubit rotations are ``R_P(t) = exp(i t P / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .linalg import ValidationError, apply_block, n_qubits_of
from .pauli import pauli_matrix, su_basis_matrices


class Family(str, Enum):
    SUN = "sun"
    CARTAN = "cartan"
    PAULI = "pauli"
    HE = "he"


PARAM_COUNT = {Family.SUN: 15, Family.CARTAN: 15, Family.PAULI: 15, Family.HE: 6}

Y = pauli_matrix("Y")
Z = pauli_matrix("Z")
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CARTAN_MATS = np.array([pauli_matrix(w) for w in ("XX", "YY", "ZZ")])


def family(name) -> Family:
    try:
        return Family(str(getattr(name, "value", name)).lower())
    except ValueError:
        raise ValidationError(f"unknown ansatz family {name!r}") from None


def param_count(fam) -> int:
    return PARAM_COUNT[family(fam)]


def rotation(p: np.ndarray, theta) -> np.ndarray:
    """``exp(i theta P / 2)`` for a Pauli matrix ``P``; broadcasts over ``theta``."""
    theta = np.asarray(theta, dtype=float)[..., None, None]
    return np.cos(theta / 2) * np.eye(p.shape[-1]) + 1j * np.sin(theta / 2) * p


def pauli_exp(p: np.ndarray, theta) -> np.ndarray:
    """``exp(i theta P)`` for a Pauli matrix ``P``; broadcasts over ``theta``."""
    theta = np.asarray(theta, dtype=float)[..., None, None]
    return np.cos(theta) * np.eye(p.shape[-1]) + 1j * np.sin(theta) * p


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched Kronecker product of 2x2 matrices."""
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (4, 4))


def _euler(angles: np.ndarray):
    """``Rz(a) Ry(b) Rz(c)`` and its three angle derivatives, batched over leading axes."""
    rz_a, ry_b, rz_c = rotation(Z, angles[..., 0]), rotation(Y, angles[..., 1]), rotation(Z, angles[..., 2])
    tail = ry_b @ rz_c
    e = rz_a @ tail
    de = np.stack([0.5j * Z @ e, rz_a @ (0.5j * Y) @ tail, e @ (0.5j * Z)], axis=-3)
    return e, de


def _local(angles: np.ndarray):
    """``E(angles[:3]) (x) E(angles[3:6])`` and its six derivatives."""
    ea, da = _euler(angles[..., 0:3])
    eb, db = _euler(angles[..., 3:6])
    k = _kron(ea, eb)
    dk = np.concatenate([_kron(da, eb[..., None, :, :]), _kron(ea[..., None, :, :], db)], axis=-3)
    return k, dk


def _pauli_chain(params: np.ndarray, gens: np.ndarray):
    """``prod_m exp(i t_m G_m)`` (left to right) and ``dW/dt_m = i (L_m G_m L_m^dagger) W``
    where ``L_m`` is the product of the factors left of ``m``."""
    factors = pauli_exp(gens, params)
    left = np.empty(factors.shape, dtype=complex)
    acc = np.broadcast_to(np.eye(4, dtype=complex), factors.shape[:-3] + (4, 4))
    for m in range(factors.shape[-3]):
        left[..., m, :, :] = acc
        acc = acc @ factors[..., m, :, :]
    w = acc
    dressed = left @ gens @ np.swapaxes(left, -1, -2).conj()
    return w, 1j * dressed @ w[..., None, :, :]


def _check_params(fam: Family, params) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape[-1:] != (PARAM_COUNT[fam],):
        raise ValidationError(f"{fam.value} block takes {PARAM_COUNT[fam]} parameters, got {params.shape}")
    return params


def sun_generator(params) -> np.ndarray:
    """``A = sum_j t_j P_j`` over the canonical two-qubit basis."""
    return np.einsum("...j,jab->...ab", params, su_basis_matrices(2))


def _sun(params, derivatives: bool):
    from .gradients import effective_generators

    a = sun_generator(params)
    evals, evecs = np.linalg.eigh(a)
    w = (evecs * np.exp(1j * evals)[..., None, :]) @ np.swapaxes(evecs, -1, -2).conj()
    if not derivatives:
        return w, None
    omegas = effective_generators(a, su_basis_matrices(2), eig=(evals, evecs))
    return w, 1j * omegas @ w[..., None, :, :]


def block_unitary(fam, params) -> np.ndarray:
    """4x4 unitary of one block (or a stack, for stacked ``params``)."""
    return block_unitary_and_derivatives(fam, params, derivatives=False)[0]


def block_unitary_and_derivatives(fam, params, derivatives: bool = True):
    """Return ``(W, dW)`` with ``dW[..., j, :, :] = dW/dparams[..., j]``.

    ``params`` may carry leading batch axes. ``dW`` is ``None`` unless requested.
    """
    fam = family(fam)
    params = _check_params(fam, params)
    if fam is Family.SUN:
        return _sun(params, derivatives)
    if fam is Family.PAULI:
        w, dw = _pauli_chain(params, su_basis_matrices(2))
        return w, (dw if derivatives else None)
    if fam is Family.HE:
        k, dk = _local(params[..., 0:6])
        return CNOT @ k, (CNOT @ dk if derivatives else None)
    k2, dk2 = _local(params[..., 0:6])
    amat, da = _pauli_chain(params[..., 6:9], _CARTAN_MATS)
    k1, dk1 = _local(params[..., 9:15])
    core = amat @ k2
    w = k1 @ core
    if not derivatives:
        return w, None
    head = (k1 @ amat)[..., None, :, :]
    dw = np.concatenate([head @ dk2, k1[..., None, :, :] @ da @ k2[..., None, :, :], dk1 @ core[..., None, :, :]], axis=-3)
    return w, dw


def shift_scales(fam) -> list[float] | None:
    """Per-parameter ``s`` such that the parameter enters only through ``exp(i s t P)``.

    ``None`` for SUN, whose parameters share one exponential.
    """
    fam = family(fam)
    euler = [0.5] * 6
    if fam is Family.SUN:
        return None
    if fam is Family.PAULI:
        return [1.0] * 15
    if fam is Family.HE:
        return euler
    return euler + [1.0] * 3 + euler


@lru_cache(maxsize=256)
def _offsets(families: tuple[Family, ...]) -> tuple[int, ...]:
    counts = [PARAM_COUNT[f] for f in families]
    return tuple(int(x) for x in np.concatenate([[0], np.cumsum(counts)]))


@dataclass(frozen=True)
class CircuitLayout:
    """Ordered list of blocks, each a qubit pair with a family.

    Parameters are laid out block-major in layout order.
    """

    n_qubits: int
    pairs: tuple[tuple[int, int], ...]
    families: tuple[Family, ...]
    boundary: str = "open"

    def __post_init__(self):
        if len(self.pairs) != len(self.families):
            raise ValidationError("pairs and families differ in length")
        for a, b in self.pairs:
            if a == b or not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise ValidationError(f"invalid pair {(a, b)} for {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def offsets(self) -> tuple[int, ...]:
        return _offsets(self.families)

    @property
    def n_params(self) -> int:
        return self.offsets[-1]

    def param_slice(self, b: int) -> slice:
        off = self.offsets
        return slice(off[b], off[b + 1])

    def locate(self, index: int) -> tuple[int, int]:
        """Map a flat parameter index to ``(block, local index)``."""
        if not 0 <= index < self.n_params:
            raise ValidationError(f"parameter index {index} out of range")
        b = int(np.searchsorted(self.offsets, index, side="right") - 1)
        return b, index - self.offsets[b]


def brickwall_layout(n_qubits: int, reps: int, fam, boundary: str = "open") -> CircuitLayout:
    """Even layer ``(0,1),(2,3),...`` then odd layer ``(1,2),(3,4),...`` per repetition.

    ``boundary="periodic"`` adds ``(n-1, 0)`` to the odd layer.
    """
    if n_qubits < 2 or n_qubits % 2:
        raise ValidationError("brick-wall layout needs an even qubit count >= 2")
    if reps < 1:
        raise ValidationError("reps must be >= 1")
    if boundary not in ("open", "periodic"):
        raise ValidationError(f"unknown boundary {boundary!r}")
    fam = family(fam)
    pairs = []
    for _ in range(reps):
        pairs += [(q, q + 1) for q in range(0, n_qubits - 1, 2)]
        pairs += [(q, q + 1) for q in range(1, n_qubits - 1, 2)]
        if boundary == "periodic" and n_qubits > 2:
            pairs.append((n_qubits - 1, 0))
    return CircuitLayout(n_qubits, tuple(pairs), (fam,) * len(pairs), boundary)


def block_local_layout(n_qubits: int, reps: int, fam) -> CircuitLayout:
    """Only the even layer, repeated: blocks never couple different pairs."""
    if n_qubits < 2 or n_qubits % 2:
        raise ValidationError("block-local layout needs an even qubit count >= 2")
    fam = family(fam)
    pairs = [(q, q + 1) for _ in range(reps) for q in range(0, n_qubits - 1, 2)]
    return CircuitLayout(n_qubits, tuple(pairs), (fam,) * len(pairs), "block-local")


def circuit_param_count(layout: CircuitLayout) -> int:
    return layout.n_params


def _check_theta(layout: CircuitLayout, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (layout.n_params,):
        raise ValidationError(f"layout takes {layout.n_params} parameters, got {theta.shape}")
    return theta


def layout_blocks(layout: CircuitLayout, theta, derivatives: bool = False):
    """All block unitaries (and derivative stacks) of a layout, built family by family."""
    theta = _check_theta(layout, theta)
    blocks: list = [None] * len(layout)
    derivs: list = [None] * len(layout)
    for fam in set(layout.families):
        idx = [b for b, f in enumerate(layout.families) if f is fam]
        params = np.array([theta[layout.param_slice(b)] for b in idx])
        w, dw = block_unitary_and_derivatives(fam, params, derivatives)
        for i, b in enumerate(idx):
            blocks[b] = w[i]
            if derivatives:
                derivs[b] = dw[i]
    return (blocks, derivs) if derivatives else blocks


def block_unitaries(layout: CircuitLayout, theta) -> list[np.ndarray]:
    return layout_blocks(layout, theta)


def circuit_state(layout: CircuitLayout, theta, state: np.ndarray) -> np.ndarray:
    """Apply every block in layout order to ``state`` (batch axes allowed)."""
    if n_qubits_of(state) != layout.n_qubits:
        raise ValidationError("state and layout disagree on the qubit count")
    for pair, w in zip(layout.pairs, block_unitaries(layout, theta)):
        state = apply_block(state, w, pair)
    return state
