"""Exact, parameter-shift and finite-difference gradients of circuit costs.

Costs are callables mapping final states of shape ``(..., 2**n)`` (possibly
with extra sample axes, see :mod:`sunvqc.objectives`) to values with the
leading axes kept. The adjoint route additionally needs ``cost.cotangent``,
which returns ``g`` such that ``dC = 2 Re <g|d psi>``.

Derivatives follow the left-insertion convention ``dW/dt_l = i Omega_l W``,
so shift gates are inserted directly after the differentiated block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ansatz import (
    CircuitLayout,
    Family,
    block_unitary,
    circuit_state,
    layout_blocks,
    pauli_exp,
    shift_scales,
)
from .linalg import ValidationError, apply_block, block_environment, is_hermitian
from .pauli import hs_coefficients, su_basis_matrices

SERIES_CUTOFF = 1e-8


def _phi(gaps: np.ndarray) -> np.ndarray:
    """``(exp(i d) - 1) / (i d)`` with a series fallback near ``d = 0``."""
    small = np.abs(gaps) < SERIES_CUTOFF
    safe = np.where(small, 1.0, gaps)
    exact = (np.exp(1j * safe) - 1.0) / (1j * safe)
    series = 1.0 + 0.5j * gaps - gaps**2 / 6.0
    return np.where(small, series, exact)


def effective_generators(a: np.ndarray, lams: np.ndarray, eig=None) -> np.ndarray:
    """Vectorised :func:`effective_generator`.

    ``a`` may be a stack ``(..., N, N)`` and ``lams`` a stack ``(d, N, N)``;
    the result has shape ``(..., d, N, N)`` (or ``lams.shape`` for a single ``a``).
    """
    evals, evecs = np.linalg.eigh(a) if eig is None else eig
    phi = _phi(evals[..., :, None] - evals[..., None, :])
    v = evecs[..., None, :, :] if lams.ndim == 3 else evecs
    vh = np.swapaxes(v, -1, -2).conj()
    phi = phi[..., None, :, :] if lams.ndim == 3 else phi
    return v @ ((vh @ lams @ v) * phi) @ vh


def effective_generator(a: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Hermitian ``Omega`` with ``d/de exp(i(A + e Lam))|_{e=0} = i Omega exp(iA)``.

    With ``A = V diag(l) V^dagger``, ``Omega = V[(V^dagger Lam V) o Phi]V^dagger``
    and ``Phi_jk = (exp(i(l_j - l_k)) - 1) / (i(l_j - l_k))``.
    """
    a = np.asarray(a, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    if not (is_hermitian(a) and is_hermitian(lam)):
        raise ValidationError("effective_generator needs Hermitian inputs")
    a = 0.5 * (a + a.conj().T)
    return effective_generators(a, lam)


# ---------------------------------------------------------------------------
# spectral shift rules


@dataclass(frozen=True)
class ShiftTerm:
    coefficient: float
    shift: float


def _frequencies(eigenvalues, tol: float = 1e-9) -> np.ndarray:
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    gaps = np.abs(ev[:, None] - ev[None, :]).ravel()
    gaps = np.sort(gaps[gaps > tol])
    if gaps.size == 0:
        raise ValidationError("parameter has no effect: spectrum is degenerate")
    uniq = [gaps[0]]
    for g in gaps[1:]:
        if g - uniq[-1] > tol:
            uniq.append(g)
    return np.array(uniq)


def spectral_shift_rule(eigenvalues, max_denominator: int = 64) -> list[ShiftTerm]:
    """Shift rule ``f'(0) = sum_r c_r [f(s_r) - f(-s_r)]`` for ``f(t)`` generated by ``exp(itH)``.

    ``eigenvalues`` is the spectrum of ``H``. The positive gaps are the
    frequencies of ``f``; shifts are ``s_r = r pi / (2 R max_gap)``, spread
    out by a common factor if that system is ill-conditioned, and the
    coefficients solve ``sum_r 2 c_r sin(nu s_r) = nu`` for every frequency.

    Raises
    ------
    ValidationError
        If the spectrum is degenerate or the gap ratios are not rational with
        denominator at most ``max_denominator``.
    """
    freqs = _frequencies(eigenvalues)
    base = freqs[0]
    for nu in freqs:
        ratio = Fraction(float(nu / base)).limit_denominator(max_denominator)
        if abs(float(ratio) - nu / base) > 1e-9:
            raise ValidationError("incommensurate spectrum is not supported")
    r_terms = len(freqs)
    base_step = np.pi / (2 * freqs[-1] * r_terms)
    # Closely spaced shifts make the sine system ill-conditioned when there are
    # many frequencies; widen the spacing until it is not.
    stretch = 1.0
    while True:
        shifts = np.arange(1, r_terms + 1) * base_step * stretch
        if shifts[-1] >= 2 * np.pi:
            raise ValidationError("could not find a well-conditioned shift set")
        mat = 2 * np.sin(np.outer(freqs, shifts))
        if np.linalg.cond(mat) < 1e8:
            break
        stretch *= 1.25
    coeffs = np.linalg.solve(mat, freqs)
    return [ShiftTerm(float(c), float(s)) for c, s in zip(coeffs, shifts)]


def apply_shift_rule(terms, f, x: float = 0.0) -> float:
    return float(sum(t.coefficient * (f(x + t.shift) - f(x - t.shift)) for t in terms))


# ---------------------------------------------------------------------------
# circuit evaluation helpers


def _forward(layout: CircuitLayout, theta, state):
    """States entering each block, plus the final state."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (layout.n_params,):
        raise ValidationError(f"layout takes {layout.n_params} parameters, got {theta.shape}")
    blocks = layout_blocks(layout, theta)
    states = [state]
    for pair, w in zip(layout.pairs, blocks):
        states.append(apply_block(states[-1], w, pair))
    return blocks, states


def _evaluate_replaced(layout, blocks, states, b, replacements, cost) -> np.ndarray:
    """Cost with block ``b`` replaced by each of the ``K`` matrices in ``replacements``."""
    psi = states[b]
    k = replacements.shape[0]
    extra = psi.ndim - 1
    reps = replacements.reshape((k,) + (1,) * extra + (4, 4))
    psi = np.broadcast_to(psi, (k,) + psi.shape)
    psi = apply_block(np.ascontiguousarray(psi), reps, layout.pairs[b])
    for pair, w in zip(layout.pairs[b + 1:], blocks[b + 1:]):
        psi = apply_block(psi, w, pair)
    return np.asarray(cost(psi), dtype=float).reshape(k)


def sun_shift_rule(a: np.ndarray, l: int, k: int, evaluate) -> float:
    """Derivative along basis direction ``l`` of a block ``exp(iA)`` from shifted evaluations.

    ``evaluate(gates)`` receives a ``(2 d, 2**k, 2**k)`` stack of inserted gates
    ``exp(+i pi/4 P_m)`` for every basis word followed by ``exp(-i pi/4 P_m)``
    and returns the ``2 d`` cost values. The derivative is
    ``sum_m omega_lm [f(+m) - f(-m)]`` with ``omega_l`` the Pauli coordinates
    of the effective generator.
    """
    basis = su_basis_matrices(k)
    omega = hs_coefficients(effective_generator(a, basis[l]), k)
    values = _shifted_pauli_values(basis, evaluate)
    d = len(basis)
    return float(omega @ (values[:d] - values[d:]))


def _shifted_pauli_values(basis, evaluate) -> np.ndarray:
    plus = np.array([pauli_exp(p, np.pi / 4) for p in basis])
    minus = np.array([pauli_exp(p, -np.pi / 4) for p in basis])
    values = np.asarray(evaluate(np.concatenate([plus, minus])), dtype=float)
    if values.shape != (2 * len(basis),):
        raise ValidationError("evaluate returned the wrong number of values")
    return values


def _sun_omegas(theta_b) -> np.ndarray:
    """Pauli coordinates of all 15 effective generators, shape ``(15, 15)``."""
    basis = su_basis_matrices(2)
    a = np.einsum("j,jab->ab", theta_b, basis)
    omegas = effective_generators(a, basis)
    return np.einsum("mab,lba->lm", basis, omegas).real / 4


def sun_block_gradient(layout, theta, b: int, l: int, cost, state) -> float:
    """Shift-rule derivative for parameter ``l`` of SUN block ``b`` (30 circuit evaluations)."""
    if layout.families[b] is not Family.SUN:
        raise ValidationError(f"block {b} is not a SUN block")
    theta = np.asarray(theta, dtype=float)
    blocks, states = _forward(layout, theta, state)
    a = np.einsum("j,jab->ab", theta[layout.param_slice(b)], su_basis_matrices(2))
    return sun_shift_rule(
        a, l, 2, lambda gates: _evaluate_replaced(layout, blocks, states, b, gates @ blocks[b], cost)
    )


def _two_term_block(layout, blocks, states, b, theta_b, j, scale, cost) -> float:
    fam = layout.families[b]
    shift = np.pi / (4 * scale)
    plus, minus = theta_b.copy(), theta_b.copy()
    plus[j] += shift
    minus[j] -= shift
    reps = np.array([block_unitary(fam, plus), block_unitary(fam, minus)])
    fp, fm = _evaluate_replaced(layout, blocks, states, b, reps, cost)
    # exp(i t s P): f(t) = c0 + c1 cos(2 s t) + c2 sin(2 s t)
    return float(scale * (fp - fm))


def two_term_shift(layout, theta, index: int, cost, state) -> float:
    """Two-term shift rule for a parameter entering as ``exp(i s t P)``.

    Gives ``f(t + pi/4) - f(t - pi/4)`` for ``s = 1`` and
    ``(f(t + pi/2) - f(t - pi/2)) / 2`` for ``s = 1/2``.
    """
    b, j = layout.locate(index)
    scales = shift_scales(layout.families[b])
    if scales is None:
        raise ValidationError("SUN parameters are not single-Pauli; use sun_block_gradient")
    theta = np.asarray(theta, dtype=float)
    blocks, states = _forward(layout, theta, state)
    theta_b = theta[layout.param_slice(b)].copy()
    return _two_term_block(layout, blocks, states, b, theta_b, j, scales[j], cost)


def _plus_minus(theta_b: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Rows ``theta_b + steps_j e_j`` and ``theta_b - steps_j e_j``, interleaved."""
    p = theta_b.size
    delta = np.zeros((p, 2, p))
    delta[np.arange(p), 0, np.arange(p)] = steps
    delta[np.arange(p), 1, np.arange(p)] = -steps
    return theta_b + delta.reshape(2 * p, p)


def shift_gradient(layout, theta, cost, state) -> np.ndarray:
    """Full gradient from shifted-circuit evaluations only.

    SUN blocks share their 30 shifted evaluations across all 15 parameters of
    the block; the other families use two evaluations per parameter.
    """
    theta = np.asarray(theta, dtype=float)
    blocks, states = _forward(layout, theta, state)
    grad = np.zeros(layout.n_params)
    for b, fam in enumerate(layout.families):
        sl = layout.param_slice(b)
        theta_b = theta[sl].copy()
        if fam is Family.SUN:
            values = _shifted_pauli_values(
                su_basis_matrices(2),
                lambda gates: _evaluate_replaced(layout, blocks, states, b, gates @ blocks[b], cost),
            )
            grad[sl] = _sun_omegas(theta_b) @ (values[:15] - values[15:])
            continue
        scales = np.asarray(shift_scales(fam))
        reps = block_unitary(fam, _plus_minus(theta_b, np.pi / (4 * scales)))
        values = _evaluate_replaced(layout, blocks, states, b, reps, cost)
        grad[sl] = scales * (values[0::2] - values[1::2])
    return grad


def exact_value_and_gradient(layout, theta, cost, state):
    """Adjoint-mode cost and gradient.

    The cotangent ``g = cost.cotangent(final)`` is pulled back through the
    circuit; for block ``b`` with input ``psi_b`` the derivative is
    ``2 Re Tr(dW_j M_b)`` with ``M_b = Tr_rest |psi_b><g_b|``.
    """
    blocks, derivs = layout_blocks(layout, theta, derivatives=True)
    psi = state
    for pair, w in zip(layout.pairs, blocks):
        psi = apply_block(psi, w, pair)
    value = float(np.sum(cost(psi)))
    g = cost.cotangent(psi)
    grad = np.zeros(layout.n_params)
    for b in range(len(layout) - 1, -1, -1):
        pair, w = layout.pairs[b], blocks[b]
        wd = w.conj().T
        psi = apply_block(psi, wd, pair)
        env = block_environment(psi, g, pair)
        # Tr(dW_j M) = sum_ab dW_j[a, b] M[b, a]
        grad[layout.param_slice(b)] = 2 * np.einsum("jab,ba->j", derivs[b], env).real
        g = apply_block(g, wd, pair)
    return value, grad


def exact_gradient(layout, theta, cost, state) -> np.ndarray:
    """Adjoint-mode gradient; see :func:`exact_value_and_gradient`."""
    return exact_value_and_gradient(layout, theta, cost, state)[1]


def finite_difference(layout, theta, cost, state, eps: float = 1e-5) -> np.ndarray:
    """Central differences ``(f(t + eps) - f(t - eps)) / (2 eps)`` per parameter."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    theta = np.asarray(theta, dtype=float)
    blocks, states = _forward(layout, theta, state)
    grad = np.zeros(layout.n_params)
    for b, fam in enumerate(layout.families):
        sl = layout.param_slice(b)
        reps = block_unitary(fam, _plus_minus(theta[sl], np.full(sl.stop - sl.start, eps)))
        values = _evaluate_replaced(layout, blocks, states, b, reps, cost)
        grad[sl] = (values[0::2] - values[1::2]) / (2 * eps)
    return grad


@dataclass(frozen=True)
class GradientMethod:
    """One of ``exact``, ``shift`` or ``fd`` (with step ``eps``)."""

    kind: str = "exact"
    eps: float = 1e-5

    @classmethod
    def parse(cls, text: str) -> "GradientMethod":
        text = str(text).strip().lower()
        if text in ("exact", "shift"):
            return cls(text)
        if text.startswith("fd"):
            _, _, tail = text.partition(":")
            try:
                eps = float(tail) if tail else 1e-5
            except ValueError:
                raise ValidationError(f"bad finite-difference step in {text!r}") from None
            if not eps > 0:
                raise ValidationError("finite-difference step must be positive")
            return cls("fd", eps)
        raise ValidationError(f"unknown gradient method {text!r}")

    def __str__(self) -> str:
        return f"fd:{self.eps!r}" if self.kind == "fd" else self.kind

    def value_and_grad(self, layout, theta, cost, state):
        if self.kind == "exact":
            return exact_value_and_gradient(layout, theta, cost, state)
        value = float(np.sum(cost(circuit_state(layout, theta, state))))
        return value, self(layout, theta, cost, state)

    def __call__(self, layout, theta, cost, state) -> np.ndarray:
        if self.kind == "exact":
            return exact_gradient(layout, theta, cost, state)
        if self.kind == "shift":
            return shift_gradient(layout, theta, cost, state)
        return finite_difference(layout, theta, cost, state, self.eps)
