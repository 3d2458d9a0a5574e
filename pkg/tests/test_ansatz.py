import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import logm

from conftest import PAULI, dense_2q, dense_pauli, expi, random_state, random_unitary
from sunvqc.ansatz import (
    CNOT,
    CircuitLayout,
    Family,
    block_local_layout,
    block_unitary,
    block_unitary_and_derivatives,
    brickwall_layout,
    circuit_param_count,
    circuit_state,
    family,
    param_count,
)
from sunvqc.linalg import ValidationError, unitarity_error
from sunvqc.pauli import hs_coefficients, su_basis

WORDS = su_basis(2)
FAMILIES = ["sun", "cartan", "pauli", "he"]


def rot(letter, t):
    return expi(t / 2 * PAULI[letter])


def euler(a, b, c):
    return rot("Z", a) @ rot("Y", b) @ rot("Z", c)


def oracle_block(fam, p):
    """Each family written out with scipy.linalg.expm and np.kron."""
    if fam == "sun":
        return expi(sum(t * dense_pauli(w) for t, w in zip(p, WORDS)))
    if fam == "pauli":
        out = np.eye(4)
        for t, w in zip(p, WORDS):
            out = out @ expi(t * dense_pauli(w))
        return out
    if fam == "he":
        return CNOT @ np.kron(euler(*p[0:3]), euler(*p[3:6]))
    k2 = np.kron(euler(*p[0:3]), euler(*p[3:6]))
    core = expi(p[6] * dense_pauli("XX") + p[7] * dense_pauli("YY") + p[8] * dense_pauli("ZZ"))
    k1 = np.kron(euler(*p[9:12]), euler(*p[12:15]))
    return k1 @ core @ k2


def realign(u):
    """Rank of the realigned matrix is the operator-Schmidt rank of a 4x4 gate."""
    return u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


@pytest.mark.parametrize("fam", FAMILIES)
def test_blocks_match_oracle(rng, fam):
    for _ in range(20):
        p = rng.uniform(-np.pi, np.pi, param_count(fam))
        assert np.max(np.abs(block_unitary(fam, p) - oracle_block(fam, p))) < 1e-12


def test_param_counts():
    assert [param_count(f) for f in FAMILIES] == [15, 15, 15, 6]
    with pytest.raises(ValidationError):
        family("qaoa")


@pytest.mark.parametrize("fam", FAMILIES)
def test_zero_parameters(fam):
    w = block_unitary(fam, np.zeros(param_count(fam)))
    expected = CNOT if fam == "he" else np.eye(4)
    assert np.allclose(w, expected, atol=1e-15)


def test_pauli_product_single_zz():
    p = np.zeros(15)
    p[WORDS.index("ZZ")] = np.pi / 2
    assert np.allclose(block_unitary("pauli", p), np.diag([1j, -1j, -1j, 1j]), atol=1e-15)


def test_wrong_slice_length():
    with pytest.raises(ValidationError):
        block_unitary("sun", np.zeros(14))
    with pytest.raises(ValidationError):
        block_unitary("he", np.zeros(15))


def test_cartan_without_entangler_is_local(rng):
    p = rng.uniform(-np.pi, np.pi, 15)
    p[6:9] = 0
    assert np.linalg.matrix_rank(realign(block_unitary("cartan", p)), tol=1e-10) == 1
    p[6:9] = [0.3, 0.2, 0.1]
    assert np.linalg.matrix_rank(realign(block_unitary("cartan", p)), tol=1e-10) > 1


@pytest.mark.parametrize("fam", ["sun", "cartan", "pauli"])
def test_random_blocks_entangle(rng, fam):
    for _ in range(10):
        w = block_unitary(fam, rng.uniform(-np.pi, np.pi, 15))
        product = np.kron(random_state(1, rng), random_state(1, rng))
        s = np.linalg.svd((w @ product).reshape(2, 2), compute_uv=False)
        assert s[1] > 1e-6


@settings(max_examples=50, deadline=None)
@given(fam=st.sampled_from(FAMILIES), seed=st.integers(0, 2**32 - 1))
def test_blocks_unitary(fam, seed):
    p = np.random.default_rng(seed).normal(scale=3.0, size=param_count(fam))
    assert unitarity_error(block_unitary(fam, p)) < 1e-10


@pytest.mark.parametrize("fam", FAMILIES)
def test_derivatives_match_finite_difference(rng, fam):
    p = rng.uniform(-np.pi, np.pi, param_count(fam))
    _, dw = block_unitary_and_derivatives(fam, p)
    eps = 1e-6
    for j in range(p.size):
        e = np.zeros_like(p)
        e[j] = eps
        fd = (oracle_block(fam, p + e) - oracle_block(fam, p - e)) / (2 * eps)
        assert np.max(np.abs(dw[j] - fd)) < 1e-8


def test_batched_params_match_single(rng):
    for fam in FAMILIES:
        ps = rng.normal(size=(3, 2, param_count(fam)))
        ws = block_unitary(fam, ps)
        assert ws.shape == (3, 2, 4, 4)
        assert np.allclose(ws[2, 1], block_unitary(fam, ps[2, 1]), atol=1e-14)


def test_brickwall_examples():
    periodic = brickwall_layout(6, 2, "sun", "periodic")
    assert len(periodic) == 12 and circuit_param_count(periodic) == 180
    assert periodic.pairs[:6] == ((0, 1), (2, 3), (4, 5), (1, 2), (3, 4), (5, 0))
    assert brickwall_layout(4, 1, "sun", "open").pairs == ((0, 1), (2, 3), (1, 2))
    assert len(brickwall_layout(6, 1, "sun", "open")) == 5
    with pytest.raises(ValidationError):
        brickwall_layout(5, 1, "sun")
    with pytest.raises(ValidationError):
        brickwall_layout(4, 0, "sun")


def test_param_counts_of_layouts():
    assert circuit_param_count(CircuitLayout(4, (), ())) == 0
    he = brickwall_layout(6, 1, "he", "open")
    assert len(he) == 5 and circuit_param_count(he) == 30


def test_slices_contiguous_and_disjoint():
    layout = CircuitLayout(4, ((0, 1), (1, 2), (2, 3)), (Family.HE, Family.SUN, Family.CARTAN))
    slices = [layout.param_slice(b) for b in range(3)]
    assert [(s.start, s.stop) for s in slices] == [(0, 6), (6, 21), (21, 36)]
    assert layout.locate(0) == (0, 0) and layout.locate(6) == (1, 0) and layout.locate(35) == (2, 14)
    with pytest.raises(ValidationError):
        layout.locate(36)
    with pytest.raises(ValidationError):
        CircuitLayout(3, ((0, 3),), (Family.SUN,))


def test_block_local_layout_pairs():
    layout = block_local_layout(6, 2, "sun")
    assert layout.pairs == ((0, 1), (2, 3), (4, 5)) * 2


def test_zero_theta_sun_circuit_is_identity(rng):
    layout = brickwall_layout(6, 2, "sun", "periodic")
    psi = random_state(6, rng)
    assert np.allclose(circuit_state(layout, np.zeros(180), psi), psi, atol=1e-14)


def test_single_block_circuit(rng):
    layout = CircuitLayout(3, ((2, 0),), (Family.CARTAN,))
    theta = rng.normal(size=15)
    psi = random_state(3, rng)
    expected = dense_2q(oracle_block("cartan", theta), (2, 0), 3) @ psi
    assert np.allclose(circuit_state(layout, theta, psi), expected, atol=1e-13)


@pytest.mark.parametrize("fam", FAMILIES)
def test_circuit_matches_dense_product(rng, fam):
    layout = brickwall_layout(6, 2, fam, "periodic")
    theta = rng.uniform(-np.pi, np.pi, layout.n_params)
    dense = np.eye(64)
    for b, pair in enumerate(layout.pairs):
        dense = dense_2q(oracle_block(fam, theta[layout.param_slice(b)]), pair, 6) @ dense
    psi = random_state(6, rng)
    out = circuit_state(layout, theta, psi)
    assert np.max(np.abs(out - dense @ psi)) < 1e-12
    assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_circuit_errors(rng):
    layout = brickwall_layout(4, 1, "sun")
    with pytest.raises(ValidationError):
        circuit_state(layout, np.zeros(44), random_state(4, rng))
    with pytest.raises(ValidationError):
        circuit_state(layout, np.zeros(45), random_state(3, rng))


@pytest.mark.slow
def test_sun_block_reaches_haar_targets():
    """Every SU(4) element is a single SUN exponential: take the principal
    logarithm of a Haar target, read off coordinates, rebuild, and compare up
    to a global phase."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        v = random_unitary(4, rng)
        h = -1j * logm(v)
        theta = hs_coefficients(0.5 * (h + h.conj().T), 2)
        w = block_unitary("sun", theta)
        overlap = np.trace(v.conj().T @ w)
        phase = overlap / abs(overlap)
        worst = max(worst, np.linalg.norm(w - v * phase))
    assert worst < 1e-6
