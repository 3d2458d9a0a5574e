"""Exit criteria, each run at its stated tolerance.

Every test prints one ``criterion N ... PASS|FAIL`` line (visible without
``-s``) before asserting. Run just this file with

    pytest tests/test_acceptance.py -v

or directly with ``python3 tests/test_acceptance.py``.
"""

import csv
import time

import numpy as np
import pytest

from conftest import dense_lie_dim
from sunvqc.ansatz import Family, block_unitary, brickwall_layout, circuit_state, param_count
from sunvqc.cli import run
from sunvqc.data import haar_state
from sunvqc.gradients import exact_gradient, finite_difference, shift_gradient
from sunvqc.linalg import basis_state, partial_trace_keep
from sunvqc.objectives import TrashInfidelity, schmidt_bound
from sunvqc.pauli import lie_closure_dim, su_basis
from sunvqc.training import TrainConfig, bp_scan, ensemble_autoencode, log10_slope, train_classifier

pytestmark = pytest.mark.acceptance

FAMILIES = ("sun", "cartan", "pauli", "he")


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return emit


def he_generators(n):
    words = []
    for q in range(n):
        for c in "XZ":
            words.append("".join(c if i == q else "I" for i in range(n)))
    for q in range(n - 1):
        words.append("".join("Z" if i in (q, q + 1) else "I" for i in range(n)))
    return words


@pytest.mark.slow
def test_criterion_1_gradient_routes_agree(report):
    rng = np.random.default_rng(1)
    cost = TrashInfidelity()
    start = time.perf_counter()
    worst_shift = worst_fd = 0.0
    for fam in FAMILIES:
        layout = brickwall_layout(6, 2, fam, "periodic")
        for _ in range(200):
            theta = rng.uniform(-np.pi, np.pi, layout.n_params)
            psi = haar_state(6, int(rng.integers(1 << 62)))
            exact = exact_gradient(layout, theta, cost, psi)
            worst_shift = max(worst_shift, np.max(np.abs(shift_gradient(layout, theta, cost, psi) - exact)))
            worst_fd = max(worst_fd, np.max(np.abs(finite_difference(layout, theta, cost, psi, 1e-5) - exact)))
    elapsed = time.perf_counter() - start
    ok = worst_shift < 1e-8 and worst_fd < 1e-6 and elapsed < 300
    assert report(1, "gradient correctness", ok,
                  f"max|shift-exact|={worst_shift:.2e}, max|exact-fd|={worst_fd:.2e}, {elapsed:.0f}s")


def test_criterion_2_unitarity_and_norm(report):
    rng = np.random.default_rng(2)
    worst_unitary = 0.0
    for fam in Family:
        for _ in range(1000):
            w = block_unitary(fam, rng.uniform(-2 * np.pi, 2 * np.pi, param_count(fam)))
            worst_unitary = max(worst_unitary, np.linalg.norm(w.conj().T @ w - np.eye(4)))
    worst_norm = 0.0
    for fam in FAMILIES:
        layout = brickwall_layout(6, 2, fam, "periodic")
        for _ in range(50):
            psi = haar_state(6, int(rng.integers(1 << 62)))
            out = circuit_state(layout, rng.uniform(-np.pi, np.pi, layout.n_params), psi)
            worst_norm = max(worst_norm, abs(np.linalg.norm(out) - 1))
    ok = worst_unitary < 1e-10 and worst_norm < 1e-12
    assert report(2, "unitarity and normalisation", ok,
                  f"max||W^dag W - I||_F={worst_unitary:.2e}, max|norm-1|={worst_norm:.2e}")


def test_criterion_3_lie_closure_dimensions(report):
    start = time.perf_counter()
    full = lie_closure_dim(su_basis(2))
    he = {n: (lie_closure_dim(he_generators(n)), dense_lie_dim(he_generators(n))) for n in (2, 3)}
    elapsed = time.perf_counter() - start
    ok = full == 15 and all(a == b == 4**n - 1 for n, (a, b) in he.items()) and elapsed < 60
    assert report(3, "Lie closure dimensions", ok, f"su(4) basis -> {full}, HE n=2,3 -> {he}, {elapsed:.1f}s")


def _autoencode_all(root):
    finals, elapsed = {}, {}
    for fam in FAMILIES:
        out = root / fam
        start = time.perf_counter()
        code = run(["autoencode", "--ansatz", fam, "--qubits", "6", "--iters", "3000", "--eta", "0.02",
                    "--sigma-init", "0.05", "--ensemble", "5", "--seed", "1", "--gradient", "exact",
                    "--out", str(out)])
        elapsed[fam] = time.perf_counter() - start
        assert code == 0
        with open(out / "curve.csv", newline="") as fh:
            finals[fam] = float(list(csv.reader(fh))[-1][1])
    return finals, sum(elapsed.values())


@pytest.fixture(scope="module")
def autoencoder_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("criterion4")
    finals, elapsed = _autoencode_all(root)
    return root, finals, elapsed


@pytest.mark.slow
def test_criterion_4_autoencoder_ordering(report, autoencoder_runs):
    _, finals, elapsed = autoencoder_runs
    ordered = finals["sun"] < finals["cartan"] < finals["pauli"] < finals["he"]
    ratio = finals["he"] / finals["sun"]
    ok = ordered and ratio >= 10 and elapsed < 1200
    detail = ", ".join(f"{k}={v:.4g}" for k, v in finals.items())
    assert report(4, "autoencoder ordering", ok, f"{detail}, he/sun={ratio:.1f}, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_5_threshold_run(report):
    start = time.perf_counter()
    stats = ensemble_autoencode(TrainConfig(ansatz="sun", input="weak:0.01", iters=5000))
    elapsed = time.perf_counter() - start
    ok = stats.final_mean <= 2e-2 and elapsed < 600
    assert report(5, "weak-entanglement threshold", ok,
                  f"mean L={stats.final_mean:.4g}, bound={stats.schmidt_bound:.4g}, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_6_classifier(report):
    start = time.perf_counter()
    medians = {}
    for fam in ("sun", "he"):
        accs = [train_classifier(TrainConfig(ansatz=fam, qubits=4, reps=2, iters=500, eta=0.05, noise=0.1,
                                             seed=s)).test_accuracy[-1] for s in range(1, 6)]
        medians[fam] = float(np.median(accs))
    elapsed = time.perf_counter() - start
    ok = medians["sun"] >= 0.95 and medians["sun"] >= medians["he"] - 0.01 and elapsed < 900
    assert report(6, "two-moons classifier", ok,
                  f"median test acc sun={medians['sun']:.3f}, he={medians['he']:.3f}, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_7_barren_plateau_slopes(report):
    start = time.perf_counter()
    rows = bp_scan(TrainConfig(bp_qubits="4,6,8,10", samples=200, input="product"))
    elapsed = time.perf_counter() - start
    he, sun = log10_slope(rows, "he"), log10_slope(rows, "sun")
    ok = he <= -0.35 and sun >= -0.15 and he < sun and abs(he) >= 2 * abs(sun) and elapsed < 900
    assert report(7, "barren-plateau slopes", ok, f"he={he:.3f}/qubit, sun={sun:.3f}/qubit, {elapsed:.0f}s")


def test_criterion_8_schmidt_bound(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(500):
        z = rng.normal(size=64) + 1j * rng.normal(size=64)
        psi = z / np.linalg.norm(z)
        lam = np.linalg.eigvalsh(partial_trace_keep(psi, [0, 1, 2]))[-1]
        worst = max(worst, abs(schmidt_bound(psi) - (1 - lam)))
    ghz = schmidt_bound((basis_state(6, 0) + basis_state(6, 63)) / np.sqrt(2))
    maximal = schmidt_bound(sum(np.kron(basis_state(3, j), basis_state(3, j)) for j in range(8)) / np.sqrt(8))
    ok = worst < 1e-10 and ghz == 0.5 and maximal == 0.875
    assert report(8, "Schmidt bound", ok, f"max deviation={worst:.2e}, GHZ={ghz!r}, maximal={maximal!r}")


@pytest.mark.slow
def test_criterion_9_reproducible_csvs(report, autoencoder_runs, tmp_path):
    first, _, _ = autoencoder_runs
    _autoencode_all(tmp_path)
    names = sorted(p.relative_to(first) for p in first.rglob("*.csv"))
    mismatched = [str(n) for n in names if (first / n).read_bytes() != (tmp_path / n).read_bytes()]
    ok = bool(names) and not mismatched
    assert report(9, "byte-identical reruns", ok, f"{len(names)} CSVs compared, mismatched={mismatched}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
