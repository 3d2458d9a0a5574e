"""Gradient-descent training and the three experiment drivers."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .ansatz import CircuitLayout, Family, block_local_layout, brickwall_layout, circuit_state, family
from .data import (
    STREAM_INIT,
    STREAM_INPUT,
    STREAM_SAMPLE,
    STREAM_TEST,
    STREAM_TRAIN,
    Rng,
    angle_encode,
    fit_minmax,
    haar_state,
    minmax_scale,
    random_product_state,
    two_moons,
    weak_entangled_state,
)
from .gradients import GradientMethod
from .linalg import ValidationError, basis_state
from .objectives import ClassifierLoss, TrashInfidelity, ZExpectation, accuracy, schmidt_bound, z_expectation

log = logging.getLogger(__name__)


class NonFiniteError(FloatingPointError):
    """Loss or gradient became NaN or infinite during training."""


@dataclass
class TrainConfig:
    """Every tunable of the experiment drivers.

    Not every field applies to every driver; see the README for the
    per-command defaults.
    """

    ansatz: str = "sun"
    qubits: int = 6
    reps: int = 2
    boundary: str = "periodic"
    iters: int = 3000
    eta: float = 0.02
    ensemble: int = 5
    seed: int = 1
    gradient: str = "exact"
    input: str = "haar"
    sigma_init: float = 0.05
    log_every: int = 0
    loss: str = "mse"
    n_train: int = 200
    n_test: int = 200
    noise: float = 0.1
    bp_qubits: str = "4,6,8,10"
    samples: int = 200
    trials: int = 50
    generators: str = ""
    threads: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        family(self.ansatz)
        GradientMethod.parse(self.gradient)
        if not self.eta > 0:
            raise ValidationError("eta must be positive")
        if self.iters < 0:
            raise ValidationError("iters must be non-negative")
        if self.reps < 1 or self.qubits < 2 or self.ensemble < 1:
            raise ValidationError("reps, qubits and ensemble must be positive")
        if self.sigma_init < 0 or self.noise < 0:
            raise ValidationError("sigma_init and noise must be non-negative")
        if self.boundary not in ("open", "periodic"):
            raise ValidationError(f"unknown boundary {self.boundary!r}")
        if self.loss not in ("mse", "xent"):
            raise ValidationError(f"unknown loss {self.loss!r}")
        if self.threads < 1 or self.samples < 2 or self.trials < 1:
            raise ValidationError("threads, samples and trials must be positive (samples >= 2)")

    @property
    def grad_method(self) -> GradientMethod:
        return GradientMethod.parse(self.gradient)

    @property
    def log_interval(self) -> int:
        if self.log_every > 0:
            return self.log_every
        return 1 if self.iters <= 5000 else 10


@dataclass
class TrainingTrace:
    """Loss and gradient infinity-norm at iterations ``0..T`` plus the final parameters."""

    loss: np.ndarray
    grad_norm: np.ndarray
    theta: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(len(self.loss))


def gd_minimize(fun, theta0, eta: float, iters: int, callback=None) -> TrainingTrace:
    """Fixed-step gradient descent ``theta <- theta - eta * grad``.

    ``fun(theta)`` returns ``(loss, grad)``. The trace holds ``iters + 1``
    entries: the loss at every iterate including the final one. ``callback``
    is called as ``callback(t, theta)`` before each evaluation.

    Raises
    ------
    NonFiniteError
        When the loss or gradient stops being finite.
    """
    theta = np.array(theta0, dtype=float)
    losses = np.empty(iters + 1)
    norms = np.empty(iters + 1)
    for t in range(iters + 1):
        if callback is not None:
            callback(t, theta)
        loss, grad = fun(theta)
        if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
            raise NonFiniteError(f"non-finite loss or gradient at iteration {t} (loss={loss})")
        losses[t] = loss
        norms[t] = np.max(np.abs(grad)) if grad.size else 0.0
        if t < iters:
            theta = theta - eta * grad
    return TrainingTrace(losses, norms, theta)


def param_init(layout: CircuitLayout, sigma: float, seed: int, stream: int = STREAM_INIT) -> np.ndarray:
    """I.i.d. ``Normal(0, sigma**2)`` parameters."""
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    return sigma * Rng(seed, stream).normal(layout.n_params)


def objective(layout: CircuitLayout, cost, state, method: GradientMethod):
    """``theta -> (loss, grad)`` for a fixed input state."""

    def fun(theta):
        return method.value_and_grad(layout, theta, cost, state)

    return fun


# ---------------------------------------------------------------------------
# autoencoder


def autoencoder_input(spec: str, seed: int) -> np.ndarray:
    """``haar`` or ``weak:<eps>`` six-qubit input."""
    spec = spec.strip().lower()
    if spec == "haar":
        return haar_state(6, seed, STREAM_INPUT)
    if spec.startswith("weak:"):
        return weak_entangled_state(float(spec[5:]), seed, STREAM_INPUT)
    raise ValidationError(f"unknown autoencoder input {spec!r}")


def autoencoder_layout(cfg: TrainConfig) -> CircuitLayout:
    return brickwall_layout(cfg.qubits, cfg.reps, cfg.ansatz, cfg.boundary)


def autoencode_run(cfg: TrainConfig, seed: int) -> TrainingTrace:
    """One ensemble member: fresh input and initialisation from ``seed``."""
    if cfg.qubits != 6:
        raise ValidationError("the autoencoder benchmark uses 6 qubits")
    layout = autoencoder_layout(cfg)
    psi = autoencoder_input(cfg.input, seed)
    theta0 = param_init(layout, cfg.sigma_init, seed)
    trace = gd_minimize(objective(layout, TrashInfidelity(), psi, cfg.grad_method), theta0, cfg.eta, cfg.iters)
    trace.extra["schmidt_bound"] = schmidt_bound(psi)
    trace.extra["seed"] = seed
    return trace


@dataclass
class EnsembleStats:
    mean: np.ndarray
    std: np.ndarray
    runs: list
    schmidt_bound: float

    @property
    def final_mean(self) -> float:
        return float(self.mean[-1])


def _map(fn, args, threads: int):
    if threads <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, *zip(*args)))


def ensemble_autoencode(cfg: TrainConfig) -> EnsembleStats:
    """Train ``cfg.ensemble`` members with seeds ``seed, seed+1, ...`` and aggregate."""
    seeds = [cfg.seed + r for r in range(cfg.ensemble)]
    runs = _map(autoencode_run, [(cfg, s) for s in seeds], cfg.threads)
    runs.sort(key=lambda tr: tr.extra["seed"])
    curves = np.array([tr.loss for tr in runs])
    bound = float(np.mean([tr.extra["schmidt_bound"] for tr in runs]))
    return EnsembleStats(curves.mean(axis=0), curves.std(axis=0), runs, bound)


# ---------------------------------------------------------------------------
# classifier


@dataclass
class ClassifierResult:
    train_accuracy: np.ndarray
    test_accuracy: np.ndarray
    trace: TrainingTrace
    scaling: tuple


def classifier_data(cfg: TrainConfig, raw=None):
    """Encoded train and test sets; scaling bounds come from the training split.

    ``raw`` optionally replaces the two-moons draw with
    ``((X_train, y_train), (X_test, y_test))``.
    """
    if raw is None:
        raw = (two_moons(cfg.n_train, cfg.noise, cfg.seed, STREAM_TRAIN),
               two_moons(cfg.n_test, cfg.noise, cfg.seed, STREAM_TEST))
    (X_train, y_train), (X_test, y_test) = raw
    lo, hi = fit_minmax(X_train)
    encode = lambda X: angle_encode(minmax_scale(X, lo, hi))  # noqa: E731
    return (encode(X_train), y_train), (encode(X_test), y_test), (lo, hi)


def train_classifier(cfg: TrainConfig, raw=None) -> ClassifierResult:
    """Full-batch gradient descent on the encoded two-moons training set
    (or on ``raw``, see :func:`classifier_data`).

    One epoch is one descent step; accuracies are recorded at epochs
    ``0..cfg.iters``.
    """
    if cfg.qubits != 4:
        raise ValidationError("the classifier uses 4 qubits")
    (train_states, y_train), (test_states, y_test), scaling = classifier_data(cfg, raw)
    layout = brickwall_layout(cfg.qubits, cfg.reps, cfg.ansatz, cfg.boundary)
    cost = ClassifierLoss(y_train, cfg.loss)
    train_acc = np.empty(cfg.iters + 1)
    test_acc = np.empty(cfg.iters + 1)

    def record(t, theta):
        train_acc[t] = accuracy(z_expectation(circuit_state(layout, theta, train_states)), y_train)
        test_acc[t] = accuracy(z_expectation(circuit_state(layout, theta, test_states)), y_test)

    theta0 = param_init(layout, cfg.sigma_init, cfg.seed)
    trace = gd_minimize(objective(layout, cost, train_states, cfg.grad_method), theta0, cfg.eta, cfg.iters, record)
    return ClassifierResult(train_acc, test_acc, trace, scaling)


# ---------------------------------------------------------------------------
# gradient-variance scan


def bp_layout(fam, n_qubits: int, reps: int | None = None, boundary: str = "periodic") -> CircuitLayout:
    """Scan layout: block-local for SUN, brick-wall for the rest; ``reps`` defaults to ``n/2``."""
    fam = family(fam)
    reps = n_qubits // 2 if reps is None else reps
    if fam is Family.SUN:
        return block_local_layout(n_qubits, reps, fam)
    return brickwall_layout(n_qubits, reps, fam, boundary)


def bp_input(spec: str, n_qubits: int, seed: int) -> np.ndarray:
    spec = spec.strip().lower()
    if spec == "product":
        return random_product_state(n_qubits, seed, STREAM_SAMPLE)
    if spec == "haar":
        return haar_state(n_qubits, seed, STREAM_SAMPLE)
    if spec == "zero":
        return basis_state(n_qubits, 0)
    raise ValidationError(f"unknown scan input {spec!r}")


def _bp_sample(layout: CircuitLayout, input_spec: str, seed: int, method: GradientMethod) -> float:
    theta = 2 * np.pi * Rng(seed, STREAM_INIT).uniform(layout.n_params)
    psi = bp_input(input_spec, layout.n_qubits, seed)
    return float(method(layout, theta, ZExpectation(0), psi)[0])


def gradient_samples(layout: CircuitLayout, samples: int, seed: int, input_spec: str = "product",
                     method: GradientMethod = GradientMethod(), threads: int = 1) -> np.ndarray:
    """First-parameter derivatives of ``<Z_0>`` at uniform random angles in ``[0, 2 pi)``."""
    args = [(layout, input_spec, seed + s, method) for s in range(samples)]
    return np.array(_map(_bp_sample, args, threads))


@dataclass
class BPRow:
    ansatz: str
    n: int
    variance: float
    samples: int


def bp_scan(cfg: TrainConfig, families=("sun", "he")) -> list[BPRow]:
    """Sample variance of ``d<Z_0>/d theta_1`` for each family and qubit count."""
    qubits = [int(q) for q in str(cfg.bp_qubits).split(",") if q.strip()]
    rows = []
    for fam in families:
        for n in qubits:
            layout = bp_layout(fam, n, boundary=cfg.boundary)
            grads = gradient_samples(layout, cfg.samples, cfg.seed, cfg.input, cfg.grad_method, cfg.threads)
            rows.append(BPRow(family(fam).value, n, float(np.var(grads, ddof=1)), cfg.samples))
            log.info("bp-scan %s n=%d var=%.3e", fam, n, rows[-1].variance)
    return rows


def log10_slope(rows: list[BPRow], ansatz: str) -> float:
    """Least-squares slope of ``log10(variance)`` against ``n``."""
    pts = [(r.n, np.log10(r.variance)) for r in rows if r.ansatz == family(ansatz).value]
    n, v = np.array(pts).T
    return float(np.polyfit(n, v, 1)[0])


def with_overrides(cfg: TrainConfig, **kw) -> TrainConfig:
    return replace(cfg, **kw)
