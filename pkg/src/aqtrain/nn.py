"""Small neural networks as polynomials in their weight variables.

A model is declared layer by layer; each weight or bias entry is either a
named variable or a fixed constant.  For a fixed numeric input the forward
pass is then an exact polynomial in the weight variables — directly for
polynomial activations, and through the majority-indicator expansion for
step activations on 0/1 data.  Summing per-sample polynomials over a
dataset gives the loss as a single :class:`VarPolynomial`, ready to encode
into a diagonal Hamiltonian whose ground state is the trained network.

The numeric forward pass is implemented independently of the symbolic one
(vectorized over weight configurations and inputs), so exhaustive weight
enumeration doubles as the ground-truth oracle for everything the
compilation path produces.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .datasets import Dataset
from .encodings import EncodingTable, report_bitstring
from .pauli import PauliPolynomial
from .state import StateVector
from .varpoly import VarPolynomial

ENUMERATION_QUBIT_CAP = 20

WeightEntry = Union[str, float]

LOSS_KINDS = ("mse", "linear-binary")


# -- activations ---------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    """Pass the pre-activation through unchanged."""

    def polynomial_degree(self, fan_in: int) -> int:
        return 1

    def apply_symbolic(self, contributions, bias, fan_in):
        total = bias
        for piece in contributions:
            total = total + piece
        return total

    def apply_numeric(self, pre, fan_in):
        return pre


@dataclass(frozen=True)
class Square:
    """Element-wise square of the pre-activation."""

    def polynomial_degree(self, fan_in: int) -> int:
        return 2

    def apply_symbolic(self, contributions, bias, fan_in):
        total = bias
        for piece in contributions:
            total = total + piece
        return total * total

    def apply_numeric(self, pre, fan_in):
        return pre**2


@dataclass(frozen=True)
class PolynomialActivation:
    """sum_k c_k * pre**k with coefficients ordered low to high."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("polynomial activation needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    def polynomial_degree(self, fan_in: int) -> int:
        degree = 0
        for k, c in enumerate(self.coefficients):
            if c != 0.0:
                degree = k
        return degree

    def apply_symbolic(self, contributions, bias, fan_in):
        pre = bias
        for piece in contributions:
            pre = pre + piece
        total = VarPolynomial.zero()
        for k, c in enumerate(self.coefficients):
            if c != 0.0:
                total = total + pre**k * c
        return total

    def apply_numeric(self, pre, fan_in):
        return np.polynomial.polynomial.polyval(pre, self.coefficients)


@dataclass(frozen=True)
class StepMajority:
    """1 when at least half of the fan-in contributions are set, else 0.

    Valid only for 0/1-valued weights and inputs; the symbolic form is the
    exact indicator polynomial from :func:`theta_polynomial`, so the bias
    must be zero.
    """

    def polynomial_degree(self, fan_in: int) -> int:
        return fan_in

    def apply_symbolic(self, contributions, bias, fan_in):
        if bias.term_count != 0:
            raise ValueError("step-majority activation requires a zero bias")
        return theta_polynomial(fan_in, contributions)

    def apply_numeric(self, pre, fan_in):
        return np.where(np.asarray(pre) >= 0.5 * fan_in, 1.0, 0.0)


Activation = Union[Identity, Square, PolynomialActivation, StepMajority]


def theta_polynomial(n: int, inputs: Sequence) -> VarPolynomial:
    """Indicator polynomial for "at least half of n binary inputs are set".

    Expands sum_{m=0}^{floor(n/2)} sum_{|S|=m} prod_{j not in S} T_j
    prod_{k in S} (1 - T_k).  On any 0/1 assignment exactly one product
    survives (S = the complement of the set inputs), so the value is 1
    precisely when at least ceil(n/2) inputs are 1.  Inputs may be variable
    names or 0/1-valued polynomials (e.g. weight-times-input products).
    """
    if n < 1:
        raise ValueError("fan-in must be at least 1")
    polys = [VarPolynomial.variable(p) if isinstance(p, str) else p for p in inputs]
    if len(polys) != n:
        raise ValueError(f"expected {n} inputs, got {len(polys)}")
    one = VarPolynomial.constant(1.0)
    total = VarPolynomial.zero()
    for m in range(n // 2 + 1):
        for subset in itertools.combinations(range(n), m):
            term = one
            for j in range(n):
                term = term * ((one - polys[j]) if j in subset else polys[j])
            total = total + term
    return total


# -- model declaration -----------------------------------------------------------


@dataclass(frozen=True)
class LayerSpec:
    """One dense layer: weight rows, biases and the activation.

    Entries are variable names (strings) or fixed numeric constants.
    """

    weights: tuple[tuple[WeightEntry, ...], ...]
    biases: tuple[WeightEntry, ...]
    activation: Activation

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.weights)
        biases = tuple(self.biases)
        if not rows or not rows[0]:
            raise ValueError("layer needs at least one weight row and column")
        if len({len(row) for row in rows}) != 1:
            raise ValueError("weight rows have inconsistent lengths")
        if len(biases) != len(rows):
            raise ValueError("need exactly one bias per output")
        object.__setattr__(self, "weights", rows)
        object.__setattr__(self, "biases", biases)

    @property
    def fan_in(self) -> int:
        return len(self.weights[0])

    @property
    def fan_out(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class ModelSpec:
    """Feed-forward stack of layers with consistent dimensions."""

    input_dim: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("model needs at least one layer")
        width = self.input_dim
        for position, layer in enumerate(layers):
            if layer.fan_in != width:
                raise ValueError(
                    f"layer {position} expects {layer.fan_in} inputs, previous width is {width}"
                )
            width = layer.fan_out
        seen: set[str] = set()
        for name in _entry_names(layers):
            if name in seen:
                raise ValueError(f"variable name {name!r} is reused across the model")
            seen.add(name)
        object.__setattr__(self, "layers", layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].fan_out

    @property
    def variable_names(self) -> list[str]:
        """Variables in first-appearance order (row-major weights, then biases)."""
        return list(_entry_names(self.layers))


def _entry_names(layers):
    for layer in layers:
        for row in layer.weights:
            for entry in row:
                if isinstance(entry, str):
                    yield entry
        for entry in layer.biases:
            if isinstance(entry, str):
                yield entry


def toy_two_layer_model() -> ModelSpec:
    """Two inputs -> two squared units -> linear output with bias -1.

    With +-1 weights this realizes quadric decision boundaries in the
    plane; the output is thresholded at zero for classification.
    """
    first = LayerSpec(
        weights=(("w1_11", "w1_12"), ("w1_21", "w1_22")),
        biases=(0.0, 0.0),
        activation=Square(),
    )
    second = LayerSpec(weights=(("w2_1", "w2_2"),), biases=(-1.0,), activation=Identity())
    return ModelSpec(input_dim=2, layers=(first, second))


def binary_pixel_model() -> ModelSpec:
    """Four binary pixels -> two majority units -> majority output (an OR)."""
    first = LayerSpec(
        weights=(
            ("w1_11", "w1_12", "w1_13", "w1_14"),
            ("w1_21", "w1_22", "w1_23", "w1_24"),
        ),
        biases=(0.0, 0.0),
        activation=StepMajority(),
    )
    second = LayerSpec(weights=(("w2_1", "w2_2"),), biases=(0.0,), activation=StepMajority())
    return ModelSpec(input_dim=4, layers=(first, second))


def model_encoding_table(model: ModelSpec, kind: str) -> EncodingTable:
    """One single-qubit encoding per variable, qubits in declaration order."""
    return EncodingTable.uniform(model.variable_names, kind=kind)


# -- symbolic path ---------------------------------------------------------------


def _entry_poly(entry: WeightEntry) -> VarPolynomial:
    if isinstance(entry, str):
        return VarPolynomial.variable(entry)
    return VarPolynomial.constant(float(entry))


def symbolic_forward(model: ModelSpec, x) -> list[VarPolynomial]:
    """Exact output polynomials in the weight variables for numeric input x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise ValueError(f"input must have shape ({model.input_dim},), got {x.shape}")
    values = [VarPolynomial.constant(float(v)) for v in x]
    for layer in model.layers:
        outputs = []
        for row, bias in zip(layer.weights, layer.biases):
            contributions = [_entry_poly(w) * v for w, v in zip(row, values)]
            outputs.append(
                layer.activation.apply_symbolic(contributions, _entry_poly(bias), layer.fan_in)
            )
        values = outputs
    return values


def build_loss(model: ModelSpec, dataset: Dataset, kind: str) -> VarPolynomial:
    """Dataset loss as one polynomial in the weight variables.

    ``"mse"`` averages squared errors over the samples; ``"linear-binary"``
    sums (-1)**label * Y(x) and requires 0/1 labels (each signal point then
    contributes -1 when predicted 1, each background point +1, so the loss
    counts false positives minus true positives).
    """
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}")
    if model.output_dim != 1:
        raise ValueError("loss construction needs a single-output model")
    if kind == "linear-binary" and not set(np.unique(dataset.labels)) <= {0, 1}:
        raise ValueError("linear-binary loss requires 0/1 labels")
    total = VarPolynomial.zero()
    for features, label in zip(dataset.features, dataset.labels):
        output = symbolic_forward(model, features)[0]
        if kind == "mse":
            residual = output - float(label)
            total = total + residual * residual
        else:
            total = total + output * (-1.0 if label == 1 else 1.0)
    if kind == "mse":
        total = total * (1.0 / len(dataset))
    return total


def compile_hamiltonian(loss: VarPolynomial, table: EncodingTable) -> PauliPolynomial:
    """Encode each weight variable, yielding the diagonal target Hamiltonian."""
    missing = loss.variables - set(table.names)
    if missing:
        raise ValueError(f"no encoding for variables {sorted(missing)}")
    hamiltonian = loss.substitute_encodings(table)
    if not hamiltonian.is_diagonal() or not hamiltonian.is_hermitian():
        raise RuntimeError("compiled loss is not a real diagonal operator")
    return hamiltonian


# -- numeric path -----------------------------------------------------------------


def _forward_tensor(model: ModelSpec, entry_value, features: np.ndarray) -> np.ndarray:
    """Forward pass over (configs, samples); entry_value maps an entry to a
    scalar or a per-config column."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[1] != model.input_dim:
        raise ValueError(f"features must have {model.input_dim} columns")
    n_configs = 1
    for layer in model.layers:
        for entry in itertools.chain(*layer.weights, layer.biases):
            value = entry_value(entry)
            if isinstance(value, np.ndarray):
                n_configs = max(n_configs, value.size)
    # values: (configs, samples, width)
    values = np.broadcast_to(features, (n_configs,) + features.shape).astype(float)
    for layer in model.layers:
        pre = np.zeros((n_configs, features.shape[0], layer.fan_out))
        for i, (row, bias) in enumerate(zip(layer.weights, layer.biases)):
            acc = np.zeros((n_configs, features.shape[0]))
            for j, entry in enumerate(row):
                value = entry_value(entry)
                if isinstance(value, np.ndarray):
                    acc += value[:, None] * values[:, :, j]
                else:
                    acc += value * values[:, :, j]
            bias_value = entry_value(bias)
            if isinstance(bias_value, np.ndarray):
                acc += bias_value[:, None]
            else:
                acc += bias_value
            pre[:, :, i] = acc
        values = layer.activation.apply_numeric(pre, layer.fan_in)
    return values


def forward_batch(model: ModelSpec, weights: Mapping[str, float], features) -> np.ndarray:
    """Numeric outputs for one weight assignment, shape (samples,) for one output."""

    def entry_value(entry):
        if isinstance(entry, str):
            if entry not in weights:
                raise KeyError(f"no value for weight {entry!r}")
            return float(weights[entry])
        return float(entry)

    outputs = _forward_tensor(model, entry_value, features)[0]
    return outputs[:, 0] if model.output_dim == 1 else outputs


def forward_configs(
    model: ModelSpec, columns: Mapping[str, np.ndarray], features
) -> np.ndarray:
    """Numeric outputs for many weight assignments at once.

    ``columns[name][c]`` is the value of a variable in configuration c; the
    result has shape (configs, samples) for a single-output model.
    """

    def entry_value(entry):
        if isinstance(entry, str):
            if entry not in columns:
                raise KeyError(f"no column for weight {entry!r}")
            return np.asarray(columns[entry], dtype=float)
        return float(entry)

    outputs = _forward_tensor(model, entry_value, features)
    return outputs[:, :, 0] if model.output_dim == 1 else outputs


def predict(model: ModelSpec, weights: Mapping[str, float], x) -> float:
    """Scalar network output for one input."""
    return float(forward_batch(model, weights, np.asarray(x, dtype=float)[None, :])[0])


def decision(model: ModelSpec, weights: Mapping[str, float], x, threshold: float = 0.0) -> int:
    """+1/-1 by thresholding the output (binary-output nets predict labels directly)."""
    return 1 if predict(model, weights, x) >= threshold else -1


def _accuracy_matrix(outputs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-config accuracy of an (configs, samples) output matrix."""
    if set(np.unique(labels)) <= {0, 1}:
        correct = outputs == labels
    else:
        correct = (outputs >= 0.0) == (labels > 0)
    return np.mean(correct, axis=-1)


def accuracy(model: ModelSpec, weights: Mapping[str, float], dataset: Dataset) -> float:
    """Fraction of correct predictions; 0/1 labels are matched exactly,
    signed labels through the sign of the output."""
    outputs = forward_batch(model, weights, dataset.features)
    return float(_accuracy_matrix(outputs[None, :], dataset.labels)[0])


def _numeric_loss(outputs: np.ndarray, labels: np.ndarray, kind: str) -> np.ndarray:
    if kind == "mse":
        return np.mean((outputs - labels) ** 2, axis=-1)
    return np.sum(np.where(labels == 1, -1.0, 1.0) * outputs, axis=-1)


# -- exhaustive enumeration ---------------------------------------------------------


@dataclass(frozen=True)
class WeightspaceTable:
    """Loss and accuracies for every basis-state weight configuration.

    Row i corresponds to basis index i of the encoding register; built by
    purely numeric forward passes, independent of the symbolic compiler.
    """

    losses: np.ndarray
    train_accuracy: np.ndarray
    test_accuracy: np.ndarray

    def __len__(self) -> int:
        return int(self.losses.size)

    def optimum_index(self) -> int:
        """Basis index of the lowest loss (ties by lowest index)."""
        return int(np.argmin(self.losses))

    def perfect_fraction(self) -> float:
        """Fraction of configurations that are exact on train and test."""
        return float(np.mean((self.train_accuracy == 1.0) & (self.test_accuracy == 1.0)))


def enumerate_weightspace(
    model: ModelSpec,
    table: EncodingTable,
    train: Dataset,
    test: Dataset,
    loss_kind: str,
) -> WeightspaceTable:
    """Evaluate every weight configuration the register can represent."""
    if loss_kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    if table.total_qubits > ENUMERATION_QUBIT_CAP:
        raise ValueError(
            f"enumeration supports at most {ENUMERATION_QUBIT_CAP} qubits, got {table.total_qubits}"
        )
    columns = table.decode_columns()
    train_out = forward_configs(model, columns, train.features)
    test_out = forward_configs(model, columns, test.features)
    return WeightspaceTable(
        losses=_numeric_loss(train_out, train.labels, loss_kind),
        train_accuracy=_accuracy_matrix(train_out, train.labels),
        test_accuracy=_accuracy_matrix(test_out, test.labels),
    )


# -- degeneracy analysis -------------------------------------------------------------

#: Rounding (decimal places) applied to outputs before grouping, so that
#: configurations are merged exactly when they define the same function on
#: the probe up to float noise.
PREDICTION_DECIMALS = 9


@dataclass(frozen=True)
class DegeneracyClass:
    """Basis states that induce the same prediction function on a probe set."""

    representative_index: int
    bitstring: str
    weights: dict[str, float]
    probability: float
    energy: float
    degeneracy: int
    prediction_hash: str


def grid_probe(side: int = 21, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Regular side x side grid on [low, high]^2, row-major."""
    axis = np.linspace(low, high, side)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def group_degenerate(
    model: ModelSpec,
    table: EncodingTable,
    state: StateVector,
    probe_features,
    hamiltonian: PauliPolynomial,
) -> list[DegeneracyClass]:
    """Group basis states by the prediction function they induce.

    Classes are sorted by total probability (ties by representative index);
    the representative is the lowest basis index in the class and the
    energy is its diagonal Hamiltonian entry.
    """
    n = table.total_qubits
    if n > ENUMERATION_QUBIT_CAP:
        raise ValueError(f"degeneracy grouping supports at most {ENUMERATION_QUBIT_CAP} qubits")
    if state.num_qubits != n:
        raise ValueError("state register does not match the encoding table")
    probs = state.probabilities()
    diag = hamiltonian.diagonal()
    outputs = forward_configs(model, table.decode_columns(), probe_features)
    outputs = outputs.reshape(2**n, -1)
    # +0.0 maps -0.0 to 0.0 so byte-level keys are canonical
    rounded = np.round(outputs, PREDICTION_DECIMALS) + 0.0
    members: dict[bytes, list[int]] = {}
    for index in range(2**n):
        members.setdefault(rounded[index].tobytes(), []).append(index)
    classes = []
    for key, indices in members.items():
        representative = min(indices)
        classes.append(
            DegeneracyClass(
                representative_index=representative,
                bitstring=report_bitstring(representative, n),
                weights=table.decode_index(representative),
                probability=float(sum(probs[i] for i in indices)),
                energy=float(diag[representative]),
                degeneracy=len(indices),
                prediction_hash=hashlib.sha256(key).hexdigest()[:16],
            )
        )
    classes.sort(key=lambda c: (-c.probability, c.representative_index))
    return classes


# -- pools and run statistics ----------------------------------------------------------


def sample_pool(
    state: StateVector, weightspace: WeightspaceTable, shots: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw weight configurations from a final state.

    Returns (basis indices, train accuracies, test accuracies) for ``shots``
    independent measurements.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    probs = state.probabilities()
    if probs.size != len(weightspace):
        raise ValueError("state and enumeration table use different registers")
    rng = np.random.default_rng(seed)
    indices = rng.choice(probs.size, size=shots, p=probs / probs.sum())
    return indices, weightspace.train_accuracy[indices], weightspace.test_accuracy[indices]


def accuracy_vs_runs(
    train_accuracy,
    test_accuracy,
    n_values: Sequence[int],
    repetitions: int,
    seed: int,
) -> np.ndarray:
    """Best-of-n selection curves over a pool of trained weights.

    For each n, draw n pool entries with replacement, keep the one with the
    highest training accuracy (first drawn wins ties), and record its train
    and test accuracy; repeated ``repetitions`` times.  Returns rows
    (n, train_mean, train_std, test_mean, test_std).
    """
    train = np.asarray(train_accuracy, dtype=float)
    test = np.asarray(test_accuracy, dtype=float)
    if train.size == 0 or train.shape != test.shape:
        raise ValueError("pool accuracies must be non-empty and aligned")
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    rng = np.random.default_rng(seed)
    rows = []
    for n in n_values:
        if n < 1:
            raise ValueError("run counts must be positive")
        draws = rng.integers(0, train.size, size=(repetitions, int(n)))
        best = np.argmax(train[draws], axis=1)
        chosen = draws[np.arange(repetitions), best]
        rows.append(
            (
                float(n),
                float(train[chosen].mean()),
                float(train[chosen].std()),
                float(test[chosen].mean()),
                float(test[chosen].std()),
            )
        )
    return np.asarray(rows)


# -- size accounting ---------------------------------------------------------------


@dataclass(frozen=True)
class TermStats:
    """Polynomial sizes of a compiled model against their a-priori bounds."""

    network_term_count: int
    network_degree: int
    hamiltonian_term_count: int
    generic_bound: int
    diagonal_bound: int

    @property
    def within_bounds(self) -> bool:
        return (
            self.network_term_count <= self.generic_bound
            and self.hamiltonian_term_count <= self.diagonal_bound
        )


def term_stats(
    model: ModelSpec, dataset: Dataset, loss_kind: str, table: EncodingTable
) -> TermStats:
    """Measure per-sample network size and Hamiltonian size.

    The per-sample output polynomial stays below M**(d**L) monomials (M the
    widest fan-in, d the largest activation degree, L the layer count); the
    compiled diagonal Hamiltonian stays below one term per Z-pattern,
    2**num_qubits.
    """
    network_terms = 0
    network_degree = 0
    for features in dataset.features:
        output = symbolic_forward(model, features)[0]
        network_terms = max(network_terms, output.term_count)
        network_degree = max(network_degree, output.degree)
    hamiltonian = compile_hamiltonian(build_loss(model, dataset, loss_kind), table)
    fan_in = max(layer.fan_in for layer in model.layers)
    degree = max(layer.activation.polynomial_degree(layer.fan_in) for layer in model.layers)
    return TermStats(
        network_term_count=network_terms,
        network_degree=network_degree,
        hamiltonian_term_count=hamiltonian.num_terms,
        generic_bound=fan_in ** (degree ** len(model.layers)),
        diagonal_bound=2**table.total_qubits,
    )
