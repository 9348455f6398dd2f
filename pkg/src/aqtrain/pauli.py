"""Algebra of complex-weighted sums of Pauli strings on a fixed register.

A *Pauli string* is a tensor product of single-qubit operators drawn from
``{I, X, Y, Z}`` together with a complex coefficient; a *Pauli polynomial*
is a sum of such strings over a register of ``num_qubits`` qubits.

Sign conventions (fixed package-wide):

* ``Z|0> = +|0>`` and ``Z|1> = -|1>``, so the projector ``(I + Z)/2``
  has eigenvalue 1 on ``|0>``.
* In matrices, qubit 0 labels the least significant bit of the basis
  index (see :mod:`aqtrain.state`).
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

import numpy as np

from .state import StateVector

AXES = "IXYZ"

#: coefficients with magnitude below this are dropped during canonicalization
DROP_TOLERANCE = 1e-12

#: hard cap on dense-matrix rendering; 2**12 x 2**12 complex = 256 MiB
MATRIX_QUBIT_CAP = 12

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-qubit products: (left, right) -> (axis, phase)
_SINGLE_PRODUCT = {}
for _a in AXES:
    _SINGLE_PRODUCT[("I", _a)] = (_a, 1)
    _SINGLE_PRODUCT[(_a, "I")] = (_a, 1)
    _SINGLE_PRODUCT[(_a, _a)] = ("I", 1)
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _SINGLE_PRODUCT[(_a, _b)] = (_c, 1j)
    _SINGLE_PRODUCT[(_b, _a)] = (_c, -1j)


def _canonical_factors(factors) -> tuple[tuple[int, str], ...]:
    """Sort factor list by qubit, validate axes, drop identities."""
    if isinstance(factors, Mapping):
        factors = factors.items()
    cleaned = []
    seen = set()
    for qubit, axis in factors:
        qubit = int(qubit)
        if axis == "I":
            continue
        if axis not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli axis {axis!r}")
        if qubit < 0:
            raise ValueError("qubit indices must be non-negative")
        if qubit in seen:
            raise ValueError(f"duplicate qubit {qubit} in Pauli string")
        seen.add(qubit)
        cleaned.append((qubit, axis))
    return tuple(sorted(cleaned))


class PauliString:
    """A single Pauli string ``coefficient * P_{q1} P_{q2} ...``.

    ``factors`` maps qubit index to one of ``"X"``, ``"Y"``, ``"Z"``;
    identity factors are left implicit.
    """

    __slots__ = ("coefficient", "factors")

    def __init__(self, coefficient: complex, factors=()):
        self.coefficient = complex(coefficient)
        self.factors = _canonical_factors(factors)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        left = dict(self.factors)
        coeff = self.coefficient * other.coefficient
        for qubit, axis in other.factors:
            if qubit in left:
                new_axis, phase = _SINGLE_PRODUCT[(left[qubit], axis)]
                coeff *= phase
                if new_axis == "I":
                    del left[qubit]
                else:
                    left[qubit] = new_axis
            else:
                left[qubit] = axis
        return PauliString(coeff, left)

    def max_qubit(self) -> int:
        return self.factors[-1][0] if self.factors else -1

    def to_matrix(self, num_qubits: int) -> np.ndarray:
        """Dense matrix on ``num_qubits`` qubits (qubit 0 = least significant)."""
        if self.max_qubit() >= num_qubits:
            raise ValueError("string acts outside the register")
        _check_matrix_cap(num_qubits)
        axes = {q: a for q, a in self.factors}
        out = np.array([[self.coefficient]])
        # qubit 0 is least significant, so it sits rightmost in the kron chain
        for q in range(num_qubits - 1, -1, -1):
            out = np.kron(out, _MATRICES[axes.get(q, "I")])
        return out

    def __eq__(self, other):
        return (
            isinstance(other, PauliString)
            and self.coefficient == other.coefficient
            and self.factors == other.factors
        )

    def __repr__(self):
        if not self.factors:
            return f"PauliString({self.coefficient})"
        ops = "*".join(f"{a}{q}" for q, a in self.factors)
        return f"PauliString({self.coefficient}, {ops})"


def _check_matrix_cap(num_qubits: int, cap: int = MATRIX_QUBIT_CAP):
    if num_qubits > cap:
        raise ValueError(
            f"dense matrix for {num_qubits} qubits exceeds the {cap}-qubit cap"
        )


class PauliPolynomial:
    """Canonical sum of Pauli strings over a fixed register.

    Terms are kept in a dict keyed by the canonical factor tuple; terms
    whose coefficient magnitude drops below :data:`DROP_TOLERANCE` are
    removed.  Iteration and serialization order is lexicographic in the
    ``(qubit, axis)`` pattern.
    """

    __slots__ = ("num_qubits", "_terms")

    def __init__(self, num_qubits: int, terms=None):
        if num_qubits < 1:
            raise ValueError("register needs at least one qubit")
        self.num_qubits = int(num_qubits)
        self._terms: dict[tuple[tuple[int, str], ...], complex] = {}
        if terms is None:
            return
        if isinstance(terms, Mapping):
            items = ((k, v) for k, v in terms.items())
            for pattern, coeff in items:
                self._accumulate(_canonical_factors(pattern), complex(coeff))
        else:
            for term in terms:
                self._accumulate_string(term)
        self._prune()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, num_qubits: int) -> "PauliPolynomial":
        return cls(num_qubits)

    @classmethod
    def identity(cls, num_qubits: int, coefficient: complex = 1.0) -> "PauliPolynomial":
        poly = cls(num_qubits)
        poly._accumulate((), complex(coefficient))
        poly._prune()
        return poly

    @classmethod
    def from_strings(cls, num_qubits: int, strings: Iterable[PauliString]) -> "PauliPolynomial":
        return cls(num_qubits, strings)

    def _accumulate_string(self, term: PauliString):
        if term.max_qubit() >= self.num_qubits:
            raise ValueError("term acts outside the register")
        self._accumulate(term.factors, term.coefficient)

    def _accumulate(self, pattern, coeff: complex):
        self._terms[pattern] = self._terms.get(pattern, 0.0) + coeff

    def _prune(self):
        dead = [k for k, v in self._terms.items() if abs(v) < DROP_TOLERANCE]
        for k in dead:
            del self._terms[k]

    # -- views ----------------------------------------------------------------

    def terms(self) -> list[PauliString]:
        """Terms as PauliStrings in canonical (lexicographic) order."""
        return [PauliString(c, p) for p, c in sorted(self._terms.items())]

    @property
    def num_terms(self) -> int:
        return len(self._terms)

    def coefficient(self, pattern) -> complex:
        return self._terms.get(_canonical_factors(pattern), 0.0)

    def is_diagonal(self) -> bool:
        return all(all(a == "Z" for _, a in p) for p in self._terms)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    # -- arithmetic -----------------------------------------------------------

    def _require_same_register(self, other: "PauliPolynomial"):
        if self.num_qubits != other.num_qubits:
            raise ValueError("polynomials act on different registers")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliPolynomial.identity(self.num_qubits, other)
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        self._require_same_register(other)
        out = PauliPolynomial(self.num_qubits)
        out._terms = dict(self._terms)
        for pattern, coeff in other._terms.items():
            out._accumulate(pattern, coeff)
        out._prune()
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliPolynomial.identity(self.num_qubits, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            out = PauliPolynomial(self.num_qubits)
            out._terms = {p: c * other for p, c in self._terms.items()}
            out._prune()
            return out
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        self._require_same_register(other)
        out = PauliPolynomial(self.num_qubits)
        for pa, ca in self._terms.items():
            left = PauliString(ca, pa)
            for pb, cb in other._terms.items():
                prod = left * PauliString(cb, pb)
                out._accumulate(prod.factors, prod.coefficient)
        out._prune()
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        return self.num_qubits == other.num_qubits and self._terms == other._terms

    def allclose(self, other: "PauliPolynomial", tol: float = 1e-9) -> bool:
        if self.num_qubits != other.num_qubits:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= tol for k in keys
        )

    def __repr__(self):
        if not self._terms:
            return f"PauliPolynomial({self.num_qubits}, 0)"
        parts = []
        for pattern, coeff in sorted(self._terms.items()):
            ops = "*".join(f"{a}{q}" for q, a in pattern) or "1"
            parts.append(f"({coeff})*{ops}")
        return f"PauliPolynomial({self.num_qubits}, {' + '.join(parts)})"

    # -- numeric rendering ------------------------------------------------------

    def to_matrix(self, cap: int = MATRIX_QUBIT_CAP) -> np.ndarray:
        """Dense matrix of the polynomial (qubit 0 = least significant bit)."""
        _check_matrix_cap(self.num_qubits, cap)
        dim = 2**self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for pattern, coeff in self._terms.items():
            out += PauliString(coeff, pattern).to_matrix(self.num_qubits)
        return out

    def diagonal(self) -> np.ndarray:
        """Diagonal of an I/Z-only polynomial as a real vector.

        Each Z-string contributes ``coeff * (-1)**parity(index & zmask)``;
        a single vectorized pass per term.
        """
        if not self.is_diagonal():
            raise ValueError("polynomial has X/Y factors and is not diagonal")
        dim = 2**self.num_qubits
        indices = np.arange(dim, dtype=np.uint64)
        diag = np.zeros(dim, dtype=complex)
        for pattern, coeff in self._terms.items():
            zmask = 0
            for qubit, _ in pattern:
                zmask |= 1 << qubit
            signs = 1.0 - 2.0 * _parity(indices & np.uint64(zmask))
            diag += coeff * signs
        residual = np.max(np.abs(diag.imag)) if dim else 0.0
        if residual > 1e-9:
            raise ValueError("diagonal polynomial has non-real spectrum")
        return diag.real

    def apply(self, state: StateVector) -> np.ndarray:
        """Amplitudes of (polynomial @ state); the result is not normalized."""
        if state.num_qubits != self.num_qubits:
            raise ValueError("state register size does not match polynomial")
        return self.apply_array(state.amplitudes)

    def apply_array(self, amplitudes: np.ndarray) -> np.ndarray:
        """Like :meth:`apply` but on a raw (not necessarily normalized) array."""
        dim = 2**self.num_qubits
        if amplitudes.shape != (dim,):
            raise ValueError("amplitude array does not match the register")
        indices = np.arange(dim, dtype=np.uint64)
        out = np.zeros(dim, dtype=complex)
        for pattern, coeff in self._terms.items():
            xmask = 0
            phase_mask = 0  # qubits whose bit flips the sign (Z and Y factors)
            n_y = 0
            for qubit, axis in pattern:
                if axis in ("X", "Y"):
                    xmask |= 1 << qubit
                if axis in ("Z", "Y"):
                    phase_mask |= 1 << qubit
                if axis == "Y":
                    n_y += 1
            # P|b> = i**n_y * (-1)**parity(b & phase_mask) |b ^ xmask>
            source = indices ^ np.uint64(xmask)
            signs = 1.0 - 2.0 * _parity(source & np.uint64(phase_mask))
            out += coeff * (1j**n_y) * signs * amplitudes[source]
        return out

    def expectation(self, state: StateVector) -> float:
        """<s|P|s>; the imaginary residual of a Hermitian polynomial is < 1e-9."""
        value = complex(np.vdot(state.amplitudes, self.apply(state)))
        return value.real

    # -- serialization ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "terms": [
                {
                    "ops": [[q, a] for q, a in pattern],
                    "re": coeff.real,
                    "im": coeff.imag,
                }
                for pattern, coeff in sorted(self._terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PauliPolynomial":
        poly = cls(int(payload["num_qubits"]))
        for term in payload["terms"]:
            pattern = _canonical_factors([(q, a) for q, a in term["ops"]])
            poly._accumulate(pattern, complex(term["re"], term["im"]))
        poly._prune()
        return poly

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "PauliPolynomial":
        return cls.from_json_dict(json.loads(text))


def _parity(values: np.ndarray) -> np.ndarray:
    """Bit parity of each entry of an unsigned integer array."""
    return (np.bitwise_count(values) & np.uint64(1)).astype(float)


# -- convenience constructors --------------------------------------------------


def single_pauli(num_qubits: int, qubit: int, axis: str, coefficient: complex = 1.0) -> PauliPolynomial:
    return PauliPolynomial(num_qubits, [PauliString(coefficient, [(qubit, axis)])])


def pauli_x(num_qubits: int, qubit: int) -> PauliPolynomial:
    return single_pauli(num_qubits, qubit, "X")


def pauli_y(num_qubits: int, qubit: int) -> PauliPolynomial:
    return single_pauli(num_qubits, qubit, "Y")


def pauli_z(num_qubits: int, qubit: int) -> PauliPolynomial:
    return single_pauli(num_qubits, qubit, "Z")


def binary_projector(num_qubits: int, qubit: int, sign: int = +1) -> PauliPolynomial:
    """Projector ``(I + sign*Z_qubit) / 2``.

    With ``sign=+1`` this projects onto ``|0>`` (eigenvalue 1 on ``|0>``);
    with ``sign=-1`` onto ``|1>``.  The two projectors are idempotent,
    mutually annihilating, and sum to the identity.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    half = PauliPolynomial.identity(num_qubits, 0.5)
    return half + single_pauli(num_qubits, qubit, "Z", 0.5 * sign)


def decompose_matrix(matrix: np.ndarray, hermitian_tol: float = 1e-9) -> PauliPolynomial:
    """Expand a Hermitian matrix in the Pauli-string basis.

    The coefficient of each string ``P`` equals ``trace(P @ H) / 2**n``.
    Implemented as a change of basis applied qubit-by-qubit, so the cost is
    ``O(n * 4**n)`` rather than ``O(16**n)`` of the naive trace loop.
    """
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape != (dim, dim) or dim & (dim - 1) or dim < 2:
        raise ValueError("matrix must be square with power-of-two dimension")
    if np.max(np.abs(matrix - matrix.conj().T)) > hermitian_tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    num_qubits = dim.bit_length() - 1
    _check_matrix_cap(num_qubits)

    # basis[a, i, j] = P_a[j, i] so that contracting against H[i, j] yields traces
    basis = np.stack([_MATRICES[a].T for a in AXES])

    # reshape H into (i_{n-1}, ..., i_0, j_{n-1}, ..., j_0) and fold each
    # (i_q, j_q) pair into an axis-index a_q, highest qubit first
    tensor = matrix.reshape((2,) * (2 * num_qubits))
    for q in range(num_qubits):
        # axes 0 and num_qubits - q hold the next (i, j) pair to fold
        tensor = np.tensordot(basis, tensor, axes=[[1, 2], [0, num_qubits - q]])
        tensor = np.moveaxis(tensor, 0, -1)
    # tensor axes are now (a_{n-1}, ..., a_0); ravel makes a_0 fastest-varying
    tensor = tensor / dim

    poly = PauliPolynomial(num_qubits)
    for flat, coeff in enumerate(np.ravel(tensor, order="C")):
        if abs(coeff) < DROP_TOLERANCE:
            continue
        pattern = []
        rest = flat
        for q in range(num_qubits):
            rest, a = divmod(rest, 4)
            if a:
                pattern.append((q, AXES[a]))
        poly._accumulate(tuple(pattern), complex(coeff))
    poly._prune()
    return poly
