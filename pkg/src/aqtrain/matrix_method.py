"""One-dimensional quantum mechanics on the unit interval in a momentum basis.

A particle of mass ``m`` lives on ``w in [0, 1)`` with periodic boundary
conditions and plane-wave basis ``<w|n> = exp(2*pi*i*n*w)``.  With modes
truncated to ``n in [-2**(N-1), 2**(N-1) - 1]`` the Hamiltonian

    H[n, l] = (2*pi*n)**2 / (2m) * delta(n, l) + Vhat(n - l),
    Vhat(k) = integral_0^1 V(w) exp(-2*pi*i*k*w) dw,

is a dense ``2**N x 2**N`` Hermitian matrix; mode ``n`` sits at matrix
index ``n + 2**(N-1)``.  This gives continuous-valued minima (unlike the
bin-grid encodings of :mod:`aqtrain.encodings`) at the price of dense
matrix arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .varpoly import VarPolynomial

QUBIT_CAP = 12

#: quartic double-well coefficients, constant term tuned so the shallow
#: (false) minimum near w = 0.1848 sits at almost exactly zero
QUARTIC_COEFFS = (0.372573, -5.0, 22.0, -35.0, 18.0)

#: location of the false minimum of the quartic well
QUARTIC_FALSE_MINIMUM = 0.1848

#: location of its global minimum
QUARTIC_TRUE_MINIMUM = 0.8


def adaptive_simpson(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 30,
    min_depth: int = 0,
) -> complex:
    """Adaptive Simpson quadrature for a complex-valued integrand.

    An oscillatory integrand can hit the same phase at every coarse sample
    point and look converged when it is not (e.g. ``exp(-2j*pi*k*w)`` with
    ``k`` a multiple of four evaluates to 1 at all five starting points on
    [0, 1]).  ``min_depth`` forces that many halvings before the error test
    is allowed to stop the recursion.
    """

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        x1 = 0.5 * (x0 + x2)
        left_mid = f(0.5 * (x0 + x1))
        right_mid = f(0.5 * (x1 + x2))
        left = simpson(x0, x1, f0, left_mid, f1)
        right = simpson(x1, x2, f1, right_mid, f2)
        converged = abs(left + right - whole) <= 15.0 * eps
        if depth >= max_depth or (depth >= min_depth and converged):
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, x1, f0, left_mid, f1, left, eps / 2.0, depth + 1) + recurse(
            x1, x2, f1, right_mid, f2, right, eps / 2.0, depth + 1
        )

    mid = 0.5 * (a + b)
    fa, fm, fb = f(a), f(mid), f(b)
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0)


def _monomial_fourier(power: int, k: int) -> complex:
    """integral_0^1 w**p exp(-2*pi*i*k*w) dw for integer k."""
    if k == 0:
        return 1.0 / (power + 1)
    # integration by parts: I_p = -1/(2*pi*i*k) + p/(2*pi*i*k) * I_{p-1}, I_0 = 0
    denom = 2j * math.pi * k
    value = 0.0 + 0.0j
    for p in range(1, power + 1):
        value = (-1.0 + p * value) / denom
    return value


class Potential:
    """A potential on the unit interval with known Fourier coefficients."""

    def value(self, w):
        raise NotImplementedError

    def fourier_coefficient(self, k: int) -> complex:
        raise NotImplementedError

    def __call__(self, w):
        return self.value(w)


class CosinePotential(Potential):
    """V(w) = 1 + cos(4*pi*w): two degenerate minima at w = 1/4 and 3/4."""

    def value(self, w):
        return 1.0 + np.cos(4.0 * math.pi * np.asarray(w, dtype=float))

    def fourier_coefficient(self, k: int) -> complex:
        if k == 0:
            return 1.0
        if abs(k) == 2:
            return 0.5
        return 0.0


class PolynomialPotential(Potential):
    """A polynomial in one named variable, restricted to [0, 1]."""

    def __init__(self, poly: VarPolynomial, variable: str = "w"):
        extra = poly.variables - {variable}
        if extra:
            raise ValueError(f"potential depends on unexpected variables {sorted(extra)}")
        self.poly = poly
        self.variable = variable
        # coefficient list indexed by power
        self._coeffs = np.zeros(poly.degree + 1)
        for key, coeff in poly.items():
            power = key[0][1] if key else 0
            self._coeffs[power] += coeff

    def value(self, w):
        return np.polynomial.polynomial.polyval(np.asarray(w, dtype=float), self._coeffs)

    def fourier_coefficient(self, k: int) -> complex:
        return complex(
            sum(c * _monomial_fourier(p, k) for p, c in enumerate(self._coeffs) if c)
        )


class QuarticPotential(PolynomialPotential):
    """lambda * (18 w^4 - 35 w^3 + 22 w^2 - 5 w + 0.372573).

    A double well with a false minimum near ``w = 0.1848`` (value close to
    zero by construction) and the global minimum at ``w = 0.8``.
    """

    def __init__(self, strength: float = 1.0):
        poly = VarPolynomial({(("w", p),) if p else (): strength * c for p, c in enumerate(QUARTIC_COEFFS)})
        super().__init__(poly, "w")
        self.strength = strength


class TiltedCosinePotential(Potential):
    """Cosine well plus a linear tilt eps*w that breaks the degeneracy."""

    def __init__(self, tilt: float = 0.02):
        self.tilt = tilt
        self._cosine = CosinePotential()

    def value(self, w):
        w = np.asarray(w, dtype=float)
        return self._cosine.value(w) + self.tilt * w

    def fourier_coefficient(self, k: int) -> complex:
        return self._cosine.fourier_coefficient(k) + self.tilt * _monomial_fourier(1, k)


class TabulatedPotential(Potential):
    """Linear interpolation of samples on a uniform grid over [0, 1].

    Fourier coefficients fall back to adaptive Simpson quadrature
    (absolute tolerance 1e-10, maximum depth 30).
    """

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("need at least two samples")
        self.samples = samples
        self._grid = np.linspace(0.0, 1.0, samples.size)

    def value(self, w):
        return np.interp(np.asarray(w, dtype=float), self._grid, self.samples)

    def fourier_coefficient(self, k: int) -> complex:
        # subdivide below the oscillation period before trusting the error test
        depth = max(4, int(abs(k)).bit_length() + 1)
        return adaptive_simpson(
            lambda w: self.value(w) * np.exp(-2j * math.pi * k * w),
            0.0,
            1.0,
            min_depth=depth,
        )


@dataclass(frozen=True)
class MomentumTruncation:
    """Mode range realized by an N-qubit register: n in [-2**(N-1), 2**(N-1)-1]."""

    num_qubits: int

    def __post_init__(self):
        if not 1 <= self.num_qubits <= QUBIT_CAP:
            raise ValueError(f"num_qubits must be in [1, {QUBIT_CAP}]")

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    @property
    def modes(self) -> np.ndarray:
        half = self.dim // 2
        return np.arange(-half, half)

    def index_of(self, mode: int) -> int:
        index = mode + self.dim // 2
        if not 0 <= index < self.dim:
            raise ValueError(f"mode {mode} outside the truncation")
        return index


@dataclass(frozen=True)
class SchrodingerProblem:
    """A massive particle on the unit interval in a truncated momentum basis."""

    potential: Potential
    mass: float
    truncation: MomentumTruncation

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")

    def kinetic_matrix(self) -> np.ndarray:
        """Diagonal kinetic term (2*pi*n)**2 / (2m)."""
        modes = self.truncation.modes
        return np.diag((2.0 * math.pi * modes) ** 2 / (2.0 * self.mass)).astype(complex)

    def potential_matrix(self) -> np.ndarray:
        """Toeplitz matrix Vhat(n - l), assembled Hermitian by construction."""
        dim = self.truncation.dim
        lower = np.array(
            [complex(self.potential.fourier_coefficient(d)) for d in range(dim)]
        )
        distance = np.subtract.outer(np.arange(dim), np.arange(dim))
        return np.where(distance >= 0, lower[abs(distance)], lower[abs(distance)].conj())

    def hamiltonian(self) -> np.ndarray:
        return self.kinetic_matrix() + self.potential_matrix()


def momentum_to_position(amplitudes, grid_points: int = 512):
    """Position-space density of a momentum-basis state.

    Returns ``(w, density)`` on a uniform grid including both endpoints;
    the density is normalized so its trapezoid integral over [0, 1] is 1.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    dim = amplitudes.size
    if dim & (dim - 1):
        raise ValueError("amplitude count must be a power of two")
    half = dim // 2
    modes = np.arange(-half, half)
    w = np.linspace(0.0, 1.0, grid_points)
    waves = np.exp(2j * math.pi * np.outer(w, modes))
    psi = waves @ amplitudes
    density = np.abs(psi) ** 2
    total = np.trapezoid(density, w)
    if total <= 0:
        raise ValueError("state has no support on the grid")
    return w, density / total


#: maximum tolerated relative density of a packet at the midpoint between
#: periodic images (see :func:`gaussian_packet`)
PACKET_OVERLAP_LIMIT = 1e-6


def gaussian_packet(center: float, width: float, truncation: MomentumTruncation) -> np.ndarray:
    """Momentum amplitudes of ``psi(w) ~ exp(-width * (w - center)**2)``.

    ``width`` is the exponent coefficient; use :func:`quartic_sho_width` or
    :func:`cosine_sho_width` for the harmonic ground state of a well.  The
    packet must be narrow enough that its periodic images are negligible:
    the relative density ``exp(-width/2)`` half a period away from the
    center must not exceed ``PACKET_OVERLAP_LIMIT``.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    overlap = math.exp(-width / 2.0)
    if overlap > PACKET_OVERLAP_LIMIT:
        raise ValueError(
            f"packet too wide: periodic-image overlap {overlap:.2e} above {PACKET_OVERLAP_LIMIT}"
        )
    modes = truncation.modes
    # Fourier transform of the narrow Gaussian, extending the range to the line
    amplitudes = np.exp(-2j * math.pi * modes * center) * np.exp(
        -(math.pi**2) * modes**2 / width
    )
    return amplitudes / np.linalg.norm(amplitudes)


def quartic_sho_width(strength: float, mass: float) -> float:
    """Harmonic-approximation packet width sqrt(strength * pi * mass)."""
    return math.sqrt(strength * math.pi * mass)


def cosine_sho_width(mass: float) -> float:
    """Packet width of the harmonic approximation in a cosine minimum."""
    return 2.0 * math.pi * math.sqrt(mass)


def mass_scaling_exponent(masses, peaks) -> float:
    """Least-squares exponent of the model ``peak = mass**alpha``.

    For the cosine well the harmonic approximation predicts a peak density
    of exactly ``m**0.25`` — with both wells normalized to carry half the
    probability the prefactor is 1, so the model deliberately has no free
    prefactor and ``alpha = sum(ln m * ln p) / sum(ln m ** 2)``.  Peaks
    approach the harmonic law from below as the mass grows (anharmonic
    corrections fall off like ``1/sqrt(m)``), so a two-parameter fit over
    small masses would overshoot the asymptotic exponent; anchoring the
    prefactor measures agreement with the harmonic form itself.
    """
    masses = np.asarray(masses, dtype=float)
    peaks = np.asarray(peaks, dtype=float)
    if masses.shape != peaks.shape or masses.size < 2:
        raise ValueError("need matching mass/peak arrays with at least two points")
    if np.any(masses <= 0) or np.any(peaks <= 0):
        raise ValueError("masses and peaks must be positive")
    log_m = np.log(masses)
    log_p = np.log(peaks)
    return float(np.dot(log_m, log_p) / np.dot(log_m, log_m))


def ground_state(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a Hermitian matrix.

    The eigenvector phase is fixed so its largest-magnitude component is
    real and positive.
    """
    matrix = np.asarray(matrix)
    if np.max(np.abs(matrix - matrix.conj().T)) > 1e-9:
        raise ValueError("matrix is not Hermitian")
    energies, vectors = np.linalg.eigh(matrix)
    vec = vectors[:, 0]
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    return float(energies[0]), vec / phase
