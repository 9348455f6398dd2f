"""Tests for the momentum-basis treatment of potentials on [0, 1].

Closed-form Fourier coefficients are cross-checked against adaptive
quadrature; spectra against explicitly assembled reference matrices.
"""

import math

import numpy as np
import pytest

from aqtrain.matrix_method import (
    CosinePotential,
    MomentumTruncation,
    PolynomialPotential,
    QUARTIC_FALSE_MINIMUM,
    QuarticPotential,
    SchrodingerProblem,
    TabulatedPotential,
    TiltedCosinePotential,
    adaptive_simpson,
    cosine_sho_width,
    gaussian_packet,
    ground_state,
    mass_scaling_exponent,
    momentum_to_position,
    quartic_sho_width,
)
from aqtrain.varpoly import parse_polynomial


def quadrature_fourier(potential, k):
    return adaptive_simpson(
        lambda w: potential.value(w) * np.exp(-2j * math.pi * k * w),
        0.0,
        1.0,
        min_depth=max(4, int(abs(k)).bit_length() + 1),
    )


class TestFourierCoefficients:
    def test_cosine_closed_form(self):
        v = CosinePotential()
        assert v.fourier_coefficient(0) == pytest.approx(1.0)
        assert v.fourier_coefficient(2) == pytest.approx(0.5)
        assert v.fourier_coefficient(-2) == pytest.approx(0.5)
        for k in (1, -1, 3, 5):
            assert v.fourier_coefficient(k) == 0.0

    @pytest.mark.parametrize("k", [0, 1, -2, 3])
    def test_cosine_against_quadrature(self, k):
        v = CosinePotential()
        assert v.fourier_coefficient(k) == pytest.approx(quadrature_fourier(v, k), abs=1e-9)

    @pytest.mark.parametrize("k", [0, 1, 2, -3, 5])
    def test_quartic_against_quadrature(self, k):
        v = QuarticPotential(strength=1.0)
        assert v.fourier_coefficient(k) == pytest.approx(quadrature_fourier(v, k), abs=1e-9)

    def test_quartic_zero_mode_is_mean(self):
        v = QuarticPotential(strength=1.0)
        expected = 18 / 5 - 35 / 4 + 22 / 3 - 5 / 2 + 0.372573
        assert v.fourier_coefficient(0) == pytest.approx(expected, abs=1e-12)

    def test_tilt_coefficient(self):
        eps = 0.02
        v = TiltedCosinePotential(eps)
        # the linear part contributes eps * i / (2 pi k) for k != 0
        assert v.fourier_coefficient(1) == pytest.approx(1j * eps / (2 * math.pi), abs=1e-12)
        assert v.fourier_coefficient(2) == pytest.approx(0.5 + 1j * eps / (4 * math.pi), abs=1e-12)
        assert v.fourier_coefficient(0) == pytest.approx(1.0 + eps / 2, abs=1e-12)
        assert v.fourier_coefficient(-1) == pytest.approx(
            np.conj(v.fourier_coefficient(1)), abs=1e-12
        )

    def test_polynomial_potential_from_text(self):
        poly = parse_polynomial("2*w^2 - w + 0.25")
        v = PolynomialPotential(poly)
        for k in (0, 1, 4):
            assert v.fourier_coefficient(k) == pytest.approx(quadrature_fourier(v, k), abs=1e-9)

    def test_tabulated_matches_sampled_cosine(self):
        grid = np.linspace(0.0, 1.0, 4001)
        v = TabulatedPotential(1.0 + np.cos(4 * math.pi * grid))
        exact = CosinePotential()
        for k in (0, 1, 2):
            assert v.fourier_coefficient(k) == pytest.approx(
                exact.fourier_coefficient(k), abs=1e-5
            )

    def test_real_potential_coefficients_conjugate(self):
        v = QuarticPotential(3.0)
        for k in (1, 2, 3):
            assert v.fourier_coefficient(-k) == pytest.approx(
                np.conj(v.fourier_coefficient(k)), abs=1e-12
            )


class TestQuarticShape:
    def test_false_minimum_value_is_tuned_to_zero(self):
        v = QuarticPotential(1.0)
        assert abs(v.value(QUARTIC_FALSE_MINIMUM)) < 1e-4

    def test_false_minimum_is_stationary(self):
        v = QuarticPotential(1.0)
        h = 1e-6
        derivative = (v.value(QUARTIC_FALSE_MINIMUM + h) - v.value(QUARTIC_FALSE_MINIMUM - h)) / (2 * h)
        assert abs(derivative) < 1e-2

    def test_global_minimum_is_deeper_and_near_08(self):
        v = QuarticPotential(1.0)
        grid = np.linspace(0.0, 1.0, 100001)
        values = v.value(grid)
        w_star = grid[int(np.argmin(values))]
        assert abs(w_star - 0.809) < 1e-2
        assert v.value(w_star) < v.value(QUARTIC_FALSE_MINIMUM) - 0.05

    def test_strength_scales_linearly(self):
        weak, strong = QuarticPotential(1.0), QuarticPotential(4.0)
        w = np.array([0.1, 0.5, 0.9])
        assert np.allclose(strong.value(w), 4.0 * weak.value(w))


class TestHamiltonianAssembly:
    def test_mode_range_is_asymmetric(self):
        trunc = MomentumTruncation(3)
        assert list(trunc.modes) == [-4, -3, -2, -1, 0, 1, 2, 3]
        assert trunc.index_of(0) == 4
        assert trunc.index_of(-4) == 0
        with pytest.raises(ValueError, match="outside"):
            trunc.index_of(4)

    def test_elements_match_reference(self):
        problem = SchrodingerProblem(CosinePotential(), mass=2.0, truncation=MomentumTruncation(3))
        h = problem.hamiltonian()
        trunc = problem.truncation
        for n in trunc.modes:
            for l in trunc.modes:
                expected = quadrature_fourier(problem.potential, n - l)
                if n == l:
                    expected += (2 * math.pi * n) ** 2 / (2 * problem.mass)
                assert h[trunc.index_of(n), trunc.index_of(l)] == pytest.approx(expected, abs=1e-9)

    def test_hermitian(self):
        problem = SchrodingerProblem(
            TiltedCosinePotential(0.02), mass=10.0, truncation=MomentumTruncation(4)
        )
        h = problem.hamiltonian()
        assert np.max(np.abs(h - h.conj().T)) < 1e-12

    def test_free_particle_spectrum(self):
        problem = SchrodingerProblem(
            TabulatedPotential([0.0, 0.0]), mass=1.0, truncation=MomentumTruncation(3)
        )
        h = problem.hamiltonian()
        kinetic = sorted((2 * math.pi * n) ** 2 / 2.0 for n in problem.truncation.modes)
        assert np.allclose(np.linalg.eigvalsh(h), kinetic, atol=1e-9)
        energy, vec = ground_state(h)
        assert energy == pytest.approx(0.0, abs=1e-9)
        expected = np.zeros(8)
        expected[problem.truncation.index_of(0)] = 1.0
        assert np.allclose(np.abs(vec), expected, atol=1e-9)


class TestGroundState:
    def test_eigenpair_and_phase_convention(self):
        rng = np.random.default_rng(21)
        raw = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        h = raw + raw.conj().T
        energy, vec = ground_state(h)
        assert np.allclose(h @ vec, energy * vec, atol=1e-9)
        pivot = np.argmax(np.abs(vec))
        assert vec[pivot].imag == pytest.approx(0.0, abs=1e-12)
        assert vec[pivot].real > 0

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            ground_state(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_cosine_energy_matches_oscillator_estimate(self):
        # V = 1 + cos(4 pi w) = 8 pi^2 (w - 1/4)^2 + O((w - 1/4)^4) around a
        # minimum, so the zero-point energy is about 2 pi / sqrt(m)
        mass = 1600.0
        problem = SchrodingerProblem(CosinePotential(), mass, MomentumTruncation(6))
        energy, _ = ground_state(problem.hamiltonian())
        estimate = 2 * math.pi / math.sqrt(mass)
        assert abs(energy - estimate) / estimate < 0.05

    def test_cosine_density_has_two_equal_peaks(self):
        problem = SchrodingerProblem(CosinePotential(), 100.0, MomentumTruncation(5))
        _, vec = ground_state(problem.hamiltonian())
        w, density = momentum_to_position(vec)
        interior = density[1:-1]
        peaks = np.nonzero((interior > density[:-2]) & (interior > density[2:]))[0] + 1
        assert len(peaks) == 2
        assert w[peaks[0]] == pytest.approx(0.25, abs=0.005)
        assert w[peaks[1]] == pytest.approx(0.75, abs=0.005)
        assert density[peaks[0]] == pytest.approx(density[peaks[1]], rel=1e-6)

    @staticmethod
    def _cosine_peak(mass, num_qubits=7):
        problem = SchrodingerProblem(CosinePotential(), mass, MomentumTruncation(num_qubits))
        _, vec = ground_state(problem.hamiltonian())
        _, density = momentum_to_position(vec, grid_points=2048)
        return density.max()

    def test_peak_density_approaches_quarter_power_law(self):
        # anharmonic corrections fall off like 1/sqrt(m), so the local
        # log-log slope converges to 1/4 from above at large masses
        masses = [400.0, 1600.0, 6400.0]
        peaks = [self._cosine_peak(m) for m in masses]
        slope = np.polyfit(np.log(masses), np.log(peaks), 1)[0]
        assert slope == pytest.approx(0.25, abs=0.025)

    def test_peak_density_matches_harmonic_model(self):
        masses = np.array([25.0, 100.0, 400.0])
        peaks = np.array([self._cosine_peak(m) for m in masses])
        # exact peaks sit below the harmonic prediction m**0.25 and climb
        # toward it as the wells get stiffer
        ratios = peaks / masses**0.25
        assert np.all(ratios < 1.0)
        assert np.all(np.diff(ratios) > 0)
        assert mass_scaling_exponent(masses, peaks) == pytest.approx(0.25, abs=0.05)

    def test_mass_scaling_exponent_recovers_pure_power(self):
        masses = np.array([10.0, 40.0, 160.0])
        assert mass_scaling_exponent(masses, masses**0.3) == pytest.approx(0.3, abs=1e-12)
        with pytest.raises(ValueError):
            mass_scaling_exponent([100.0], [3.0])


class TestGaussianPacket:
    def test_unit_norm_and_location(self):
        trunc = MomentumTruncation(5)
        width = quartic_sho_width(4.0, 100.0)
        amps = gaussian_packet(QUARTIC_FALSE_MINIMUM, width, trunc)
        assert np.linalg.norm(amps) == pytest.approx(1.0)
        w, density = momentum_to_position(amps)
        assert w[int(np.argmax(density))] == pytest.approx(QUARTIC_FALSE_MINIMUM, abs=0.005)

    def test_matches_quadrature_transform(self):
        # centered so the packet tails vanish at the interval boundary and
        # the quadrature over one period equals the whole-line transform
        trunc = MomentumTruncation(4)
        center, width = 0.5, 80.0
        amps = gaussian_packet(center, width, trunc)

        def packet(w):
            return math.exp(-width * (w - center) ** 2)

        oracle = np.array(
            [
                adaptive_simpson(
                    lambda w: packet(w) * np.exp(-2j * math.pi * n * w),
                    0.0,
                    1.0,
                    min_depth=8,
                )
                for n in trunc.modes
            ]
        )
        oracle /= np.linalg.norm(oracle)
        assert np.allclose(amps, oracle, atol=1e-6)

    def test_wide_packet_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            gaussian_packet(0.25, 20.0, MomentumTruncation(5))

    def test_sho_width_helpers(self):
        assert quartic_sho_width(4.0, 100.0) == pytest.approx(math.sqrt(400 * math.pi))
        assert cosine_sho_width(100.0) == pytest.approx(20 * math.pi)


class TestMomentumToPosition:
    def test_pure_mode_is_flat(self):
        amps = np.zeros(16, dtype=complex)
        amps[11] = 1.0  # mode n = 3
        w, density = momentum_to_position(amps)
        assert np.allclose(density, 1.0, atol=1e-9)

    def test_normalization(self):
        rng = np.random.default_rng(2)
        amps = rng.normal(size=32) + 1j * rng.normal(size=32)
        amps /= np.linalg.norm(amps)
        w, density = momentum_to_position(amps)
        assert np.trapezoid(density, w) == pytest.approx(1.0, abs=1e-9)

    def test_grid_endpoints(self):
        w, _ = momentum_to_position(np.eye(8)[4], grid_points=101)
        assert w[0] == 0.0 and w[-1] == 1.0 and len(w) == 101


def test_adaptive_simpson_known_integrals():
    assert adaptive_simpson(lambda x: x**2, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-12)
    assert adaptive_simpson(lambda x: math.cos(x), 0.0, math.pi) == pytest.approx(
        0.0, abs=1e-10
    )
    value = adaptive_simpson(lambda x: np.exp(2j * math.pi * x), 0.0, 1.0, min_depth=4)
    assert abs(value) < 1e-10


def test_adaptive_simpson_min_depth_defeats_aliasing():
    # exp(-8j pi w) equals 1 at all five starting sample points on [0, 1],
    # so without forced subdivision the recursion stops immediately
    integrand = lambda w: np.exp(-8j * math.pi * w)
    assert abs(adaptive_simpson(integrand, 0.0, 1.0, min_depth=6)) < 1e-10
