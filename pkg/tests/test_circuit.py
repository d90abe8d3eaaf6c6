import math

import numpy as np
import pytest

from plasmonium.circuit import (
    CircuitParams,
    build_fock_hamiltonian,
    count_valleys,
    displacement_matrix,
    exact_spectrum,
    has_dominant_valley,
    ladder_operator,
    potential,
    qubit_metrics,
)

from oracles import displacement_by_expm, phase_grid_spectrum

PAPER_POINT = dict(e_c=0.7, e_j=4.5, phi_ext=math.pi / 2)


def params_at(e_l, **overrides):
    return CircuitParams(**{**PAPER_POINT, "e_l": e_l, **overrides})


class TestCircuitParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            CircuitParams(e_c=0.0, e_j=1.0, e_l=1.0)
        with pytest.raises(ValueError):
            CircuitParams(e_c=1.0, e_j=1.0, e_l=-0.5)
        with pytest.raises(ValueError):
            CircuitParams(e_c=1.0, e_j=-1.0, e_l=1.0)
        with pytest.raises(ValueError):
            CircuitParams(e_c=1.0, e_j=1.0, e_l=1.0, phi_ext=math.inf)

    def test_derived_scales(self):
        p = CircuitParams(e_c=0.7, e_j=0.0, e_l=3.0)
        assert p.omega == pytest.approx(math.sqrt(8.0 * 0.7 * 3.0), abs=1e-12)
        p2 = CircuitParams(e_c=0.7, e_j=0.0, e_l=2.0)
        assert p2.amp_a == pytest.approx((2 * 0.7 / 2.0) ** 0.25, abs=1e-12)


class TestDisplacement:
    def test_zero_is_identity(self):
        assert np.allclose(displacement_matrix(0.0, 8), np.eye(8), atol=1e-14)

    def test_vacuum_element_closed_form(self):
        # <0|D(alpha)|0> = exp(-|alpha|^2 / 2); at the E_C=0.7, E_L=2.0 point
        # alpha = i * (2*0.7/2.0)**0.25, so |alpha|^2/2 = 0.41833001326703784.
        alpha = 1j * (2 * 0.7 / 2.0) ** 0.25
        d = displacement_matrix(alpha, 8)
        assert d[0, 0] == pytest.approx(math.exp(-0.41833001326703784), abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 1j * 0.9146912192286945, 0.3 - 0.8j])
    def test_matches_generator_exponential(self, alpha):
        inner = displacement_matrix(alpha, 64)[:16, :16]
        reference = displacement_by_expm(alpha, 64)[:16, :16]
        assert np.abs(inner - reference).max() < 1e-12

    def test_unitary_away_from_truncation_edge(self):
        d = displacement_matrix(0.5, 32)
        gram = d.conj().T @ d
        assert np.abs(gram[:16, :16] - np.eye(16)).max() < 1e-8

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            displacement_matrix(0.1, 0)


class TestBuildHamiltonian:
    def test_harmonic_limit(self):
        p = CircuitParams(e_c=0.7, e_j=0.0, e_l=3.0, phi_ext=0.3)
        h = build_fock_hamiltonian(p, 7)
        omega = math.sqrt(8 * 0.7 * 3.0)
        assert omega == pytest.approx(4.098780306383839, abs=1e-12)
        assert np.allclose(h.matrix, np.diag(omega * np.arange(8)), atol=1e-12)

    def test_cutoff_zero_at_half_flux(self):
        h = build_fock_hamiltonian(params_at(1.3), cutoff=0)
        assert h.matrix.shape == (1, 1)
        assert abs(h.matrix[0, 0]) < 1e-12

    def test_hermitian_and_real_symmetric_at_half_flux(self):
        h = build_fock_hamiltonian(params_at(2.0), 7)
        assert np.abs(h.matrix - h.matrix.conj().T).max() < 1e-12
        assert np.abs(h.matrix.imag).max() < 1e-12
        assert np.abs(h.matrix - h.matrix.T).max() < 1e-12

    def test_hermitian_for_random_parameters(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = CircuitParams(
                e_c=rng.uniform(0.1, 2.0),
                e_j=rng.uniform(0.0, 8.0),
                e_l=rng.uniform(0.1, 4.0),
                phi_ext=rng.uniform(-6.0, 6.0),
            )
            m = build_fock_hamiltonian(p, 7).matrix
            assert np.abs(m - m.conj().T).max() < 1e-12

    def test_negative_cutoff_rejected(self):
        with pytest.raises(ValueError):
            build_fock_hamiltonian(params_at(1.0), -1)


class TestExactSpectrum:
    def test_harmonic_levels(self):
        p = CircuitParams(e_c=0.7, e_j=0.0, e_l=3.0)
        result = exact_spectrum(build_fock_hamiltonian(p, 7), 3)
        assert np.allclose(result.energies, p.omega * np.arange(3), atol=1e-10)

    def test_eigenvector_orthonormality(self):
        result = exact_spectrum(build_fock_hamiltonian(params_at(1.0), 20), 5)
        gram = result.eigenvectors.conj().T @ result.eigenvectors
        assert np.abs(gram - np.eye(5)).max() < 1e-10

    def test_k_bounds(self):
        h = build_fock_hamiltonian(params_at(1.0), 7)
        with pytest.raises(ValueError):
            exact_spectrum(h, 0)
        with pytest.raises(ValueError):
            exact_spectrum(h, 9)

    def test_matches_phase_grid_oracle(self):
        p = params_at(2.0)
        fock = exact_spectrum(build_fock_hamiltonian(p, 40), 3).energies
        grid = phase_grid_spectrum(p, 3)
        assert np.abs(fock - grid).max() < 1e-6

    def test_excited_gap_minimum_location(self):
        els = np.round(np.arange(0.2, 3.0 + 1e-9, 0.05), 10)
        gaps = []
        for el in els:
            e = exact_spectrum(build_fock_hamiltonian(params_at(el), 7), 3).energies
            gaps.append(e[2] - e[1])
        e_l_min = els[int(np.argmin(gaps))]
        assert 0.35 <= e_l_min <= 0.55

    def test_truncation_shift_reported(self):
        p = params_at(2.0)
        low = exact_spectrum(build_fock_hamiltonian(p, 7), 3).energies
        high = exact_spectrum(build_fock_hamiltonian(p, 40), 3).energies
        shift = np.abs(low - high)
        assert np.all(np.isfinite(shift))
        print(f"cutoff 7 vs 40 level shifts at E_L=2.0: {shift} GHz")

    def test_flux_parity(self):
        for phi in (0.4, 1.1, 2.9):
            plus = exact_spectrum(build_fock_hamiltonian(params_at(1.5, phi_ext=phi), 12), 3).energies
            minus = exact_spectrum(build_fock_hamiltonian(params_at(1.5, phi_ext=-phi), 12), 3).energies
            assert np.abs(plus - minus).max() < 1e-10


class TestPotential:
    def test_zero_josephson(self):
        assert potential(CircuitParams(0.7, 0.0, 2.0), 0.0) == 0.0

    def test_value_at_quarter_turn(self):
        # -4.5*cos(0) + 0.5*0.2*(pi/2)^2 = -4.253259889972766
        value = potential(params_at(0.2), -math.pi / 2)
        assert value == pytest.approx(-4.253259889972766, abs=1e-12)

    def test_parity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            phi = rng.uniform(-8, 8)
            p = params_at(rng.uniform(0.2, 3.0), phi_ext=rng.uniform(-3, 3))
            mirrored = p.with_flux(-p.phi_ext)
            assert potential(p, phi) == pytest.approx(potential(mirrored, -phi), abs=1e-12)


class TestValleys:
    def test_pure_quadratic_single_valley(self):
        valleys = count_valleys(CircuitParams(0.7, 0.0, 2.0))
        assert len(valleys) == 1
        assert abs(valleys[0].phi) < 1e-6

    def test_fluxonium_regime_has_multiple_valleys(self):
        valleys = count_valleys(params_at(0.2))
        assert len(valleys) >= 2
        # the two deepest wells sit in the potential-period cells around
        # phase 0 and phase 2*pi
        nearest = [round(v.phi / (2 * math.pi)) for v in valleys[:2]]
        assert sorted(nearest) == [0, 1]
        for v in valleys[:2]:
            assert abs(v.phi - round(v.phi / (2 * math.pi)) * 2 * math.pi) < math.pi

    def test_plasmonium_regime_single_dominant_valley(self):
        valleys = count_valleys(params_at(2.0))
        assert has_dominant_valley(valleys, margin=4.5 / 2)

    def test_valley_count_monotone_in_inductive_energy(self):
        counts = [len(count_valleys(params_at(el))) for el in (0.2, 0.5, 1.0, 2.0, 3.0)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_refinement_hits_stationary_point(self):
        p = params_at(0.2)
        for v in count_valleys(p):
            slope = p.e_j * math.sin(v.phi + p.phi_ext) + p.e_l * v.phi
            assert abs(slope) < 1e-4

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            count_valleys(params_at(1.0), (1.0, 1.0))
        with pytest.raises(ValueError):
            count_valleys(params_at(1.0), (-1.0, 1.0), grid_points=50)


class TestQubitMetrics:
    def test_sweet_spot_for_random_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            p = CircuitParams(
                e_c=rng.uniform(0.3, 1.2),
                e_j=rng.uniform(1.0, 8.0),
                e_l=rng.uniform(0.3, 3.0),
                phi_ext=0.0,
            )
            m = qubit_metrics(p, cutoff=12)
            assert m.flux_sensitivity <= 1e-6

    def test_harmonic_case_analytic(self):
        p = CircuitParams(e_c=0.7, e_j=0.0, e_l=2.0)
        m = qubit_metrics(p, cutoff=12)
        assert abs(m.anharmonicity) < 1e-9
        amp = p.amp_a
        assert m.phi_element == pytest.approx(amp, abs=1e-10)
        assert m.n_element == pytest.approx(1.0 / (2.0 * amp), abs=1e-10)

    def test_transitions_match_phase_grid_oracle(self):
        p = CircuitParams(e_c=0.7, e_j=4.5, e_l=2.2, phi_ext=0.0)
        m = qubit_metrics(p, cutoff=40)
        grid = phase_grid_spectrum(p, 3)
        assert m.f01 == pytest.approx(grid[1] - grid[0], abs=1e-6)
        assert m.f12 == pytest.approx(grid[2] - grid[1], abs=1e-6)

    def test_device_scale_anharmonicity_reported(self):
        # exploratory comparison point: the fabricated device quotes
        # |anharmonicity| = 0.49 GHz with unpublished e_c, e_j
        m = qubit_metrics(CircuitParams(0.7, 4.5, 2.2, 0.0), cutoff=40)
        assert math.isfinite(m.anharmonicity)
        assert m.anharmonicity < 0  # single-well plasmon regime
        print(f"anharmonicity at (0.7, 4.5, 2.2, 0): {m.anharmonicity:.4f} GHz "
              f"(device magnitude 0.49 GHz)")

    def test_ladder_operator(self):
        a = ladder_operator(5)
        n = a.conj().T @ a
        assert np.allclose(np.diag(n), np.arange(5), atol=1e-12)
