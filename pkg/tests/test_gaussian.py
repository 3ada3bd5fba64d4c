import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from lrthermal import bounds, ed
from lrthermal.errors import NumericalError, ValidationError
from lrthermal.gaussian import (
    CorrelationMatrix, binary_entropy, gaussian_mutual_information, mutual_information_terms,
    subsystem_entropy, thermal_correlation_matrix, thermal_entropy, two_point_sweep,
)
from lrthermal.lattice import Lattice, bipartition, half_bipartition
from lrthermal.models import CouplingSpec, SingleParticleHamiltonian, hopping_matrix

# values from the 2**6 Fock-space oracle (seed 2024, sample 0, alpha 1, beta 2)
FOCK_MI_N6 = 0.20645792962176435
FOCK_S_024_N6 = 2.075804822855555


def random_h(n, alpha=1.0, seed=0, sample=0, dim=1):
    return hopping_matrix(Lattice(dim, n), CouplingSpec(alpha, (0.0, 1.0), seed, sample))


def test_zero_hamiltonian_half_filling():
    c = thermal_correlation_matrix(np.zeros((5, 5)), 3.0)
    assert np.allclose(c.matrix, 0.5 * np.eye(5), atol=1e-15)


def test_single_mode_fermi_factor():
    eps, beta = 0.7, 1.3
    c = thermal_correlation_matrix(np.array([[eps]]), beta)
    assert c.matrix[0, 0] == pytest.approx(1 / (np.exp(beta * eps) + 1), rel=1e-15)


def test_two_site_dimer():
    c = thermal_correlation_matrix(np.array([[0.0, -1.0], [-1.0, 0.0]]), 2.0)
    # bonding orbital at -1 and antibonding at +1; C_01 = (f(-1) - f(1)) / 2 = tanh(1) / 2
    assert c.matrix[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert c.matrix[0, 1] == pytest.approx(np.tanh(1.0) / 2, rel=1e-14)
    oracle = ed.fermion_fock_oracle(np.array([[0.0, -1.0], [-1.0, 0.0]]), 2.0)
    assert np.allclose(c.matrix, oracle.correlations, atol=1e-12)


def test_correlations_match_matrix_exponential():
    h = random_h(7, seed=3).matrix
    beta = 1.7
    f = np.linalg.inv(np.eye(7) + expm(beta * h))
    c = thermal_correlation_matrix(h, beta)
    assert np.allclose(c.matrix, f.T, atol=1e-12)


def test_complex_hermitian_input(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    c = thermal_correlation_matrix(h, 1.0)
    oracle = ed.fermion_fock_oracle(h, 1.0)
    assert np.allclose(c.matrix, oracle.correlations, atol=1e-12)


@pytest.mark.parametrize("beta", [0.0, -1.0, np.inf, np.nan])
def test_invalid_beta(beta):
    with pytest.raises(ValidationError):
        thermal_correlation_matrix(np.zeros((2, 2)), beta)


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError):
        thermal_correlation_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


@given(st.integers(2, 12), st.floats(0.1, 5.0), st.floats(0.05, 10.0), st.integers(0, 50))
def test_correlation_invariants(n, alpha, beta, sample):
    c = thermal_correlation_matrix(random_h(n, alpha, sample=sample), beta)
    assert np.array_equal(c.matrix, c.matrix.T)
    nu = np.linalg.eigvalsh(c.matrix)
    assert nu.min() > -1e-12 and nu.max() < 1 + 1e-12


def test_sweep_zero_hamiltonian():
    lat = Lattice(1, 12)
    c = thermal_correlation_matrix(np.zeros((12, 12)), 2.0)
    pts = two_point_sweep(c, lat, 3, [(r,) for r in range(1, 8)], 1.5)
    assert all(p.magnitude == 0 and p.scaled == 0 for p in pts)


def test_sweep_geometry_2d():
    lat = Lattice(2, 40)
    c = thermal_correlation_matrix(random_h(40, 1.5, dim=2), 2.0)
    pts = two_point_sweep(c, lat, (10, 10), [(r, r) for r in range(1, 30)], 1.5)
    for r, p in enumerate(pts, 1):
        assert p.site == lat.index((10 + r, 10 + r))
        assert p.distance == 2 * r
        assert p.scaled == pytest.approx(abs(c.matrix[lat.index((10, 10)), p.site]) * (2 * r) ** 1.5)
    eu = Lattice(2, 40, "euclidean")
    assert two_point_sweep(c, eu, (10, 10), [(3, 3)], 1.0)[0].distance == pytest.approx(3 * np.sqrt(2))


def test_sweep_out_of_range():
    lat = Lattice(1, 10)
    c = thermal_correlation_matrix(np.zeros((10, 10)), 1.0)
    with pytest.raises(IndexError):
        two_point_sweep(c, lat, 5, [(5,)], 1.0)


def test_entropy_of_maximally_mixed_modes():
    c = CorrelationMatrix(0.5 * np.eye(6))
    assert subsystem_entropy(c, [0, 2, 3]) == pytest.approx(3 * np.log(2), rel=1e-14)


def test_entropy_of_pure_occupations():
    c = CorrelationMatrix(np.diag([0.0, 1.0, 1.0, 0.0]))
    assert subsystem_entropy(c, range(4)) == 0.0


def test_entropy_guard_band():
    assert binary_entropy([1 + 5e-11, -5e-11]) == 0.0
    with pytest.raises(NumericalError):
        binary_entropy([1.001])
    with pytest.raises(ValidationError):
        subsystem_entropy(CorrelationMatrix(np.eye(2)), [])


def test_subsystem_entropy_matches_fock_oracle():
    h = random_h(6, seed=2024)
    c = thermal_correlation_matrix(h, 2.0)
    live = ed.fermion_fock_oracle(h, 2.0, subsets=[(0, 2, 4)]).entropies[(0, 2, 4)]
    assert subsystem_entropy(c, (0, 2, 4)) == pytest.approx(live, abs=1e-8)
    assert subsystem_entropy(c, (0, 2, 4)) == pytest.approx(FOCK_S_024_N6, abs=1e-8)


def test_mutual_information_matches_frozen_oracle():
    h = random_h(6, seed=2024)
    part = half_bipartition(Lattice(1, 6))
    c = thermal_correlation_matrix(h, 2.0)
    assert gaussian_mutual_information(c, part) == pytest.approx(FOCK_MI_N6, abs=1e-8)


@pytest.mark.parametrize("sample", range(8))
def test_entropies_match_fock_oracle(sample):
    h = random_h(6, alpha=0.8, seed=5, sample=sample)
    c = thermal_correlation_matrix(h, 2.0)
    part = bipartition(Lattice(1, 6), (1, 4, 5))
    oracle = ed.fermion_fock_oracle(h, 2.0, subsets=[(0,), (2, 3)], part=part)
    for subset, value in oracle.entropies.items():
        assert subsystem_entropy(c, subset) == pytest.approx(value, abs=1e-8)
    assert mutual_information_terms(c, part).raw == pytest.approx(
        oracle.mutual_information, abs=1e-8)


def test_full_entropy_is_basis_independent():
    c = thermal_correlation_matrix(random_h(30, seed=1), 2.0)
    assert subsystem_entropy(c, range(30)) == pytest.approx(thermal_entropy(c), abs=1e-10)


def test_decoupled_halves_have_no_mutual_information():
    h = random_h(10, seed=4).matrix.copy()
    h[:5, 5:] = 0
    h[5:, :5] = 0
    c = thermal_correlation_matrix(h, 2.0)
    assert gaussian_mutual_information(c, half_bipartition(Lattice(1, 10))) <= 1e-12


def test_infinite_temperature_limit():
    c = thermal_correlation_matrix(random_h(20, seed=4), 1e-8)
    assert gaussian_mutual_information(c, half_bipartition(Lattice(1, 20))) <= 1e-6


def test_partition_size_mismatch():
    c = thermal_correlation_matrix(random_h(6), 1.0)
    with pytest.raises(ValidationError):
        gaussian_mutual_information(c, half_bipartition(Lattice(1, 4)))


@given(st.integers(1, 8), st.floats(0.2, 3.0), st.floats(0.1, 5.0), st.integers(0, 99))
def test_mutual_information_nonnegative_and_below_area_bound(half, alpha, beta, sample):
    lat = Lattice(1, 2 * half)
    h = random_h(2 * half, alpha, seed=11, sample=sample)
    part = half_bipartition(lat)
    terms = mutual_information_terms(thermal_correlation_matrix(h, beta), part)
    assert terms.raw >= -1e-10
    assert terms.value <= bounds.wolf_rhs(h, part, beta).exact + 1e-10


def test_hamiltonian_wrapper_accepted():
    h = SingleParticleHamiltonian(np.zeros((2, 2)))
    assert thermal_correlation_matrix(h, 1.0).n_modes == 2
