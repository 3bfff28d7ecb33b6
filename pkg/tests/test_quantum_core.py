import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complementarity.errors import ArgumentError, DegenerateProjectionError
from complementarity.quantum_core import (
    IDENTITY_2,
    SIGMA_Y,
    SIGMA_Z,
    DensityOperator,
    StateVector,
    fidelity,
    general_eigenvalues,
    hermitian_eigensystem,
    partial_trace,
    project_subsystem,
    random_density,
    random_unitary,
    real_spectrum,
    tensor,
    trace_distance,
    trace_norm,
)
from complementarity.measures import rho_tilde

from .oracles import bell_density, brute_kron, effective_joint_matrix, joint_state_direct, phase_gate, w0_vector

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestTypes:
    def test_state_vector_requires_normalization(self):
        with pytest.raises(ArgumentError):
            StateVector([1, 1])
        v = StateVector([1, 1], normalize=True)
        assert np.isclose(np.linalg.norm(v.amplitudes), 1.0)

    def test_state_vector_is_read_only(self):
        v = StateVector([1, 0])
        with pytest.raises(ValueError):
            v.amplitudes[0] = 0

    def test_density_invariants(self):
        with pytest.raises(ArgumentError):
            DensityOperator(np.array([[0.5, 0.1], [0.0, 0.5]]))
        with pytest.raises(ArgumentError):
            DensityOperator(np.eye(2))
        with pytest.raises(ArgumentError):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_layout_must_match(self):
        with pytest.raises(ArgumentError):
            DensityOperator(np.eye(4) / 4, (2, 3))


class TestTensor:
    def test_identity(self):
        assert np.array_equal(tensor(IDENTITY_2, IDENTITY_2), np.eye(4))

    def test_zz_diagonal(self):
        assert np.array_equal(np.diag(tensor(SIGMA_Z, SIGMA_Z)).real, [1, -1, -1, 1])

    def test_layout_concatenates(self):
        a = DensityOperator(np.eye(3) / 3)
        b = DensityOperator(np.eye(2) / 2)
        assert tensor(a, b).dims == (3, 2)

    def test_yy_structure_of_rho_tilde(self):
        # rho (sy x sy) rho* (sy x sy) with an explicitly looped Kronecker product
        rho = effective_joint_matrix(0.5, 0.6, 0.3, 0.2)
        yy = brute_kron(SIGMA_Y, SIGMA_Y)
        assert np.allclose(tensor(SIGMA_Y, SIGMA_Y), yy, atol=0)
        assert np.allclose(rho_tilde(rho), rho @ yy @ rho.conj() @ yy, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        # Gaussian-integer entries keep every product exact
        a, b, c = (rng.integers(-9, 10, size=(k, k)) + 1j * rng.integers(-9, 10, size=(k, k)) for k in (2, 3, 2))
        assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))
        x, y, z = (rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k)) for k in (2, 3, 2))
        assert np.allclose(tensor(tensor(x, y), z), tensor(x, tensor(y, z)), rtol=1e-15, atol=1e-15)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_matches_loop_oracle(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        b = rng.normal(size=(3, 2))
        assert np.allclose(tensor(a, b), brute_kron(a, b), atol=1e-15)


class TestPartialTrace:
    def test_bell_reduces_to_mixed(self):
        r = partial_trace(DensityOperator(bell_density(), (2, 2)), [0])
        assert np.allclose(r.matrix, np.eye(2) / 2, atol=1e-15)

    def test_product_factorizes(self):
        rng = np.random.default_rng(3)
        a, b = random_density(3, rng), random_density(2, rng)
        rho = DensityOperator(np.kron(a, b), (3, 2))
        assert np.allclose(partial_trace(rho, [0]).matrix, a, atol=1e-14)
        assert np.allclose(partial_trace(rho, [1]).matrix, b, atol=1e-14)

    def test_three_subsystems_middle(self):
        rng = np.random.default_rng(4)
        a, b, c = random_density(3, rng), random_density(2, rng), random_density(3, rng)
        rho = DensityOperator(np.kron(np.kron(a, b), c), (3, 2, 3))
        assert np.allclose(partial_trace(rho, [1]).matrix, b, atol=1e-14)
        assert np.allclose(partial_trace(rho, [0, 2]).matrix, np.kron(a, c), atol=1e-14)

    def test_qubit_coherence_is_c0_v0_over_two(self):
        rho = DensityOperator(joint_state_direct(1.0, 0.0, math.pi / 2), (2, 2))
        q = partial_trace(rho, [0]).matrix
        assert abs(q[0, 1]) == pytest.approx(math.cos(math.pi / 4) / 2, abs=1e-14)

    def test_invalid_index(self):
        with pytest.raises(ArgumentError):
            partial_trace(DensityOperator(bell_density(), (2, 2)), [2])

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_trace_preserved(self, seed):
        rng = np.random.default_rng(seed)
        rho = DensityOperator(random_density(12, rng), (3, 2, 2))
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            assert abs(np.trace(partial_trace(rho, keep).matrix) - 1) < 1e-12


class TestProjection:
    def test_pure_interferometer_state(self):
        rho = DensityOperator(joint_state_direct(1.0, 0.0, 0.7), (2, 2))
        cond, p = project_subsystem(rho, 0, 0)
        assert p == pytest.approx(0.5, abs=1e-14)
        assert np.allclose(cond.matrix, np.outer(w0_vector(), w0_vector().conj()), atol=1e-14)

    def test_zero_branch_raises(self):
        rho = DensityOperator(np.diag([1.0, 0, 0, 0]), (2, 2))
        with pytest.raises(DegenerateProjectionError):
            project_subsystem(rho, 0, 1)

    def test_branch_one_is_rotated_detector(self):
        rho = DensityOperator(joint_state_direct(0.7, 0.0, math.pi / 2), (2, 2))
        cond, p = project_subsystem(rho, 0, 1)
        uw = phase_gate(math.pi / 2) @ w0_vector()
        assert p == pytest.approx(0.5, abs=1e-14)
        assert np.allclose(cond.matrix, np.outer(uw, uw.conj()), atol=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_probabilities_sum_to_one(self, seed):
        rng = np.random.default_rng(seed)
        rho = DensityOperator(random_density(12, rng), (3, 2, 2))
        for sub, d in enumerate(rho.dims):
            assert abs(sum(project_subsystem(rho, sub, k)[1] for k in range(d)) - 1) < 1e-10


class TestSpectra:
    def test_sigma_z(self):
        w, _ = hermitian_eigensystem(SIGMA_Z)
        assert np.allclose(w, [1, -1])

    def test_identity(self):
        w, _ = hermitian_eigensystem(np.eye(4))
        assert np.allclose(w, [1, 1, 1, 1])

    def test_conditional_detector_difference(self):
        # detector states for the two paths at V0 = 0.6
        w0 = np.array([1, 0], dtype=complex)
        w1 = np.array([0.6, 0.8], dtype=complex)
        w, _ = hermitian_eigensystem(np.outer(w0, w0) - np.outer(w1, w1))
        assert np.allclose(w, [0.8, -0.8], atol=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ArgumentError):
            hermitian_eigensystem(np.array([[0, 1], [0, 0]]))

    def test_trace_norm_examples(self):
        assert trace_norm(SIGMA_Z) == pytest.approx(2)
        assert trace_norm(np.zeros((3, 3))) == 0
        v0 = math.cos(math.pi / 8)
        w0 = np.array([1, 0], dtype=complex)
        w1 = np.array([v0, math.sqrt(1 - v0 * v0)], dtype=complex)
        diff = np.outer(w0, w0) - np.outer(w1, w1)
        assert trace_norm(diff) == pytest.approx(2 * math.sqrt(1 - v0 * v0), abs=1e-12)
        assert trace_norm(diff) == pytest.approx(0.76537, abs=1e-5)

    def test_general_eigenvalues(self):
        assert np.allclose(np.sort(general_eigenvalues(np.diag([1, 2, 3])).real), [1, 2, 3])
        assert np.allclose(general_eigenvalues(np.array([[0, 1], [0, 0]])), [0, 0])

    def test_rho_tilde_nonzero_eigenvalues(self):
        lam = real_spectrum(rho_tilde(effective_joint_matrix(0.8, 0.5, 0.0, 0.0)))
        assert lam[0] == pytest.approx(0.25 * 0.75 * 1.8**2, abs=1e-12)
        assert lam[1] == pytest.approx(0.25 * 0.75 * 0.2**2, abs=1e-12)
        assert lam[0] == pytest.approx(0.6075, abs=1e-12)
        assert lam[1] == pytest.approx(0.0075, abs=1e-12)
        assert np.allclose(lam[2:], 0, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_reconstruction_and_orthonormality(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        m = a + a.conj().T
        w, v = hermitian_eigensystem(m)
        assert np.all(np.diff(w) <= 0)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - m) < 1e-9
        assert np.allclose(v.conj().T @ v, np.eye(5), atol=1e-10)
        assert trace_norm(m) >= abs(np.trace(m).real) - 1e-12


class TestDistances:
    def test_fidelity_of_identical_states(self):
        rng = np.random.default_rng(0)
        r = random_density(4, rng)
        assert fidelity(r, r) == pytest.approx(1.0, abs=1e-12)

    def test_fidelity_pure_overlap(self):
        a = np.diag([1.0, 0.0])
        assert fidelity(a, np.full((2, 2), 0.5)) == pytest.approx(0.5)

    def test_trace_distance_orthogonal(self):
        assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)

    def test_random_unitary(self):
        u = random_unitary(4, np.random.default_rng(1))
        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
