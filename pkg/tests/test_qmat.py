import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from conftest import ginibre, random_density
from krakos.entanglement import Bipartition
from krakos.errors import InvalidBipartition, InvalidInput, NotHermitian, NotUnitary
from krakos.gates import NAMED_GATES
from krakos.qmat import (
    PureState,
    UnitaryGate,
    haar_local_product,
    haar_random_unitary,
    hermitian_eigenvalues,
    norms,
    partial_trace,
    random_pure_state,
    tensor,
)

I2 = np.eye(2)
X = NAMED_GATES["X"]
seeds = st.integers(min_value=0, max_value=2**64 - 1)


class TestTensor:
    def test_identity(self):
        np.testing.assert_array_equal(tensor(I2, I2), np.eye(4))

    def test_x_on_first_qubit(self):
        expected = np.zeros((4, 4))
        for i, j in [(0, 2), (1, 3), (2, 0), (3, 1)]:
            expected[i, j] = 1
        np.testing.assert_array_equal(tensor(X, I2), expected)

    def test_top_left_block(self):
        rng = np.random.default_rng(3)
        a, b = ginibre(rng, 2), ginibre(rng, 2)
        np.testing.assert_allclose(tensor(a, b)[:2, :2], a[0, 0] * b, atol=1e-15)

    @given(seeds)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = ginibre(rng, 2), ginibre(rng, 2), ginibre(rng, 2)
        np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-12)

    @given(seeds)
    def test_mixed_product(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c, d = (ginibre(rng, 2) for _ in range(4))
        np.testing.assert_allclose(tensor(a, b) @ tensor(c, d), tensor(a @ c, b @ d), atol=1e-12)


class TestPartialTrace:
    def test_bell_pair_is_maximally_mixed(self, bell):
        rho_a = partial_trace(bell.projector(), Bipartition(2, [0]), "a")
        np.testing.assert_allclose(rho_a, I2 / 2, atol=1e-15)

    def test_product_state_factorizes(self):
        rng = np.random.default_rng(8)
        rho, sigma = random_density(rng, 2), random_density(rng, 4)
        joint = np.kron(rho, sigma)
        np.testing.assert_allclose(partial_trace(joint, Bipartition(3, [0]), "a"), rho, atol=1e-14)
        np.testing.assert_allclose(partial_trace(joint, Bipartition(3, [0]), "b"), sigma, atol=1e-14)

    def test_noncontiguous_side(self):
        # qubit 1 of |0>|1>|0> is |1><1|
        psi = np.zeros(8)
        psi[0b010] = 1
        rho = partial_trace(np.outer(psi, psi), Bipartition(3, [1]), "a")
        np.testing.assert_allclose(rho, np.diag([0, 1]), atol=0)

    @given(seeds, st.integers(2, 4))
    def test_trace_preserved(self, seed, n):
        rng = np.random.default_rng(seed)
        rho = random_density(rng, 2**n)
        side = rng.choice(n, size=rng.integers(1, n), replace=False)
        cut = Bipartition(n, side)
        for keep in "ab":
            assert abs(np.trace(partial_trace(rho, cut, keep)) - 1) < 1e-10

    @given(seeds)
    def test_schmidt_symmetry(self, seed):
        psi = random_pure_state(3, seed)
        cut = Bipartition(3, [1])
        ea = hermitian_eigenvalues(partial_trace(psi.projector(), cut, "a"))
        eb = hermitian_eigenvalues(partial_trace(psi.projector(), cut, "b"))
        np.testing.assert_allclose(eb[-2:], ea, atol=1e-9)
        np.testing.assert_allclose(eb[:2], 0, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidBipartition):
            partial_trace(np.eye(4) / 4, Bipartition(3, [0]))


class TestEigenvalues:
    def test_maximally_mixed(self):
        np.testing.assert_allclose(hermitian_eigenvalues(I2 / 2), [0.5, 0.5])

    def test_diagonal(self):
        np.testing.assert_allclose(hermitian_eigenvalues(np.diag([0.75, 0.25])), [0.25, 0.75])

    def test_rotated_bell_reduction(self, bell):
        u = haar_random_unitary(1, 99).matrix
        rho = partial_trace(bell.projector(), Bipartition(2, [0]))
        np.testing.assert_allclose(hermitian_eigenvalues(u @ rho @ u.conj().T), [0.5, 0.5], atol=1e-10)

    @given(seeds, st.integers(1, 16))
    def test_matches_lapack(self, seed, dim):
        g = ginibre(np.random.default_rng(seed), dim)
        h = g + g.conj().T
        np.testing.assert_allclose(hermitian_eigenvalues(h), np.linalg.eigvalsh(h), atol=1e-9)

    @given(seeds)
    def test_sum_is_trace(self, seed):
        h = random_density(np.random.default_rng(seed), 8)
        assert abs(hermitian_eigenvalues(h).sum() - np.trace(h).real) < 1e-10

    def test_degenerate_spectrum(self):
        u = haar_random_unitary(3, 5).matrix
        h = u @ np.diag([1, 1, 1, 2, 2, 3, 3, 3]) @ u.conj().T
        np.testing.assert_allclose(hermitian_eigenvalues(h), [1, 1, 1, 2, 2, 3, 3, 3], atol=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


class TestNorms:
    def test_identity(self):
        assert norms(np.eye(4)) == pytest.approx((2.0, 1.0), abs=1e-12)

    def test_zero(self):
        assert norms(np.zeros((3, 3))) == (0.0, 0.0)

    def test_cnot_minus_identity(self, cnot):
        fro, spec = norms(cnot.matrix - np.eye(4))
        assert fro == pytest.approx(2.0, abs=1e-12)
        assert spec == pytest.approx(2.0, abs=1e-12)

    @given(seeds)
    def test_spectral_matches_svd(self, seed):
        m = ginibre(np.random.default_rng(seed), 4, 3)
        assert norms(m).spectral == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-10)


class TestSampling:
    @given(seeds, st.integers(1, 4))
    def test_haar_is_unitary(self, seed, n):
        u = haar_random_unitary(n, seed).matrix
        assert np.linalg.norm(u.conj().T @ u - np.eye(2**n)) < 1e-10

    def test_haar_deterministic(self):
        np.testing.assert_array_equal(haar_random_unitary(2, 17).matrix, haar_random_unitary(2, 17).matrix)
        assert not np.allclose(haar_random_unitary(2, 17).matrix, haar_random_unitary(2, 18).matrix)

    def test_haar_eigenphases_uniform(self):
        phases = np.concatenate(
            [np.angle(np.linalg.eigvals(haar_random_unitary(1, s).matrix)) for s in range(2000)]
        )
        counts, _ = np.histogram(np.mod(phases, 2 * math.pi), bins=8, range=(0, 2 * math.pi))
        assert stats.chisquare(counts).pvalue > 0.001

    @given(seeds, st.integers(1, 5))
    def test_state_normalized(self, seed, n):
        assert abs(np.linalg.norm(random_pure_state(n, seed).amplitudes) - 1) < 1e-12

    def test_state_deterministic(self):
        np.testing.assert_array_equal(random_pure_state(3, 4).amplitudes, random_pure_state(3, 4).amplitudes)

    def test_local_product_factors(self):
        u = haar_local_product(2, 12).matrix
        # a product operator has operator-Schmidt rank one
        realigned = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
        sv = np.linalg.svd(realigned, compute_uv=False)
        assert sv[1] < 1e-12


class TestValidation:
    def test_non_unitary_rejected(self):
        with pytest.raises(NotUnitary) as err:
            UnitaryGate(np.zeros((4, 4)))
        assert err.value.residual == pytest.approx(2.0)

    def test_non_power_of_two(self):
        with pytest.raises(InvalidInput):
            UnitaryGate(np.eye(3))

    def test_unnormalized_state(self):
        with pytest.raises(InvalidInput):
            PureState([1, 1])

    def test_non_finite(self):
        with pytest.raises(InvalidInput):
            UnitaryGate(np.array([[np.nan, 0], [0, 1]]))

    def test_gate_is_immutable(self, cnot):
        with pytest.raises(ValueError):
            cnot.matrix[0, 0] = 2
