import numpy as np
import pytest

from lindblad_extrap.model import (
    expectation,
    generator_bound,
    spectral_norm,
)
from lindblad_extrap.zoo import (
    SIGMA_MINUS,
    SIGMA_X,
    SIGMA_Z,
    TfimParams,
    build_tfim,
    by_name,
    ground_state,
    random_density_matrix,
    random_model,
    random_pure_state,
)


class TestTfim:
    def test_single_site(self):
        p = TfimParams(n_q=1, omega=1.0, omega_r=0.8, coupling_j=0.3, gamma=0.4)
        model, obs = build_tfim(p)
        expected_h = 0.5 * SIGMA_Z + 0.4 * SIGMA_X
        np.testing.assert_allclose(model.hamiltonian, expected_h, atol=1e-15)
        assert len(model.jumps) == 1
        np.testing.assert_allclose(model.jumps[0], np.sqrt(0.4) * SIGMA_MINUS, atol=1e-15)

    def test_paper_scale_shape(self):
        model, obs = build_tfim(TfimParams(n_q=4))
        assert model.dim == 16
        assert len(model.jumps) == 4
        assert obs.bound_alpha == pytest.approx(1.0, abs=1e-9)

    def test_magnetization_normalization(self):
        # || sum_q sx_q || = n_q, so the observable is the sum over 4.
        model, obs = build_tfim(TfimParams(n_q=4))
        from functools import reduce

        from lindblad_extrap.zoo import site_operator

        total = sum(site_operator(SIGMA_X, q, 4) for q in range(4))
        assert spectral_norm(total) == pytest.approx(4.0, abs=1e-9)
        np.testing.assert_allclose(obs.matrix, total / 4.0, atol=1e-14)

    def test_generator_bound_hand_value(self):
        p = TfimParams(n_q=4)
        model, _ = build_tfim(p)
        expected = 2 * spectral_norm(model.hamiltonian) + 2 * p.n_q * p.gamma
        assert generator_bound(model) == pytest.approx(expected, abs=1e-9)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            TfimParams(n_q=0)
        with pytest.raises(ValueError):
            TfimParams(gamma=-0.1)


class TestRandomModel:
    def test_reproducible(self):
        a, _ = random_model(16, seed=1)
        b, _ = random_model(16, seed=1)
        np.testing.assert_array_equal(a.hamiltonian, b.hamiltonian)
        np.testing.assert_array_equal(a.jumps[0], b.jumps[0])

    def test_seed_changes_model(self):
        a, _ = random_model(4, seed=1)
        b, _ = random_model(4, seed=2)
        assert np.max(np.abs(a.hamiltonian - b.hamiltonian)) > 1e-3

    def test_hamiltonian_hermitian(self):
        model, _ = random_model(8, seed=3)
        assert np.max(np.abs(model.hamiltonian - model.hamiltonian.conj().T)) < 1e-14

    def test_norms_scaled(self):
        model, obs = random_model(16, seed=1, scale=1.0)
        assert spectral_norm(model.hamiltonian) == pytest.approx(1.0, rel=1e-10)
        assert spectral_norm(model.jumps[0]) == pytest.approx(1.0, rel=1e-10)
        assert obs.bound_alpha == pytest.approx(1.0, rel=1e-10)

    def test_observable_bounded_expectation(self):
        _, obs = random_model(8, seed=5)
        for s in range(5):
            rho = random_density_matrix(8, seed=s)
            assert abs(expectation(rho, obs)) <= 1.0 + 1e-10

    def test_paper_shape(self):
        model, _ = random_model(16, n_jumps=1, seed=1)
        assert model.dim == 16
        assert len(model.jumps) == 1


class TestStatesAndLookup:
    def test_ground_state(self):
        rho = ground_state(4)
        assert rho.matrix[0, 0] == pytest.approx(1.0)

    def test_random_pure_state_reproducible(self):
        np.testing.assert_array_equal(
            random_pure_state(4, seed=2).matrix, random_pure_state(4, seed=2).matrix
        )

    def test_by_name_tfim(self):
        model, obs, rho0 = by_name("tfim", {"n_q": 2}, seed=0)
        assert model.dim == 4
        np.testing.assert_array_equal(rho0.matrix, ground_state(4).matrix)

    def test_by_name_random16(self):
        model, obs, rho0 = by_name("random16", {}, seed=1)
        assert model.dim == 16

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown model"):
            by_name("bogus")
