import math

import numpy as np
import pytest
from conftest import loglog_slope
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblad_extrap.extrapolation import (
    ConditioningError,
    extrapolate,
    fitted_curve,
    lebesgue_at_zero,
    regression_weights,
    richardson_weights,
)
from lindblad_extrap.grids import StepGrid, chebyshev_grid, equidistant_grid, quantize_grid


def grid_of(*nodes):
    return StepGrid(nodes=tuple(nodes), interval_hi=max(nodes))


class TestRichardsonWeights:
    def test_two_equidistant_nodes(self):
        w = richardson_weights(grid_of(0.5, 1.0))
        np.testing.assert_allclose(w.gammas, (2.0, -1.0), atol=1e-14)
        assert w.gamma_l1 == pytest.approx(3.0)

    def test_single_node(self):
        w = richardson_weights(grid_of(0.3))
        assert w.gammas == (1.0,)

    def test_weights_sum_to_one(self):
        w = richardson_weights(chebyshev_grid(0.02, 6))
        assert sum(w.gammas) == pytest.approx(1.0, abs=1e-12)

    def test_duplicate_nodes_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            richardson_weights(StepGrid(nodes=(0.1, 0.1 * (1 + 1e-15)), interval_hi=1.0))

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_polynomial_exactness(self, n):
        grid = chebyshev_grid(1.0, n)
        w = richardson_weights(grid)
        for k in range(n + 2):
            target = 1.0 if k == 0 else 0.0
            value = sum(g * t**k for g, t in zip(w.gammas, grid.nodes))
            if k <= n:
                assert value == pytest.approx(target, abs=1e-9 * w.gamma_l1)

    def test_affine_covariance(self):
        base = chebyshev_grid(1.0, 4)
        scaled = StepGrid(nodes=tuple(5.0 * t for t in base.nodes), interval_hi=5.0)
        np.testing.assert_allclose(
            richardson_weights(base).gammas, richardson_weights(scaled).gammas, rtol=1e-12
        )


class TestRegressionWeights:
    def test_full_degree_rejected(self):
        grid = grid_of(0.1, 0.2, 0.3)
        with pytest.raises(ValueError, match="richardson"):
            regression_weights(grid, 2)

    def test_degree_zero_is_mean(self):
        w = regression_weights(grid_of(0.1, 0.2, 0.3, 0.4), 0)
        np.testing.assert_allclose(w.gammas, [0.25] * 4, atol=1e-12)

    def test_simple_linear_fit(self):
        w = regression_weights(grid_of(1.0, 2.0, 3.0), 1)
        res = extrapolate(w, [2.0, 3.0, 4.0])
        assert res.value_at_zero == pytest.approx(1.0, abs=1e-12)
        assert res.residual == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_monomial_exactness_up_to_degree(self, degree):
        grid = chebyshev_grid(1.0, 5)
        w = regression_weights(grid, degree)
        for k in range(degree + 1):
            value = sum(g * t**k for g, t in zip(w.gammas, grid.nodes))
            assert value == pytest.approx(1.0 if k == 0 else 0.0, abs=1e-9 * w.gamma_l1)

    def test_conditioning_error(self):
        nodes = tuple(1.0 + 1e-9 * j for j in range(12))
        with pytest.raises(ConditioningError):
            regression_weights(StepGrid(nodes=nodes, interval_hi=2.0), 10)


class TestExtrapolate:
    def test_constant_values(self):
        w = richardson_weights(chebyshev_grid(0.5, 3))
        assert extrapolate(w, [2.5] * 4).value_at_zero == pytest.approx(2.5, abs=1e-12)

    def test_linear_two_nodes_exact(self):
        w = richardson_weights(grid_of(0.25, 0.5))
        f0, a = 1.7, -0.3
        values = [f0 + a * t for t in (0.25, 0.5)]
        assert extrapolate(w, values).value_at_zero == pytest.approx(f0, abs=1e-12)

    def test_length_mismatch(self):
        w = richardson_weights(grid_of(0.25, 0.5))
        with pytest.raises(ValueError):
            extrapolate(w, [1.0])

    def test_gevrey_envelope_geometric_convergence(self):
        # f(tau) = sigma * sum_k (nu tau)^k = sigma / (1 - nu tau), sampled
        # on Chebyshev nodes over [0, 1/(2 nu)]: extrapolation error at 0
        # decays geometrically with the node count.
        sigma, nu = 2.0, 3.0
        errors = []
        for n in (2, 4, 8):
            grid = chebyshev_grid(1.0 / (2 * nu), n)
            w = richardson_weights(grid)
            values = [sigma / (1 - nu * t) for t in grid.nodes]
            errors.append(abs(extrapolate(w, values).value_at_zero - sigma))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-5
        assert errors[1] / errors[0] < 0.1
        assert errors[2] / errors[1] < 0.1

    @settings(max_examples=100, deadline=None)
    @given(
        values=st.lists(
            st.floats(min_value=-10, max_value=10), min_size=4, max_size=4
        ),
        c=st.floats(min_value=-5, max_value=5),
    )
    def test_constant_shift_covariance(self, values, c):
        w = richardson_weights(chebyshev_grid(1.0, 3))
        base = extrapolate(w, values).value_at_zero
        shifted = extrapolate(w, [v + c for v in values]).value_at_zero
        assert shifted == pytest.approx(base + c, abs=1e-9)


class TestLebesgue:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_equidistant_closed_form(self, n):
        value = lebesgue_at_zero(equidistant_grid(1.0, n))
        assert value == pytest.approx(2 ** (n + 1) - 1, rel=1e-6)

    def test_chebyshev_subpolynomial_growth(self):
        values = {n: lebesgue_at_zero(chebyshev_grid(1.0, n)) for n in (4, 8, 16, 32, 64)}
        assert values[8] > values[4]
        assert values[64] > values[32]
        assert values[32] / values[16] < 1.5
        assert values[64] / values[32] < 1.5

    def test_quantized_chebyshev_within_factor_two(self):
        n = 8
        hi = 1e-3
        t_hat = max(1.0, 2 * hi * n**2 * math.log(n) * 1.5)
        grid = chebyshev_grid(hi, n)
        q = quantize_grid(grid, t_hat)
        raw = lebesgue_at_zero(grid)
        quant = lebesgue_at_zero(q)
        assert quant <= 2 * raw
        assert quant >= raw / 2

    def test_regression_method(self):
        grid = chebyshev_grid(1.0, 8)
        assert lebesgue_at_zero(grid, "regression", 5) >= 1.0
        with pytest.raises(ValueError):
            lebesgue_at_zero(grid, "regression")


class TestErrorCancellationOrder:
    def test_first_order_curve_order_scales_with_nodes(self):
        # Noiseless first-order integrator data: shrinking the interval
        # endpoint shrinks |p_n(0) - f_exact| at empirical order >= n + 0.5.
        from lindblad_extrap.integrators import IntegratorKind, evolve
        from lindblad_extrap.reference import exact_evolve
        from lindblad_extrap.zoo import random_density_matrix, random_model

        model, obs = random_model(4, seed=21)
        rho0 = random_density_matrix(4, seed=22)
        f_ref = float(
            np.trace(exact_evolve(model, rho0, 1.0, 1e-12).state.matrix @ obs.matrix).real
        )

        def curve_error(n, hi):
            q = quantize_grid(chebyshev_grid(hi, n), 1.0)
            values = []
            for k in q.step_counts:
                traj = evolve(model, rho0, 1.0, k, IntegratorKind.KRAUS_FIRST_ORDER)
                values.append(float(np.trace(traj.final_state @ obs.matrix).real))
            return abs(extrapolate(richardson_weights(q), values).value_at_zero - f_ref)

        # Interval ranges keep the target errors above the double-precision
        # floor (~1e-13 after hundreds of steps).
        ranges = {
            1: [0.04, 0.02, 0.01, 0.005],
            2: [0.04, 0.02, 0.01, 0.005],
            3: [0.16, 0.08, 0.04, 0.02],
        }
        for n, his in ranges.items():
            errs = [curve_error(n, hi) for hi in his]
            slope = loglog_slope(his, errs)
            assert slope >= n + 0.5, f"n={n}: slope {slope}"


class TestNoiseAmplification:
    def test_variance_identity(self):
        rng = np.random.default_rng(42)
        grid = chebyshev_grid(1.0, 5)
        w = richardson_weights(grid)
        v = 1e-6
        base = np.linspace(1.0, 2.0, grid.n_nodes)
        trials = 10_000
        noise = rng.normal(0.0, math.sqrt(v), size=(trials, grid.n_nodes))
        outs = (base + noise) @ np.array(w.gammas)
        measured = float(np.var(outs))
        expected = v * sum(g * g for g in w.gammas)
        assert measured == pytest.approx(expected, rel=0.05)
        assert expected <= v * w.gamma_l1**2


class TestFittedCurve:
    def test_interpolant_passes_through_nodes(self):
        grid = chebyshev_grid(1.0, 4)
        w = richardson_weights(grid)
        values = np.sin(np.array(grid.nodes))
        out = fitted_curve(w, values, np.array(grid.nodes))
        np.testing.assert_allclose(out, values, atol=1e-10)

    def test_matches_extrapolation_at_zero(self):
        grid = chebyshev_grid(1.0, 4)
        for w in (richardson_weights(grid), regression_weights(grid, 2)):
            values = np.cos(np.array(grid.nodes))
            at_zero = fitted_curve(w, values, np.array([0.0]))[0]
            assert at_zero == pytest.approx(
                extrapolate(w, values).value_at_zero, abs=1e-10
            )
