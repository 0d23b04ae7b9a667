import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pclsim.model import (
    CENTRAL,
    InstanceConfig,
    InvalidConfigError,
    analytic_means,
    build_gaussian_instance,
    generate_gaussian_instance,
    generate_instance,
    generate_tabular_instance,
    reference_solution,
)


def _cfg(**kw):
    defaults = dict(n=4, d=3, delta_env=0.3, delta_obj=0.2, seed=1)
    defaults.update(kw)
    return InstanceConfig(**defaults)


class TestConfigValidation:
    def test_bad_n(self):
        with pytest.raises(InvalidConfigError):
            InstanceConfig(n=0, d=2)

    def test_bad_d(self):
        with pytest.raises(InvalidConfigError):
            InstanceConfig(n=2, d=0)

    def test_bad_delta_env(self):
        with pytest.raises(InvalidConfigError):
            InstanceConfig(n=2, d=2, delta_env=1.5)

    def test_bad_family(self):
        with pytest.raises(InvalidConfigError):
            InstanceConfig(n=2, d=2, family="nope")

    def test_tabular_size_too_small(self):
        with pytest.raises(InvalidConfigError):
            generate_tabular_instance(
                InstanceConfig(n=4, d=2, family="tabular", tabular_size=6)
            )


class TestHandBuiltFixedPoints:
    def test_scalar_two_agent_fixed_points(self):
        # n=2, d=1, no noise, A_base=2, Phi_base=1, theta=(4, 8):
        # abar_i = 2, bbar_i = theta_i, so x* = (2, 4) and x_c* = 3.
        cfg = InstanceConfig(n=2, d=1, eps_a=0.0, eps_b=0.0, seed=0)
        inst = build_gaussian_instance(
            cfg,
            a_base=np.array([[2.0]]),
            phi_base=np.array([[1.0]]),
            theta=np.array([[4.0], [8.0]]),
            means=np.zeros((2, 1)),
        )
        assert np.allclose(inst.x_star, [[2.0], [4.0]])
        assert np.allclose(inst.x_star_c, [3.0])
        assert np.allclose(inst.theta_star_c, [6.0])
        assert inst.lam[0] == pytest.approx(2.0)

    def test_gaussian_second_moment_at_zero_mean(self):
        # m = 0, eps_a = 1: E[I + s s^T] = 2 I, so abar = 2 A_base.
        a_base = np.array([[3.0, 1.0], [0.0, 2.0]])
        cfg = InstanceConfig(n=1, d=2, eps_a=1.0, eps_b=0.5, seed=0)
        inst = build_gaussian_instance(
            cfg, a_base, np.eye(2), np.ones((1, 2)), np.zeros((1, 2))
        )
        assert np.allclose(inst.abar[0], 2.0 * a_base)
        assert np.allclose(inst.phibar[0], 1.5 * np.eye(2))

    def test_nonzero_mean_closed_form(self):
        m = np.array([1.0, -2.0])
        a_base = np.eye(2)
        cfg = InstanceConfig(n=1, d=2, eps_a=1.0, eps_b=0.0, seed=0)
        inst = build_gaussian_instance(
            cfg, a_base, np.eye(2), np.ones((1, 2)), m[None, :]
        )
        expected = np.eye(2) + (np.outer(m, m) + np.eye(2))
        assert np.allclose(inst.abar[0], expected)


class TestGaussianGeneration:
    def test_agent_zero_pinned_at_center(self):
        inst = generate_gaussian_instance(_cfg())
        assert np.allclose(inst.means[0], 0.0)

    def test_mean_norms_scale_with_delta_env(self):
        inst = generate_gaussian_instance(_cfg(delta_env=0.5))
        norms = np.linalg.norm(inst.means[1:], axis=1)
        assert np.allclose(norms, 0.5 * inst.config.c_a)

    def test_objective_gaps_scale_with_delta_obj(self):
        inst = generate_gaussian_instance(_cfg(delta_obj=0.4))
        gaps = np.linalg.norm(inst.theta[1:] - inst.theta[0], axis=1)
        assert np.allclose(gaps, 0.4)

    def test_zero_delta_collapses_agents(self):
        inst = generate_gaussian_instance(_cfg(delta_env=0.0, delta_obj=0.0))
        assert np.allclose(inst.means, 0.0)
        for i in range(1, inst.n):
            assert np.allclose(inst.theta[i], inst.theta[0])
            assert np.allclose(inst.x_star[i], inst.x_star[0])

    def test_positive_lambdas(self):
        inst = generate_gaussian_instance(_cfg())
        assert inst.lam.min() > 1e-6
        assert inst.lam_c > 1e-6
        assert inst.lam_b > 1e-6

    def test_deterministic_in_seed(self):
        a = generate_gaussian_instance(_cfg(seed=9))
        b = generate_gaussian_instance(_cfg(seed=9))
        assert np.array_equal(a.abar, b.abar)
        assert np.array_equal(a.x_star, b.x_star)

    def test_fixed_point_identity(self):
        inst = generate_gaussian_instance(_cfg())
        for i in range(inst.n):
            assert np.allclose(inst.abar[i] @ inst.x_star[i], inst.bbar[i], atol=1e-10)
        assert np.allclose(inst.abar0 @ inst.x_star_c, inst.bbar0, atol=1e-10)

    def test_aggregates_are_uniform_means(self):
        inst = generate_gaussian_instance(_cfg())
        assert np.allclose(inst.abar0, inst.abar.mean(axis=0))
        assert np.allclose(inst.bbar0, inst.bbar.mean(axis=0))


class TestTabularGeneration:
    def test_probabilities_valid(self):
        inst = generate_tabular_instance(
            _cfg(family="tabular", tabular_size=16, delta_env=0.5)
        )
        assert inst.mu.min() >= 0.0
        assert np.allclose(inst.mu.sum(axis=1), 1.0)
        assert np.allclose(inst.mu0, inst.mu.mean(axis=0))

    def test_exact_pairwise_tv(self):
        # Disjoint perturbation blocks make every pairwise TV exactly delta.
        delta = 0.5
        inst = generate_tabular_instance(
            _cfg(family="tabular", n=2, tabular_size=4, delta_env=delta)
        )
        tv = 0.5 * np.abs(inst.mu[0] - inst.mu[1]).sum()
        assert tv == pytest.approx(delta, abs=1e-12)

    def test_diagonal_analytic_means(self):
        inst = generate_tabular_instance(
            _cfg(family="tabular", tabular_size=16, delta_env=0.3)
        )
        for i in range(inst.n):
            expected = np.diag(inst.mu[i] @ inst.a_states)
            assert np.allclose(inst.abar[i], expected)


class TestReferences:
    def test_analytic_matches_direct_solve(self):
        inst = generate_gaussian_instance(_cfg())
        for i in range(inst.n):
            x = reference_solution(inst, i, "analytic")
            assert np.allclose(inst.abar[i] @ x, inst.bbar[i], atol=1e-10)
        assert np.allclose(reference_solution(inst, CENTRAL, "analytic"), inst.x_star_c)

    def test_monte_carlo_converges_to_analytic(self):
        inst = generate_gaussian_instance(_cfg(seed=5))
        for i in (0, 2, CENTRAL):
            ana = reference_solution(inst, i, "analytic")
            mc = reference_solution(inst, i, "monte_carlo", samples=40_000)
            assert np.linalg.norm(mc - ana) <= 0.05 * np.linalg.norm(ana)

    def test_monte_carlo_deterministic(self):
        inst = generate_gaussian_instance(_cfg())
        a = reference_solution(inst, 1, "monte_carlo", samples=500)
        b = reference_solution(inst, 1, "monte_carlo", samples=500)
        assert np.array_equal(a, b)

    def test_unknown_mode_rejected(self):
        inst = generate_gaussian_instance(_cfg())
        with pytest.raises(ValueError):
            reference_solution(inst, 0, "bogus")

    def test_analytic_means_dispatch(self):
        inst = generate_gaussian_instance(_cfg())
        abar, phibar, bbar = analytic_means(inst, CENTRAL)
        assert np.array_equal(abar, inst.abar0)
        assert np.array_equal(bbar, inst.bbar0)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=1, max_value=5),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=1.0),
    st.integers(min_value=0, max_value=10_000),
)
def test_generated_instances_always_well_posed(n, d, delta_env, delta_obj, seed):
    inst = generate_instance(
        InstanceConfig(n=n, d=d, delta_env=delta_env, delta_obj=delta_obj, seed=seed)
    )
    assert inst.lam.min() > 1e-6
    for i in range(n):
        assert np.allclose(inst.abar[i] @ inst.x_star[i], inst.bbar[i], atol=1e-8)
