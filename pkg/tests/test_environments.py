import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from pclsim import environments as env
from pclsim.model import (
    CENTRAL,
    TABULAR,
    Instance,
    InstanceConfig,
    build_gaussian_instance,
    generate_gaussian_instance,
    generate_tabular_instance,
)
from pclsim.seeding import substream


def _gaussian(n=4, d=3, delta_env=0.4, delta_obj=0.2, seed=2):
    return generate_gaussian_instance(
        InstanceConfig(n=n, d=d, delta_env=delta_env, delta_obj=delta_obj, seed=seed)
    )


def _tabular(n=4, size=16, delta_env=0.5, seed=3):
    return generate_tabular_instance(
        InstanceConfig(n=n, d=3, family=TABULAR, delta_env=delta_env,
                       delta_obj=0.2, tabular_size=size, seed=seed)
    )


def _tiny_tabular(mu):
    """Minimal tabular instance with explicit state distributions."""
    mu = np.asarray(mu, dtype=float)
    n, size = mu.shape
    cfg = InstanceConfig(n=n, d=1, family=TABULAR, tabular_size=size, seed=0)
    return Instance(
        config=cfg, family=TABULAR, mu=mu, mu0=mu.mean(axis=0),
        a_states=np.ones((size, 1)), phi_states=np.ones((size, 1)),
        theta=np.zeros((n, 1)),
        abar=np.ones((n, 1, 1)), phibar=np.ones((n, 1, 1)), bbar=np.zeros((n, 1)),
    )


class TestObserve:
    def test_scalar_hand_case(self):
        # d=1, s=2, eps_a=1, A_base=3: A(s) = 3 + 1 * s * (3 * s) = 15.
        cfg = InstanceConfig(n=1, d=1, eps_a=1.0, eps_b=0.5, seed=0)
        inst = build_gaussian_instance(
            cfg, np.array([[3.0]]), np.array([[2.0]]),
            np.array([[4.0]]), np.zeros((1, 1)),
        )
        obs = env.observe(inst, 0, np.array([2.0]))
        assert float(obs.a[0, 0]) == pytest.approx(15.0)
        assert float(obs.phi[0, 0]) == pytest.approx(2.0 + 0.5 * 2.0 * (2.0 * 2.0))
        assert float(obs.b[0]) == pytest.approx(float(obs.phi[0, 0]) * 4.0)

    def test_observe_is_pure(self):
        inst = _gaussian()
        s = np.arange(inst.d, dtype=float)
        a = env.observe(inst, 1, s)
        b = env.observe(inst, 1, s)
        assert np.array_equal(a.a, b.a) and np.array_equal(a.b, b.b)

    def test_central_objective_is_mean(self):
        inst = _gaussian()
        s = np.ones(inst.d)
        obs_c = env.observe(inst, CENTRAL, s)
        mean_b = np.mean([env.observe(inst, i, s).b for i in range(inst.n)], axis=0)
        assert np.allclose(obs_c.b, mean_b)

    def test_tabular_one_hot_features(self):
        inst = _tabular()
        obs = env.observe(inst, 0, 5)
        assert obs.psi.sum() == 1.0 and obs.psi[5] == 1.0
        assert np.allclose(obs.a, np.diag(inst.a_states[5]))

    def test_batch_matches_single(self):
        inst = _gaussian()
        rng = substream(0, "test-batch")
        states = env.sample_states(inst, 1, rng, 7)
        x = rng.standard_normal(inst.d)
        single_ax = np.stack([env.observe(inst, 1, s).a @ x for s in states])
        assert np.allclose(env.batch_a_dot(inst, states, x), single_ax)
        single_b = np.stack([env.observe(inst, 1, s).b for s in states])
        assert np.allclose(env.batch_b(inst, 1, states), single_b)
        assert np.allclose(env.batch_a(inst, states) @ x, single_ax)


class TestSampling:
    def test_gaussian_sample_mean(self):
        inst = _gaussian(delta_env=0.6)
        rng = substream(1, "test-sample")
        states = env.sample_states(inst, 2, rng, 20_000)
        assert np.allclose(states.mean(axis=0), inst.means[2], atol=0.05)

    def test_tabular_sample_frequencies(self):
        inst = _tabular()
        rng = substream(2, "test-sample")
        states = env.sample_states(inst, 1, rng, 50_000)
        freq = np.bincount(states, minlength=len(inst.mu0)) / len(states)
        assert np.abs(freq - inst.mu[1]).max() < 0.01

    def test_central_sampling_uses_mixture(self):
        inst = _tabular(delta_env=0.8)
        rng = substream(3, "test-sample")
        states = env.sample_states(inst, CENTRAL, rng, 50_000)
        freq = np.bincount(states, minlength=len(inst.mu0)) / len(states)
        assert np.abs(freq - inst.mu0).max() < 0.01


class TestDensityRatios:
    def test_tabular_hand_case(self):
        # mu1 = (1/2, 1/2), mu2 = (1/4, 3/4) -> mu0 = (3/8, 5/8),
        # rho_1(0) = (1/2) / (3/8) = 4/3.
        inst = _tiny_tabular([[0.5, 0.5], [0.25, 0.75]])
        rho = env.density_ratio_matrix(inst, np.array([0, 1]))
        assert rho[0, 0] == pytest.approx(4.0 / 3.0)
        assert rho[1, 0] == pytest.approx(2.0 / 3.0)
        assert rho[0, 1] == pytest.approx(0.8)
        assert env.density_ratio(inst, 0, 0) == pytest.approx(4.0 / 3.0)

    def test_zero_over_zero_convention(self):
        inst = _tiny_tabular([[1.0, 0.0], [1.0, 0.0]])
        rho = env.density_ratio_matrix(inst, np.array([1]))
        assert np.all(rho == 0.0)

    @pytest.mark.parametrize("factory", [_gaussian, _tabular])
    def test_mixture_identity_and_bounds(self, factory):
        inst = factory()
        rng = substream(4, "test-ratio", inst.family)
        states = env.sample_states(inst, CENTRAL, rng, 2000)
        rho = env.density_ratio_matrix(inst, states)
        assert rho.min() >= 0.0
        assert rho.max() <= inst.n + 1e-9
        assert np.abs(rho.mean(axis=0) - 1.0).max() <= 1e-9

    def test_gaussian_ratio_against_explicit_densities(self):
        inst = _gaussian(n=3, d=2, delta_env=0.3)
        rng = substream(5, "test-ratio")
        states = env.sample_states(inst, CENTRAL, rng, 50)
        rho = env.density_ratio_matrix(inst, states)
        for k, s in enumerate(states):
            liks = np.array([
                np.exp(-0.5 * np.sum((s - m) ** 2)) for m in inst.means
            ])
            expected = liks / liks.mean()
            assert np.allclose(rho[:, k], expected, atol=1e-9)

    def test_no_overflow_at_large_separation(self):
        inst = _gaussian(delta_env=1.0)  # mean gaps of size c_a = 4
        rng = substream(6, "test-ratio")
        states = env.sample_states(inst, CENTRAL, rng, 500)
        rho = env.density_ratio_matrix(inst, states)
        assert np.all(np.isfinite(rho))


class TestTvDistance:
    def test_gaussian_closed_form_vs_numeric_integration(self):
        # TV(N(0,1), N(2,1)) = 2 * NormalCDF(1) - 1, checked against a direct
        # half-L1 numerical integration of the two densities.
        cfg = InstanceConfig(n=2, d=1, seed=0)
        inst = build_gaussian_instance(
            cfg, np.eye(1), np.eye(1), np.zeros((2, 1)),
            np.array([[0.0], [2.0]]),
        )
        got = env.tv_distance(inst, 0, 1)
        oracle, _ = quad(
            lambda s: 0.5 * abs(norm.pdf(s) - norm.pdf(s, loc=2.0)), -12, 14
        )
        assert got == pytest.approx(oracle, abs=1e-6)
        assert got == pytest.approx(2.0 * norm.cdf(1.0) - 1.0, abs=1e-12)

    def test_tabular_half_l1(self):
        inst = _tiny_tabular([[0.5, 0.5], [0.25, 0.75]])
        assert env.tv_distance(inst, 0, 1) == pytest.approx(0.25)
        assert env.tv_distance(inst, 0, CENTRAL) == pytest.approx(0.125)

    def test_self_distance_zero(self):
        inst = _gaussian()
        assert env.tv_distance(inst, 1, 1) == 0.0
        assert env.tv_distance(inst, CENTRAL, CENTRAL) == 0.0

    def test_symmetry_and_range(self):
        inst = _gaussian()
        for i in range(inst.n):
            for j in range(i + 1, inst.n):
                tv = env.tv_distance(inst, i, j)
                assert tv == env.tv_distance(inst, j, i)
                assert 0.0 <= tv <= 1.0

    def test_gaussian_center_mc_matches_scalar_integration(self):
        # Agent vs mixture: MC estimate against numeric integration of
        # 0.5 * |mu_i - mu_0| for a scalar two-agent family.
        cfg = InstanceConfig(n=2, d=1, seed=0)
        inst = build_gaussian_instance(
            cfg, np.eye(1), np.eye(1), np.zeros((2, 1)),
            np.array([[0.0], [2.0]]),
        )
        got = env.tv_distance(inst, 0, CENTRAL)
        mix = lambda s: 0.5 * (norm.pdf(s) + norm.pdf(s, loc=2.0))
        oracle, _ = quad(lambda s: 0.5 * abs(norm.pdf(s) - mix(s)), -12, 14)
        assert got == pytest.approx(oracle, abs=0.01)


class TestCoupledSampling:
    def test_requires_tabular(self):
        inst = _gaussian()
        rng = substream(7, "test-couple")
        with pytest.raises(env.UnsupportedFamilyError):
            env.coupled_sample(inst, 0, rng)

    def test_identical_distributions_always_couple(self):
        inst = _tiny_tabular([[0.5, 0.5], [0.5, 0.5]])
        rng = substream(8, "test-couple")
        for _ in range(50):
            s_i, s_0, coupled = env.coupled_sample(inst, 0, rng)
            assert coupled and s_i == s_0

    def test_marginals_and_coupling_frequency(self):
        inst = _tabular(n=3, size=12, delta_env=0.6)
        rng = substream(9, "test-couple")
        m = 40_000
        draws = [env.coupled_sample(inst, 1, rng) for _ in range(m)]
        s_i = np.array([d[0] for d in draws])
        s_0 = np.array([d[1] for d in draws])
        coupled = np.array([d[2] for d in draws])
        size = len(inst.mu0)
        freq_i = np.bincount(s_i, minlength=size) / m
        freq_0 = np.bincount(s_0, minlength=size) / m
        assert np.abs(freq_i - inst.mu[1]).max() < 4 * np.sqrt(0.25 / m) + 0.005
        assert np.abs(freq_0 - inst.mu0).max() < 4 * np.sqrt(0.25 / m) + 0.005
        # P(coupled) = 1 - TV(mu_i, mu_0) within four binomial standard errors.
        p = 1.0 - env.tv_distance(inst, 1, CENTRAL)
        se = np.sqrt(p * (1 - p) / m)
        assert abs(coupled.mean() - p) <= 4 * se
        assert np.all(s_i[coupled] == s_0[coupled])
