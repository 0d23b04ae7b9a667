"""Self-contained invariant checks: density-ratio laws, correction
unbiasedness, stochastic-condition certification, oracle equivalence, and
schedule algebra. Each check returns (name, passed, detail) so the CLI can
print one pass/fail line per property.
"""

from __future__ import annotations

import math

import numpy as np

from . import environments, tdapp
from .metrics import estimate_nu, nu_from_samples
from .model import (
    CENTRAL,
    InstanceConfig,
    generate_gaussian_instance,
    generate_tabular_instance,
    reference_solution,
)
from .schedules import StepSchedule, step_size, tail_average
from .seeding import substream


def _ratio_law_instances():
    return [
        generate_gaussian_instance(
            InstanceConfig(n=8, d=3, delta_env=0.4, delta_obj=0.2, seed=3)
        ),
        generate_tabular_instance(
            InstanceConfig(n=6, d=3, family="tabular", delta_env=0.5,
                           delta_obj=0.2, tabular_size=24, seed=4)
        ),
    ]


def check_density_ratio_laws(samples: int = 10_000):
    """0 <= rho_i <= n and mean_i rho_i(s) = 1 pointwise over mixture draws."""
    worst_bound = 0.0
    worst_mix = 0.0
    for inst in _ratio_law_instances():
        rng = substream(11, "ratio-laws", inst.family)
        states = environments.sample_states(inst, CENTRAL, rng, samples)
        rho = environments.density_ratio_matrix(inst, states)
        worst_bound = max(worst_bound, float(-rho.min()), float(rho.max() - inst.n))
        worst_mix = max(worst_mix, float(np.abs(rho.mean(axis=0) - 1.0).max()))
    passed = worst_bound <= 1e-9 and worst_mix <= 1e-9
    return ("density_ratio_laws", passed,
            f"bound excess {worst_bound:.2e}, mixture deviation {worst_mix:.2e}")


def corrected_direction_mc(inst, i, x_i, x_c, theta_c, samples, rng):
    """Monte Carlo draws of the full corrected local direction for agent i:
    g_i(x_i) + importance-corrected central direction - bias correction,
    using exact density ratios and fresh per-agent samples. Shape (m, d)."""
    n = inst.n
    ghat = np.zeros((samples, inst.d))
    for a in range(n):
        s = environments.sample_states(inst, a, rng, samples)
        term = environments.batch_a_dot(inst, s, x_c) - environments.batch_phi_dot(
            inst, s, theta_c
        )
        rho_ia = environments.density_ratio_matrix(inst, s)[i]
        ghat += rho_ia[:, None] * term / n
    s_i = environments.sample_states(inst, i, rng, samples)
    g_local = environments.batch_a_dot(inst, s_i, x_i) - environments.batch_b(
        inst, i, s_i
    )
    g_corr = environments.batch_a_dot(inst, s_i, x_c) - environments.batch_phi_dot(
        inst, s_i, theta_c
    )
    return g_local + ghat - g_corr


def check_correction_unbiasedness(samples: int = 100_000, instances: int = 3,
                                  frozen_states: int = 5):
    """With exact ratios and the true central objective weight, the mean
    corrected direction equals abar_i x_i - bbar_i within 4 standard errors."""
    worst_z = 0.0
    for k in range(instances):
        inst = generate_gaussian_instance(
            InstanceConfig(n=5, d=4, delta_env=0.3, delta_obj=0.3, seed=100 + k)
        )
        rng = substream(777, "unbias", k)
        for j in range(frozen_states):
            i = j % inst.n
            x = rng.standard_normal((inst.n, inst.d))
            x_c = rng.standard_normal(inst.d)
            draws = corrected_direction_mc(
                inst, i, x[i], x_c, inst.theta_star_c, samples, rng
            )
            target = inst.abar[i] @ x[i] - inst.bbar[i]
            se = draws.std(axis=0, ddof=1) / math.sqrt(samples)
            z = np.abs(draws.mean(axis=0) - target) / np.maximum(se, 1e-300)
            worst_z = max(worst_z, float(z.max()))
    return ("correction_unbiasedness", worst_z <= 4.0,
            f"worst |z| = {worst_z:.2f} (limit 4)")


def multiplicative_noise_samples(eps: float, d: int, count: int,
                                 rng: np.random.Generator) -> np.ndarray:
    """A_k = I + eps * U_k with ||U_k|| = 1 and U_k paired with -U_k, so the
    exact mean is the identity."""
    half = count // 2
    u = rng.standard_normal((half, d, d))
    u /= np.linalg.norm(u, 2, axis=(1, 2))[:, None, None]
    eye = np.eye(d)
    return np.concatenate([eye + eps * u, eye - eps * u])


def rotation_family_nu(eps: float, count: int, seed: int = 5) -> float:
    """nu for planar rotations with angle uniform on [0, 2*pi - eps]; the
    noise direction is maximally misaligned and nu blows up as eps -> 0."""
    rng = substream(seed, "rotation", int(eps * 1e6))
    angles = rng.uniform(0.0, 2.0 * math.pi - eps, size=count)
    cos, sin = np.cos(angles), np.sin(angles)
    a = np.zeros((count, 2, 2))
    a[:, 0, 0] = cos
    a[:, 0, 1] = -sin
    a[:, 1, 0] = sin
    a[:, 1, 1] = cos
    width = 2.0 * math.pi - eps
    cbar = (math.sin(width)) / width
    sbar = (1.0 - math.cos(width)) / width
    abar = np.array([[cbar, -sbar], [sbar, cbar]])
    nu, _ = nu_from_samples(a, abar)
    return nu


def check_nu_certification(samples: int = 2000):
    """PSD noise gives nu = 1; multiplicative eps-noise gives nu <= 1 + eps;
    a gamma = 0.9 TD instance stays under (1 + gamma)/(1 - gamma) = 19."""
    details = []
    ok = True

    tab = generate_tabular_instance(
        InstanceConfig(n=4, d=3, family="tabular", delta_env=0.3,
                       tabular_size=16, seed=7)
    )
    nu, se = estimate_nu(tab, samples)
    psd_ok = abs(nu - 1.0) <= 3.0 * se + 1e-9
    ok &= psd_ok
    details.append(f"psd nu={nu:.4f}+-{se:.1e}")

    rng = substream(9, "mult-noise")
    a = multiplicative_noise_samples(0.5, 4, samples, rng)
    nu, se = nu_from_samples(a, np.eye(4))
    mult_ok = nu <= 1.5 + 3.0 * se
    ok &= mult_ok
    details.append(f"multiplicative nu={nu:.4f}")

    mrp = tdapp.generate_mrp(5, 8, 0.9, seed=13)
    nu, se = estimate_nu(mrp, samples)
    td_ok = nu <= 19.0 + 3.0 * se
    ok &= td_ok
    details.append(f"td nu={nu:.3f} (limit 19)")

    nu_tight = rotation_family_nu(0.1, samples)
    nu_wide = rotation_family_nu(math.pi, samples)
    rot_ok = nu_tight > 5.0 * nu_wide
    ok &= rot_ok
    details.append(f"rotation nu({0.1})={nu_tight:.1f} vs nu(pi)={nu_wide:.2f}")

    return ("nu_certification", bool(ok), "; ".join(details))


def check_oracle_equivalence(instances: int = 10, mc_samples: int = 5000):
    """Analytic reference solutions against the sample-mean route: Monte
    Carlo (5000 draws) within 5% relative error for gaussian instances, an
    independent exact finite-sum recomputation within 1e-10 for tabular."""
    worst_rel = 0.0
    for k in range(instances):
        inst = generate_gaussian_instance(
            InstanceConfig(n=6, d=4, delta_env=0.3, delta_obj=0.3, seed=200 + k)
        )
        for i in list(range(inst.n)) + [CENTRAL]:
            ana = reference_solution(inst, i, "analytic")
            mc = reference_solution(inst, i, "monte_carlo", mc_samples)
            worst_rel = max(
                worst_rel,
                float(np.linalg.norm(mc - ana) / np.linalg.norm(ana)),
            )
    worst_tab = 0.0
    tab = generate_tabular_instance(
        InstanceConfig(n=5, d=3, family="tabular", delta_env=0.4,
                       delta_obj=0.3, tabular_size=20, seed=6)
    )
    for i in range(tab.n):
        # independent route: enumerate every state explicitly
        abar = sum(tab.mu[i][s] * np.diag(tab.a_states[s])
                   for s in range(len(tab.mu0)))
        bbar = sum(tab.mu[i][s] * np.diag(tab.phi_states[s]) @ tab.theta[i]
                   for s in range(len(tab.mu0)))
        x = np.linalg.solve(abar, bbar)
        worst_tab = max(worst_tab, float(np.abs(x - tab.x_star[i]).max()))
    passed = worst_rel <= 0.05 and worst_tab <= 1e-10
    return ("oracle_equivalence", passed,
            f"gaussian max rel err {worst_rel:.3%}, tabular gap {worst_tab:.1e}")


def check_schedule_algebra(trials: int = 100):
    """Schedule closed forms to 1e-12 and tail-average weights summing to 1."""
    rng = substream(21, "schedule-algebra")
    worst = 0.0
    for _ in range(trials):
        tau = int(rng.integers(0, 1000))
        t0 = int(rng.integers(1, 100))
        lam = float(rng.uniform(0.1, 5.0))
        horizon = float(rng.uniform(2.0, 1e4))
        diminishing = step_size(StepSchedule(kind="diminishing", t0=t0, lam=lam), tau)
        worst = max(worst, abs(diminishing - 4.0 / ((tau + t0 + 1) * lam)))
        theory = step_size(
            StepSchedule(kind="theory_constant", horizon=horizon, lam=lam), tau
        )
        worst = max(worst, abs(theory - math.log(horizon) / (lam * horizon)))
        length = int(rng.integers(1, 50))
        weights = tail_average([np.ones(1)] * length, t0=t0)
        worst = max(worst, abs(float(weights[0]) - 1.0))
    return ("schedule_algebra", worst <= 1e-12, f"worst deviation {worst:.2e}")


def run_all(quick: bool = False):
    """Execute every check; quick mode trims the Monte Carlo budgets."""
    if quick:
        return [
            check_density_ratio_laws(2000),
            check_correction_unbiasedness(20_000, instances=1, frozen_states=2),
            check_nu_certification(500),
            check_oracle_equivalence(instances=2),
            check_schedule_algebra(20),
        ]
    return [
        check_density_ratio_laws(),
        check_correction_unbiasedness(),
        check_nu_certification(),
        check_oracle_equivalence(),
        check_schedule_algebra(),
    ]
