"""Heterogeneity measurement, stochastic-condition-number estimation, and
per-round error records.

Heterogeneity scores live in [0, 1]: the objective score from weight
distances over 2 * G_b, the environment score from total-variation
distances, and the per-agent center score from the distance to the virtual
aggregated agent. Effective scores are min(1, nu * raw) where nu is the
stochastic condition number max_i ||mean(sqrt(A^T A)) inv(abar_i)||.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import environments
from .model import CENTRAL
from .numerics import psd_sqrt
from .seeding import substream


@dataclass
class HeterogeneityReport:
    delta_env: float
    delta_obj: float
    delta_cen: np.ndarray           # (n,) per-agent center scores
    g_b: float                      # objective-weight normalizer
    nu_hat: float = float("nan")
    nu_se: float = float("nan")
    effective_env: float = float("nan")
    effective_obj: float = float("nan")
    effective_cen: np.ndarray | None = None


@dataclass(frozen=True)
class MetricsRecord:
    """One metrics.csv row; agent_id = -1 carries the MSE0 aggregate."""

    run_id: str
    seed: int
    algorithm: str
    cdl_variant: str
    dre_mode: str
    t: int
    agent_id: int
    squared_error: float


def objective_bound(inst) -> float:
    """G_b = max over agents and the central weight of ||theta||."""
    return float(
        max(np.linalg.norm(inst.theta, axis=1).max(), np.linalg.norm(inst.theta_star_c))
    )


def center_scores(inst, tv_samples: int = 20_000) -> np.ndarray:
    """delta_cen_i = max(TV(mu_i, mu_0), ||bbar_i - bbar_0|| / (2 G_b)).

    Gaussian agent-vs-mixture TV has no closed form; all agents share one
    seeded Monte Carlo mixture sample for speed.
    """
    n = inst.n
    g_b = objective_bound(inst)
    obj_part = np.linalg.norm(inst.bbar - inst.bbar0, axis=1) / (2.0 * g_b)
    if inst.family == "gaussian":
        rng = substream(inst.config.seed, "center-tv")
        states = environments.sample_states(inst, CENTRAL, rng, tv_samples)
        rho = environments.density_ratio_matrix(inst, states)
        tv_part = np.clip(1.0 - rho, 0.0, None).mean(axis=1)
    else:
        tv_part = np.array([environments.tv_distance(inst, i, CENTRAL) for i in range(n)])
    return np.minimum(np.maximum(tv_part, obj_part), 1.0)


def nu_from_samples(a_samples: np.ndarray, abar: np.ndarray):
    """Stochastic-condition estimate from raw A(s) draws.

    Returns (nu, jackknife standard error) for one agent:
    nu = ||mean_k sqrt(A_k^T A_k) @ inv(abar)||.
    """
    m = len(a_samples)
    d_samples = np.stack([psd_sqrt(a.T @ a) for a in a_samples])
    total = d_samples.sum(axis=0)
    abar_inv = np.linalg.inv(abar)
    nu = float(np.linalg.norm((total / m) @ abar_inv, 2))
    if m < 2:
        return nu, float("nan")
    loo = np.array(
        [np.linalg.norm(((total - dk) / (m - 1)) @ abar_inv, 2) for dk in d_samples]
    )
    se = float(np.sqrt((m - 1) / m * ((loo - loo.mean()) ** 2).sum()))
    return nu, se


def estimate_nu(inst, samples: int = 2000, seed: int | None = None):
    """max_i ||mean sqrt(A^T A) inv(abar_i)|| by Monte Carlo over each
    agent's environment, with a jackknife standard error for the max agent."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    seed = inst.config.seed if seed is None else seed
    best = (-np.inf, float("nan"))
    for i in range(inst.n):
        rng = substream(seed, "nu-est", i)
        states = environments.sample_states(inst, i, rng, samples)
        nu_i, se_i = nu_from_samples(environments.batch_a(inst, states), inst.abar[i])
        if nu_i > best[0]:
            best = (nu_i, se_i)
    return best


def heterogeneity_report(inst, nu_samples: int = 2000) -> HeterogeneityReport:
    """Measured heterogeneity of an instance, including the effective
    (nu-modulated) levels."""
    if nu_samples < 100:
        raise ValueError("nu_samples must be >= 100")
    n = inst.n
    g_b = objective_bound(inst)
    delta_obj = 0.0
    for i in range(n):
        gaps = np.linalg.norm(inst.theta[i + 1 :] - inst.theta[i], axis=1)
        if gaps.size:
            delta_obj = max(delta_obj, float(gaps.max()) / (2.0 * g_b))
    delta_env = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            delta_env = max(delta_env, environments.tv_distance(inst, i, j))
    report = HeterogeneityReport(
        delta_env=min(delta_env, 1.0),
        delta_obj=min(delta_obj, 1.0),
        delta_cen=center_scores(inst),
        g_b=g_b,
    )
    report.nu_hat, report.nu_se = estimate_nu(inst, nu_samples)
    return effective_heterogeneity(report)


def effective_heterogeneity(report: HeterogeneityReport) -> HeterogeneityReport:
    """Fill the min(1, nu * raw) fields."""
    if not np.isfinite(report.nu_hat):
        raise ValueError("nu_hat must be computed first")
    nu = report.nu_hat
    return replace(
        report,
        effective_env=min(1.0, nu * report.delta_env),
        effective_obj=min(1.0, nu * report.delta_obj),
        effective_cen=np.minimum(1.0, nu * report.delta_cen),
    )


def center_agent(report: HeterogeneityReport) -> int:
    """Agent closest to the virtual central agent (lowest index on ties)."""
    return int(np.argmin(report.delta_cen))


def squared_errors(x: np.ndarray, x_star: np.ndarray) -> np.ndarray:
    """Per-agent squared errors ||x_i - x_star_i||^2."""
    return ((x - x_star) ** 2).sum(axis=1)
