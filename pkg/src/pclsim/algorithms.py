"""Learning rules: independent, federated averaging, central objective
estimation (COE), central decision learning (CDL), the personalized
collaborative update with bias + importance correction, and the
coupled-sample density-ratio estimator.

Every step reads a pre-round snapshot of the learner state and returns a new
state; no update within a round sees another update from the same round.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .environments import Observation
from .model import Instance

ALGORITHMS = ("independent", "fedavg", "affpcl_known", "affpcl_full")
CDL_VARIANTS = ("v1", "v2")
DRE_MODES = ("exact", "coupled_tabular", "oracle_off")


class HeterogeneousEnvironmentError(ValueError):
    """Algorithm variant requires homogeneous environment distributions."""


class MissingDensityRatioError(ValueError):
    """No density-ratio table or estimate available for this round."""


@dataclass(frozen=True)
class AlgorithmId:
    name: str
    cdl_variant: str = "v1"
    dre_mode: str = "exact"

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.name!r}")
        if self.cdl_variant not in CDL_VARIANTS:
            raise ValueError(f"unknown CDL variant {self.cdl_variant!r}")
        if self.dre_mode not in DRE_MODES:
            raise ValueError(f"unknown DRE mode {self.dre_mode!r}")

    def label(self) -> str:
        return self.name


@dataclass
class LearnerState:
    """All decision variables at round t."""

    t: int
    x: np.ndarray                 # (n, d) per-agent iterates
    x_c: np.ndarray               # central decision variable
    theta_c: np.ndarray           # central objective weight
    eta: np.ndarray | None = None  # (n, S) density-ratio weights (tabular DRE)

    @property
    def x_avg(self) -> np.ndarray:
        return self.x.mean(axis=0)


def init_state(n: int, d: int, eta_dim: int | None = None) -> LearnerState:
    """Zero-initialized decision variables."""
    eta = np.zeros((n, eta_dim)) if eta_dim is not None else None
    return LearnerState(0, np.zeros((n, d)), np.zeros(d), np.zeros(d), eta)


@dataclass
class RoundBatch:
    """One synchronized round of observations plus the server-side ratio
    table rho[i][j] = rho_i(s_j)."""

    t: int
    obs: list[Observation]
    rho: np.ndarray | None = None


def _advance(state: LearnerState, **changes) -> LearnerState:
    new = replace(state, **changes)
    new.t = state.t + 1
    return new


def residual(obs: Observation, x: np.ndarray) -> np.ndarray:
    """Stochastic residual g(x) = A(s) x - b(s)."""
    return obs.a @ x - obs.b


def independent_step(state: LearnerState, batch: RoundBatch, alpha: float) -> LearnerState:
    """Each agent follows its own residual; central variables untouched."""
    x = np.stack([state.x[i] - alpha * residual(o, state.x[i]) for i, o in enumerate(batch.obs)])
    return _advance(state, x=x)


def fedavg_step(state: LearnerState, batch: RoundBatch, alpha: float) -> LearnerState:
    """Federated averaging: central update on the mean residual, then the
    result is broadcast to all agents."""
    g0 = np.mean([residual(o, state.x_c) for o in batch.obs], axis=0)
    x_c = state.x_c - alpha * g0
    return _advance(state, x_c=x_c, x=np.tile(x_c, (len(batch.obs), 1)))


def coe_step(state: LearnerState, batch: RoundBatch, alpha_b: float) -> LearnerState:
    """Central objective estimation: federated fixed-point iteration on
    mean_j (Phi(s_j) theta_c - b_j(s_j))."""
    g = np.mean([o.phi @ state.theta_c - o.b for o in batch.obs], axis=0)
    return _advance(state, theta_c=state.theta_c - alpha_b * g)


def cdl_direction(state: LearnerState, batch: RoundBatch, variant: str) -> np.ndarray:
    """Central decision direction; v1 uses the agents' own objectives,
    v2 the estimated central objective Phi(s) theta_c."""
    if variant == "v1":
        return np.mean([residual(o, state.x_c) for o in batch.obs], axis=0)
    if variant == "v2":
        return np.mean(
            [o.a @ state.x_c - o.phi @ state.theta_c for o in batch.obs], axis=0
        )
    raise ValueError(f"unknown CDL variant {variant!r}")


def cdl_step(state: LearnerState, batch: RoundBatch, alpha_c: float, variant: str = "v1") -> LearnerState:
    return _advance(state, x_c=state.x_c - alpha_c * cdl_direction(state, batch, variant))


def affpcl_known_step(
    inst: Instance, state: LearnerState, batch: RoundBatch, alpha: float
) -> LearnerState:
    """Personalized update with known central objective (homogeneous
    environments): local residual, plus the aggregated residual at the
    average iterate, minus the central residual at the agent's own sample.
    """
    delta_env = getattr(inst.config, "delta_env", None)
    if delta_env is None:
        delta_env = getattr(inst.config, "delta_kernel", 0.0)
    if delta_env > 0:
        raise HeterogeneousEnvironmentError(
            "known-objective variant requires homogeneous environments"
        )
    x_avg = state.x_avg
    theta_bar = inst.theta.mean(axis=0)
    g0 = np.mean([residual(o, x_avg) for o in batch.obs], axis=0)
    x = np.empty_like(state.x)
    for i, o in enumerate(batch.obs):
        # b_0(s_i) = mean_j b_j(s_i) = Phi(s_i) @ theta_bar
        g_corr = o.a @ x_avg - o.phi @ theta_bar
        x[i] = state.x[i] - alpha * (residual(o, state.x[i]) + g0 - g_corr)
    return _advance(state, x=x)


def importance_corrected_direction(
    i: int, batch: RoundBatch, x_c: np.ndarray, theta_c: np.ndarray
) -> np.ndarray:
    """Server-side central direction reweighted toward agent i's
    environment: (1/n) sum_j rho[i][j] (A(s_j) x_c - Phi(s_j) theta_c)."""
    if batch.rho is None:
        raise MissingDensityRatioError("batch has no density-ratio table")
    terms = np.stack([o.a @ x_c - o.phi @ theta_c for o in batch.obs])
    return batch.rho[i] @ terms / len(batch.obs)


def affpcl_full_round(
    state: LearnerState,
    batch: RoundBatch,
    alpha: float,
    alpha_c: float,
    alpha_b: float,
    cdl_variant: str = "v1",
) -> LearnerState:
    """One synchronized round of the full personalized algorithm: CDL on
    x_c, COE on theta_c, and each agent's bias- and importance-corrected
    local update. All three read the pre-round state."""
    if batch.rho is None:
        raise MissingDensityRatioError("full personalized round needs rho")
    x_c = state.x_c - alpha_c * cdl_direction(state, batch, cdl_variant)
    g_coe = np.mean([o.phi @ state.theta_c - o.b for o in batch.obs], axis=0)
    theta_c = state.theta_c - alpha_b * g_coe
    central_terms = np.stack(
        [o.a @ state.x_c - o.phi @ state.theta_c for o in batch.obs]
    )
    corrected = batch.rho @ central_terms / len(batch.obs)  # (n, d)
    x = np.empty_like(state.x)
    for i, o in enumerate(batch.obs):
        local = residual(o, state.x[i])
        bias_corr = o.a @ state.x_c - o.phi @ state.theta_c
        x[i] = state.x[i] - alpha * (local + corrected[i] - bias_corr)
    return _advance(state, x=x, x_c=x_c, theta_c=theta_c)


def dre_coupled_step(
    eta_i: np.ndarray, coupled_draw: tuple, alpha_rho: float
) -> np.ndarray:
    """Density-ratio weight update from one maximally-coupled draw
    (s_i, s_0, coupled); one-hot features, estimated ratio 1 + psi(s)^T eta."""
    s_i, s_0, _ = coupled_draw
    g = np.zeros_like(eta_i)
    g[s_0] = eta_i[s_0]
    g[s_i] -= 1.0
    g[s_0] += 1.0
    return eta_i - alpha_rho * g


def estimated_ratio(eta_i: np.ndarray, state: int, n: int) -> float:
    """rho_hat(s) = 1 + psi(s)^T eta, clipped into the valid range [0, n]."""
    return float(np.clip(1.0 + eta_i[state], 0.0, n))
