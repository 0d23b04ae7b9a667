"""State sampling, observations, exact density ratios, TV distances.

Density ratios are computed against the uniform mixture mu_0 = mean_i mu_i,
so they are bounded by the number of agents n. Gaussian ratios are evaluated
in log space (mean separations up to c_a cause underflow otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, ndtr

from .model import CENTRAL, GAUSSIAN, TABULAR, Instance
from .seeding import substream


class UnsupportedFamilyError(ValueError):
    """Operation not defined for this instance family."""


@dataclass
class Observation:
    """One stochastic sample for one agent: state s, A(s), b_i(s), Phi(s)
    (and the one-hot psi(s) for tabular instances)."""

    agent_id: int
    state: object
    a: np.ndarray
    b: np.ndarray
    phi: np.ndarray
    psi: np.ndarray | None = None


def _is_mrp(inst) -> bool:
    return getattr(inst, "family", None) == "mrp"


def sample_state(inst: Instance, agent_id: int, rng: np.random.Generator):
    """One state draw from agent's environment (CENTRAL draws from the
    uniform mixture)."""
    if _is_mrp(inst):
        from . import tdapp

        return tdapp.sample_pair(inst, agent_id, rng)
    if inst.family == GAUSSIAN:
        i = rng.integers(inst.n) if agent_id == CENTRAL else agent_id
        return inst.means[i] + rng.standard_normal(inst.d)
    probs = inst.mu0 if agent_id == CENTRAL else inst.mu[agent_id]
    return int(rng.choice(len(probs), p=probs))


def sample_states(inst: Instance, agent_id: int, rng: np.random.Generator, count: int):
    """Vectorized batch of `count` state draws for one agent."""
    if _is_mrp(inst):
        from . import tdapp

        return tdapp.sample_pairs(inst, agent_id, rng, count)
    if inst.family == GAUSSIAN:
        if agent_id == CENTRAL:
            idx = rng.integers(inst.n, size=count)
            return inst.means[idx] + rng.standard_normal((count, inst.d))
        return inst.means[agent_id] + rng.standard_normal((count, inst.d))
    probs = inst.mu0 if agent_id == CENTRAL else inst.mu[agent_id]
    return rng.choice(len(probs), p=probs, size=count)


def observe(inst: Instance, agent_id: int, state) -> Observation:
    """Evaluate (A, b, Phi) at a state; pure function of its inputs.

    For agent_id = CENTRAL the objective is the true central one,
    b_0(s) = mean_j b_j(s) = Phi(s) @ mean_j theta_j.
    """
    if _is_mrp(inst):
        from . import tdapp

        return tdapp.bellman_observation(inst, agent_id, state[0], state[1])
    theta = inst.theta.mean(axis=0) if agent_id == CENTRAL else inst.theta[agent_id]
    if inst.family == GAUSSIAN:
        s = np.asarray(state, dtype=float)
        a = inst.a_base + inst.config.eps_a * np.outer(s, inst.a_base.T @ s)
        phi = inst.phi_base + inst.config.eps_b * np.outer(s, inst.phi_base.T @ s)
        return Observation(agent_id, s, a, phi @ theta, phi)
    a = np.diag(inst.a_states[state])
    phi = np.diag(inst.phi_states[state])
    psi = np.zeros(len(inst.mu0))
    psi[state] = 1.0
    return Observation(agent_id, state, a, phi @ theta, phi, psi)


# ---------------------------------------------------------------------------
# vectorized evaluation (used by Monte Carlo oracles and the harness)


def batch_a(inst: Instance, states) -> np.ndarray:
    """A(s) for a batch of states, shape (m, d, d)."""
    if _is_mrp(inst):
        states = np.atleast_2d(states)
        f = inst.phi[states[:, 0]]
        f_next = inst.phi[states[:, 1]]
        return np.einsum("mi,mj->mij", f, f - inst.gamma * f_next)
    if inst.family == GAUSSIAN:
        states = np.atleast_2d(states)
        return inst.a_base + inst.config.eps_a * np.einsum(
            "mi,mj->mij", states, states @ inst.a_base
        )
    return np.stack([np.diag(row) for row in inst.a_states[states]])


def batch_a_dot(inst: Instance, states, x: np.ndarray) -> np.ndarray:
    """A(s) @ x for a batch of states, shape (m, d)."""
    if _is_mrp(inst):
        states = np.atleast_2d(states)
        f = inst.phi[states[:, 0]]
        f_next = inst.phi[states[:, 1]]
        return f * ((f - inst.gamma * f_next) @ x)[:, None]
    if inst.family == GAUSSIAN:
        states = np.atleast_2d(states)
        y = inst.a_base @ x
        return y + inst.config.eps_a * states * (states @ y)[:, None]
    return inst.a_states[states] * x


def batch_phi_dot(inst: Instance, states, theta: np.ndarray) -> np.ndarray:
    """Phi(s) @ theta for a batch of states, shape (m, d)."""
    if _is_mrp(inst):
        states = np.atleast_2d(states)
        f = inst.phi[states[:, 0]]
        return f * (f @ theta)[:, None]
    if inst.family == GAUSSIAN:
        states = np.atleast_2d(states)
        y = inst.phi_base @ theta
        return y + inst.config.eps_b * states * (states @ y)[:, None]
    return inst.phi_states[states] * theta


def batch_b(inst: Instance, agent_id: int, states) -> np.ndarray:
    """b_i(s) for a batch of states, shape (m, d)."""
    theta = inst.theta.mean(axis=0) if agent_id == CENTRAL else inst.theta[agent_id]
    return batch_phi_dot(inst, states, theta)


# ---------------------------------------------------------------------------
# density ratios and distribution distances


def _gaussian_log_liks(inst: Instance, states) -> np.ndarray:
    """log N(s; m_i, I) up to a shared constant; shape (n, m)."""
    states = np.atleast_2d(states)
    diff = states[None, :, :] - inst.means[:, None, :]
    return -0.5 * np.einsum("nmi,nmi->nm", diff, diff)


def density_ratio_matrix(inst: Instance, states) -> np.ndarray:
    """rho_i(s_k) = mu_i(s_k) / mu_0(s_k) for every agent i and state s_k;
    shape (n, m). Tabular uses the 0/0 := 0 convention."""
    if _is_mrp(inst):
        from . import tdapp

        return tdapp.density_ratio_matrix_mrp(inst, states)
    if inst.family == GAUSSIAN:
        logs = _gaussian_log_liks(inst, states)
        return inst.n * np.exp(logs - logsumexp(logs, axis=0, keepdims=True))
    states = np.asarray(states)
    num = inst.mu[:, states]
    den = inst.mu0[states]
    out = np.zeros_like(num)
    np.divide(num, den[None, :], out=out, where=den[None, :] > 0)
    return out


def density_ratio(inst: Instance, agent_id: int, state) -> float:
    """Exact ratio of the agent density to the uniform mixture density."""
    if _is_mrp(inst) or inst.family == TABULAR:
        return float(density_ratio_matrix(inst, [state])[agent_id, 0])
    return float(density_ratio_matrix(inst, np.asarray(state)[None, :])[agent_id, 0])


def round_ratio_table(inst: Instance, states) -> np.ndarray:
    """rho[i][j] = rho_i(s_j) for one state per agent; shape (n, n)."""
    return density_ratio_matrix(inst, states)


def tv_distance(inst: Instance, i: int, j: int, mc_samples: int = 100_000) -> float:
    """Total variation distance between agent environments (CENTRAL = the
    uniform mixture).

    Tabular and MRP families are exact half-L1 sums. Gaussian agent pairs use
    the equal-covariance closed form 2 * NormalCDF(||m_i - m_j|| / 2) - 1;
    agent-vs-mixture has no closed form and falls back to a seeded Monte
    Carlo estimate E_mu0[max(0, 1 - rho_i)].
    """
    if i == j:
        return 0.0
    if _is_mrp(inst):
        from . import tdapp

        return tdapp.tv_distance_mrp(inst, i, j)
    if inst.family == TABULAR:
        p = inst.mu0 if i == CENTRAL else inst.mu[i]
        q = inst.mu0 if j == CENTRAL else inst.mu[j]
        return 0.5 * float(np.abs(p - q).sum())
    if i != CENTRAL and j != CENTRAL:
        gap = np.linalg.norm(inst.means[i] - inst.means[j])
        return float(2.0 * ndtr(gap / 2.0) - 1.0)
    agent = j if i == CENTRAL else i
    rng = substream(inst.config.seed, "tv-mc", agent)
    states = sample_states(inst, CENTRAL, rng, mc_samples)
    rho = density_ratio_matrix(inst, states)[agent]
    return float(np.mean(np.clip(1.0 - rho, 0.0, None)))


def coupled_sample(inst: Instance, agent_id: int, rng: np.random.Generator):
    """Maximal coupling of (mu_i, mu_0) for tabular instances.

    Returns (state_i, state_0, coupled). Marginals are exactly mu_i and
    mu_0, and P(coupled) = 1 - TV(mu_i, mu_0): draw from the common part
    with that probability, else independently from the normalized residuals.
    """
    if _is_mrp(inst) or inst.family != TABULAR:
        raise UnsupportedFamilyError("coupled sampling requires a tabular instance")
    p = inst.mu[agent_id]
    q = inst.mu0
    common = np.minimum(p, q)
    overlap = common.sum()
    if overlap >= 1.0 or rng.uniform() < overlap:
        s = int(rng.choice(len(p), p=common / overlap))
        return s, s, True
    res_p = (p - common) / (1.0 - overlap)
    res_q = (q - common) / (1.0 - overlap)
    s_i = int(rng.choice(len(p), p=res_p))
    s_0 = int(rng.choice(len(q), p=res_q))
    return s_i, s_0, False
