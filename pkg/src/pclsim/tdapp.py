"""TD(0) policy evaluation as an instance family.

Each agent owns a Markov reward process sharing one feature map phi over a
finite state space. A "state" of the linear system is a transition pair
(o, o'), sampled i.i.d. from mu_i(o, o') = pi_i(o) P_i(o' | o) where pi_i is
the stationary distribution of P_i. The Bellman observation is

    A(o, o') = phi(o) (phi(o) - gamma * phi(o'))^T,    b_i = phi(o) R_i(o),

with linear rewards R_i(o) = phi(o)^T theta_i, so the shared-objective
machinery (Phi(s) = phi(o) phi(o)^T) applies unchanged. The TD fixed point of
the expected system is the projected Bellman solution
Phi^T diag(pi) (Phi - gamma P Phi) x = Phi^T diag(pi) R.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import CENTRAL, GenerationFailedError, InvalidConfigError
from .numerics import solve_linear, sym_min_eig
from .seeding import substream

MRP = "mrp"


@dataclass(frozen=True)
class MrpConfig:
    n: int
    states: int                   # S
    gamma: float
    delta_kernel: float = 0.0
    delta_reward: float = 0.0
    d: int = 0                    # feature dimension; 0 -> min(states - 1, 4)
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfigError("need at least one agent")
        if self.states < 2:
            raise InvalidConfigError("need at least 2 states")
        if not 0.0 <= self.gamma < 1.0:
            raise InvalidConfigError("gamma must be in [0, 1)")
        if not 0.0 <= self.delta_kernel <= 1.0:
            raise InvalidConfigError("delta_kernel must be in [0, 1]")
        if self.delta_reward < 0.0:
            raise InvalidConfigError("delta_reward must be >= 0")
        if self.d > self.states:
            raise InvalidConfigError("feature dimension cannot exceed state count")

    @property
    def feature_dim(self) -> int:
        return self.d if self.d > 0 else min(self.states - 1, 4)


@dataclass
class MrpInstance:
    """A family of MRPs with shared features and analytic ground truth.

    The aggregate fields mirror the other instance families, so algorithms,
    metrics, and the harness treat MRP instances uniformly.
    """

    config: MrpConfig
    family: str = MRP
    p: np.ndarray = field(default=None)          # (n, S, S) transition kernels
    phi: np.ndarray = field(default=None)        # (S, d) feature rows
    theta: np.ndarray = field(default=None)      # (n, d) reward weights
    pi: np.ndarray = field(default=None)         # (n, S) stationary distributions
    pair_mu: np.ndarray = field(default=None)    # (n, S*S) transition-pair laws
    pair_mu0: np.ndarray = field(default=None)   # (S*S,) uniform mixture
    abar: np.ndarray = field(default=None)       # (n, d, d)
    phibar: np.ndarray = field(default=None)
    bbar: np.ndarray = field(default=None)
    abar0: np.ndarray = field(default=None)
    phibar0: np.ndarray = field(default=None)
    bbar0: np.ndarray = field(default=None)
    x_star: np.ndarray = field(default=None)
    x_star_c: np.ndarray = field(default=None)
    theta_star_c: np.ndarray = field(default=None)
    lam: np.ndarray = field(default=None)
    lam_c: float = 0.0
    lam_b: float = 0.0

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def d(self) -> int:
        return self.phi.shape[1]

    @property
    def states(self) -> int:
        return self.config.states

    @property
    def gamma(self) -> float:
        return self.config.gamma

    def rewards(self, agent_id: int) -> np.ndarray:
        """Per-state reward vector R_i(o) = phi(o)^T theta_i."""
        theta = self.theta.mean(axis=0) if agent_id == CENTRAL else self.theta[agent_id]
        return self.phi @ theta


def stationary_distribution(p: np.ndarray) -> np.ndarray:
    """Solve pi P = pi with sum(pi) = 1 by replacing one equation of
    (P^T - I) pi = 0 with the normalization row."""
    s = p.shape[0]
    m = p.T - np.eye(s)
    m[-1, :] = 1.0
    rhs = np.zeros(s)
    rhs[-1] = 1.0
    pi = solve_linear(m, rhs)
    if pi.min() < -1e-10:
        raise GenerationFailedError("stationary solve produced negative mass")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def build_mrp(
    cfg: MrpConfig, p: np.ndarray, phi: np.ndarray, theta: np.ndarray
) -> MrpInstance:
    """Assemble an MRP instance from explicit kernels, features, and reward
    weights; computes stationary distributions and all analytic means."""
    n, s = cfg.n, cfg.states
    p = np.asarray(p, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    d = phi.shape[1]
    pi = np.stack([stationary_distribution(p[i]) for i in range(n)])
    pair_mu = (pi[:, :, None] * p).reshape(n, s * s)
    abar = np.empty((n, d, d))
    phibar = np.empty((n, d, d))
    bbar = np.empty((n, d))
    for i in range(n):
        weighted = phi * pi[i][:, None]                    # diag(pi) Phi
        abar[i] = weighted.T @ (phi - cfg.gamma * (p[i] @ phi))
        phibar[i] = weighted.T @ phi
        bbar[i] = weighted.T @ (phi @ theta[i])
    inst = MrpInstance(
        config=cfg,
        p=p,
        phi=phi,
        theta=theta,
        pi=pi,
        pair_mu=pair_mu,
        pair_mu0=pair_mu.mean(axis=0),
        abar=abar,
        phibar=phibar,
        bbar=bbar,
    )
    inst.abar0 = abar.mean(axis=0)
    inst.phibar0 = phibar.mean(axis=0)
    inst.bbar0 = bbar.mean(axis=0)
    inst.x_star = np.stack([solve_linear(abar[i], bbar[i]) for i in range(n)])
    inst.x_star_c = solve_linear(inst.abar0, inst.bbar0)
    inst.theta_star_c = solve_linear(inst.phibar0, inst.bbar0)
    inst.lam = np.array([sym_min_eig(abar[i]) for i in range(n)])
    inst.lam_c = sym_min_eig(inst.abar0)
    inst.lam_b = sym_min_eig(inst.phibar0)
    return inst


def generate_mrp(
    n: int,
    states: int,
    gamma: float,
    delta_kernel: float = 0.0,
    delta_reward: float = 0.0,
    seed: int = 0,
    d: int = 0,
) -> MrpInstance:
    """Random MRP family: P_i mixes a shared Dirichlet base kernel with a
    per-agent perturbation kernel at weight delta_kernel; reward weights get
    a delta_reward-sized unit perturbation. Retries (up to 20 sub-seeds) when
    a chain is effectively reducible or a positivity constant degenerates."""
    cfg = MrpConfig(
        n=n, states=states, gamma=gamma, delta_kernel=delta_kernel,
        delta_reward=delta_reward, d=d, seed=seed,
    )
    s, dim = cfg.states, cfg.feature_dim
    for attempt in range(20):
        rng = substream(seed, "mrp-gen", attempt)
        p_base = rng.dirichlet(np.ones(s), size=s)
        # Centered unit-norm feature rows: centering suppresses the rank-one
        # gamma * (Phi^T pi)(...) term in the symmetric part of the expected
        # Bellman matrix, keeping the contraction constant well away from 0.
        phi = rng.standard_normal((s, dim))
        phi -= phi.mean(axis=0)
        phi /= np.maximum(np.linalg.norm(phi, axis=1), 1e-12)[:, None]
        theta_base = rng.standard_normal(dim)
        p = np.empty((n, s, s))
        theta = np.empty((n, dim))
        for i in range(n):
            perturb = rng.dirichlet(np.ones(s), size=s)
            p[i] = (1.0 - delta_kernel) * p_base + delta_kernel * perturb
            u = rng.standard_normal(dim)
            theta[i] = theta_base + delta_reward * u / np.linalg.norm(u)
        try:
            inst = build_mrp(cfg, p, phi, theta)
        except GenerationFailedError:
            continue
        if inst.pi.min() > 1e-9 and inst.lam.min() > 1e-6 and inst.lam_b > 1e-6:
            return inst
    raise GenerationFailedError(
        f"no well-posed MRP family after 20 attempts (seed {seed})"
    )


# ---------------------------------------------------------------------------
# hooks used by the environments dispatch


def sample_pair(inst: MrpInstance, agent_id: int, rng: np.random.Generator):
    """One i.i.d. transition pair (o, o') from mu_i = pi_i(o) P_i(o'|o)."""
    probs = inst.pair_mu0 if agent_id == CENTRAL else inst.pair_mu[agent_id]
    flat = int(rng.choice(len(probs), p=probs))
    return flat // inst.states, flat % inst.states


def sample_pairs(inst: MrpInstance, agent_id: int, rng: np.random.Generator, count: int):
    """(count, 2) array of i.i.d. transition pairs."""
    probs = inst.pair_mu0 if agent_id == CENTRAL else inst.pair_mu[agent_id]
    flat = rng.choice(len(probs), p=probs, size=count)
    return np.column_stack([flat // inst.states, flat % inst.states])


def bellman_observation(inst: MrpInstance, agent_id: int, o: int, o_next: int):
    """Observation for the transition (o, o'): the rank-one Bellman matrix
    and the reward direction phi(o) R_i(o)."""
    from .environments import Observation

    f, f_next = inst.phi[o], inst.phi[o_next]
    a = np.outer(f, f - inst.gamma * f_next)
    phi_mat = np.outer(f, f)
    theta = inst.theta.mean(axis=0) if agent_id == CENTRAL else inst.theta[agent_id]
    return Observation(agent_id, (o, o_next), a, phi_mat @ theta, phi_mat)


def td_reference(inst: MrpInstance, agent_id: int) -> np.ndarray:
    """Fixed point of the expected projected Bellman system for one agent
    (CENTRAL solves the aggregated system)."""
    if agent_id == CENTRAL:
        return solve_linear(inst.abar0, inst.bbar0)
    return solve_linear(inst.abar[agent_id], inst.bbar[agent_id])


def _flat(inst: MrpInstance, states) -> np.ndarray:
    states = np.asarray(states)
    if states.ndim == 1:          # a single (o, o') pair
        states = states[None, :]
    return states[:, 0] * inst.states + states[:, 1]


def density_ratio_matrix_mrp(inst: MrpInstance, states) -> np.ndarray:
    """Exact rho_i(o, o') from the finite transition-pair tables; 0/0 := 0."""
    idx = _flat(inst, states)
    num = inst.pair_mu[:, idx]
    den = inst.pair_mu0[idx]
    out = np.zeros_like(num)
    np.divide(num, den[None, :], out=out, where=den[None, :] > 0)
    return out


def tv_distance_mrp(inst: MrpInstance, i: int, j: int) -> float:
    """Exact half-L1 distance between transition-pair laws."""
    p = inst.pair_mu0 if i == CENTRAL else inst.pair_mu[i]
    q = inst.pair_mu0 if j == CENTRAL else inst.pair_mu[j]
    return 0.5 * float(np.abs(p - q).sum())
