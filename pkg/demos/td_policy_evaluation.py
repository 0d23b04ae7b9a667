"""Walkthrough: collaborative TD(0) policy evaluation.

Ten agents each evaluate their own Markov reward process with a shared
feature map. Transition pairs sampled from each chain's stationary law are a
special case of the multi-agent linear system, so the full personalized
algorithm applies unchanged: it pools samples across the chains while
correcting for the kernel and reward differences.

Run:  python3 demos/td_policy_evaluation.py
"""

from pclsim import AlgorithmId, StepSchedule, generate_mrp
from pclsim.harness import references, simulate

N, STATES, GAMMA = 10, 8, 0.9


def run(algorithm: str, inst, x_star):
    rows, _ = simulate(
        inst, AlgorithmId(algorithm), StepSchedule(kind="fixed", alpha=0.01),
        t_max=2000, record_every=200, seed=1, x_star=x_star,
    )
    return rows


def main():
    inst = generate_mrp(N, STATES, GAMMA, delta_kernel=0.1, delta_reward=0.1, seed=13)
    x_star = references(inst, "analytic", 0)
    print(f"{N} agents, {STATES} states, gamma={GAMMA}, feature dim {inst.d}")
    print(f"{'round':>6}  {'personalized':>14}  {'independent':>14}")
    personalized = run("affpcl_full", inst, x_star)
    independent = run("independent", inst, x_star)
    for (t, _, mse_p), (_, _, mse_i) in zip(personalized, independent):
        print(f"{t:>6}  {mse_p:>14.5f}  {mse_i:>14.5f}")
    print()
    print("Both columns measure the mean squared distance to each agent's")
    print("projected Bellman fixed point; pooling corrected samples from all")
    print("chains gives the personalized column its faster decay.")


if __name__ == "__main__":
    main()
