"""Walkthrough: how collaboration pays off (or doesn't) as agents diverge.

Runs the independent, federated-averaging, and personalized algorithms on
the same instances at three heterogeneity levels and prints the final
aggregate errors side by side. At level 0 the personalized algorithm matches
federated averaging (shared noise floor / n); at high levels it tracks
independent learning instead of inheriting the federated bias.

Run:  python3 demos/compare_algorithms.py
"""

from pclsim import (
    AlgorithmId,
    InstanceConfig,
    RunConfig,
    StepSchedule,
    run_experiment,
)

ALGORITHMS = ("independent", "fedavg", "affpcl_full")
LEVELS = (0.0, 0.2, 0.5)


def final_mse(level: float, algorithm: str) -> float:
    cfg = RunConfig(
        instance=InstanceConfig(n=20, d=5, delta_env=level, delta_obj=level, seed=0),
        algorithm=AlgorithmId(algorithm),
        schedule=StepSchedule(kind="fixed", alpha=0.01),
        t_max=60,
        seeds=tuple(range(1, 11)),
        nu_samples=100,
        run_id=f"demo-{algorithm}-{level:g}",
    )
    result = run_experiment(cfg)
    return result.summary["per_algorithm"][algorithm]["mean"]


def main():
    print("Final aggregate MSE (mean over last 10 rounds, 10 seeds)")
    print(f"{'level':>6}  " + "".join(f"{a:>14}" for a in ALGORITHMS))
    for level in LEVELS:
        values = [final_mse(level, a) for a in ALGORITHMS]
        print(f"{level:>6.2f}  " + "".join(f"{v:>14.5f}" for v in values))
    print()
    print("Reading the table: the personalized column should match fedavg")
    print("in the first row and approach the independent column in the last.")


if __name__ == "__main__":
    main()
