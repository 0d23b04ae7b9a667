"""Walkthrough: measuring how different a group of agents really is.

Generates one gaussian and one tabular instance at the same nominal
heterogeneity level and prints the measured report: the objective and
environment levels, each agent's distance to the virtual central agent, and
the stochastic condition number that converts raw levels into effective ones.

Run:  python3 demos/measure_heterogeneity.py
"""

import numpy as np

from pclsim import InstanceConfig, generate_instance, heterogeneity_report


def describe(label: str, cfg: InstanceConfig):
    inst = generate_instance(cfg)
    report = heterogeneity_report(inst, nu_samples=1000)
    print(f"--- {label} (nominal level {cfg.delta_env:g}) ---")
    print(f"objective level   : {report.delta_obj:.3f}")
    print(f"environment level : {report.delta_env:.3f}")
    print(f"condition number  : {report.nu_hat:.3f} +- {report.nu_se:.3f}")
    print(f"effective env/obj : {report.effective_env:.3f} / {report.effective_obj:.3f}")
    center = int(np.argmin(report.delta_cen))
    print(f"center scores     : {np.round(report.delta_cen, 3)}")
    print(f"center agent      : {center} "
          "(cheapest collaborator: it nearly solves the central problem)")
    print()


def main():
    describe("gaussian", InstanceConfig(
        n=6, d=4, delta_env=0.4, delta_obj=0.4, seed=7,
    ))
    describe("tabular", InstanceConfig(
        n=6, d=4, family="tabular", delta_env=0.4, delta_obj=0.4,
        tabular_size=24, seed=7,
    ))
    print("The tabular environment level is exact by construction; the")
    print("gaussian one is the closed-form total-variation distance between")
    print("the most separated pair of state distributions.")


if __name__ == "__main__":
    main()
