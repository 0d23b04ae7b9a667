"""Shared fixtures: simulator outputs generated once per session through the
simulator's command-line interface (the only coupling point is the file
formats it writes)."""

import json

import pytest

from pclsim.cli import main as pclsim_main

BASE_INSTANCE = {"family": "gaussian", "n": 5, "d": 3, "seed": 1}

BASE_RUN = {
    "run_id": "fix",
    "instance": BASE_INSTANCE,
    "schedule": {"kind": "fixed", "alpha": 0.01},
    "t_max": 20,
    "seeds": [1, 2, 3],
    "nu_samples": 100,
    "algorithm": {"name": "affpcl_full"},
}

THREE_ALGOS = [
    {"name": "affpcl_full"}, {"name": "fedavg"}, {"name": "independent"},
]


def _sweep(tmp, name, grid, algorithms, base_overrides=None):
    base = dict(BASE_RUN, run_id=name)
    if base_overrides:
        base.update(base_overrides)
    cfg_path = tmp / f"{name}.json"
    cfg_path.write_text(json.dumps({
        "base": base, "grid": grid, "algorithms": algorithms,
    }))
    out = tmp / name
    assert pclsim_main(["sweep", "--config", str(cfg_path),
                        "--out-dir", str(out)]) == 0
    return out


@pytest.fixture(scope="session")
def sim_outputs(tmp_path_factory):
    """Directory per figure kind holding metrics.csv + summary.json."""
    tmp = tmp_path_factory.mktemp("sim")
    return {
        "comparison": _sweep(tmp, "comparison", {"delta": [0.0, 0.5]}, THREE_ALGOS),
        "heatmap": _sweep(
            tmp, "heatmap",
            {"delta_env": [0.0, 0.3], "delta_obj": [0.0, 0.3]},
            [{"name": "affpcl_full"}, {"name": "independent"}],
        ),
        "contour": _sweep(
            tmp, "contour", {"delta": [0.05, 0.3], "n": [2, 4]},
            [{"name": "affpcl_full"}],
        ),
        "freeride": _sweep(
            tmp, "freeride", {},
            [{"name": "affpcl_full"}, {"name": "independent"}],
            base_overrides={
                "instance": dict(BASE_INSTANCE, delta_env=0.7, delta_obj=0.7),
            },
        ),
    }
