"""Experiment orchestration: single runs, grid sweeps, seed replication,
deterministic parallelism, and persistence.

Determinism contract: (config, seed) fully determines every recorded number.
Each (seed, grid point) task owns hash-derived RNG substreams, tasks carry an
index, and outputs are merged in task-index order, so serial and parallel
executions produce byte-identical files.

File formats:

* metrics.csv  -- columns run_id, seed, algorithm, cdl_variant, dre_mode, t,
  agent_id, squared_error; agent_id -1 carries the MSE0 aggregate (mean over
  agents); floats printed with 17 significant digits.
* summary.json -- top-level keys config, heterogeneity, per_algorithm
  (final mean / p5 / p95 and center_agent_mse), contour (inv_n, delta, value
  triples; empty for plain runs).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import environments, metrics, tdapp
from .algorithms import (
    AlgorithmId,
    MissingDensityRatioError,
    RoundBatch,
    affpcl_full_round,
    affpcl_known_step,
    dre_coupled_step,
    fedavg_step,
    independent_step,
    init_state,
)
from .environments import UnsupportedFamilyError
from .model import (
    TABULAR,
    InstanceConfig,
    InvalidConfigError,
    generate_instance,
    reference_solution,
)
from .schedules import StepSchedule, step_size
from .seeding import child_sequence, substream
from .tdapp import MrpConfig

CSV_COLUMNS = (
    "run_id", "seed", "algorithm", "cdl_variant", "dre_mode",
    "t", "agent_id", "squared_error",
)

MSE0_AGENT = -1


class PersistenceError(OSError):
    """File output failed; the message carries the offending path."""


@dataclass(frozen=True)
class RunConfig:
    instance: object                     # InstanceConfig or MrpConfig
    algorithm: AlgorithmId
    schedule: StepSchedule = StepSchedule()
    t_max: int = 60
    seeds: tuple = tuple(range(1, 11))
    reference_mode: str = "analytic"     # analytic | monte_carlo
    mc_samples: int = 5000
    record_every: int = 1
    summary_window: int = 10
    nu_samples: int = 500                # heterogeneity report sample budget
    run_id: str = "run"

    def __post_init__(self):
        if self.t_max < 1:
            raise InvalidConfigError("t_max must be >= 1")
        if len(self.seeds) == 0:
            raise InvalidConfigError("need at least one seed")
        if self.record_every < 1:
            raise InvalidConfigError("record_every must be >= 1")
        if self.reference_mode not in ("analytic", "monte_carlo"):
            raise InvalidConfigError(f"unknown reference mode {self.reference_mode!r}")


@dataclass(frozen=True)
class SweepConfig:
    """Grid sweep around a base run.

    Axes: ``delta`` ties delta_env = delta_obj; ``delta_env`` / ``delta_obj``
    vary one of them; ``n`` varies the agent count. Unset axes keep the base
    instance's value.
    """

    base: RunConfig
    algorithms: tuple = ()
    delta: tuple = ()
    delta_env: tuple = ()
    delta_obj: tuple = ()
    n: tuple = ()

    def __post_init__(self):
        if len(self.algorithms) == 0:
            raise InvalidConfigError("sweep needs at least one algorithm")

    def grid_points(self) -> list:
        """Cartesian product of the configured axes as override dicts."""
        points = [{}]
        for axis, values in (
            ("delta", self.delta),
            ("delta_env", self.delta_env),
            ("delta_obj", self.delta_obj),
            ("n", self.n),
        ):
            if len(values) == 0:
                continue
            points = [dict(p, **{axis: v}) for p in points for v in values]
        return points


@dataclass
class RunResult:
    records: list                        # MetricsRecord stream
    summary: dict
    aux: dict = field(default_factory=dict)  # per-seed central-variable errors


# ---------------------------------------------------------------------------
# instance / reference plumbing


def derive_instance_seed(base_seed: int, run_seed: int) -> int:
    """Stable 63-bit instance seed for one (config, run seed) pair."""
    state = child_sequence(base_seed, "instance", run_seed).generate_state(2)
    return int((int(state[0]) << 31) ^ int(state[1]))


def make_instance(inst_cfg, run_seed: int):
    derived = derive_instance_seed(inst_cfg.seed, run_seed)
    if isinstance(inst_cfg, MrpConfig):
        return tdapp.generate_mrp(
            inst_cfg.n, inst_cfg.states, inst_cfg.gamma,
            inst_cfg.delta_kernel, inst_cfg.delta_reward,
            seed=derived, d=inst_cfg.d,
        )
    return generate_instance(replace(inst_cfg, seed=derived))


def references(inst, mode: str, mc_samples: int) -> np.ndarray:
    """(n, d) per-agent reference solutions."""
    return np.stack(
        [reference_solution(inst, i, mode, mc_samples) for i in range(inst.n)]
    )


# ---------------------------------------------------------------------------
# simulation core


def _stack_states(inst, states):
    if inst.family == "gaussian":
        return np.stack(states)
    return np.asarray(states)


def simulate(inst, algorithm: AlgorithmId, schedule: StepSchedule, t_max: int,
             record_every: int, seed: int, x_star: np.ndarray):
    """Run one algorithm for t_max rounds on one instance.

    The learner state is recorded *before* the update at every round index
    divisible by record_every, so t_max=1 records the zero-initialization
    error and the record count is ceil(t_max / record_every).

    Returns (rows, aux) where rows is a list of (t, per-agent squared
    errors, mse0) and aux tracks the central-variable errors per recorded
    round.
    """
    n, d = inst.n, inst.d
    coupled = algorithm.name == "affpcl_full" and algorithm.dre_mode == "coupled_tabular"
    if coupled and inst.family != TABULAR:
        raise UnsupportedFamilyError("coupled_tabular requires a tabular instance")
    eta_dim = len(inst.mu0) if coupled else None
    state = init_state(n, d, eta_dim)
    rngs = [substream(seed, "agent-stream", i) for i in range(n)]
    couple_rngs = (
        [substream(seed, "couple-stream", i) for i in range(n)] if coupled else None
    )
    sched_local = schedule.with_lambda(float(inst.lam.min()))
    sched_c = schedule.with_lambda(float(inst.lam_c))
    sched_b = schedule.with_lambda(float(inst.lam_b))
    rows = []
    aux = {"t": [], "x_c_err": [], "theta_c_err": [], "eta": None}
    for tau in range(t_max):
        if tau % record_every == 0:
            errs = metrics.squared_errors(state.x, x_star)
            rows.append((tau, errs, float(errs.mean())))
            aux["t"].append(tau)
            aux["x_c_err"].append(float(((state.x_c - inst.x_star_c) ** 2).sum()))
            aux["theta_c_err"].append(
                float(((state.theta_c - inst.theta_star_c) ** 2).sum())
            )
        alpha = step_size(sched_local, tau)
        if coupled:
            draws = [environments.coupled_sample(inst, i, couple_rngs[i]) for i in range(n)]
            states = [draw[0] for draw in draws]
        else:
            states = [environments.sample_state(inst, i, rngs[i]) for i in range(n)]
        obs = [environments.observe(inst, i, s) for i, s in enumerate(states)]
        batch = RoundBatch(tau, obs)
        if algorithm.name == "independent":
            state = independent_step(state, batch, alpha)
        elif algorithm.name == "fedavg":
            state = fedavg_step(state, batch, step_size(sched_c, tau))
        elif algorithm.name == "affpcl_known":
            state = affpcl_known_step(inst, state, batch, alpha)
        else:
            if algorithm.dre_mode == "exact":
                batch.rho = environments.round_ratio_table(inst, _stack_states(inst, states))
            elif algorithm.dre_mode == "coupled_tabular":
                batch.rho = np.clip(1.0 + state.eta[:, states], 0.0, n)
                new_eta = np.stack(
                    [dre_coupled_step(state.eta[i], draws[i], alpha) for i in range(n)]
                )
            else:  # oracle_off: no analytic table; needs an existing estimate
                if state.eta is None:
                    raise MissingDensityRatioError(
                        "dre_mode oracle_off has no density-ratio estimate"
                    )
                batch.rho = np.clip(1.0 + state.eta[:, states], 0.0, n)
            state = affpcl_full_round(
                state, batch, alpha,
                step_size(sched_c, tau), step_size(sched_b, tau),
                algorithm.cdl_variant,
            )
            if coupled:
                state.eta = new_eta
    if coupled:
        aux["eta"] = state.eta
    return rows, aux


def _run_single(cfg: RunConfig, seed: int):
    """One (config, seed) task: build instance, simulate, emit records."""
    try:
        inst = make_instance(cfg.instance, seed)
        x_star = references(inst, cfg.reference_mode, cfg.mc_samples)
        rows, aux = simulate(
            inst, cfg.algorithm, cfg.schedule, cfg.t_max, cfg.record_every,
            seed, x_star,
        )
        center = int(np.argmin(metrics.center_scores(inst)))
    except Exception as exc:
        if hasattr(exc, "add_note"):
            exc.add_note(f"while running seed {seed} of {cfg.run_id!r}")
        raise
    algo = cfg.algorithm
    records = []
    for tau, errs, mse0 in rows:
        for i, err in enumerate(errs):
            records.append(metrics.MetricsRecord(
                cfg.run_id, seed, algo.name, algo.cdl_variant, algo.dre_mode,
                tau, i, float(err),
            ))
        records.append(metrics.MetricsRecord(
            cfg.run_id, seed, algo.name, algo.cdl_variant, algo.dre_mode,
            tau, MSE0_AGENT, mse0,
        ))
    return records, center, aux


def _window_mean(values, window: int) -> float:
    tail = values[-window:] if window < len(values) else values
    return float(np.mean(tail))


def _seed_finals(records, window: int):
    """Per-seed summary value: mean MSE0 over the last `window` recorded
    rounds. Also returns the per-seed, per-agent finals."""
    by_seed = {}
    agent_by_seed = {}
    for rec in records:
        if rec.agent_id == MSE0_AGENT:
            by_seed.setdefault(rec.seed, []).append(rec.squared_error)
        else:
            agent_by_seed.setdefault(rec.seed, {}).setdefault(
                rec.agent_id, []
            ).append(rec.squared_error)
    finals = {s: _window_mean(v, window) for s, v in sorted(by_seed.items())}
    agent_finals = {
        s: {a: _window_mean(v, window) for a, v in sorted(agents.items())}
        for s, agents in sorted(agent_by_seed.items())
    }
    return finals, agent_finals


def _band(values) -> dict:
    """Mean and 5/95 percentile band by order statistics (no interpolation)."""
    arr = np.asarray(sorted(values), dtype=float)
    return {
        "mean": float(arr.mean()),
        "p5": float(np.percentile(arr, 5, method="inverted_cdf")),
        "p95": float(np.percentile(arr, 95, method="inverted_cdf")),
    }


def _heterogeneity_dict(inst, nu_samples: int) -> dict:
    report = metrics.heterogeneity_report(inst, nu_samples)
    return {
        "delta_env": report.delta_env,
        "delta_obj": report.delta_obj,
        "delta_cen": [float(v) for v in report.delta_cen],
        "g_b": report.g_b,
        "nu_hat": report.nu_hat,
        "nu_se": report.nu_se,
        "effective_env": report.effective_env,
        "effective_obj": report.effective_obj,
        "effective_cen": [float(v) for v in report.effective_cen],
        "center_agent": metrics.center_agent(report),
    }


def config_to_dict(cfg) -> dict:
    if isinstance(cfg, (RunConfig, SweepConfig)):
        return {k: config_to_dict(v) for k, v in dataclasses.asdict(cfg).items()}
    if dataclasses.is_dataclass(cfg) and not isinstance(cfg, type):
        return dataclasses.asdict(cfg)
    if isinstance(cfg, dict):
        return {k: config_to_dict(v) for k, v in cfg.items()}
    if isinstance(cfg, tuple):
        return [config_to_dict(v) for v in cfg]
    return cfg


def run_experiment(cfg: RunConfig, threads: int = 0, progress=None) -> RunResult:
    """Execute one RunConfig over all its seeds.

    Seeds are independent tasks executed on a worker pool and merged in seed
    order, so the result is identical for any thread count.
    """
    def _task(seed):
        out = _run_single(cfg, seed)
        if progress is not None:
            progress(f"done {cfg.run_id} seed {seed}")
        return out

    workers = threads if threads > 0 else min(len(cfg.seeds), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outputs = list(pool.map(_task, cfg.seeds))
    records = [rec for recs, _, _ in outputs for rec in recs]
    centers = {seed: c for seed, (_, c, _) in zip(cfg.seeds, outputs)}
    aux = {seed: a for seed, (_, _, a) in zip(cfg.seeds, outputs)}
    finals, agent_finals = _seed_finals(records, cfg.summary_window)
    center_vals = [agent_finals[s][centers[s]] for s in cfg.seeds]
    stats = _band(list(finals.values()))
    stats["center_agent_mse"] = float(np.mean(center_vals))
    inst0 = make_instance(cfg.instance, cfg.seeds[0])
    summary = {
        "config": config_to_dict(cfg),
        "heterogeneity": _heterogeneity_dict(inst0, cfg.nu_samples),
        "per_algorithm": {cfg.algorithm.name: stats},
        "contour": [],
    }
    return RunResult(records=records, summary=summary, aux=aux)


# ---------------------------------------------------------------------------
# sweeps


def _point_config(cfg: SweepConfig, point: dict, algorithm: AlgorithmId) -> RunConfig:
    inst = cfg.base.instance
    changes = {}
    if "n" in point:
        changes["n"] = point["n"]
    if isinstance(inst, MrpConfig):
        if "delta" in point:
            changes["delta_kernel"] = point["delta"]
            changes["delta_reward"] = point["delta"]
        if "delta_env" in point:
            changes["delta_kernel"] = point["delta_env"]
        if "delta_obj" in point:
            changes["delta_reward"] = point["delta_obj"]
    else:
        if "delta" in point:
            changes["delta_env"] = point["delta"]
            changes["delta_obj"] = point["delta"]
        if "delta_env" in point:
            changes["delta_env"] = point["delta_env"]
        if "delta_obj" in point:
            changes["delta_obj"] = point["delta_obj"]
    inst = replace(inst, **changes) if changes else inst
    tag = "-".join(f"{k}{point[k]:g}" for k in sorted(point)) or "base"
    return replace(
        cfg.base, instance=inst, algorithm=algorithm,
        run_id=f"{cfg.base.run_id}-{algorithm.name}-{tag}",
    )


def _point_delta(point: dict, inst_cfg) -> float:
    if "delta" in point:
        return float(point["delta"])
    if isinstance(inst_cfg, MrpConfig):
        return float(max(inst_cfg.delta_kernel, inst_cfg.delta_reward))
    return float(max(inst_cfg.delta_env, inst_cfg.delta_obj))


def sweep(cfg: SweepConfig, threads: int = 0, progress=None) -> RunResult:
    """Grid sweep: every (grid point, algorithm, seed) is an independent
    task. A failed grid point is recorded with an error marker and the sweep
    continues. Contour triples use the personalized algorithm's values when
    it is part of the sweep, the first algorithm otherwise."""
    points = cfg.grid_points()
    point_cfgs = [
        (point, algo, _point_config(cfg, point, algo))
        for point in points
        for algo in cfg.algorithms
    ]
    tasks = [
        (idx, pc, seed)
        for idx, pc in enumerate(point_cfgs)
        for seed in cfg.base.seeds
    ]

    def _task(item):
        idx, (_, _, run_cfg), seed = item
        try:
            result = _run_single(run_cfg, seed)
        except Exception as exc:  # partial-failure policy
            return idx, seed, None, f"{type(exc).__name__}: {exc}"
        if progress is not None:
            progress(f"done {run_cfg.run_id} seed {seed}")
        return idx, seed, result, None

    workers = threads if threads > 0 else (os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outputs = list(pool.map(_task, tasks))

    records = []
    errors = {}
    centers = {}
    by_idx = {}
    for idx, seed, result, err in outputs:
        if err is not None:
            errors.setdefault(idx, err)
            continue
        recs, center, _ = result
        records.extend(recs)
        by_idx.setdefault(idx, []).extend(recs)
        centers[(idx, seed)] = center

    window = cfg.base.summary_window
    table = []
    values = {}
    for idx, (point, algo, run_cfg) in enumerate(point_cfgs):
        row = {
            "run_id": run_cfg.run_id,
            "algorithm": algo.name,
            "n": run_cfg.instance.n,
            "delta": _point_delta(point, run_cfg.instance),
        }
        if idx in errors:
            row["error"] = errors[idx]
            row["value"] = None
        else:
            finals, agent_finals = _seed_finals(by_idx[idx], window)
            row["value"] = float(np.mean(list(finals.values())))
            row["center_agent_mse"] = float(np.mean(
                [agent_finals[s][centers[(idx, s)]] for s in cfg.base.seeds]
            ))
            band = _band(list(finals.values()))
            row["p5"], row["p95"] = band["p5"], band["p95"]
            values[(tuple(sorted(point.items())), algo.name)] = row["value"]
        table.append(row)

    personalized = next(
        (a.name for a in cfg.algorithms if a.name == "affpcl_full"),
        cfg.algorithms[0].name,
    )
    contour = []
    improvements = []
    for point in points:
        key = tuple(sorted(point.items()))
        target = values.get((key, personalized))
        if target is None:
            continue
        pcfg = _point_config(cfg, point, cfg.algorithms[0])
        contour.append({
            "inv_n": 1.0 / pcfg.instance.n,
            "delta": _point_delta(point, pcfg.instance),
            "value": target,
        })
        for algo in cfg.algorithms:
            base_val = values.get((key, algo.name))
            if base_val is None or target == 0:
                continue
            improvements.append({
                "point": dict(point),
                "baseline": algo.name,
                "ratio": base_val / target,
            })

    per_algorithm = {}
    for algo in cfg.algorithms:
        vals = [r["value"] for r in table
                if r["algorithm"] == algo.name and r.get("value") is not None]
        if vals:
            per_algorithm[algo.name] = _band(vals)
            center_vals = [r["center_agent_mse"] for r in table
                           if r["algorithm"] == algo.name and "center_agent_mse" in r]
            per_algorithm[algo.name]["center_agent_mse"] = float(np.mean(center_vals))

    het = None
    for idx, (point, algo, run_cfg) in enumerate(point_cfgs):
        if idx not in errors:
            inst0 = make_instance(run_cfg.instance, cfg.base.seeds[0])
            het = _heterogeneity_dict(inst0, cfg.base.nu_samples)
            break
    summary = {
        "config": config_to_dict(cfg),
        "heterogeneity": het,
        "per_algorithm": per_algorithm,
        "contour": contour,
        "sweep": table,
        "improvement": improvements,
    }
    return RunResult(records=records, summary=summary)


# ---------------------------------------------------------------------------
# persistence


def _atomic_write(path: str, write_fn):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
        with os.fdopen(fd, "w", newline="") as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except OSError as exc:
        raise PersistenceError(f"cannot write {path}: {exc}") from exc


def write_metrics_csv(records, path: str):
    def _write(fh):
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.run_id, r.seed, r.algorithm, r.cdl_variant, r.dre_mode,
                r.t, r.agent_id, f"{r.squared_error:.17g}",
            ])
    _atomic_write(path, _write)


def read_metrics_csv(path: str):
    """Inverse of write_metrics_csv; round-trips records exactly."""
    records = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise PersistenceError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise PersistenceError(f"unexpected header in {path}: {header}")
        for row in reader:
            records.append(metrics.MetricsRecord(
                row[0], int(row[1]), row[2], row[3], row[4],
                int(row[5]), int(row[6]), float(row[7]),
            ))
    return records


def write_summary_json(summary: dict, path: str):
    _atomic_write(
        path, lambda fh: fh.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    )


def persist(result: RunResult, out_dir: str):
    """Write metrics.csv and summary.json into out_dir (created if needed)."""
    os.makedirs(out_dir, exist_ok=True)
    write_metrics_csv(result.records, os.path.join(out_dir, "metrics.csv"))
    write_summary_json(result.summary, os.path.join(out_dir, "summary.json"))


def report(csv_path: str) -> dict:
    """Recompute summary statistics from an existing metrics.csv."""
    records = read_metrics_csv(csv_path)
    run_ids = sorted({r.run_id for r in records})
    per_algorithm = {}
    for run_id in run_ids:
        subset = [r for r in records if r.run_id == run_id]
        finals, _ = _seed_finals(subset, 10)
        stats = _band(list(finals.values()))
        per_algorithm.setdefault(subset[0].algorithm, {})[run_id] = stats
    return {
        "config": {"source": os.path.basename(csv_path)},
        "heterogeneity": None,
        "per_algorithm": per_algorithm,
        "contour": [],
    }


# ---------------------------------------------------------------------------
# JSON config parsing (shared by the CLI and tests)


class ConfigFormatError(ValueError):
    """A config file failed to parse; the message names the offending field."""


def _build(cls, data: dict, context: str):
    if not isinstance(data, dict):
        raise ConfigFormatError(f"{context}: expected an object, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigFormatError(f"{context}: unknown field(s) {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigFormatError(f"{context}: {exc}") from exc


def instance_config_from_dict(data: dict) -> object:
    data = dict(data)
    family = data.get("family", "gaussian")
    if family == "mrp":
        data.pop("family")
        return _build(MrpConfig, data, "instance")
    return _build(InstanceConfig, data, "instance")


def run_config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigFormatError("run config: expected a JSON object")
    data = dict(data)
    try:
        instance = instance_config_from_dict(data.pop("instance"))
    except KeyError:
        raise ConfigFormatError("run config: missing 'instance'") from None
    algorithm = _build(AlgorithmId, data.pop("algorithm", {"name": "affpcl_full"}),
                       "algorithm")
    schedule = _build(StepSchedule, data.pop("schedule", {}), "schedule")
    if "seeds" in data:
        data["seeds"] = tuple(data["seeds"])
    return _build(
        RunConfig,
        dict(data, instance=instance, algorithm=algorithm, schedule=schedule),
        "run config",
    )


def sweep_config_from_dict(data: dict) -> SweepConfig:
    if not isinstance(data, dict):
        raise ConfigFormatError("sweep config: expected a JSON object")
    data = dict(data)
    try:
        base = run_config_from_dict(data.pop("base"))
    except KeyError:
        raise ConfigFormatError("sweep config: missing 'base'") from None
    algorithms = tuple(
        _build(AlgorithmId, a, f"algorithms[{k}]")
        for k, a in enumerate(data.pop("algorithms", []))
    )
    grid = data.pop("grid", {})
    if not isinstance(grid, dict):
        raise ConfigFormatError("sweep config: 'grid' must be an object")
    unknown = set(grid) - {"delta", "delta_env", "delta_obj", "n"}
    if unknown:
        raise ConfigFormatError(f"sweep config: unknown grid axes {sorted(unknown)}")
    if data:
        raise ConfigFormatError(f"sweep config: unknown field(s) {sorted(data)}")
    return SweepConfig(
        base=base,
        algorithms=algorithms,
        delta=tuple(grid.get("delta", ())),
        delta_env=tuple(grid.get("delta_env", ())),
        delta_obj=tuple(grid.get("delta_obj", ())),
        n=tuple(grid.get("n", ())),
    )


def load_config(path: str):
    """Load a run or sweep config JSON; the presence of 'base' selects sweep."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if isinstance(data, dict) and "base" in data:
        return sweep_config_from_dict(data)
    return run_config_from_dict(data)
