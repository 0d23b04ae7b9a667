"""Figure rendering from simulator output files.

Inputs are the simulator's external interfaces only: metrics.csv (columns
run_id, seed, algorithm, cdl_variant, dre_mode, t, agent_id, squared_error;
agent_id -1 carries the per-round MSE aggregate) and summary.json (keys
config, heterogeneity, per_algorithm, contour, and for sweeps also sweep and
improvement).

Four figure kinds:

* ``comparison_curves``   -- per-algorithm aggregate MSE vs round with 5-95%
  seed bands, one panel per heterogeneity level, log-scale y.
* ``improvement_heatmap`` -- baseline/personalized final-MSE ratio over the
  (delta_env, delta_obj) grid, annotated, shown as log10 ratios.
* ``iso_contour``         -- level sets of the final MSE over (1/n, delta).
* ``agent_specific``      -- center-agent vs generic-agent error curves for
  the personalized algorithm and the independent baseline.

Rendering is read-only and deterministic: fixed style, no timestamps, so
identical inputs yield byte-identical image files.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CSV_COLUMNS = (
    "run_id", "seed", "algorithm", "cdl_variant", "dre_mode",
    "t", "agent_id", "squared_error",
)

AGGREGATE_AGENT = -1

KINDS = ("comparison_curves", "improvement_heatmap", "iso_contour", "agent_specific")

_STYLE = {
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

_COLORS = {
    "affpcl_full": "#1f77b4",
    "affpcl_known": "#17becf",
    "fedavg": "#ff7f0e",
    "independent": "#2ca02c",
}


class SpecError(ValueError):
    """The figure spec itself is invalid (unknown kind, missing file...)."""


class SchemaMismatch(ValueError):
    """An input file does not match the expected schema; the message names
    the first offending column or key."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    out: str
    metrics_csv: str | None = None
    summary_json: str | None = None
    target: str = "affpcl_full"        # personalized algorithm column value
    baseline: str = "independent"      # ratio denominator / companion curves

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}")
        if not self.out:
            raise SpecError("missing output path")
        needs_csv = self.kind in ("comparison_curves", "agent_specific")
        needs_summary = self.kind in (
            "improvement_heatmap", "iso_contour", "agent_specific",
        )
        if needs_csv and not self.metrics_csv:
            raise SpecError(f"{self.kind} requires metrics_csv")
        if needs_summary and not self.summary_json:
            raise SpecError(f"{self.kind} requires summary_json")
        for path in (self.metrics_csv, self.summary_json):
            if path and not os.path.exists(path):
                raise SpecError(f"input file not found: {path}")


def spec_from_dict(data: dict) -> FigureSpec:
    if not isinstance(data, dict):
        raise SpecError(f"expected a JSON object, got {type(data).__name__}")
    known = {"kind", "out", "metrics_csv", "summary_json", "target", "baseline"}
    unknown = set(data) - known
    if unknown:
        raise SpecError(f"unknown spec field(s) {sorted(unknown)}")
    missing = {"kind", "out"} - set(data)
    if missing:
        raise SpecError(f"missing spec field(s) {sorted(missing)}")
    return FigureSpec(**data)


def load_spec(path: str) -> FigureSpec:
    try:
        with open(path) as fh:
            return spec_from_dict(json.load(fh))
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# input parsing


def read_metrics(path: str) -> list[dict]:
    """Parse metrics.csv rows after verifying the header column by column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaMismatch(f"{path}: empty file, missing column 'run_id'")
        for k, expected in enumerate(CSV_COLUMNS):
            got = header[k] if k < len(header) else None
            if got != expected:
                raise SchemaMismatch(
                    f"{path}: column {k} is {got!r}, expected {expected!r}"
                )
        rows = []
        for row in reader:
            rows.append({
                "run_id": row[0],
                "seed": int(row[1]),
                "algorithm": row[2],
                "t": int(row[5]),
                "agent_id": int(row[6]),
                "squared_error": float(row[7]),
            })
    return rows


def read_summary(path: str, required: tuple = ()) -> dict:
    with open(path) as fh:
        try:
            summary = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: invalid JSON: {exc.msg}") from exc
    if not isinstance(summary, dict):
        raise SchemaMismatch(f"{path}: expected a JSON object")
    for key in required:
        if key not in summary or summary[key] is None:
            raise SchemaMismatch(f"{path}: missing key {key!r}")
    return summary


def _band_curves(rows: list[dict], agent_id: int = AGGREGATE_AGENT):
    """(t, mean, p5, p95) arrays of squared_error over seeds."""
    by_t: dict[int, list[float]] = {}
    for r in rows:
        if r["agent_id"] == agent_id:
            by_t.setdefault(r["t"], []).append(r["squared_error"])
    ts = sorted(by_t)
    mean = np.array([np.mean(by_t[t]) for t in ts])
    p5 = np.array([np.percentile(by_t[t], 5, method="inverted_cdf") for t in ts])
    p95 = np.array([np.percentile(by_t[t], 95, method="inverted_cdf") for t in ts])
    return np.array(ts), mean, p5, p95


def _color(algorithm: str) -> str:
    return _COLORS.get(algorithm, "#7f7f7f")


def _save(fig, out: str):
    directory = os.path.dirname(os.path.abspath(out))
    os.makedirs(directory, exist_ok=True)
    fig.savefig(out, metadata={"Software": "pclplots"})
    plt.close(fig)


# ---------------------------------------------------------------------------
# figure kinds


def _run_levels(summary: dict | None) -> dict[str, float]:
    """run_id -> heterogeneity level, from a sweep summary when available."""
    if not summary:
        return {}
    return {
        row["run_id"]: float(row["delta"])
        for row in summary.get("sweep") or []
        if row.get("value") is not None
    }


def render_comparison_curves(spec: FigureSpec):
    rows = read_metrics(spec.metrics_csv)
    summary = read_summary(spec.summary_json) if spec.summary_json else None
    levels = _run_levels(summary)
    by_run: dict[str, list[dict]] = {}
    for r in rows:
        by_run.setdefault(r["run_id"], []).append(r)
    # one panel per heterogeneity level (or per run when levels are unknown)
    panels: dict[object, dict[str, list[dict]]] = {}
    for run_id, run_rows in by_run.items():
        key = levels.get(run_id, run_id)
        algo = run_rows[0]["algorithm"]
        panels.setdefault(key, {}).setdefault(algo, []).extend(run_rows)
    keys = sorted(panels, key=str)
    ncols = max(len(keys), 1)
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(
            1, ncols, figsize=(3.2 * ncols, 3.0), sharey=True, squeeze=False
        )
        for ax, key in zip(axes[0], keys):
            for algo in sorted(panels[key]):
                ts, mean, p5, p95 = _band_curves(panels[key][algo])
                ax.plot(ts, mean, label=algo, color=_color(algo))
                ax.fill_between(ts, p5, p95, color=_color(algo), alpha=0.2, lw=0)
            title = f"level {key:g}" if isinstance(key, float) else str(key)
            ax.set_title(title)
            ax.set_yscale("log")
            ax.set_xlabel("round")
        axes[0][0].set_ylabel("aggregate MSE")
        if keys:
            axes[0][0].legend(fontsize=7)
        fig.tight_layout()
        _save(fig, spec.out)


def render_improvement_heatmap(spec: FigureSpec):
    summary = read_summary(spec.summary_json, required=("improvement",))
    entries = [e for e in summary["improvement"] if e["baseline"] == spec.baseline]
    if not entries:
        raise SchemaMismatch(
            f"{spec.summary_json}: no improvement entries for baseline "
            f"{spec.baseline!r}"
        )
    points = [e["point"] for e in entries]
    xs = sorted({p.get("delta_env", p.get("delta", 0.0)) for p in points})
    ys = sorted({p.get("delta_obj", p.get("n", 0.0)) for p in points})
    grid = np.full((len(ys), len(xs)), np.nan)
    for e in entries:
        p = e["point"]
        col = xs.index(p.get("delta_env", p.get("delta", 0.0)))
        row = ys.index(p.get("delta_obj", p.get("n", 0.0)))
        grid[row, col] = math.log10(e["ratio"])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(xs), 1.0 + 0.9 * len(ys)))
        vmax = max(np.nanmax(np.abs(grid)), 0.1)
        im = ax.imshow(grid, origin="lower", cmap="RdBu", vmin=-vmax, vmax=vmax)
        ax.set_xticks(range(len(xs)), [f"{x:g}" for x in xs])
        ax.set_yticks(range(len(ys)), [f"{y:g}" for y in ys])
        ax.set_xlabel("environment level")
        ax.set_ylabel("objective level")
        ax.grid(False)
        for e in entries:
            p = e["point"]
            col = xs.index(p.get("delta_env", p.get("delta", 0.0)))
            row = ys.index(p.get("delta_obj", p.get("n", 0.0)))
            ax.text(col, row, f"{e['ratio']:.2f}", ha="center", va="center",
                    fontsize=8)
        fig.colorbar(im, ax=ax, label=f"log10({spec.baseline} / {spec.target})")
        fig.tight_layout()
        _save(fig, spec.out)


def render_iso_contour(spec: FigureSpec):
    summary = read_summary(spec.summary_json, required=("contour",))
    triples = summary["contour"]
    if not triples:
        raise SchemaMismatch(f"{spec.summary_json}: 'contour' is empty")
    inv_n = np.array([t["inv_n"] for t in triples])
    delta = np.array([t["delta"] for t in triples])
    value = np.array([t["value"] for t in triples])
    xs = np.unique(inv_n)
    ys = np.unique(delta)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 3.4))
        if len(xs) >= 2 and len(ys) >= 2 and len(triples) == len(xs) * len(ys):
            grid = np.full((len(ys), len(xs)), np.nan)
            for t in triples:
                grid[np.searchsorted(ys, t["delta"]),
                     np.searchsorted(xs, t["inv_n"])] = math.log10(t["value"])
            cs = ax.contour(xs, ys, grid, levels=8, cmap="viridis")
            ax.clabel(cs, fontsize=7, fmt="%.1f")
        sc = ax.scatter(inv_n, delta, c=np.log10(value), cmap="viridis", s=18)
        fig.colorbar(sc, ax=ax, label="log10 final MSE")
        ax.set_xlabel("1 / n")
        ax.set_ylabel("heterogeneity level")
        fig.tight_layout()
        _save(fig, spec.out)


def render_agent_specific(spec: FigureSpec):
    rows = read_metrics(spec.metrics_csv)
    summary = read_summary(spec.summary_json, required=("heterogeneity",))
    het = summary["heterogeneity"]
    if "center_agent" not in het:
        raise SchemaMismatch(f"{spec.summary_json}: missing key 'center_agent'")
    center = int(het["center_agent"])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.4, 3.4))
        for algo in (spec.target, spec.baseline):
            algo_rows = [r for r in rows if r["algorithm"] == algo]
            if not algo_rows:
                raise SchemaMismatch(
                    f"{spec.metrics_csv}: no rows for algorithm {algo!r}"
                )
            ts, c_mean, _, _ = _band_curves(algo_rows, agent_id=center)
            generic: dict[int, list[float]] = {}
            for r in algo_rows:
                if r["agent_id"] not in (center, AGGREGATE_AGENT):
                    generic.setdefault(r["t"], []).append(r["squared_error"])
            g_mean = np.array([np.mean(generic[t]) for t in ts])
            ax.plot(ts, c_mean, color=_color(algo), label=f"{algo} (center)")
            ax.plot(ts, g_mean, color=_color(algo), ls="--",
                    label=f"{algo} (generic)")
        ax.set_yscale("log")
        ax.set_xlabel("round")
        ax.set_ylabel("squared error")
        ax.legend(fontsize=7)
        fig.tight_layout()
        _save(fig, spec.out)


_RENDERERS = {
    "comparison_curves": render_comparison_curves,
    "improvement_heatmap": render_improvement_heatmap,
    "iso_contour": render_iso_contour,
    "agent_specific": render_agent_specific,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path."""
    _RENDERERS[spec.kind](spec)
    return spec.out
