"""Command-line entry point.

Subcommands:

* ``run``      -- execute a single-run JSON config and persist metrics.csv +
  summary.json.
* ``sweep``    -- execute a grid-sweep JSON config (a config with a "base"
  key) with the same outputs.
* ``validate`` -- run the invariant suite and print one pass/fail line per
  property (``--quick`` trims the Monte Carlo budgets).
* ``report``   -- recompute summary.json from an existing metrics.csv.

Exit codes: 0 success, 1 validation/run failure, 2 config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import harness
from .harness import ConfigFormatError, RunConfig, SweepConfig


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out-dir", required=True, help="output directory")
    parser.add_argument("--seed-override", default=None,
                        help="comma-separated seeds replacing the config's list")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker pool size (0 = auto)")
    parser.add_argument("--record-every", type=int, default=None,
                        help="override the recording stride")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pclsim",
        description="Personalized collaborative learning simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common_flags(sub.add_parser("run", help="execute a single run config"))
    _add_common_flags(sub.add_parser("sweep", help="execute a grid sweep config"))
    validate = sub.add_parser("validate", help="run the invariant suite")
    validate.add_argument("--quick", action="store_true",
                          help="reduced Monte Carlo budgets")
    report = sub.add_parser("report", help="recompute summary from metrics.csv")
    report.add_argument("--in", dest="in_path", required=True,
                        help="existing metrics.csv")
    report.add_argument("--out-dir", default=None,
                        help="write summary.json here instead of stdout")
    return parser


def _apply_overrides(cfg, args):
    def patch_run(run_cfg: RunConfig) -> RunConfig:
        changes = {}
        if args.seed_override is not None:
            try:
                seeds = tuple(int(s) for s in args.seed_override.split(","))
            except ValueError:
                raise ConfigFormatError(
                    f"--seed-override: not an integer list: {args.seed_override!r}"
                ) from None
            changes["seeds"] = seeds
        if args.record_every is not None:
            changes["record_every"] = args.record_every
        return dataclasses.replace(run_cfg, **changes) if changes else run_cfg

    if isinstance(cfg, SweepConfig):
        return dataclasses.replace(cfg, base=patch_run(cfg.base))
    return patch_run(cfg)


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    if not isinstance(cfg, RunConfig):
        raise ConfigFormatError(
            f"{args.config}: 'run' expects a single-run config (no 'base' key)"
        )
    cfg = _apply_overrides(cfg, args)
    result = harness.run_experiment(
        cfg, threads=args.threads, progress=lambda msg: print(msg, flush=True)
    )
    harness.persist(result, args.out_dir)
    print(f"wrote {os.path.join(args.out_dir, 'metrics.csv')}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = harness.load_config(args.config)
    if not isinstance(cfg, SweepConfig):
        raise ConfigFormatError(
            f"{args.config}: 'sweep' expects a sweep config (with a 'base' key)"
        )
    cfg = _apply_overrides(cfg, args)
    result = harness.sweep(
        cfg, threads=args.threads, progress=lambda msg: print(msg, flush=True)
    )
    harness.persist(result, args.out_dir)
    failures = [row for row in result.summary["sweep"] if "error" in row]
    for row in failures:
        print(f"grid point failed: {row['run_id']}: {row['error']}", file=sys.stderr)
    print(f"wrote {os.path.join(args.out_dir, 'metrics.csv')}")
    return 0


def _cmd_validate(args) -> int:
    from . import validation

    results = validation.run_all(quick=args.quick)
    all_ok = True
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        all_ok &= passed
        print(f"{status} {name}: {detail}")
    return 0 if all_ok else 1


def _cmd_report(args) -> int:
    summary = harness.report(args.in_path)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.out_dir is None:
        sys.stdout.write(text)
    else:
        os.makedirs(args.out_dir, exist_ok=True)
        harness.write_summary_json(summary, os.path.join(args.out_dir, "summary.json"))
        print(f"wrote {os.path.join(args.out_dir, 'summary.json')}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigFormatError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except harness.PersistenceError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
