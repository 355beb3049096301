"""Command-line driver: ``indefmetric --suite all --out report.json``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ENV_PREFIX, RunConfig, load_config
from .errors import ConfigInvalid, ReportWriteFailed
from .suites import SUITES, Recorder

SUITE_NAMES = tuple(SUITES) + ("all",)


def run_suite(cfg: RunConfig, suite: str = "all", *, seed=None, refine=None):
    """Run one suite (or all) and return ``(exit_code, report)``.

    The exit code is 0 exactly when every check passed.
    """
    if suite not in SUITE_NAMES:
        raise ConfigInvalid("suite", f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    rec = Recorder()
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        # one stream per suite keeps results independent of which suites ran
        rng = np.random.default_rng([cfg.seed, list(SUITES).index(name)])
        if name == "twopoint":
            SUITES[name](cfg, rec, rng, refine=refine)
        else:
            SUITES[name](cfg, rec, rng)
    ok = all(c["pass"] for c in rec.checks)
    report = {
        "suite": suite,
        "seed": cfg.seed,
        "config": cfg.source,
        "passed": ok,
        "checks": rec.checks,
        "tables": rec.tables,
    }
    return (0 if ok else 1), report


def write_report(report, path):
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ReportWriteFailed(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def build_parser():
    p = argparse.ArgumentParser(
        prog="indefmetric",
        description="Run certification suites for the indefinite-metric toolkit.",
        epilog=f"Config values can be overridden with {ENV_PREFIX}<SECTION>__<KEY> environment variables.",
    )
    p.add_argument("--config", type=Path, default=None, help="INI config (default: bundled default.ini)")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--out", type=Path, default=Path("report.json"))
    p.add_argument("--seed", type=int, default=None, help="seed for randomized checks (overrides run.seed)")
    p.add_argument("--refine", type=int, default=None, help="levels in the cross-module convergence table")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None and args.seed < 0:
            raise ConfigInvalid("run.seed", "must be non-negative")
        if args.refine is not None and args.refine < 2:
            raise ConfigInvalid("refine.levels", "need at least 2 levels")
        code, report = run_suite(cfg, args.suite, seed=args.seed, refine=args.refine)
        write_report(report, args.out)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ReportWriteFailed as exc:
        print(f"report error: {exc}", file=sys.stderr)
        return 3
    for c in report["checks"]:
        res = "-" if c["residual"] is None else f"{c['residual']:.3e}"
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}  residual={res}  ({c['wall_time']:.2f}s)")
    print(f"{sum(c['pass'] for c in report['checks'])}/{len(report['checks'])} checks passed -> {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
