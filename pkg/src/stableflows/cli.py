"""Command line harness: one subcommand per experiment.

    stableflows <experiment> [--config cfg.yaml] [--seed S] [--out DIR] [--workers W]

Writes <out>/<experiment>/report.json plus one CSV per table and rendered
figures, prints one PASS/FAIL line per embedded check, and exits nonzero if
any check failed (the failure is recorded machine-readably in report.json).
"""

from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENT_NAMES, load_config
from .experiments import EXPERIMENTS

_DESCRIPTIONS = {
    "laplace-check": "Laplace-transform oracle for the positive stable sampler",
    "ml-moments": "Mittag-Leffler moments against the exact formula",
    "overshoot": "Dynkin-Lamperti overshoot law, exact and grid-based",
    "holder": "Holder-modulus statistics of inverse-subordinator paths",
    "y-motion": "dump sample paths of the limit motion",
    "selfsim": "self-similarity exponent of the limit motion",
    "stat-incr": "stationary-increment checks for the limit motion",
    "dk-chain": "Darling-Kac occupation limit for the renewal chain",
    "dk-boole": "Darling-Kac occupation limit for Boole's map",
    "t-inf-law": "first-entrance epoch law against (x/L)**(1-beta)",
    "tail-marginal": "marginal tail and Hill index of the ID process",
    "norms": "wandering rates, return sequences, and the consistency ratio",
    "fclt": "partial sums against the limit motion",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stableflows",
        description="Monte Carlo experiments for heavy-tailed stationary processes "
        "driven by conservative flows",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENT_NAMES:
        p = sub.add_parser(name, help=_DESCRIPTIONS.get(name, name))
        p.add_argument("--config", default=None, help="YAML config file")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", default=None, help="output directory (default: results)")
        p.add_argument(
            "--workers", type=int, default=None,
            help="worker threads for the Monte Carlo kernels; results do not depend on it",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.experiment, args.config, seed=args.seed, out=args.out,
                      workers=args.workers)
    if cfg.workers:
        import numba

        numba.set_num_threads(cfg.workers)
    report = EXPERIMENTS[cfg.experiment](cfg)
    outdir = report.write(cfg.outdir)
    for check in report.checks:
        print(f"[{'PASS' if check.passed else 'FAIL'}] {check.name}: {check.value:.6g} ({check.threshold})")
        if not check.passed and check.detail:
            print(f"       {check.detail}")
    print(f"report written to {outdir}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
