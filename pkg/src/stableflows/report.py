"""Experiment reports: JSON plus delimited tables, written deterministically.

Identical config and master seed produce byte-identical report.json and CSV
files for any worker count: nothing time- or scheduler-dependent is recorded,
floats are serialised with 17 significant digits (exact double round-trip),
and all Monte Carlo aggregation upstream is ordered by replicate index.
"""

from __future__ import annotations

import csv
import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

__all__ = ["Check", "Table", "ExperimentReport", "version_string"]

SEED_RULE = (
    "replicate r of a tagged stage draws from a stream keyed by "
    "blake2b(master_seed)(tag) advanced r steps of splitmix64; "
    "numpy stages use Philox keyed the same way"
)


def version_string() -> str:
    """Git-describable version if a checkout is available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _fmt(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    return float(f"{float(value):.17g}")


@dataclass(frozen=True)
class Check:
    """One embedded acceptance threshold with its verdict."""

    name: str
    passed: bool
    value: float
    threshold: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": _fmt(self.value),
            "threshold": self.threshold,
            "detail": self.detail,
        }


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    tables: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    figures: list = field(default_factory=list)  # (name, draw_fn) pairs
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_table(self, name: str, columns: list) -> Table:
        t = Table(columns=columns)
        self.tables[name] = t
        return t

    def add_check(self, name, passed, value, threshold, detail="") -> Check:
        c = Check(name=name, passed=bool(passed), value=value, threshold=threshold, detail=detail)
        self.checks.append(c)
        return c

    def add_figure(self, name: str, draw_fn):
        self.figures.append((name, draw_fn))

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": version_string(),
            "seed_rule": SEED_RULE,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "tables": {
                name: {"columns": t.columns, "rows": [[_fmt(v) for v in row] for row in t.rows]}
                for name, t in sorted(self.tables.items())
            },
            "notes": self.notes,
        }

    def write(self, outdir) -> Path:
        """Write report.json, one CSV per table, and the figures."""
        out = Path(outdir) / self.experiment
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.json", "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        for name, t in sorted(self.tables.items()):
            with open(out / f"{name}.csv", "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(t.columns)
                for row in t.rows:
                    w.writerow(
                        [f"{v:.17g}" if isinstance(v, float) else v for v in row]
                    )
        for name, draw_fn in self.figures:
            _render_figure(out / f"{name}.png", draw_fn)
        return out


def _render_figure(path: Path, draw_fn):
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig = plt.figure(figsize=(6.4, 4.2), dpi=120)
    try:
        draw_fn(fig)
        fig.savefig(path, metadata={"Software": None})
    finally:
        plt.close(fig)
