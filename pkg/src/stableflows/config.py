"""Experiment configuration: defaults, validation, YAML round-trip."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import yaml

from .subordinator import ParameterDomainError

__all__ = ["ExperimentConfig", "EXPERIMENT_NAMES", "default_config", "load_config"]

# experiment catalog; each entry lists its default size knobs
DEFAULT_SIZES = {
    "laplace-check": {"draws": 1_000_000},
    "ml-moments": {"paths": 10_000, "orders": [1, 2, 3]},
    "overshoot": {"draws": 100_000, "grid_draws": 20_000, "u_step": 0.08, "refine": 4},
    "holder": {"paths": 1000, "grid_points": 96, "u_step": 0.01, "refine": 4, "log_exponent": None},
    "y-motion": {"paths": 8, "grid_points": 129, "n_terms": None},
    "selfsim": {"paths": 4000, "scales": [1.0, 2.0, 4.0], "n_terms": None, "ks_paths": 2000},
    "stat-incr": {"replicates": 2000, "t_list": [1.0], "shift": 1.0, "n_terms": None},
    "dk-chain": {"n_list": [2**10, 2**13, 2**16], "replicates": 4000, "trend_replicates": 50_000,
                 "reference": 100_000},
    "dk-boole": {"n_list": [10**4, 10**5, 10**6], "orbits": 2000, "trend_orbits": 20_000,
                 "reference": 100_000, "eps": 0.05},
    "t-inf-law": {"n_list": [2**10, 2**13, 2**16], "replicates": 30_000, "horizon_factor": 1},
    "tail-marginal": {"samples": 100_000, "level": 10.0, "hill_fraction": 0.01},
    "norms": {"n_list": [2**k for k in range(10, 17)], "eps": 0.05},
    "fclt": {"n_list": [2**9, 2**12, 2**15], "replicates": 4000, "t_grid": [0.5, 1.0],
             "n_terms": None},
}

EXPERIMENT_NAMES = tuple(sorted(DEFAULT_SIZES))


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: process parameters, sizes, seed, output location."""

    experiment: str
    alpha: float = 1.5
    beta: float = 0.5
    variant: str = "symmetric"
    sizes: dict = field(default_factory=dict)
    master_seed: int = 20250809
    outdir: str = "results"
    workers: int = 0

    def __post_init__(self):
        if self.experiment not in DEFAULT_SIZES:
            raise ParameterDomainError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENT_NAMES)}"
            )
        if not 0.0 < self.alpha < 2.0:
            raise ParameterDomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ParameterDomainError(f"beta must lie in (0, 1), got {self.beta}")
        if self.variant not in ("symmetric", "positive"):
            raise ParameterDomainError(f"unknown variant {self.variant!r}")
        if self.variant == "positive" and self.alpha >= 1.0:
            raise ParameterDomainError("positive variant requires alpha < 1")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ParameterDomainError("master_seed must be a non-negative integer")
        if self.workers < 0:
            raise ParameterDomainError("workers must be non-negative")
        unknown = set(self.sizes) - set(DEFAULT_SIZES[self.experiment])
        if unknown:
            raise ParameterDomainError(
                f"unknown size keys for {self.experiment}: {sorted(unknown)}"
            )

    def size(self, key):
        return self.sizes.get(key, DEFAULT_SIZES[self.experiment][key])

    def effective_sizes(self) -> dict:
        merged = dict(DEFAULT_SIZES[self.experiment])
        merged.update(self.sizes)
        return merged

    def to_dict(self) -> dict:
        return asdict(self)

    def echo_dict(self) -> dict:
        """Config as recorded in reports: science parameters and effective sizes.

        Worker count and output location are execution environment, not
        experiment identity, and reports must be byte-identical across them.
        """
        d = asdict(self)
        d.pop("workers")
        d.pop("outdir")
        d["sizes"] = self.effective_sizes()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        data = yaml.safe_load(text)
        if not isinstance(data, dict):
            raise ParameterDomainError("config file must hold a mapping")
        return cls.from_dict(data)


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    return ExperimentConfig(experiment=experiment, **overrides)


def load_config(experiment: str, path=None, seed=None, out=None, workers=None) -> ExperimentConfig:
    """Build the effective config: file values, then CLI overrides."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = ExperimentConfig.from_yaml(fh.read())
        if cfg.experiment != experiment:
            raise ParameterDomainError(
                f"config file is for {cfg.experiment!r} but the command line asked for {experiment!r}"
            )
    else:
        cfg = ExperimentConfig(experiment=experiment)
    updates = {}
    if seed is not None:
        updates["master_seed"] = int(seed)
    if out is not None:
        updates["outdir"] = str(out)
    if workers is not None:
        updates["workers"] = int(workers)
    return replace(cfg, **updates) if updates else cfg
