"""Positive stable subordinators, Mittag-Leffler inverse paths, overshoots.

The positive beta-stable law used throughout is the one normalised by its
Laplace transform E exp(-theta * S) = exp(-theta**beta).  Inverse paths are
produced by grid inversion: simulate S on an operational-time grid of step
``u_step`` and invert; the resulting values are integer multiples of
``u_step`` and overshoot the exact inverse by at most one step, so the bias
is O(u_step) and shrinks under refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from . import _kernels
from ._rng import child_keys

__all__ = [
    "ParameterDomainError",
    "GridExhaustedError",
    "SubordinatorGrid",
    "MLPath",
    "OvershootSample",
    "sample_positive_stable",
    "simulate_subordinator_grid",
    "invert_to_ml_path",
    "simulate_ml_path",
    "default_u_step",
    "ml_moment",
    "ml_marginals_mc",
    "sample_overshoot_exact",
    "sample_overshoot_grid",
    "overshoot_cdf",
    "holder_modulus",
]


class ParameterDomainError(ValueError):
    """A parameter lies outside its documented domain."""


class GridExhaustedError(RuntimeError):
    """The simulated subordinator grid ends below a requested time level.

    Callers should retry with a larger ``u_max`` (doubling is the convention
    used by :func:`simulate_ml_path`); silent extrapolation is never done.
    """


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ParameterDomainError(f"stability index beta must lie in (0, 1), got {beta}")
    return beta


@dataclass(frozen=True)
class SubordinatorGrid:
    """A discretised strictly increasing beta-stable subordinator path.

    ``values[k]`` is S(k * u_step) for k = 0..K with values[0] = 0.
    """

    beta: float
    u_step: float
    values: np.ndarray

    def __post_init__(self):
        if self.values[0] != 0.0:
            raise ValueError("subordinator grid must start at 0")

    @property
    def u_max(self) -> float:
        return self.u_step * (len(self.values) - 1)


@dataclass(frozen=True)
class MLPath:
    """A Mittag-Leffler (inverse subordinator) path on a time grid.

    Values are integer multiples of ``resolution``, an artifact of grid
    inversion; they exceed the exact inverse by less than one resolution
    step.
    """

    beta: float
    times: np.ndarray
    values: np.ndarray
    resolution: float


@dataclass(frozen=True)
class OvershootSample:
    """Overshoot of a level r by the subordinator at first passage."""

    r: float
    delta: float
    method: str


def sample_positive_stable(beta, rng, size=None):
    """Draw from the positive beta-stable law with E exp(-t S) = exp(-t**beta).

    Uses Kanter's exact uniform-exponential representation:
    S = (A(U)/E)**((1-beta)/beta) with U uniform on (0, pi), E standard
    exponential and A the Zolotarev integrand.

    Parameters
    ----------
    beta : float in (0, 1)
    rng : numpy.random.Generator
    size : draw count, or None for a scalar

    Returns
    -------
    float or ndarray of positive draws.
    """
    beta = _check_beta(beta)
    n = 1 if size is None else int(size)
    u = rng.uniform(0.0, np.pi, n)
    e = rng.standard_exponential(n)
    c1 = beta / (1.0 - beta)
    c2 = 1.0 / (1.0 - beta)
    a = np.sin(beta * u) ** c1 * np.sin((1.0 - beta) * u) / np.sin(u) ** c2
    s = (a / e) ** ((1.0 - beta) / beta)
    return s[0] if size is None else s


def simulate_subordinator_grid(beta, u_step, u_max, rng) -> SubordinatorGrid:
    """Simulate S on the operational-time grid k * u_step, k = 0..K.

    Increment over one step is u_step**(1/beta) times a standard positive
    stable draw (self-similarity of the subordinator).
    """
    beta = _check_beta(beta)
    if not u_step > 0.0:
        raise ParameterDomainError(f"u_step must be positive, got {u_step}")
    if u_max < u_step:
        raise ParameterDomainError("u_max must be at least u_step")
    k = int(np.ceil(u_max / u_step))
    xi = sample_positive_stable(beta, rng, size=k)
    values = np.empty(k + 1)
    values[0] = 0.0
    np.cumsum(u_step ** (1.0 / beta) * xi, out=values[1:])
    return SubordinatorGrid(beta=beta, u_step=u_step, values=values)


def invert_to_ml_path(grid: SubordinatorGrid, times) -> MLPath:
    """Invert a subordinator grid into a Mittag-Leffler path.

    M(t) = u_step * min{k : S(k u_step) >= t}.  Raises
    :class:`GridExhaustedError` if the grid tops out below max(times).
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0.0):
        raise ValueError("times must be non-decreasing")
    if times.size and times.max() > grid.values[-1]:
        raise GridExhaustedError(
            f"grid ends at {grid.values[-1]:.6g} < requested time {times.max():.6g}; "
            "retry with a larger u_max"
        )
    idx = np.searchsorted(grid.values, times, side="left")
    return MLPath(beta=grid.beta, times=times, values=grid.u_step * idx, resolution=grid.u_step)


def default_u_step(beta: float, horizon: float) -> float:
    """Default inversion resolution: 1e-3 of the expected M(horizon)."""
    beta = _check_beta(beta)
    return 1e-3 * horizon**beta / _gamma(1.0 + beta)


def simulate_ml_path(beta, times, rng, u_step=None) -> MLPath:
    """Simulate one Mittag-Leffler path on ``times`` by grid inversion.

    The generating grid is retried with doubled u_max until it covers
    max(times); each retry is a fresh simulation.
    """
    times = np.asarray(times, dtype=float)
    horizon = float(times.max())
    if u_step is None:
        u_step = default_u_step(beta, horizon)
    # a generous initial operational horizon; M(t) concentrates near its mean
    u_max = max(8.0 * horizon**beta / _gamma(1.0 + beta), 8.0 * u_step)
    for _ in range(64):
        grid = simulate_subordinator_grid(beta, u_step, u_max, rng)
        try:
            return invert_to_ml_path(grid, times)
        except GridExhaustedError:
            u_max *= 2.0
    raise GridExhaustedError("subordinator grid failed to cover the horizon after 64 doublings")


def ml_moment(beta, t, n) -> float:
    """Exact n-th moment of M_beta(t): n! * t**(n*beta) / Gamma(1 + n*beta)."""
    beta = _check_beta(beta)
    if t < 0.0:
        raise ParameterDomainError("t must be non-negative")
    n = int(n)
    if n < 0:
        raise ParameterDomainError("moment order must be a non-negative integer")
    return float(_gamma(n + 1.0) / _gamma(1.0 + n * beta) * t ** (n * beta))


def ml_marginals_mc(beta, times, n_samples, master_seed, tag="ml", u_step=None):
    """Monte Carlo sample of (M(t) for t in times) by grid inversion.

    Returns an (n_samples, len(times)) array.  Each sample runs one
    subordinator walk across the ascending times with exact stable
    increments; per-sample streams are derived from the master seed.
    """
    beta = _check_beta(beta)
    times = np.asarray(times, dtype=float)
    order = np.argsort(times)
    levels = times[order]
    if u_step is None:
        u_step = default_u_step(beta, float(levels[-1]))
    seeds = child_keys(master_seed, tag, int(n_samples))
    counts, _ = _kernels.ml_first_passage(beta, levels, float(u_step), seeds)
    out = np.empty_like(counts, dtype=float)
    out[:, order] = u_step * counts
    return out


def sample_overshoot_exact(beta, r, rng) -> OvershootSample:
    """One exact Dynkin-Lamperti overshoot of level r.

    delta_r = r * V / (1 - V) with V ~ Beta(1-beta, beta).  Change of
    variables v = x/(r+x) turns the Beta(1-beta, beta) density
    v**(-beta) (1-v)**(beta-1) / B(1-beta, beta) into
    (sin(beta pi)/pi) r**beta x**(-beta) (r+x)**(-1) dx, which is the
    generalized-arcsine overshoot law, so the transform is exact.
    """
    beta = _check_beta(beta)
    if not r > 0.0:
        raise ParameterDomainError("level r must be positive")
    v = rng.beta(1.0 - beta, beta)
    return OvershootSample(r=float(r), delta=float(r * v / (1.0 - v)), method="exact-beta")


def sample_overshoot_exact_batch(beta, r, rng, size):
    beta = _check_beta(beta)
    v = rng.beta(1.0 - beta, beta, size=int(size))
    return r * v / (1.0 - v)


def sample_overshoot_grid(beta, r, u_step, master_seed, size, tag="overshoot-grid"):
    """Grid-based overshoots: S at the first grid crossing of r, minus r.

    Approximate sampler; converges to the exact law as u_step -> 0.
    """
    beta = _check_beta(beta)
    if not r > 0.0:
        raise ParameterDomainError("level r must be positive")
    seeds = child_keys(master_seed, tag, int(size))
    _, over = _kernels.ml_first_passage(beta, np.array([float(r)]), float(u_step), seeds)
    return over[:, 0]


def overshoot_cdf(beta, r, x) -> np.ndarray:
    """CDF of the overshoot law at x, via the Beta representation."""
    from scipy.stats import beta as _beta_dist

    x = np.asarray(x, dtype=float)
    return _beta_dist(1.0 - beta, beta).cdf(x / (r + x))


def holder_modulus(path: MLPath, exponent_log: float) -> float:
    """Grid Holder statistic of an ML path.

    sup over grid pairs 0 <= s < t < s + 1/2 <= B of
    |M(t) - M(s)| / ((t-s)**beta |log(t-s)|**exponent_log).
    """
    t = np.asarray(path.times, dtype=float)
    v = np.asarray(path.values, dtype=float)
    if t.size < 2:
        raise ValueError("path grid must contain at least two points")
    b = t[-1]
    if not b > 0.5:
        raise ValueError("path must cover [0, B] with B > 1/2")
    dt = t[None, :] - t[:, None]
    dv = v[None, :] - v[:, None]
    ok = (dt > 0.0) & (dt < 0.5) & (t[:, None] + 0.5 <= b)
    dts = np.where(ok, dt, 0.5)
    weight = dts**path.beta * np.abs(np.log(dts)) ** exponent_log
    ratios = np.where(ok, np.abs(dv) / weight, 0.0)
    return float(ratios.max())
