"""Statistical primitives shared by the experiments.

All estimators are pure functions of their sample inputs (permutation
invariant), and Kolmogorov-Smirnov acceptance thresholds are always phrased
on the statistic itself rather than on p-values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov

__all__ = [
    "Ecdf",
    "KsResult",
    "ks_two_sample",
    "ks_one_sample",
    "ks_critical_value",
    "HillEstimate",
    "hill_tail_index",
    "selfsim_exponent",
    "moment_with_se",
    "t_inf_law_check",
]


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical CDF of a sample."""

    sorted_values: np.ndarray

    @classmethod
    def from_sample(cls, sample) -> "Ecdf":
        a = np.asarray(sample, dtype=float)
        if a.size == 0:
            raise ValueError("empty sample")
        return cls(sorted_values=np.sort(a))

    @property
    def size(self) -> int:
        return self.sorted_values.size

    def __call__(self, x):
        idx = np.searchsorted(self.sorted_values, np.asarray(x, dtype=float), side="right")
        return idx / self.size


@dataclass(frozen=True)
class KsResult:
    statistic: float
    pvalue: float
    n1: int
    n2: int


def _ks_pvalue(d: float, m_eff: float) -> float:
    # asymptotic Kolmogorov law with the usual finite-size correction
    en = np.sqrt(m_eff)
    return float(kolmogorov((en + 0.12 + 0.11 / en) * d))


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS statistic (sup distance between ECDFs) and p-value."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be non-empty")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    m = a.size * b.size / (a.size + b.size)
    return KsResult(statistic=d, pvalue=_ks_pvalue(d, m), n1=a.size, n2=b.size)


def ks_one_sample(sample, cdf) -> KsResult:
    """One-sample KS distance between an ECDF and a callable CDF."""
    a = np.sort(np.asarray(sample, dtype=float))
    if a.size == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(a), dtype=float)
    n = a.size
    up = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    d = float(max(up.max(), lo.max()))
    return KsResult(statistic=d, pvalue=_ks_pvalue(d, n), n1=n, n2=0)


def ks_critical_value(n1: int, n2: int, level: float = 0.01) -> float:
    """Two-sample KS critical value at the given level (asymptotic)."""
    c = np.sqrt(-np.log(level / 2.0) / 2.0)
    return float(c * np.sqrt((n1 + n2) / (n1 * n2)))


@dataclass(frozen=True)
class HillEstimate:
    alpha_hat: float
    se: float
    k: int


def hill_tail_index(sample, k: int) -> HillEstimate:
    """Hill estimator of a positive tail index on the top-k order statistics.

    alpha_hat = 1 / mean(log(X_(n-i+1) / X_(n-k))), SE = alpha_hat / sqrt(k).
    Scale invariant: multiplying the sample by c > 0 leaves it unchanged.
    """
    x = np.asarray(sample, dtype=float)
    k = int(k)
    if k < 2 or k >= x.size:
        raise ValueError(f"order count k must satisfy 2 <= k < len(sample), got {k}")
    top = np.partition(x, x.size - k - 1)[x.size - k - 1 :]
    top = np.sort(top)
    if top[0] <= 0.0:
        raise ValueError("hill estimator needs positive order statistics")
    logs = np.log(top[1:] / top[0])
    mean_log = logs.mean()
    alpha_hat = 1.0 / mean_log
    return HillEstimate(alpha_hat=float(alpha_hat), se=float(alpha_hat / np.sqrt(k)), k=k)


def selfsim_exponent(samples_by_scale: dict) -> tuple[float, dict]:
    """Self-similarity exponent from interquantile ranges across scales.

    Regresses log(q75 - q25) of the sample at scale c against log c; the
    slope estimates H.  Quantile spreads stay finite for alpha < 2, unlike
    variances.
    """
    if len(samples_by_scale) < 3:
        raise ValueError("need at least 3 scales")
    cs, iqrs = [], []
    for c, sample in sorted(samples_by_scale.items()):
        a = np.asarray(sample, dtype=float)
        q75, q25 = np.percentile(a, [75, 25])
        if not q75 > q25:
            raise ValueError(f"degenerate sample at scale {c}")
        cs.append(np.log(float(c)))
        iqrs.append(np.log(q75 - q25))
    slope, intercept = np.polyfit(cs, iqrs, 1)
    return float(slope), {"log_scales": cs, "log_iqrs": iqrs, "intercept": float(intercept)}


def moment_with_se(sample, power: float = 1.0) -> tuple[float, float]:
    """Sample moment of |x|**power with its standard error."""
    a = np.abs(np.asarray(sample, dtype=float)) ** power
    return float(a.mean()), float(a.std(ddof=1) / np.sqrt(a.size))


def t_inf_law_check(chain, n: int, L: int, replicates: int, master_seed: int) -> dict:
    """KS check of the normalised first-entrance-epoch law against (x/L)**(1-beta).

    Samples T_n from the exact pmf p_n(m) proportional to pi_m, m = 1..nL
    (the mass of paths entering the reference state first at epoch m), then
    compares T_n / n with the limit CDF.
    """
    from ._rng import generator

    nl = int(n) * int(L)
    pi = chain.pi_table(nl)[1:]  # pi_1 .. pi_{nL}
    cdf = np.cumsum(pi)
    total = cdf[-1]
    rng = generator(master_seed, "t-inf-law", n, L)
    u = rng.uniform(0.0, total, int(replicates))
    t_n = np.searchsorted(cdf, u) + 1
    x = t_n / float(n)
    beta = chain.beta
    limit_cdf = lambda y: np.clip(y / L, 0.0, 1.0) ** (1.0 - beta)  # noqa: E731
    ks = ks_one_sample(x, limit_cdf)
    # deterministic part: sup distance between the exact discrete CDF and the limit
    grid = np.arange(1, nl + 1) / float(n)
    exact_gap = float(np.max(np.abs(cdf / total - limit_cdf(grid))))
    return {"ks": ks, "exact_sup_gap": exact_gap, "n": int(n), "L": int(L)}
