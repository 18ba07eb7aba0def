"""Two concrete conservative ergodic systems with infinite invariant measure.

* The countdown renewal chain on the non-negative integers: from state i >= 1
  the chain moves deterministically to i - 1; from 0 it jumps to k - 1 with
  probability q_k = k**-(1+beta) / zeta(1+beta).  The return time to 0 from 0
  is then exactly k, the invariant measure is pi_i = P(phi > i) with pi_0 = 1,
  and the Darling-Kac normalizer for A = {x_0 = 0} is the exact renewal
  partial sum a_n = sum_{k<=n} u_k.

* Boole's transformation placed on (0,1/2) u (1/2,1), with the closed-form
  infinite invariant density 1/x**2 + 1/(1-x)**2, indifferent fixed points at
  0 and 1 (cubic tangency, so the return-sequence exponent is 1/2), and the
  reference set A_eps = (eps, 1/2) u (1/2, 1-eps).

Wandering rates w_n and return sequences a_n are exact for the chain and
numeric (via the boundary preimage ladder) for Boole's map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from . import _kernels
from ._rng import child_keys
from .subordinator import ParameterDomainError

__all__ = [
    "hurwitz_zeta",
    "RenewalChainModel",
    "BooleMapModel",
    "boole_map",
    "boole_measure_interval",
    "normalizer_ratio",
]


def hurwitz_zeta(s: float, a: float = 1.0, head: int = 64) -> np.ndarray:
    """Hurwitz zeta sum_{k>=0} (a+k)**-s by direct series plus Euler-Maclaurin tail.

    With `head` explicit terms the tail corrections leave an absolute error
    below 1e-13 for s in (1, 2] and a >= 1, well inside the 1e-12 budget.
    """
    a = np.asarray(a, dtype=float)
    k = np.arange(head)
    headsum = ((a[..., None] + k) ** -s).sum(axis=-1)
    m = a + head
    tail = m ** (1.0 - s) / (s - 1.0) + 0.5 * m**-s + s / 12.0 * m ** (-s - 1.0)
    tail -= s * (s + 1.0) * (s + 2.0) / 720.0 * m ** (-s - 3.0)
    tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * m ** (-s - 5.0)
    return headsum + tail


def _series_inverse(p: np.ndarray, n: int) -> np.ndarray:
    """Power-series inverse 1/P(z) mod z**(n+1) by Newton doubling (FFT)."""
    if p[0] != 1.0:
        raise ValueError("leading coefficient must be 1")
    u = np.zeros(n + 1)
    u[0] = 1.0
    m = 1
    while m <= n:
        m2 = min(2 * m, n + 1)
        size = 1
        while size < 2 * m2:
            size *= 2
        fu = np.fft.rfft(u[:m2], size)
        w = np.fft.irfft(np.fft.rfft(p[:m2], size) * fu, size)[:m2]
        w = -w
        w[0] += 2.0
        u[:m2] = np.fft.irfft(np.fft.rfft(w, size) * fu, size)[:m2]
        m = m2
    return u


@dataclass
class RenewalChainModel:
    """Countdown renewal chain with heavy-tailed return times.

    q_k = k**-(1+beta)/zeta(1+beta) for k >= 1; pi_i = P(phi > i); u_n solves
    the renewal convolution u_n = sum_{k<=n} q_k u_{n-k}, u_0 = 1.
    """

    beta: float
    _zeta: float = field(init=False, repr=False)
    _pi: np.ndarray = field(default=None, repr=False)
    _w: np.ndarray = field(default=None, repr=False)
    _u: np.ndarray = field(default=None, repr=False)
    _a: np.ndarray = field(default=None, repr=False)
    _qcdf: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ParameterDomainError(f"beta must lie in (0,1), got {self.beta}")
        self._zeta = float(hurwitz_zeta(1.0 + self.beta, 1.0))

    # ---- exact sequences ------------------------------------------------

    @property
    def zeta_value(self) -> float:
        return self._zeta

    def q_pmf(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return k ** -(1.0 + self.beta) / self._zeta

    def pi_table(self, n: int) -> np.ndarray:
        """pi_0 .. pi_n; pi_i = zeta(1+beta, i+1)/zeta(1+beta) = P(phi > i)."""
        if self._pi is None or self._pi.size < n + 1:
            idx = np.arange(n + 1, dtype=float)
            self._pi = hurwitz_zeta(1.0 + self.beta, idx + 1.0) / self._zeta
        return self._pi[: n + 1]

    def q_cdf_table(self, cap: int) -> np.ndarray:
        """F(k) = P(phi <= k) for k = 0..cap, exact via the Hurwitz tail."""
        if self._qcdf is None or self._qcdf.size < cap + 1:
            self._qcdf = 1.0 - self.pi_table(cap)
        return self._qcdf[: cap + 1]

    def wandering_rate(self, n: int) -> float:
        """w_n = mu(union of the first n preimages of A) = sum_{i<n} pi_i.

        For the countdown chain, x is in T**-k A iff x_k = 0; a start state
        i >= 1 first reaches 0 at epoch i exactly, and from i >= n no epoch
        k < n has x_k = 0.  Hence the union over k = 0..n-1 is precisely the
        set of start states {x_0 < n}, of measure sum_{i=0}^{n-1} pi_i.
        """
        return float(self._w_table(int(n))[int(n)])

    def _w_table(self, n: int) -> np.ndarray:
        if self._w is None or self._w.size < n + 1:
            pi = self.pi_table(n)
            w = np.empty(n + 1)
            w[0] = 0.0
            np.cumsum(pi[:n], out=w[1:])
            self._w = w
        return self._w[: n + 1]

    def u_table(self, n: int) -> np.ndarray:
        """Renewal sequence u_0..u_n (probability of a renewal at epoch k)."""
        if self._u is None or self._u.size < n + 1:
            p = np.zeros(n + 1)
            p[0] = 1.0
            k = np.arange(1, n + 1, dtype=float)
            p[1:] = -(k ** -(1.0 + self.beta)) / self._zeta
            self._u = _series_inverse(p, n)
        return self._u[: n + 1]

    def return_sequence(self, n: int) -> float:
        """Exact Darling-Kac normalizer a_n = sum_{k=1..n} u_k (mu(A) = 1)."""
        return float(self._a_table(int(n))[int(n)])

    def _a_table(self, n: int) -> np.ndarray:
        if self._a is None or self._a.size < n + 1:
            self._a = np.cumsum(self.u_table(n)) - 1.0  # drop u_0
        return self._a[: n + 1]

    # ---- measures of simple sets ----------------------------------------

    def mu_dn(self, n: int) -> float:
        """mu of D_n = {some visit to 0 within epochs 1..n}."""
        pi = self.pi_table(n)
        return float(self.q_cdf_table(n)[n] + pi[1 : n + 1].sum())

    def first_visit_pmf(self, n: int) -> np.ndarray:
        """Exact law of the first visit epoch under normalised mu|D_n.

        P(first visit at m) is proportional to pi_m + q_m = pi_{m-1}.
        """
        pi = self.pi_table(n)
        weights = pi[:n].copy()
        return weights / weights.sum()

    def start_cdf_table(self, n: int) -> np.ndarray:
        """Unnormalised cumulative start weights on D_n: [F_q(n), pi_1..pi_n]."""
        pi = self.pi_table(n)
        w = np.empty(n + 1)
        w[0] = self.q_cdf_table(n)[n]
        w[1:] = pi[1 : n + 1]
        return np.cumsum(w)

    # ---- simulation -------------------------------------------------------

    def occupation(self, n: int, rng) -> np.ndarray:
        """One occupation path S_0..S_n of visits to 0 from start state 0."""
        cap = int(n)
        cdf = self.q_cdf_table(cap)
        s = np.zeros(cap + 1, dtype=np.int64)
        v = 0
        while True:
            u = rng.uniform()
            if u > cdf[-1]:
                break
            v += int(np.searchsorted(cdf, u))
            if v > cap:
                break
            s[v:] += 1
        return s

    def occupation_counts(self, cuts, reps: int, master_seed: int, tag="dk-chain") -> np.ndarray:
        """Visit counts S_{cut} for reps independent paths from state 0."""
        cuts = np.asarray(cuts, dtype=np.int64)
        horizon = int(cuts.max())
        qcdf = self.q_cdf_table(horizon)
        seeds = child_keys(master_seed, tag, int(reps))
        return _kernels.chain_occupation_counts(qcdf, horizon, cuts, seeds)

    def sample_visits_given_dn(self, n: int, rng) -> np.ndarray:
        """Visit epochs within [1, n] for one path of mu restricted to D_n.

        Start state i is drawn with weight pi_i * P_i(D_n); for i = 0 the
        first return is conditioned on phi <= n, later returns are not.
        """
        n = int(n)
        start_cdf = self.start_cdf_table(n)
        qcdf = self.q_cdf_table(n)
        idx = int(np.searchsorted(start_cdf, rng.uniform(0.0, start_cdf[-1])))
        if idx == 0:
            v = int(np.searchsorted(qcdf, rng.uniform(0.0, qcdf[n])))
        else:
            v = idx
        visits = []
        while v <= n:
            visits.append(v)
            u = rng.uniform()
            if u > qcdf[-1]:
                break
            v += int(np.searchsorted(qcdf, u))
        return np.asarray(visits, dtype=np.int64)

    def dn_visit_counts(self, n: int, cuts, reps: int, master_seed: int, tag="dn") -> np.ndarray:
        cuts = np.asarray(cuts, dtype=np.int64)
        qcdf = self.q_cdf_table(int(n))
        start_cdf = self.start_cdf_table(int(n))
        seeds = child_keys(master_seed, tag, int(reps))
        return _kernels.chain_dn_occupation_counts(qcdf, start_cdf, int(n), cuts, seeds)


# ---------------------------------------------------------------------------
# Boole's transformation
# ---------------------------------------------------------------------------


def boole_map(x: float) -> float:
    """Boole's transformation on (0,1/2) u (1/2,1).

    T(x) = x(1-x)/(1-x-x**2) on the left half, T(x) = 1 - T(1-x) on the
    right; T(x) - x = x**3 + O(x**4) at the indifferent fixed point 0.
    """
    if not 0.0 < x < 1.0 or x == 0.5:
        raise ParameterDomainError(f"x={x} is outside (0,1/2) u (1/2,1)")
    if x < 0.5:
        return float(x * (1.0 - x) / (1.0 - x - x * x))
    z = 1.0 - x
    return float(1.0 - z * (1.0 - z) / (1.0 - z - z * z))


def _antiderivative(x):
    # F' = 1/x**2 + 1/(1-x)**2
    return 1.0 / (1.0 - x) - 1.0 / x


def boole_measure_interval(a: float, b: float) -> float:
    """mu((a,b)) for the invariant density 1/x**2 + 1/(1-x)**2."""
    if not (0.0 < a < b < 1.0):
        raise ParameterDomainError(f"need 0 < a < b < 1, got ({a}, {b})")
    return float(_antiderivative(b) - _antiderivative(a))


@dataclass
class BooleMapModel:
    """Boole's map with reference set A_eps = (eps, 1/2) u (1/2, 1-eps)."""

    eps: float = 0.05
    beta: float = field(default=0.5, init=False)
    _ladder: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 < self.eps < 0.5:
            raise ParameterDomainError(f"eps must lie in (0, 1/2), got {self.eps}")

    def apply(self, x: float) -> float:
        return boole_map(x)

    def measure_a(self) -> float:
        return 2.0 * (_antiderivative(0.5) - _antiderivative(self.eps))

    def left_inverse(self, y: float) -> float:
        """Inverse of the left branch on (0, 1/2); solves T(x) = y."""
        if not 0.0 < y < 1.0:
            raise ParameterDomainError("left branch maps onto (0, 1)")
        return float(((1.0 + y) - np.sqrt(1.0 - 2.0 * y + 5.0 * y * y)) / (2.0 * (1.0 - y)))

    def ladder(self, n: int) -> np.ndarray:
        """Left-boundary preimages u_0 = eps, T(u_k) = u_{k-1}; u_k ~ c/sqrt(k).

        {phi > k} intersected with (0, eps) is exactly (0, u_k): points below
        u_k stay below eps for k more steps because the left branch increases,
        and points in (u_k, eps) reach (eps, T(eps)) inside A_eps.
        """
        if self._ladder is None or self._ladder.size < n + 1:
            self._ladder = _kernels.boole_ladder(self.eps, int(n))
        return self._ladder[: n + 1]

    def wandering_rate(self, n: int) -> float:
        """w_n = mu(A_eps) + 2 mu((u_{n-1}, eps)), by the escape-time ladder."""
        n = int(n)
        if n < 1:
            raise ParameterDomainError("n must be >= 1")
        w = self.measure_a()
        if n > 1:
            u = self.ladder(n - 1)[n - 1]
            w += 2.0 * (_antiderivative(self.eps) - _antiderivative(u))
        return float(w)

    def return_sequence(self, n: int) -> float:
        """a_n = n / (Gamma(3/2)**2 w_n), the Darling-Kac normalizer route."""
        b = self.beta
        return float(n / (_gamma(2.0 - b) * _gamma(1.0 + b) * self.wandering_rate(n)))

    def sample_start(self, rng, size=None):
        """Draw from mu restricted to A_eps, by inverse CDF of the closed form."""
        n = 1 if size is None else int(size)
        u = rng.uniform(0.0, 1.0, n)
        mirror = u >= 0.5
        uu = np.where(mirror, 2.0 * (u - 0.5), 2.0 * u)
        y = _antiderivative(self.eps) * (1.0 - uu)
        x = np.where(
            y < -1e-7,
            ((y - 2.0) + np.sqrt(y * y + 4.0)) / (2.0 * np.where(y == 0.0, 1.0, y)),
            0.5 + y / 8.0,
        )
        x = np.where(mirror, 1.0 - x, x)
        return float(x[0]) if size is None else x

    def in_reference_set(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.eps) & (x < 1.0 - self.eps) & (x != 0.5)

    def occupation(self, x0: float, n: int) -> np.ndarray:
        """One occupation path S_0..S_n of visits to A_eps (pure python loop)."""
        s = np.zeros(int(n) + 1, dtype=np.int64)
        x = float(x0)
        for k in range(1, int(n) + 1):
            x = boole_map(x)
            s[k] = s[k - 1] + (1 if (self.eps < x < 1.0 - self.eps and x != 0.5) else 0)
        return s

    def occupation_counts(self, cuts, reps: int, master_seed: int, tag="dk-boole"):
        """Visit counts to A_eps at the cut epochs, with restart bookkeeping."""
        cuts = np.asarray(cuts, dtype=np.int64)
        seeds = child_keys(master_seed, tag, int(reps))
        counts, restarts = _kernels.boole_occupation_counts(
            self.eps, _antiderivative(self.eps), cuts, seeds, 1e-13
        )
        return counts, int(restarts.sum())


def normalizer_ratio(a_n: float, w_n: float, n: int, beta: float) -> float:
    """The consistency product a_n * Gamma(2-beta) * Gamma(1+beta) * w_n / n."""
    return float(a_n * _gamma(2.0 - beta) * _gamma(1.0 + beta) * w_n / n)
