"""Monte Carlo simulation of the exact finite-N system.

Reproducibility
---------------
Trials are generated in fixed blocks of ``BLOCK_TRIALS``. Block ``j`` draws
from its own counter-based Philox stream keyed by ``(seed, j)`` and is always
drawn in full (the tail is discarded), so trial ``i`` depends only on the
seed and ``i``: not on ``n_trials`` and not on how many worker threads ran
the blocks. Per-trial values are concatenated in block
order and reduced by numpy's pairwise summation over the same array, so
``threads`` cannot change a result bit.

Within a block the draw order is fixed: |h_i|^2 (n x N Gamma), then
|g_i|^2 (n x N exponential), then |h_0|^2 (n exponential).

Effective-throughput standard error
-----------------------------------
With Y = (1 + SIR)^-A, mean ybar and standard error s_y, the estimate is
-log2(ybar)/A and the delta method gives s_y / (A ybar ln 2).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from . import model
from .model import (
    AvgBer,
    AvgThroughput,
    CsiParams,
    EffThroughput,
    Metric,
    Outage,
    SystemParams,
)
from .specfun import DomainError

BLOCK_TRIALS = 4096
MIN_TRIALS = 100

SUBSTITUTED = "substituted"
# Beyond the analytical model: select on estimated secondary channels,
# evaluate the SIR on the true ones drawn from the correlation model.
CORRELATED = "correlated"


@dataclass(frozen=True)
class TrialOutcome:
    st_power: float
    kth_sir: float
    z_rank: float


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    std_error: float
    n_trials: int
    seed: int
    metric: Metric


def _check_seed(seed: int) -> int:
    if int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Philox stream for trial block ``block`` of the run keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def kth_largest(values, k: int) -> float:
    """k-th largest entry (k = 1 is the maximum) by introselect partitioning."""
    a = np.asarray(values, dtype=float)
    n = a.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    return float(np.partition(a, n - k)[n - k])


def top_ranks(z: np.ndarray, depth: int) -> np.ndarray:
    """The ``depth`` largest entries of each row, in descending order."""
    n = z.shape[1]
    part = np.partition(z, n - depth, axis=1)[:, n - depth:]
    part.sort(axis=1)
    return part[:, ::-1]


def _secondary_mode(mode: str) -> str:
    if mode not in (SUBSTITUTED, CORRELATED):
        raise DomainError(f"unknown secondary CSI mode {mode!r}")
    return mode


def _draw_block(
    p: SystemParams,
    n: int,
    rng: np.random.Generator,
    depth: int,
    csi: Optional[CsiParams] = None,
    secondary: str = SUBSTITUTED,
) -> tuple[np.ndarray, np.ndarray]:
    """(|h_0|^2 draws, top-``depth`` Z values per trial) for ``n`` trials.

    ``p`` is already the effective parameter set; in CORRELATED mode ``csi``
    supplies ``delta`` and the ranking uses estimated gains while the
    returned Z values are the true ones of the selected users.
    """
    n_users = p.n_users
    gains = rng.gamma(p.m, p.beta, size=(n, n_users))
    intf = rng.exponential(1.0 / p.lam, size=(n, n_users))
    h0 = rng.exponential(1.0 / p.eta, size=n)
    z = gains / (p.p_m * intf)
    if secondary == SUBSTITUTED:
        return h0, top_ranks(z, depth)

    delta = csi.delta
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(n, n_users))
    innov = rng.standard_normal(size=(n, n_users, 2)) * math.sqrt(0.5)
    mag = np.sqrt(gains)
    re = delta * mag * np.cos(phase) + math.sqrt(1.0 - delta * delta) * innov[..., 0]
    im = delta * mag * np.sin(phase) + math.sqrt(1.0 - delta * delta) * innov[..., 1]
    z_true = (re * re + im * im) / (p.p_m * intf)
    # stable sort on -z keeps the lowest index first among ties
    order = np.argsort(-z, axis=1, kind="stable")[:, :depth]
    return h0, np.take_along_axis(z_true, order, axis=1)


def run_trial(
    p: SystemParams,
    rng: np.random.Generator,
    csi: Optional[CsiParams] = None,
    secondary: str = SUBSTITUTED,
) -> TrialOutcome:
    """One realization of the system: power, k-th best Z and its SIR."""
    if p.k_rank > p.n_users:
        raise DomainError(f"k_rank {p.k_rank} exceeds n_users {p.n_users}")
    eff = model.effective_params(p, csi) if csi is not None else p
    h0, z_top = _draw_block(eff, 1, rng, eff.k_rank, csi, _secondary_mode(secondary))
    power = model.st_power_from_gain(float(h0[0]), eff.t_intf, eff.p_s)
    z_rank = float(z_top[0, eff.k_rank - 1])
    return TrialOutcome(st_power=power, kth_sir=power * z_rank, z_rank=z_rank)


def metric_samples(metric: Metric, sir: np.ndarray) -> np.ndarray:
    """Per-trial quantity whose mean the metric is built on."""
    if isinstance(metric, AvgThroughput):
        return np.log2(1.0 + sir)
    if isinstance(metric, EffThroughput):
        return np.exp(-metric.a_exp * np.log1p(sir))
    if isinstance(metric, AvgBer):
        return metric.c * np.exp(-metric.v * sir)
    if isinstance(metric, Outage):
        return (sir <= metric.x0).astype(float)
    raise TypeError(f"unknown metric {metric!r}")


def summarize(metric: Metric, samples: np.ndarray) -> tuple[float, float]:
    """(estimate, standard error) from per-trial samples."""
    n = samples.size
    mean = float(np.mean(samples))
    if isinstance(metric, Outage):
        se = math.sqrt(max(mean * (1.0 - mean), 0.0) / n)
        return mean, se
    se = float(np.std(samples, ddof=1)) / math.sqrt(n)
    if isinstance(metric, EffThroughput):
        a = metric.a_exp
        return -math.log2(mean) / a, se / (a * mean * math.log(2.0))
    return mean, se


@dataclass(frozen=True)
class Outcomes:
    """Raw draws of a run, reusable across power settings and ranks.

    ``params`` are the effective parameters the draws were made with;
    ``z_top[:, j]`` holds the (j+1)-th largest Z of each trial.
    """

    params: SystemParams
    seed: int
    h0_gain: np.ndarray
    z_top: np.ndarray

    @property
    def n_trials(self) -> int:
        return int(self.h0_gain.size)

    def st_power(self, t_intf: Optional[float] = None, p_s: Optional[float] = None) -> np.ndarray:
        t = self.params.t_intf if t_intf is None else t_intf
        cap = self.params.p_s if p_s is None else p_s
        return model.st_power_from_gain(self.h0_gain, t, cap)

    def z_rank(self, k: Optional[int] = None) -> np.ndarray:
        k = self.params.k_rank if k is None else k
        if not 1 <= k <= self.z_top.shape[1]:
            raise DomainError(f"rank {k} not simulated (depth {self.z_top.shape[1]})")
        return self.z_top[:, k - 1]

    def sir(self, k: Optional[int] = None, t_intf: Optional[float] = None, p_s: Optional[float] = None):
        return self.st_power(t_intf, p_s) * self.z_rank(k)

    def estimate(
        self,
        metric: Metric,
        k: Optional[int] = None,
        t_intf: Optional[float] = None,
        p_s: Optional[float] = None,
    ) -> EstimateResult:
        samples = metric_samples(metric, self.sir(k, t_intf, p_s))
        mean, se = summarize(metric, samples)
        return EstimateResult(mean, se, self.n_trials, self.seed, metric)


def _run_blocks(
    eff: SystemParams,
    n_trials: int,
    seed: int,
    depth: int,
    csi: Optional[CsiParams],
    secondary: str,
    threads: int,
) -> Outcomes:
    n_blocks = -(-n_trials // BLOCK_TRIALS)

    # every block is drawn in full, so trial i depends on (seed, i) alone
    def work(block: int):
        return _draw_block(eff, BLOCK_TRIALS, block_rng(seed, block), depth, csi, secondary)

    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(n_blocks)))
    else:
        parts = [work(j) for j in range(n_blocks)]
    h0 = np.concatenate([h for h, _ in parts])[:n_trials]
    z_top = np.concatenate([z for _, z in parts])[:n_trials]
    return Outcomes(eff, seed, h0, z_top)


def simulate(
    p: SystemParams,
    n_trials: int,
    seed: int,
    csi: Optional[CsiParams] = None,
    depth: Optional[int] = None,
    threads: int = 1,
    secondary: str = SUBSTITUTED,
) -> Outcomes:
    """Simulate ``n_trials`` independent system snapshots.

    ``depth`` ranks are kept per trial (default ``p.k_rank``). With ``csi``
    the ST power follows min(P_S, r_I T / |h_0_hat|^2) and users are ranked
    on the estimated channels (gain scale ``beta_hat``).
    """
    seed = _check_seed(seed)
    depth = p.k_rank if depth is None else int(depth)
    if not 1 <= depth <= p.n_users:
        raise DomainError(f"rank depth {depth} must lie in [1, n_users={p.n_users}]")
    if n_trials < 1:
        raise DomainError(f"n_trials must be >= 1, got {n_trials}")
    secondary = _secondary_mode(secondary)
    if secondary == CORRELATED and csi is None:
        raise DomainError("the correlated secondary-CSI mode needs CsiParams")
    eff = model.effective_params(p, csi) if csi is not None else p
    return _run_blocks(eff, n_trials, seed, depth, csi, secondary, threads)


def estimate(
    metric: Metric,
    p: SystemParams,
    csi: Optional[CsiParams] = None,
    n_trials: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> EstimateResult:
    """Monte Carlo estimate of ``metric`` for the k-th best user."""
    if p.k_rank > p.n_users:
        raise DomainError(f"k_rank {p.k_rank} exceeds n_users {p.n_users}")
    if n_trials < MIN_TRIALS:
        raise DomainError(f"n_trials must be >= {MIN_TRIALS}, got {n_trials}")
    return simulate(p, n_trials, seed, csi, threads=threads).estimate(metric)


def ks_distance(samples: np.ndarray, k: int) -> float:
    """Sup distance between the empirical CDF of ``samples`` and the order-k limit law."""
    return float(stats.kstest(samples, lambda z: model.limiting_cdf(z, k)).statistic)


def ks_statistic(p: SystemParams, n_samples: int, seed: int, threads: int = 1) -> float:
    """KS distance of Z_(N-k+1)/b (no power adaptation) from its limit law."""
    if n_samples < 1000:
        raise DomainError(f"n_samples must be >= 1000, got {n_samples}")
    out = simulate(p, n_samples, seed, threads=threads)
    return ks_distance(out.z_rank() / model.scale_b(p), p.k_rank)


def interference_outage_rate(
    p: SystemParams,
    csi: CsiParams,
    n_trials: int,
    seed: int,
    power_margin: Optional[float] = None,
) -> float:
    """Fraction of trials in which the received interference P |h_0|^2 exceeds T.

    The ST sets P = min(P_S, r_I T / |h_0_hat|^2) from the outdated estimate
    while the true channel is h_0 = rho h_0_hat + sqrt(1 - rho^2) h_tilde
    with h_tilde ~ CN(0, 1). ``power_margin`` overrides r_I.
    """
    seed = _check_seed(seed)
    r = csi.power_margin if power_margin is None else power_margin
    rng = block_rng(seed, 0)
    est = rng.standard_normal((n_trials, 2)) * math.sqrt(0.5 / csi.eta_hat)
    innov = rng.standard_normal((n_trials, 2)) * math.sqrt(0.5)
    rho = csi.rho
    mix = math.sqrt(1.0 - rho * rho)
    true = rho * est + mix * innov
    g_hat = est[:, 0] ** 2 + est[:, 1] ** 2
    g_true = true[:, 0] ** 2 + true[:, 1] ** 2
    # compare without dividing, so rho = 1 gives exactly zero violations
    violation = r * g_true > g_hat
    if not p.unlimited:
        capped = p.p_s * g_hat <= r * p.t_intf
        violation = np.where(capped, p.p_s * g_true > p.t_intf, violation)
    return float(np.mean(violation))


def estimate_many(
    requests,
    n_trials: int,
    seed: int,
    threads: int = 1,
    secondary: str = SUBSTITUTED,
) -> list[EstimateResult]:
    """Estimate a batch of ``(metric, params, csi)`` requests with shared draws.

    Requests whose effective parameters differ only in T, P_S or k reuse one
    simulation. Each result is bit-identical to a separate :func:`estimate`
    call with the same seed, since those settings never enter the draws.
    """
    seed = _check_seed(seed)
    secondary = _secondary_mode(secondary)
    if n_trials < MIN_TRIALS:
        raise DomainError(f"n_trials must be >= {MIN_TRIALS}, got {n_trials}")
    groups: dict = {}
    for idx, (metric, p, csi) in enumerate(requests):
        if p.k_rank > p.n_users:
            raise DomainError(f"k_rank {p.k_rank} exceeds n_users {p.n_users}")
        if secondary == CORRELATED and csi is None:
            raise DomainError("the correlated secondary-CSI mode needs CsiParams")
        eff = model.effective_params(p, csi) if csi is not None else p
        delta = csi.delta if secondary == CORRELATED else None
        key = (eff.lam, eff.beta, eff.m, eff.eta, eff.p_m, eff.n_users, delta)
        groups.setdefault(key, []).append((idx, metric, eff, csi))

    results: list = [None] * len(requests)
    for members in groups.values():
        _, _, first, csi = members[0]
        depth = max(eff.k_rank for _, _, eff, _ in members)
        out = _run_blocks(first, n_trials, seed, depth, csi, secondary, threads)
        for idx, metric, eff, _ in members:
            results[idx] = out.estimate(metric, eff.k_rank, eff.t_intf, eff.p_s)
    return results
