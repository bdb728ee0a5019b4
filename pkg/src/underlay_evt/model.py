"""System model: parameters, per-user SIR law, its extreme-value limit, ST power law.

Notation follows the usual underlay setup. Interference channel gains
|g_i|^2 ~ Exp(rate ``lam``), secondary gains |h_i|^2 ~ Gamma(shape ``m``,
scale ``beta``), ST->PR gain |h_0|^2 ~ Exp(rate ``eta``). The normalized
ratio is Z_i = |h_i|^2 / (P_M |g_i|^2) and the ST transmits with
P = min(P_S, T / |h_0|^2).

All powers are linear. ``UNLIMITED`` (``math.inf``) marks an uncapped ST and
is dispatched on explicitly, never treated as a large number.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize

from .specfun import DomainError, ln_gamma, upper_inc_gamma_reg

UNLIMITED = math.inf


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Primary + secondary network parameters (linear units)."""

    lam: float
    beta: float
    m: float
    eta: float
    p_m: float
    t_intf: float
    p_s: float = UNLIMITED
    n_users: int = 2
    k_rank: int = 1

    def __post_init__(self):
        for name in ("lam", "beta", "m", "eta", "p_m", "t_intf"):
            _positive(name, getattr(self, name))
        if not self.p_s > 0 or math.isnan(self.p_s):
            raise DomainError(f"p_s must be > 0 or UNLIMITED, got {self.p_s!r}")
        if int(self.n_users) != self.n_users or self.n_users < 1:
            raise DomainError(f"n_users must be an integer >= 1, got {self.n_users!r}")
        if int(self.k_rank) != self.k_rank or self.k_rank < 1:
            raise DomainError(f"k_rank must be an integer >= 1, got {self.k_rank!r}")
        object.__setattr__(self, "n_users", int(self.n_users))
        object.__setattr__(self, "k_rank", int(self.k_rank))

    @property
    def unlimited(self) -> bool:
        return math.isinf(self.p_s)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class CsiParams:
    """Outdated-CSI description.

    ``eta_hat`` and ``beta_hat`` describe the estimated channels the ST
    actually sees; the true ST->PR rate follows from ``rho`` (see
    :attr:`true_eta`).
    """

    rho: float
    delta: float
    gamma0: float
    eta_hat: float
    beta_hat: float

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta!r}")
        if not 0.0 < self.gamma0 < 1.0:
            raise DomainError(f"gamma0 must lie in (0, 1), got {self.gamma0!r}")
        _positive("eta_hat", self.eta_hat)
        _positive("beta_hat", self.beta_hat)

    @property
    def power_margin(self) -> float:
        return power_margin(self.rho, self.gamma0)

    @property
    def true_eta(self) -> float:
        """Rate of the true |h_0|^2 implied by 1/eta = rho^2/eta_hat + (1 - rho^2)."""
        rho2 = self.rho * self.rho
        return 1.0 / (rho2 / self.eta_hat + (1.0 - rho2))

    def replace(self, **changes) -> "CsiParams":
        return dataclasses.replace(self, **changes)


# Metric requests


@dataclass(frozen=True)
class AvgThroughput:
    name = "avg_throughput"


@dataclass(frozen=True)
class EffThroughput:
    a_exp: float
    name = "eff_throughput"

    def __post_init__(self):
        _positive("a_exp", self.a_exp)


@dataclass(frozen=True)
class AvgBer:
    c: float
    v: float
    name = "avg_ber"

    def __post_init__(self):
        _positive("c", self.c)
        _positive("v", self.v)


@dataclass(frozen=True)
class Outage:
    x0: float
    name = "outage"

    def __post_init__(self):
        _positive("x0", self.x0)


Metric = Union[AvgThroughput, EffThroughput, AvgBer, Outage]


# Per-user SIR ratio Z_i


def sir_cdf(z, p: SystemParams):
    """F(z) = (P_M z / (lam beta + P_M z))^m for z >= 0 (0 below)."""
    z = np.asarray(z, dtype=float)
    zc = np.maximum(z, 0.0)
    out = (p.p_m * zc / (p.lam * p.beta + p.p_m * zc)) ** p.m
    out = np.where(z > 0, out, 0.0)
    return out if out.ndim else float(out)


def sir_pdf(z, p: SystemParams):
    z = np.asarray(z, dtype=float)
    zc = np.maximum(z, 0.0)
    lb = p.lam * p.beta
    with np.errstate(divide="ignore", invalid="ignore"):
        out = p.m * lb * p.p_m**p.m * zc ** (p.m - 1.0) / (lb + p.p_m * zc) ** (p.m + 1.0)
    out = np.where(z > 0, out, 0.0)
    return out if out.ndim else float(out)


def scale_b(p: SystemParams) -> float:
    """Normalizing constant b = F^{-1}(1 - 1/N) of the k-th largest Z_i.

    The denominator (1 - 1/N)^(-1/m) - 1 is formed with expm1/log1p; it is
    of order 1/(mN) and would otherwise lose digits to cancellation.
    """
    if p.n_users < 2:
        raise DomainError(f"scale_b needs n_users >= 2, got {p.n_users}")
    gap = math.expm1(-math.log1p(-1.0 / p.n_users) / p.m)
    return p.beta * p.lam / (p.p_m * gap)


# Inverse-gamma limit of Z_(N-k+1) / b


def _check_rank(k: int) -> int:
    if int(k) != k or k < 1:
        raise DomainError(f"order k must be an integer >= 1, got {k!r}")
    return int(k)


def limiting_cdf(z, k: int):
    """G^(k)(z) = Q(k, 1/z) = e^{-1/z} sum_{j<k} z^{-j} / j!  (0 for z <= 0)."""
    k = _check_rank(k)
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        w = 1.0 / z
        term = np.ones_like(w)
        total = np.ones_like(w)
        for j in range(1, k):
            term = term * w / j
            total = total + term
        out = np.exp(-w) * total
    out = np.where(z > 0, np.nan_to_num(out, nan=0.0), 0.0)
    return out if out.ndim else float(out)


def limiting_pdf(z, k: int):
    """f^(k)(z) = e^{-1/z} / (z^{k+1} (k-1)!)."""
    k = _check_rank(k)
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_f = -1.0 / z - (k + 1) * np.log(z) - ln_gamma(k)
        out = np.exp(log_f)
    out = np.where(z > 0, out, 0.0)
    return out if out.ndim else float(out)


def limiting_quantile(u: float, k: int) -> float:
    """Inverse of :func:`limiting_cdf`: the z with Q(k, 1/z) = u."""
    k = _check_rank(k)
    if not 0.0 < u < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {u!r}")
    # solve Q(k, e^s) = u in s = ln(1/z); Q(k, .) decreases from 1 to 0
    lo, hi = -1.0, 1.0
    while upper_inc_gamma_reg(k, math.exp(lo)) < u:
        lo *= 2.0
    while upper_inc_gamma_reg(k, math.exp(hi)) > u:
        hi *= 2.0
    s = optimize.brentq(
        lambda t: upper_inc_gamma_reg(k, math.exp(t)) - u, lo, hi, xtol=1e-14, rtol=1e-15
    )
    return math.exp(-s)


def sample_limiting(k: int, rng: np.random.Generator, size=None):
    """Draw from the limit law: Z = 1/G with G ~ Gamma(k, 1)."""
    k = _check_rank(k)
    return 1.0 / rng.gamma(k, 1.0, size)


@dataclass(frozen=True)
class LimitingDistribution:
    k_rank: int

    def __post_init__(self):
        _check_rank(self.k_rank)

    def cdf(self, z):
        return limiting_cdf(z, self.k_rank)

    def pdf(self, z):
        return limiting_pdf(z, self.k_rank)

    def quantile(self, u: float) -> float:
        return limiting_quantile(u, self.k_rank)

    def sample(self, rng: np.random.Generator, size=None):
        return sample_limiting(self.k_rank, rng, size)


# ST transmit power P = min(P_S, T / |h_0|^2)


def st_power_from_gain(h0_gain, t_intf: float, p_s: float):
    """Apply the power rule to given |h_0|^2 draws."""
    with np.errstate(divide="ignore"):
        power = t_intf / np.asarray(h0_gain, dtype=float)
    if not math.isinf(p_s):
        power = np.minimum(power, p_s)
    return power if np.ndim(power) else float(power)


def sample_st_power(p: SystemParams, rng: np.random.Generator, size=None):
    return st_power_from_gain(rng.exponential(1.0 / p.eta, size), p.t_intf, p.p_s)


def st_power_atom(p: SystemParams) -> float:
    """Probability mass of P at P_S: 1 - exp(-eta T / P_S); zero when unlimited."""
    if p.unlimited:
        return 0.0
    return -math.expm1(-p.eta * p.t_intf / p.p_s)


def st_power_cdf(t: float, p: SystemParams) -> float:
    if t <= 0:
        return 0.0
    if not p.unlimited and t >= p.p_s:
        return 1.0
    return math.exp(-p.eta * p.t_intf / t)


def st_power_pdf(t: float, p: SystemParams) -> float:
    """Density of the continuous part (the atom at P_S is excluded)."""
    if t <= 0 or (not p.unlimited and t >= p.p_s):
        return 0.0
    x = p.eta * p.t_intf
    return x / (t * t) * math.exp(-x / t)


# Imperfect CSI


def power_margin(rho: float, gamma0: float) -> float:
    """Power margin r_I that deflates T when only outdated ST->PR CSI is known."""
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho!r}")
    if not 0.0 < gamma0 < 1.0:
        raise DomainError(f"gamma0 must lie in (0, 1), got {gamma0!r}")
    rho2 = rho * rho
    skew = 1.0 - 2.0 * gamma0
    root = math.sqrt((1.0 - rho2) * (1.0 - skew * skew * rho2))
    return (2.0 * rho2 - 1.0) + (1.0 - rho2 - skew * root) / (2.0 * gamma0 * (1.0 - gamma0))


def effective_params(p: SystemParams, csi: CsiParams) -> SystemParams:
    """Parameters under which the perfect-CSI results hold for outdated CSI.

    eta -> eta_hat, T -> r_I T, beta -> beta_hat (hence b -> b_hat).
    """
    return p.replace(
        eta=csi.eta_hat,
        t_intf=csi.power_margin * p.t_intf,
        beta=csi.beta_hat,
    )
