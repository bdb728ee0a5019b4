"""Large-N performance of the k-th best secondary user.

Every metric conditions on the ST power P and averages the inverse-gamma
limit of Z_(N-k+1)/b, then averages over the law of P (continuous part plus
the atom at P_S). Throughputs have closed forms. BER and the limited-power
outage keep a one-dimensional integral over P, evaluated by adaptive
quadrature after substituting u = eta T / t, which maps (0, P_S) onto
(eta T / P_S, inf) with an exp(-u) weight.

Gamma-function ratios are composed in log space; nothing calls Gamma()
directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import model
from .model import AvgBer, AvgThroughput, CsiParams, EffThroughput, Metric, Outage, SystemParams
from .specfun import (
    DEFAULT_QUAD,
    DomainError,
    EULER_GAMMA,
    QuadratureSpec,
    bessel_k_power_scaled,
    digamma,
    exp_integral_e1,
    integrate,
    ln_gamma,
    log_upper_inc_gamma_reg,
    upper_inc_gamma_reg,
)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class AsymptoticResult:
    value: float
    quadrature_err: float = 0.0


def _b(p: SystemParams, b: Optional[float]) -> float:
    return model.scale_b(p) if b is None else b


def limiting_mgf(s: float, k: int) -> float:
    """E[exp(-s Z)] for Z with the order-k inverse-gamma limit law.

    Equals 2 s^{k/2} K_k(2 sqrt(s)) / (k-1)!, formed as
    2^{1-k} y^k K_k(y) / (k-1)! with y = 2 sqrt(s) so that it stays finite
    as s -> 0 (where it tends to 1).
    """
    if s < 0:
        raise DomainError(f"limiting_mgf needs s >= 0, got {s}")
    if s == 0.0:
        return 1.0
    y = 2.0 * math.sqrt(s)
    log_val = (1 - k) * LN2 + math.log(bessel_k_power_scaled(k, y)) - y - ln_gamma(k)
    return math.exp(log_val)


def _power_average(g: Callable[[float], float], x: float, scale: float, quad: QuadratureSpec):
    """int_x^inf g(u) e^{-u} du, as e^{-x} int_0^inf g(x + w) e^{-w} dw.

    ``scale`` is where g turns on; the peak of g(u) e^{-u} sits near a power
    of it, so those are offered to the integrator as breakpoints.
    """
    pts = []
    for c in (scale, scale ** 0.5, scale ** (1.0 / 3.0), 1.0, 10.0):
        w = c - x
        if 0.0 < w < 700.0:
            pts.append(w)
    value, err = integrate(lambda w: g(x + w) * math.exp(-w), 0.0, math.inf, quad, pts)
    damp = math.exp(-x)
    return value * damp, err * damp


def avg_throughput(p: SystemParams, *, b: Optional[float] = None) -> AsymptoticResult:
    """Average throughput in bit/s/Hz.

    Limited: (ln(b P_S) - E1(eta T / P_S) - psi(k)) / ln 2.
    Unlimited: (ln(b T eta) - psi(k) + gamma) / ln 2.
    """
    b = _b(p, b)
    if p.unlimited:
        value = (math.log(b * p.t_intf * p.eta) - digamma(p.k_rank) + EULER_GAMMA) / LN2
    else:
        x = p.eta * p.t_intf / p.p_s
        value = (math.log(b * p.p_s) - exp_integral_e1(x) - digamma(p.k_rank)) / LN2
    return AsymptoticResult(value)


def eff_throughput(p: SystemParams, a_exp: float, *, b: Optional[float] = None) -> AsymptoticResult:
    """Effective throughput -(1/A) log2 E[(1 + SIR)^-A] in bit/s/Hz.

    The expectation is Gamma(k+A)/(k-1)! * E[(bP)^-A]; the limited-power
    E[P^-A] has a continuous part Gamma(A+1, eta T/P_S) (eta T)^-A and an
    atom P_S^-A (1 - e^{-eta T/P_S}). Both are combined with logaddexp.
    """
    if not a_exp > 0:
        raise DomainError(f"a_exp must be > 0, got {a_exp}")
    b = _b(p, b)
    k = p.k_rank
    log_ratio = ln_gamma(k + a_exp) - ln_gamma(k)
    if p.unlimited:
        log_mean = log_ratio + ln_gamma(a_exp + 1.0) - a_exp * math.log(b * p.t_intf * p.eta)
    else:
        x = p.eta * p.t_intf / p.p_s
        log_cont = (
            ln_gamma(a_exp + 1.0)
            + log_upper_inc_gamma_reg(a_exp + 1.0, x)
            - a_exp * math.log(b * p.eta * p.t_intf)
        )
        log_atom = math.log(-math.expm1(-x)) - a_exp * math.log(b * p.p_s)
        log_mean = log_ratio + float(np.logaddexp(log_cont, log_atom))
    return AsymptoticResult(-log_mean / (a_exp * LN2))


def avg_ber(
    p: SystemParams,
    c: float,
    v: float,
    *,
    b: Optional[float] = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> AsymptoticResult:
    """Average BER for conditional error probability c exp(-v SIR).

    Conditional on P the limit gives c * limiting_mgf(v b P, k). The whole
    expression, atom term included, carries the factor c.
    """
    if not (c > 0 and v > 0):
        raise DomainError(f"c and v must be > 0, got c={c}, v={v}")
    b = _b(p, b)
    k = p.k_rank
    scale = v * b * p.eta * p.t_intf
    x = 0.0 if p.unlimited else p.eta * p.t_intf / p.p_s

    def conditional(u: float) -> float:
        return limiting_mgf(scale / u, k) if u > 0 else 0.0

    integral, err = _power_average(conditional, x, scale, quad)
    atom = 0.0
    if not p.unlimited:
        atom = limiting_mgf(v * b * p.p_s, k) * model.st_power_atom(p)
    value = c * (integral + atom)
    return AsymptoticResult(min(max(value, 0.0), c), c * err)


def outage(
    p: SystemParams,
    x0: float,
    *,
    b: Optional[float] = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> AsymptoticResult:
    """Outage probability Pr{SIR <= x0}.

    Unlimited power collapses to limiting_mgf(eta T b / x0, k); limited
    power integrates Q(k, b t / x0) over the continuous part of P and adds
    the atom Q(k, b P_S / x0) (1 - e^{-eta T/P_S}).
    """
    if not x0 > 0:
        raise DomainError(f"x0 must be > 0, got {x0}")
    b = _b(p, b)
    k = p.k_rank
    scale = p.eta * p.t_intf * b / x0
    if p.unlimited:
        return AsymptoticResult(limiting_mgf(scale, k))
    x = p.eta * p.t_intf / p.p_s

    def conditional(u: float) -> float:
        return upper_inc_gamma_reg(k, scale / u) if u > 0 else 0.0

    integral, err = _power_average(conditional, x, scale, quad)
    atom = upper_inc_gamma_reg(k, b * p.p_s / x0) * model.st_power_atom(p)
    return AsymptoticResult(min(max(integral + atom, 0.0), 1.0), err)


def evaluate(
    metric: Metric,
    p: SystemParams,
    csi: Optional[CsiParams] = None,
    *,
    b_factor: float = 1.0,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> AsymptoticResult:
    """Evaluate ``metric``, first mapping ``p`` through the CSI substitution if given.

    ``b_factor`` multiplies the normalizing constant; it exists for negative
    controls and is 1 in normal use.
    """
    if csi is not None:
        p = model.effective_params(p, csi)
    b = model.scale_b(p) * b_factor
    if isinstance(metric, AvgThroughput):
        return avg_throughput(p, b=b)
    if isinstance(metric, EffThroughput):
        return eff_throughput(p, metric.a_exp, b=b)
    if isinstance(metric, AvgBer):
        return avg_ber(p, metric.c, metric.v, b=b, quad=quad)
    if isinstance(metric, Outage):
        return outage(p, metric.x0, b=b, quad=quad)
    raise TypeError(f"unknown metric {metric!r}")


# Identities used to cross-check the limit law


def limiting_mgf_quad(t: float, k: int, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """int_0^inf e^{t z} f^(k)(z) dz by direct quadrature (t < 0)."""
    if not t < 0:
        raise DomainError(f"MGF argument must be negative, got {t}")
    log_norm = ln_gamma(k)

    def integrand(z: float) -> float:
        if z <= 0:
            return 0.0
        return math.exp(t * z - 1.0 / z - (k + 1) * math.log(z) - log_norm)

    return integrate(integrand, 0.0, math.inf, quad, points=(1.0 / (k + 1), 1.0, 10.0))


def tricomi_u(a: float, b: float, z: float, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """U(a; b; z) = 1/Gamma(a) int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt, a > 0, z > 0."""
    if not (a > 0 and z > 0):
        raise DomainError(f"tricomi_u needs a > 0 and z > 0, got a={a}, z={z}")
    log_norm = ln_gamma(a)

    def integrand(t: float) -> float:
        if t <= 0:
            return 0.0 if a > 1 else (1.0 if a == 1 else math.inf)
        return math.exp(-z * t + (a - 1) * math.log(t) + (b - a - 1) * math.log1p(t) - log_norm)

    return integrate(integrand, 0.0, math.inf, quad, points=(1.0, max(a, 1.0) / z))


def limiting_neg_moment(a_exp: float, k: int, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """E[(1+Z)^-A] = U(A+k; k+1; 1) Gamma(A+k) / (k-1)!, with U from its integral."""
    u, err = tricomi_u(a_exp + k, k + 1, 1.0, quad)
    factor = math.exp(ln_gamma(a_exp + k) - ln_gamma(k))
    return u * factor, err * factor


def limiting_neg_moment_quad(a_exp: float, k: int, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """int_0^inf (1+z)^-A f^(k)(z) dz by direct quadrature."""
    log_norm = ln_gamma(k)

    def integrand(z: float) -> float:
        if z <= 0:
            return 0.0
        return math.exp(-a_exp * math.log1p(z) - 1.0 / z - (k + 1) * math.log(z) - log_norm)

    return integrate(integrand, 0.0, math.inf, quad, points=(1.0 / (k + 1), 1.0, 10.0))
