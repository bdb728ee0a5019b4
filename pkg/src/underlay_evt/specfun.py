"""Special functions and quadrature.

Scalar, pure functions: log-gamma, digamma, the regularized upper incomplete
gamma function, the exponential integral E1, integer-order modified Bessel
functions of the second kind, and an adaptive integrator that refuses to
return a result it does not trust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from scipy import integrate as _quadpack

EULER_GAMMA = 0.57721566490153286061

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_ITER = 100_000


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class QuadratureError(ArithmeticError):
    """Requested accuracy not reached, or the integrand was not finite.

    ``value`` and ``error`` hold the best estimate and its error bound.
    """

    def __init__(self, message: str, value: float = math.nan, error: float = math.inf):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if self.abs_tol == 0 and self.rel_tol < 50 * _EPS:
            raise DomainError("with abs_tol = 0, rel_tol must be at least 50 machine epsilons")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUAD = QuadratureSpec()


def ln_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


# Bernoulli coefficients B_2n / (2n) for the digamma asymptotic series.
_DIGAMMA_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """psi(x) for x > 0, by upward recurrence to x >= 10 then the asymptotic series."""
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    shift = 0.0
    while x < 10.0:
        shift += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for coeff in reversed(_DIGAMMA_COEFFS):
        tail = tail * inv2 + coeff
    return math.log(x) - 0.5 / x - tail * inv2 - shift


def _lower_series(s: float, x: float) -> float:
    # P(s, x); converges quickly for x < s + 1
    ap = s
    delta = total = 1.0 / s
    for _ in range(_MAX_ITER):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise ArithmeticError(f"incomplete gamma series did not converge (s={s}, x={x})")


def _log_upper_cf(s: float, x: float) -> float:
    # ln Q(s, x) by the modified Lentz continued fraction; for x >= s + 1
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return -x + s * math.log(x) - math.lgamma(s) + math.log(h)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (s={s}, x={x})")


def _check_inc_gamma_args(s: float, x: float) -> None:
    if not s > 0:
        raise DomainError(f"incomplete gamma requires s > 0, got {s}")
    if not x >= 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}")


def log_upper_inc_gamma_reg(s: float, x: float) -> float:
    """ln Q(s, x); stays finite where Q itself underflows."""
    _check_inc_gamma_args(s, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return -math.inf
    if x < s + 1.0:
        return math.log1p(-_lower_series(s, x))
    return _log_upper_cf(s, x)


def upper_inc_gamma_reg(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).

    Series for the lower function when x < s + 1, continued fraction
    otherwise.
    """
    _check_inc_gamma_args(s, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return 1.0 - _lower_series(s, x)
    return math.exp(_log_upper_cf(s, x))


def exp_integral_e1(x: float) -> float:
    """E1(x) = int_x^inf e^-y / y dy for x > 0."""
    if not x > 0:
        raise DomainError(f"exp_integral_e1 requires x > 0, got {x}")
    if x <= 1.0:
        # -gamma - ln x - sum_{n>=1} (-x)^n / (n n!)
        term = 1.0
        total = 0.0
        for n in range(1, 200):
            term *= -x / n
            contrib = term / n
            total += contrib
            if abs(contrib) < abs(total) * _EPS:
                break
        return -EULER_GAMMA - math.log(x) - total
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-x)
    raise ArithmeticError(f"E1 continued fraction did not converge (x={x})")


def _k01_scaled(x: float) -> tuple[float, float]:
    """(e^x K_0(x), e^x K_1(x))."""
    if x <= 2.0:
        y = 0.25 * x * x
        half_log = math.log(0.5 * x)
        # K0 = -ln(x/2) I0 + sum psi(j+1) y^j / (j!)^2
        t0 = 1.0
        psi1 = -EULER_GAMMA
        i0 = t0
        s0 = psi1 * t0
        # K1 = 1/x + ln(x/2) I1 - (x/4) sum (psi(j+1) + psi(j+2)) y^j / (j! (j+1)!)
        t1 = 1.0
        psi2 = 1.0 - EULER_GAMMA
        i1 = t1
        s1 = (psi1 + psi2) * t1
        for j in range(1, 60):
            t0 *= y / (j * j)
            t1 *= y / (j * (j + 1))
            psi1 += 1.0 / j
            psi2 += 1.0 / (j + 1)
            i0 += t0
            s0 += psi1 * t0
            i1 += t1
            s1 += (psi1 + psi2) * t1
            if t0 < _EPS * i0 and t1 < _EPS * i1:
                break
        k0 = -half_log * i0 + s0
        k1 = 1.0 / x + half_log * 0.5 * x * i1 - 0.25 * x * s1
        scale = math.exp(x)
        return k0 * scale, k1 * scale

    # Steed's method (continued fraction CF2 with Temme's normalization), order 0.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise ArithmeticError(f"Bessel K continued fraction did not converge (x={x})")
    h *= a1
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _check_bessel_args(n: int, x: float) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {n}")
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")


def bessel_k_scaled(n: int, x: float) -> float:
    """e^x K_n(x), by upward recurrence from K_0 and K_1."""
    _check_bessel_args(n, x)
    k0, k1 = _k01_scaled(x)
    if n == 0:
        return k0
    for j in range(1, int(n)):
        k0, k1 = k1, k0 + (2.0 * j / x) * k1
    return k1


def bessel_k(n: int, x: float) -> float:
    """Modified Bessel function of the second kind K_n(x), integer n >= 0."""
    return bessel_k_scaled(n, x) * math.exp(-x)


def bessel_k_power_scaled(n: int, x: float) -> float:
    """e^x x^n K_n(x).

    Finite as x -> 0 (tends to 2^(n-1) (n-1)! for n >= 1), so callers that
    need s^(n/2) K_n(2 sqrt(s)) never form the overflowing K_n alone. Uses
    w_{j+1} = x^2 w_{j-1} + 2 j w_j with w_j = x^j K_j(x).
    """
    _check_bessel_args(n, x)
    w0, k1 = _k01_scaled(x)
    if n == 0:
        return w0
    w1 = x * k1
    for j in range(1, int(n)):
        w0, w1 = w1, x * x * w0 + 2.0 * j * w1
    return w1


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUAD,
    points: Iterable[float] = (),
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over [a, b]; ``b`` may be +inf.

    Interior ``points`` split the range (useful for peaks the bisection would
    otherwise have to find). Returns ``(value, error_estimate)``.

    Raises
    ------
    QuadratureError
        If any piece fails to reach ``max(abs_tol, rel_tol * |value|)`` or
        the integrand returns a non-finite value.
    """
    if not a < b:
        if a == b:
            return 0.0, 0.0
        raise DomainError(f"integrate requires a <= b, got [{a}, {b}]")
    if math.isinf(a):
        raise DomainError("lower limit must be finite")
    cuts = sorted({float(p) for p in points if a < p < b and math.isfinite(p)})
    edges = [a, *cuts, b]

    def checked(t: float) -> float:
        y = f(t)
        if not math.isfinite(y):
            raise QuadratureError(f"integrand is not finite at t={t!r}: {y!r}")
        return y

    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err, info, *rest = _quadpack.quad(
            checked,
            lo,
            hi,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            full_output=1,
        )
        total += value
        total_err += err
        # quad appends a diagnostic message only when ier != 0
        if rest:
            raise QuadratureError(
                f"quadrature on [{lo}, {hi}] did not reach tolerance: {rest[0]}",
                value=total,
                error=total_err,
            )
    return total, total_err
