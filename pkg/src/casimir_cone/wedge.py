r"""Casimir-Polder energy of a perfectly conducting wedge.

Two routes to the same number: the closed form from the discrete
fractional-order mode sum, and the analytically continued angular-momentum
integral

.. math::

    \hat U = -\frac{1}{\pi}\int_0^\infty (\lambda + \lambda^3)
      \Big[\tfrac13\coth\pi\lambda - \tfrac13\coth(2(\pi-\theta_0)\lambda)
      + \frac{\cosh(2(\pi-\theta)\lambda)}{\sinh(2(\pi-\theta_0)\lambda)}\Big]
      d\lambda .

The polynomial factor multiplies the whole bracket; the integral over
:math:`\kappa` and :math:`k_z` produces :math:`\pi\lambda(1+\lambda^2)` for
both the :math:`\cosh(2(\pi-\theta)\lambda)` and the
:math:`\sinh((\pi-2\theta_0)\lambda)` pieces. Written this way the integrand
is finite at :math:`\lambda=0` and decays exponentially, so the integral
converges absolutely. :func:`printed_lambda_integrand` keeps the variant with
the factor on the first term only, for comparison.

All energies are dimensionless, :math:`\hat U = U r^4/(\alpha\hbar c)`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import Estimate, QuadSpec, integrate_semi_infinite


class WedgeDomainError(ValueError):
    pass


@dataclass(frozen=True)
class WedgeConfig:
    theta0: float
    theta: float
    r: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.theta0 < math.pi:
            raise WedgeDomainError(f"theta0 must lie in (0, pi), got {self.theta0!r}")
        if not self.theta0 < self.theta <= math.pi:
            raise WedgeDomainError("theta must exceed theta0 and be at most pi")
        if not self.r > 0.0:
            raise WedgeDomainError("r must be positive")

    @property
    def p(self):
        return math.pi / (2.0 * (math.pi - self.theta0))


@dataclass(frozen=True)
class WedgeTMatrix:
    tM_plus: float
    tM_minus: float
    tN_plus: float
    tN_minus: float


def _log_sinh(y):
    # log sinh(y) for y > 0 without overflow
    return y + math.log1p(-math.exp(-2.0 * y)) - math.log(2.0)


def _log_cosh(y):
    y = abs(y)
    return y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)


def wedge_energy_closed(cfg):
    p = cfg.p
    s = math.sin(p * (cfg.theta - cfg.theta0))
    if abs(s) < 1e-300:
        raise WedgeDomainError("sin(p (theta - theta0)) vanishes; particle on the conductor")
    s2 = s * s
    bracket = p**4 - (2.0 / 3.0) * p * p * (p * p - 1.0) * s2 - (p * p - 1.0) * (p * p + 11.0) * s2 * s2 / 135.0
    return -3.0 / (8.0 * math.pi * s2 * s2) * bracket


def wedge_tmatrix(lam, theta0):
    lam = float(lam)
    if lam < 0.0:
        raise WedgeDomainError("lambda must be >= 0")
    if lam == 0.0:
        plus = theta0 / (math.pi - theta0)
        minus = 1.0
    else:
        lp = _log_sinh(lam * theta0) - _log_sinh(lam * (math.pi - theta0))
        lm = _log_cosh(lam * theta0) - _log_cosh(lam * (math.pi - theta0))
        if max(lp, lm) > 700.0:
            raise OverflowError(f"wedge T-matrix exceeds the float range at lambda={lam}, theta0={theta0}")
        plus = math.exp(lp)
        minus = math.exp(lm)
    return WedgeTMatrix(tM_plus=plus, tM_minus=minus, tN_plus=-minus, tN_minus=-plus)


def _coth(y):
    return 1.0 / np.tanh(y)


def _cosh_over_sinh(a, b):
    # cosh(a) / sinh(b) for b > 0, a >= 0, evaluated as exponentials
    return np.exp(a - b) * (1.0 + np.exp(-2.0 * a)) / -np.expm1(-2.0 * b)


def wedge_lambda_integrand(lam, cfg):
    """Integrand of the continued-angular-momentum energy; Û = -(1/π)∫ ... dλ."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0.0):
        raise WedgeDomainError("lambda must be > 0 (the lambda -> 0 limit is finite but not evaluated)")
    b = 2.0 * (math.pi - cfg.theta0) * lam
    a = 2.0 * (math.pi - cfg.theta) * lam
    bracket = (_coth(math.pi * lam) - _coth(b)) / 3.0 + _cosh_over_sinh(a, b)
    out = (lam + lam**3) * bracket
    return out if out.ndim else float(out)


def printed_lambda_integrand(lam, cfg):
    """The bracket with (λ+λ³)/3 attached to the coth πλ term only.

    Grows like λ³/3 and behaves like 1/(3(π-θ₀)λ) near zero, so it is not
    integrable; kept as a reference for the small- and large-λ behaviour.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0.0):
        raise WedgeDomainError("lambda must be > 0")
    b = 2.0 * (math.pi - cfg.theta0) * lam
    a = 2.0 * (math.pi - cfg.theta) * lam
    out = (lam + lam**3) / 3.0 * _coth(math.pi * lam) - _coth(b) / 3.0 + _cosh_over_sinh(a, b)
    return out if out.ndim else float(out)


def wedge_energy_integral(cfg, spec=QuadSpec()):
    """Û from the λ-integral; returns a quadrature Estimate."""
    rate = 2.0 * min(cfg.theta - cfg.theta0, math.pi - cfg.theta0)
    est = integrate_semi_infinite(lambda x: wedge_lambda_integrand(x, cfg), 0.0, rate, spec)
    est.value = -est.value / math.pi
    est.err = est.err / math.pi
    return est


def wedge_energy_relative(cfg, theta_ref, spec=QuadSpec()):
    """Û(θ) − Û(θ_ref) as a convergent λ-integral of the θ-dependent term.

    Returns an Estimate whose value is the difference.
    """
    theta_ref = float(theta_ref)
    if not cfg.theta0 < theta_ref <= math.pi:
        raise WedgeDomainError("theta_ref must exceed theta0 and be at most pi")
    b_coef = 2.0 * (math.pi - cfg.theta0)
    a1 = 2.0 * (math.pi - cfg.theta)
    a2 = 2.0 * (math.pi - theta_ref)

    def integrand(lam):
        b = b_coef * lam
        diff = _cosh_over_sinh(a1 * lam, b) - _cosh_over_sinh(a2 * lam, b)
        return (lam + lam**3) * diff

    if cfg.theta == theta_ref:
        return Estimate(0.0, 0.0, 0, True)
    rate = 2.0 * (min(cfg.theta, theta_ref) - cfg.theta0)
    est = integrate_semi_infinite(integrand, 0.0, rate, spec)
    est.value = -est.value / math.pi
    est.err = est.err / math.pi
    return est
