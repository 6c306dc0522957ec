r"""Casimir-Polder energy of a polarizable particle outside (or inside) a
perfectly conducting cone.

Geometry: cone half-opening angle :math:`\theta_0`, particle at spherical
radius :math:`r` and polar angle :math:`\theta_0 < \theta \le \pi`. The
dimensionless energy :math:`\hat U = U r^4/(\alpha\hbar c)` is

.. math::

    \hat U = \frac18\Big\{\sum_m \int_0^\infty
      \lambda\,\mathrm{sech}\,\pi\lambda\,\tanh\pi\lambda
      \big[2T^N(\lambda^2+\tfrac14)A + (T^N - T^M)B\big]\,d\lambda
      - \frac{1}{\pi}\frac{\sin^2\theta_0}{(\cos\theta-\cos\theta_0)^2}\Big\},

with :math:`A = P^m(-\cos\theta)^2` and
:math:`B = (\partial_\theta P^m(-\cos\theta))^2 + m^2 A/\sin^2\theta`. The
last term is the ghost-mode contribution.

Evaluation strategy. Write :math:`P_a = P^{-m}(\cos\theta_0)`,
:math:`P_b = P^{-m}(\cos(\pi-\theta_0))`, :math:`P_c = P^{-m}(\cos(\pi-\theta))`
and let :math:`d` denote the derivative in the series angle. Then

.. math::

    T^N = -\rho_m P_a/P_b, \qquad T^M = \rho_m\,dP_a/dP_b,

and both channel contributions come out as a single positive log-magnitude
with a minus sign, so the integrand never cancels:

* electric, :math:`-w\,(P_a/P_b)\,\rho_m^{-1}[2(\lambda^2+\frac14)P_c^2 + B_n]`,
* magnetic, :math:`-w\,(dP_a/dP_b)\,\rho_m^{-1} B_n`,

where :math:`w = \lambda\,\mathrm{sech}\,\pi\lambda\tanh\pi\lambda` and
:math:`B_n = dP_c^2 + m^2P_c^2/\sin^2\theta`. The electric channel collects
every :math:`T^N` term and the magnetic channel the :math:`T^M` term; at the
plane (:math:`\theta_0=\pi/2`, :math:`\theta=\pi`) electric plus ghost
against magnetic is exactly 5:1.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import Estimate, QuadSpec, integrate_semi_infinite, sum_truncated
from .specfun import (
    LOG_REPRESENTABLE,
    LogSigned,
    SpecfunAccuracyError,
    bessel_log_batch,
    conical_log_batch,
    log_conical_ratio_rho,
)

__all__ = [
    "ConeConfig",
    "ConeDomainError",
    "EnergyResult",
    "TMatrixPair",
    "NEAR_AXIS",
    "cone_tmatrix",
    "cone_angular_weights",
    "cone_lambda_integrand",
    "cone_channel_integrand",
    "ghost_term",
    "ghost_series",
    "geometric_ratio",
    "cone_energy",
    "cone_energy_on_axis",
    "cone_kappa_integrand",
    "KappaDensity",
    "kappa_density",
    "scaled_energy",
    "wronskian_residual",
]

# θ ∈ (π − NEAR_AXIS, π) goes to the on-axis path
NEAR_AXIS = 1e-3


class ConeDomainError(ValueError):
    pass


@dataclass(frozen=True)
class ConeConfig:
    theta0: float
    theta: float
    r: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.theta0 < math.pi:
            raise ConeDomainError(f"theta0 must lie in (0, pi), got {self.theta0!r}")
        if not self.theta0 < self.theta <= math.pi:
            raise ConeDomainError(
                f"theta must exceed theta0 and be at most pi (theta0={self.theta0!r}, theta={self.theta!r})"
            )
        if not self.r > 0.0:
            raise ConeDomainError("r must be positive")

    @property
    def on_axis(self):
        return self.theta == math.pi


@dataclass(frozen=True)
class TMatrixPair:
    tN: float
    tM: float


@dataclass
class EnergyResult:
    """Dimensionless energy with its error budget and channel split.

    ``electric + magnetic + ghost == u_hat`` up to rounding. ``per_m`` holds
    the (already multiplicity-weighted, 1/8-scaled) contribution of each m.
    """

    u_hat: float
    err: float
    m_max_used: int
    electric: float
    magnetic: float
    ghost: float
    converged: bool = True
    evaluations: int = 0
    per_m: list = field(default_factory=list, repr=False)

    @property
    def channels(self):
        return {"electric": self.electric, "magnetic": self.magnetic, "ghost": self.ghost}


# --------------------------------------------------------------------------
# building blocks


def _log_weight(lam):
    # log(λ sech πλ tanh πλ) = log(2λ) − πλ + log(1 − e^{−2πλ}) − 2 log(1 + e^{−2πλ})
    e = np.exp(-2.0 * math.pi * lam)
    return np.log(2.0 * lam) - math.pi * lam + np.log(-np.expm1(-2.0 * math.pi * lam)) - 2.0 * np.log1p(e)


def _conical_logs(m, lams, theta0, theta):
    lpa, ldpa = conical_log_batch(m, lams, theta0)
    lpb, ldpb = conical_log_batch(m, lams, math.pi - theta0)
    out = {"pa": lpa, "dpa": ldpa, "pb": lpb, "dpb": ldpb}
    if theta is not None:
        lpc, ldpc = conical_log_batch(m, lams, math.pi - theta)
        out["pc"] = lpc
        out["dpc"] = ldpc
    return out


def _log_bn(m, lpc, ldpc, theta):
    # log(dPc² + m² Pc²/sin²θ)
    if m == 0:
        return 2.0 * ldpc
    return np.logaddexp(2.0 * ldpc, 2.0 * (lpc + math.log(m) - math.log(math.sin(theta))))


def _exp_checked(logv, what):
    if np.any(logv > LOG_REPRESENTABLE):
        raise SpecfunAccuracyError(f"{what} overflows; theta is too close to theta0 for this lambda range")
    return np.exp(logv)


def cone_tmatrix(lam, m, theta0):
    """Cone scattering amplitudes :math:`(T^N, T^M)` at one (λ, m, θ₀)."""
    lam = float(lam)
    if not lam >= 0.0:
        raise ConeDomainError("lambda must be >= 0")
    if not 0.0 < theta0 < math.pi:
        raise ConeDomainError("theta0 must lie in (0, pi)")
    m = abs(int(m))
    c = _conical_logs(m, np.array([lam]), theta0, None)
    lrho = float(log_conical_ratio_rho(m, lam))
    tN = -math.exp(lrho + c["pa"][0] - c["pb"][0])
    tM = math.exp(lrho + c["dpa"][0] - c["dpb"][0])
    return TMatrixPair(tN, tM)


def wronskian_residual(lam, m, theta0):
    """Relative residual of the Wronskian form of :math:`T^N - T^M`.

    The reference is :math:`(4\\cosh\\pi\\lambda)/(\\pi\\sin\\theta_0)` divided
    by :math:`\\partial_{\\theta_0}[P^m(-\\cos\\theta_0)^2]`, evaluated in logs.
    """
    m = abs(int(m))
    lam = float(lam)
    pair = cone_tmatrix(lam, m, theta0)
    lhs = pair.tN - pair.tM
    c = _conical_logs(m, np.array([lam]), theta0, None)
    lrho = float(log_conical_ratio_rho(m, lam))
    # ∂θ₀[P^m(−cos θ₀)²] = −2 Pb dPb / ρ²
    log_cosh = math.pi * lam + math.log1p(math.exp(-2.0 * math.pi * lam)) - math.log(2.0)
    log_rhs = math.log(2.0) + log_cosh + 2.0 * lrho - math.log(math.pi * math.sin(theta0)) - c["pb"][0] - c["dpb"][0]
    rhs = -math.exp(log_rhs)
    return abs(lhs - rhs) / abs(rhs)


def cone_angular_weights(lam, m, theta):
    """``{"A": ..., "B": ...}`` as (sign, log) pairs for θ inside (0, π).

    A = P^m(−cos θ)², B = (∂θ P^m(−cos θ))² + m² A / sin²θ.
    """
    if not 0.0 < theta < math.pi:
        raise ConeDomainError("theta must lie strictly inside (0, pi); use the on-axis path at pi")
    m = abs(int(m))
    lam = float(lam)
    lpc, ldpc = conical_log_batch(m, np.array([lam]), math.pi - theta)
    lrho = float(log_conical_ratio_rho(m, lam))
    la = 2.0 * (lpc[0] - lrho)
    lb = float(_log_bn(m, lpc, ldpc, theta)[0]) - 2.0 * lrho
    sign_b = 0 if lb == -math.inf else 1
    return {"A": LogSigned(1, la), "B": LogSigned(sign_b, lb)}


def cone_channel_integrand(lam, m, cfg):
    """Electric and magnetic λ-integrands, shape ``(2, n)``, for one m.

    Excludes the m ↔ −m multiplicity and the overall 1/8.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam <= 0.0):
        raise ConeDomainError("lambda must be > 0")
    if not cfg.theta < math.pi:
        raise ConeDomainError("theta = pi has its own integrand; see cone_energy_on_axis")
    m = abs(int(m))
    c = _conical_logs(m, lam, cfg.theta0, cfg.theta)
    lw = _log_weight(lam) - log_conical_ratio_rho(m, lam)
    lbn = _log_bn(m, c["pc"], c["dpc"], cfg.theta)
    lam_q = lam * lam + 0.25
    le = lw + c["pa"] - c["pb"] + np.logaddexp(np.log(2.0 * lam_q) + 2.0 * c["pc"], lbn)
    lmag = lw + c["dpa"] - c["dpb"] + lbn
    out = np.empty((2, lam.size))
    out[0] = -_exp_checked(le, "electric integrand")
    out[1] = -_exp_checked(lmag, "magnetic integrand")
    return out


def cone_lambda_integrand(lam, m, cfg):
    """:math:`\\lambda\\,\\mathrm{sech}\\,\\tanh\\,[2T^N(\\lambda^2+\\frac14)A + (T^N-T^M)B]`."""
    scalar = np.ndim(lam) == 0
    out = cone_channel_integrand(lam, m, cfg).sum(axis=0)
    return float(out[0]) if scalar else out


def ghost_term(theta, theta0):
    """:math:`-(1/\\pi)\\sin^2\\theta_0/(\\cos\\theta-\\cos\\theta_0)^2`."""
    d = math.cos(theta) - math.cos(theta0)
    if theta == theta0 or d == 0.0:
        raise ConeDomainError("ghost term is singular at theta = theta0")
    return -math.sin(theta0) ** 2 / (math.pi * d * d)


def geometric_ratio(theta, theta0):
    """q = tan²(θ₀/2)/tan²(θ/2), the large-m decay ratio of the mode sum."""
    return ((1.0 + math.cos(theta)) * (1.0 - math.cos(theta0))) / ((1.0 - math.cos(theta)) * (1.0 + math.cos(theta0)))


def ghost_series(theta, theta0, spec=QuadSpec(rel_tol=1e-13, abs_tol=1e-300)):
    """The ghost term rebuilt as −(4/π)/sin²θ · Σ_{m≥1} m q^m."""
    q = geometric_ratio(theta, theta0)
    if not 0.0 <= q < 1.0:
        raise ConeDomainError("geometric series diverges for this geometry")
    s = sum_truncated(lambda m: m * q**m, q, spec, start=1)
    est = Estimate(-4.0 / (math.pi * math.sin(theta) ** 2) * s.value, 4.0 / (math.pi * math.sin(theta) ** 2) * s.err,
                   s.evaluations, s.converged)
    return est


# --------------------------------------------------------------------------
# energies


def _scaled(est, factor):
    parts = None if est.parts is None else est.parts * factor
    return Estimate(est.value * factor, est.err * abs(factor), est.evaluations, est.converged, parts)


def _decay_rate(cfg):
    return 2.0 * (cfg.theta - cfg.theta0)


def _m_sum(lam_integral, q, spec, factor, min_terms=3):
    """Σ_m with weight 1 at m = 0 and 2 for m ≥ 1, truncated on the q-geometric tail."""
    per_m = []
    state = {"spec": spec}

    def term(m):
        est = _scaled(lam_integral(m, state["spec"]), factor * (1.0 if m == 0 else 2.0))
        if m == 0:
            # later terms only need accuracy relative to the leading one
            state["spec"] = replace(spec, abs_tol=max(spec.abs_tol, 0.1 * spec.rel_tol * abs(est.value)))
        per_m.append(est.value)
        return est

    total = sum_truncated(term, min(q, 0.999), spec, start=0, min_terms=min_terms)
    return total, per_m


def cone_energy(cfg, spec=QuadSpec(), min_m_terms=3):
    """Zero-temperature energy Û for any valid configuration.

    ``min_m_terms`` forces at least that many m values (0, 1, ...) into the
    sum before the tail test may stop it.

    θ = π, and θ within ``NEAR_AXIS`` of π, use :func:`cone_energy_on_axis`
    (the latter with a warning, since A and B lose precision there).
    """
    if cfg.theta == math.pi:
        return cone_energy_on_axis(cfg.r, cfg.theta0, spec)
    if cfg.theta > math.pi - NEAR_AXIS:
        warnings.warn(
            f"theta = {cfg.theta!r} is within {NEAR_AXIS} of pi; using the on-axis formula",
            RuntimeWarning,
            stacklevel=2,
        )
        return cone_energy_on_axis(cfg.r, cfg.theta0, spec)

    rate = _decay_rate(cfg)

    def lam_integral(m, sp):
        return integrate_semi_infinite(lambda x: cone_channel_integrand(x, m, cfg), 0.0, rate, sp)

    total, per_m = _m_sum(lam_integral, geometric_ratio(cfg.theta, cfg.theta0), spec, 1.0 / 8.0, min_m_terms)
    ghost = ghost_term(cfg.theta, cfg.theta0) / 8.0
    electric, magnetic = (float(v) for v in total.parts)
    u = total.value + ghost
    return EnergyResult(
        u_hat=u,
        err=total.err + 4 * np.finfo(float).eps * abs(u),
        m_max_used=len(per_m) - 1,
        electric=electric,
        magnetic=magnetic,
        ghost=ghost,
        converged=total.converged,
        evaluations=total.evaluations,
        per_m=per_m,
    )


def _on_axis_channels(lam, theta0):
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    c0 = _conical_logs(0, lam, theta0, None)
    c1 = _conical_logs(1, lam, theta0, None)
    lrho1 = log_conical_ratio_rho(1, lam)
    log_q = np.log(lam * lam + 0.25)
    lw = _log_weight(lam) + log_q
    # w (λ²+¼)[2|T^N_0| + (λ²+¼)|T^N_1|] and w (λ²+¼)² |T^M_1|, all in logs
    le = np.logaddexp(math.log(2.0) + c0["pa"] - c0["pb"], log_q + lrho1 + c1["pa"] - c1["pb"])
    out = np.empty((2, lam.size))
    out[0] = -_exp_checked(lw + le, "on-axis electric integrand")
    out[1] = -_exp_checked(lw + log_q + lrho1 + c1["dpa"] - c1["dpb"], "on-axis magnetic integrand")
    return out


def cone_energy_on_axis(r, theta0, spec=QuadSpec()):
    """Û for a particle on the cone axis (θ = π); only m ∈ {−1, 0, 1} contribute."""
    if not r > 0.0:
        raise ConeDomainError("r must be positive")
    if not 0.0 < theta0 < math.pi:
        raise ConeDomainError("theta0 must lie in (0, pi)")
    rate = 2.0 * (math.pi - theta0)
    est = integrate_semi_infinite(lambda x: _on_axis_channels(x, theta0), 0.0, rate, spec)
    est = _scaled(est, 1.0 / 8.0)
    ghost = -math.tan(0.5 * theta0) ** 2 / (8.0 * math.pi)
    u = est.value + ghost
    electric, magnetic = (float(v) for v in est.parts)
    return EnergyResult(
        u_hat=u,
        err=est.err + 4 * np.finfo(float).eps * abs(u),
        m_max_used=1,
        electric=electric,
        magnetic=magnetic,
        ghost=ghost,
        converged=est.converged,
        evaluations=est.evaluations,
        per_m=[est.value],
    )


def scaled_energy(cfg, spec=QuadSpec()):
    """Û · sin⁴(θ − θ₀): the energy in units of the plane law at distance r sin(θ−θ₀)."""
    res = cone_energy(cfg, spec)
    return res.u_hat * math.sin(cfg.theta - cfg.theta0) ** 4


# --------------------------------------------------------------------------
# κ-resolved form


def _kappa_channel(lam, m, x, cfg):
    # λ-integrand of the κ-resolved energy at x = κr, one m, without multiplicity
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    sk, lk, sd, ld = bessel_log_batch(lam, x)
    # log K² and log (K/2 + x K')², the latter factored through K
    with np.errstate(divide="ignore"):
        lk2 = np.where(sk == 0.0, -np.inf, 2.0 * lk)
        inner = 0.5 * sk + x * sd * np.exp(np.where(sk == 0.0, 0.0, ld - lk))
        lrad2 = np.where(sk == 0.0, 2.0 * (math.log(x) + ld), 2.0 * (lk + np.log(np.abs(inner))))
    log_q = np.log(lam * lam + 0.25)
    lpref = np.log(lam * np.tanh(math.pi * lam) / math.pi**2)
    if cfg.on_axis:
        # m = 0 has Pc = 1, dPc = 0; each of m = ±1 has Bn/ρ² → (λ²+¼)²/2
        c0 = _conical_logs(0, lam, cfg.theta0, None)
        c1 = _conical_logs(1, lam, cfg.theta0, None)
        lr1 = log_conical_ratio_rho(1, lam)
        le0 = c0["pa"] - c0["pb"] + log_q + lk2
        le1 = lr1 + c1["pa"] - c1["pb"] + log_q + lrad2
        lm = lr1 + c1["dpa"] - c1["dpb"] + log_q + 2.0 * math.log(x) + lk2
    else:
        m = abs(int(m))
        c = _conical_logs(m, lam, cfg.theta0, cfg.theta)
        lrho = log_conical_ratio_rho(m, lam)
        lbn = _log_bn(m, c["pc"], c["dpc"], cfg.theta)
        base = c["pa"] - c["pb"] - lrho
        le0 = base + lbn - log_q + lrad2
        le1 = base + 2.0 * c["pc"] + log_q + lk2
        lm = c["dpa"] - c["dpb"] - lrho + lbn - log_q + 2.0 * math.log(x) + lk2
    e = -_exp_checked(lpref + np.logaddexp(le0, le1), "kappa-resolved electric integrand")
    mg = -_exp_checked(lpref + lm, "kappa-resolved magnetic integrand")
    return e, mg


def _kappa_lambda_rate(cfg):
    theta = cfg.theta
    return 2.0 * (theta - cfg.theta0)


@dataclass
class KappaDensity:
    """λ-integrated density g(x) at x = κr, split into channels."""

    x: float
    value: float
    err: float
    electric: float
    magnetic: float
    ghost: float
    m_max_used: int
    converged: bool
    evaluations: int


def kappa_density(x, cfg, spec=QuadSpec()):
    r"""g(x) with :math:`\hat U = \int_0^\infty g(x)\,dx`, x = κr."""
    x = float(x)
    if not x > 0.0:
        raise ConeDomainError("kappa r must be > 0")
    rate = _kappa_lambda_rate(cfg)

    def lam_integral(m, sp):
        def f(lam):
            e, mg = _kappa_channel(lam, m, x, cfg)
            return np.vstack([e, mg])

        return integrate_semi_infinite(f, 0.0, rate, sp)

    if cfg.on_axis:
        total = lam_integral(0, spec)
        m_used = 1
        ghost_coef = math.tan(0.5 * cfg.theta0) ** 2
    else:
        total, per_m = _m_sum(lam_integral, geometric_ratio(cfg.theta, cfg.theta0), spec, 1.0)
        m_used = len(per_m) - 1
        d = math.cos(cfg.theta) - math.cos(cfg.theta0)
        ghost_coef = math.sin(cfg.theta0) ** 2 / (d * d)
    ghost = -(x / (2.0 * math.pi)) * ghost_coef * math.exp(-2.0 * x)
    electric, magnetic = (float(v) for v in total.parts)
    return KappaDensity(x, total.value + ghost, float(total.err), electric, magnetic, ghost, m_used,
                        total.converged, total.evaluations)


def cone_kappa_integrand(kappa, cfg, spec=QuadSpec()):
    r"""κ-resolved integrand with :math:`\int_0^\infty (\cdot)\,d\kappa = \hat U`.

    The λ-integral is done first at each κ, which keeps it finite as κ → 0.
    Returns an :class:`Estimate`; κ is measured in inverse units of ``cfg.r``.
    """
    kappa = float(kappa)
    if not kappa > 0.0:
        raise ConeDomainError("kappa must be > 0")
    g = kappa_density(kappa * cfg.r, cfg, spec)
    # density in x = κr; dx = r dκ
    r = cfg.r
    return Estimate(g.value * r, g.err * r, g.evaluations, g.converged,
                    np.array([g.electric, g.magnetic, g.ghost]) * r)
