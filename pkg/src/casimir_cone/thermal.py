r"""Finite-temperature energy as a Matsubara sum over imaginary frequencies.

At temperature T the frequency integral :math:`\int_0^\infty d\kappa` is
replaced by :math:`(2\pi k_BT/\hbar c)\sum_{n\ge0}'` over
:math:`\kappa_n = 2\pi n k_BT/\hbar c`, the prime giving n = 0 weight 1/2.
With the dimensionless temperature :math:`\tau = 2\pi k_BTr/(\hbar c)` and
the κ-density g(x) of :mod:`casimir_cone.cone` (x = κr),

.. math::

    \hat U(\tau) = \tau \sum_{n\ge0}' \frac{\alpha(i\kappa_n)}{\alpha_0}\, g(n\tau).

The zeroth frequency needs g(0), which is finite only after the λ-integral
has been done. It is obtained by quadratic extrapolation from three small x.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cone import EnergyResult, cone_energy, kappa_density
from .quadrature import Estimate, QuadSpec, integrate_semi_infinite, sum_truncated
from .specfun import SpecfunAccuracyError

__all__ = [
    "PolarizabilityModel",
    "ThermalConfig",
    "ThermalAccuracyError",
    "static_limit_density",
    "kappa_decay_rate",
    "thermal_energy",
    "zero_temperature_energy",
    "kappa_integrated_energy",
]

# x values for the n = 0 extrapolation: X0, X0/2, X0/4
X0_PROBE = 1e-2
# relative size of the extrapolation correction beyond which n = 0 is rejected
EXTRAP_LIMIT = 1e-2


class ThermalAccuracyError(SpecfunAccuracyError):
    pass


@dataclass(frozen=True)
class PolarizabilityModel:
    """Imaginary-frequency polarizability, normalized to its static value.

    ``static``: α(iκ) = α₀. ``single-oscillator``: α(iκ) = α₀/(1 + (κ/ω₀)²),
    with ω₀ in the same inverse-length units as κ.
    """

    kind: str = "static"
    alpha0: float = 1.0
    omega0: float = math.inf

    def __post_init__(self):
        if self.kind not in ("static", "single-oscillator"):
            raise ValueError(f"unknown polarizability model {self.kind!r}")
        if not self.alpha0 > 0.0:
            raise ValueError("alpha0 must be positive")
        if self.kind == "single-oscillator" and not (self.omega0 > 0.0 and math.isfinite(self.omega0)):
            raise ValueError("single-oscillator model needs a finite omega0 > 0")

    def ratio(self, kappa):
        """α(iκ)/α₀."""
        if self.kind == "static":
            return 1.0
        return 1.0 / (1.0 + (kappa / self.omega0) ** 2)


@dataclass(frozen=True)
class ThermalConfig:
    tau: float
    model: PolarizabilityModel = PolarizabilityModel()
    n_max: int = 100_000

    def __post_init__(self):
        if not self.tau >= 0.0 or not math.isfinite(self.tau):
            raise ValueError("tau must be finite and >= 0")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


def kappa_decay_rate(cfg):
    """Decay rate in x of the κ-density: twice the distance to the surface over r."""
    return 2.0 * math.sin(min(cfg.theta - cfg.theta0, 0.5 * math.pi))


def static_limit_density(cfg, spec=QuadSpec()):
    """g(0) by quadratic extrapolation; returns (value, err, samples).

    ``err`` is the size of the extrapolation correction plus the sample errors.
    """
    xs = np.array([X0_PROBE, X0_PROBE / 2.0, X0_PROBE / 4.0])
    samples = [kappa_density(x, cfg, spec) for x in xs]
    g = np.array([s.value for s in samples])
    # Lagrange weights at x = 0 for nodes h, h/2, h/4: (1/3, −2, 8/3)
    g0 = float(np.dot([1.0 / 3.0, -2.0, 8.0 / 3.0], g))
    correction = abs(g0 - g[-1])
    if not math.isfinite(g0) or correction > EXTRAP_LIMIT * abs(g[-1]):
        raise ThermalAccuracyError(
            f"zero-frequency extrapolation unstable: samples {g.tolist()} at x = {xs.tolist()}, "
            f"extrapolated {g0!r}",
            bound=correction,
        )
    # second-order extrapolation; the residual is well below the last correction
    err = abs(g0 - float(np.dot([-1.0, 2.0], g[1:]))) + sum(s.err for s in samples) * 8.0 / 3.0
    return g0, err, samples


def thermal_energy(cfg, th, spec=QuadSpec()):
    """Matsubara-summed energy Û(τ); τ = 0 falls back to the zero-temperature energy."""
    if th.tau == 0.0:
        return zero_temperature_energy(cfg, th.model, spec)
    tau = th.tau
    r = cfg.r
    rate = kappa_decay_rate(cfg)
    g0, err0, _ = static_limit_density(cfg, spec)
    channels = np.zeros(3)
    m_max = [0]

    def term(n):
        if n == 0:
            return Estimate(0.5 * tau * g0, 0.5 * tau * err0, 3, True)
        x = n * tau
        g = kappa_density(x, cfg, spec)
        w = tau * th.model.ratio(x / r)
        channels[:] += w * np.array([g.electric, g.magnetic, g.ghost])
        m_max[0] = max(m_max[0], g.m_max_used)
        return Estimate(w * g.value, w * g.err, g.evaluations, g.converged)

    total = sum_truncated(term, math.exp(-rate * tau), spec, start=0, max_terms=th.n_max)
    return EnergyResult(
        u_hat=total.value,
        err=total.err,
        m_max_used=m_max[0],
        electric=float(channels[0]),
        magnetic=float(channels[1]),
        ghost=float(channels[2]),
        converged=total.converged,
        evaluations=total.evaluations,
        per_m=[],
    )


def zero_temperature_energy(cfg, model=PolarizabilityModel(), spec=QuadSpec(), via_kappa=False):
    """T = 0 energy; a dispersive model (or ``via_kappa``) integrates the κ-density."""
    if model.kind == "static" and not via_kappa:
        return cone_energy(cfg, spec)
    r = cfg.r

    def f(xs):
        out = np.empty((3, xs.size))
        for i, x in enumerate(xs):
            g = kappa_density(x, cfg, spec)
            a = model.ratio(x / r)
            out[:, i] = (a * g.electric, a * g.magnetic, a * g.ghost)
        return out

    est = integrate_semi_infinite(f, 0.0, kappa_decay_rate(cfg), spec)
    return EnergyResult(
        u_hat=est.value,
        err=est.err,
        m_max_used=-1,
        electric=float(est.parts[0]),
        magnetic=float(est.parts[1]),
        ghost=float(est.parts[2]),
        converged=est.converged,
        evaluations=est.evaluations,
    )


def kappa_integrated_energy(cfg, spec=QuadSpec()):
    """Û from ∫ g dx; equal to :func:`cone_energy` for a static polarizability."""
    return zero_temperature_energy(cfg, PolarizabilityModel(), spec, via_kappa=True)
