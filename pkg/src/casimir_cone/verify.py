"""Self-verification suite: exact limits and integral identities.

``run(level)`` returns a list of :class:`Check` records. ``fast`` covers the
plane limits, the Wronskian form, the ghost series, the 5:1 split and the
sech-tanh moment; ``full`` adds the Bessel κ/λ identities, the wedge grid and
the low-temperature Matsubara check.

``negate_ghost=True`` flips the sign of the ghost contribution wherever an
energy is assembled. It exists only to show that the suite notices.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cone import ConeConfig, cone_energy, cone_energy_on_axis, ghost_series, ghost_term, wronskian_residual
from .identities import KAPPA_FORMS, LAMBDA_FORMS, kappa_identity, lambda_identity, sech_tanh_moment
from .quadrature import QuadSpec
from .thermal import ThermalConfig, thermal_energy
from .wedge import WedgeConfig, wedge_energy_closed, wedge_energy_relative

__all__ = ["Check", "run", "WEDGE_GRID_THETA0", "wedge_grid"]

WEDGE_GRID_THETA0 = (math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2, 2 * math.pi / 3)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48s} residual={self.residual:.3e}  tol={self.tolerance:.1e}"


def _u(res, negate_ghost):
    return res.u_hat - 2.0 * res.ghost if negate_ghost else res.u_hat


def _rel(a, b):
    return abs(a - b) / abs(b)


def wedge_grid(n_theta=3):
    """(θ₀, θ, θ_ref) triples: θ and θ_ref from n_theta points in (θ₀ + 0.2, π]."""
    out = []
    for t0 in WEDGE_GRID_THETA0:
        thetas = np.linspace(t0 + 0.2, math.pi, n_theta + 1)[1:]
        for th in thetas:
            for ref in thetas:
                if th != ref:
                    out.append((t0, float(th), float(ref)))
    return out


def _plane_checks(spec, negate_ghost):
    out = []
    res = cone_energy_on_axis(1.0, math.pi / 2, spec)
    out.append(Check("plane on-axis  U = -3/(8 pi)", _rel(_u(res, negate_ghost), -3 / (8 * math.pi)), 1e-6))
    for th in (1.8, 2.2, 2.6, 3.0):
        res = cone_energy(ConeConfig(math.pi / 2, th), spec)
        exact = -3.0 / (8.0 * math.pi * math.cos(th) ** 4)
        out.append(Check(f"plane off-axis theta={th}", _rel(_u(res, negate_ghost), exact), 1e-5))
    return out


def _ratio_check(spec, negate_ghost):
    res = cone_energy_on_axis(1.0, math.pi / 2, spec)
    ghost = -res.ghost if negate_ghost else res.ghost
    ratio = (res.electric + ghost) / res.magnetic
    return Check("electric+ghost : magnetic = 5 : 1", abs(ratio - 5.0) / 5.0, 1e-6)


def _wronskian_checks(n=100, seed=12345):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        lam = rng.uniform(0.0, 40.0)
        m = int(rng.integers(0, 6))
        t0 = rng.uniform(0.3, 2.8)
        worst = max(worst, wronskian_residual(lam, m, t0))
    return Check(f"Wronskian T^N - T^M ({n} samples)", worst, 1e-9)


def _ghost_checks():
    worst = 0.0
    for t0 in np.linspace(0.3, 2.5, 5):
        for frac in np.linspace(0.2, 0.9, 5):
            th = t0 + frac * (math.pi - t0)
            worst = max(worst, _rel(ghost_series(th, t0).value, ghost_term(th, t0)))
    return Check("ghost term = geometric series (25 points)", worst, 1e-10)


def _moment_check():
    est, exact = sech_tanh_moment()
    return Check("int lam(lam^2+1/4) sech tanh = 1/(2 pi)", _rel(est.value, exact), 1e-8)


def _bessel_checks():
    out = []
    worst = 0.0
    for lam in (0.0, 0.5, 2.0, 10.0):
        for form in KAPPA_FORMS:
            est, exact = kappa_identity(lam, 1.0, form)
            worst = max(worst, _rel(est.value, exact))
    out.append(Check("kappa integrals = (pi/4)(lam^2+1/4) sech", worst, 1e-8))
    worst = 0.0
    for x in (0.5, 1.0, 3.0):
        for form in LAMBDA_FORMS:
            est, exact = lambda_identity(x, form)
            worst = max(worst, _rel(est.value, exact))
    out.append(Check("lambda integrals of k^2 (three forms)", worst, 1e-8))
    return out


def _wedge_check(spec):
    worst = 0.0
    for t0, th, ref in wedge_grid():
        est = wedge_energy_relative(WedgeConfig(t0, th), ref, spec)
        exact = wedge_energy_closed(WedgeConfig(t0, th)) - wedge_energy_closed(WedgeConfig(t0, ref))
        worst = max(worst, abs(est.value - exact) / max(1e-8, 1e-6 * abs(exact)))
    return Check("wedge relative energy vs closed form", worst, 1.0)


def _thermal_check(spec):
    cfg = ConeConfig(math.pi / 3, 2.5)
    u0 = cone_energy(cfg, spec).u_hat
    ut = thermal_energy(cfg, ThermalConfig(0.01), spec).u_hat
    return Check("Matsubara sum at tau=0.01 -> zero-T energy", _rel(ut, u0), 1e-2)


def run(level="fast", spec=QuadSpec(), negate_ghost=False):
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    checks = _plane_checks(spec, negate_ghost)
    checks.append(_ratio_check(spec, negate_ghost))
    checks.append(_wronskian_checks())
    checks.append(_ghost_checks())
    checks.append(_moment_check())
    if level == "full":
        checks.extend(_bessel_checks())
        checks.append(_wedge_check(spec))
        checks.append(_thermal_check(spec))
    return checks
