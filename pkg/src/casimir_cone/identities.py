"""Closed-form κ- and λ-integrals of the imaginary-order spherical Bessel
function, each paired with its numerical quadrature.

Each function returns ``(Estimate, exact)``. They are the ingredients that
turn the κ-resolved energy into the master formula, so agreement here checks
the Bessel kernels and the quadrature together.
"""

import math

import numpy as np

from .quadrature import QuadSpec, integrate_semi_infinite
from .specfun import bessel_log_batch

__all__ = [
    "KAPPA_FORMS",
    "LAMBDA_FORMS",
    "kappa_identity",
    "lambda_identity",
    "sech_tanh_moment",
]

KAPPA_FORMS = ("k2", "k2_kappa3", "rderiv2")
LAMBDA_FORMS = ("k2_lam", "k2_lam3", "rderiv2_lam")


def _k_and_radial(lam, x):
    # spherical k_{iλ−½}(x) and ∂_r(r k) at r = 1 (times √(2/(πx)) each)
    sk, lk, sd, ld = bessel_log_batch(lam, x)
    kv = sk * np.exp(lk)
    dk = sd * np.exp(ld)
    norm = np.sqrt(2.0 / (math.pi * x))
    return norm * kv, norm * (0.5 * kv + x * dk)


def kappa_identity(lam, r=1.0, form="k2_kappa3", spec=QuadSpec(rel_tol=1e-10, abs_tol=1e-300)):
    """κ-integrals equal to (π/(4r⁴))(λ²+¼) sech πλ.

    ``form``: ``"k2"`` is (λ²+¼)/(2r²)∫κ k² dκ, ``"k2_kappa3"`` is ∫κ³ k² dκ,
    ``"rderiv2"`` is ∫(κ/r²)(∂_r(r k))² dκ, with k = k_{iλ−½}(κr).
    """
    lam = float(lam)
    r = float(r)
    if form not in KAPPA_FORMS:
        raise ValueError(f"unknown form {form!r}")
    lam_q = lam * lam + 0.25

    def f(kappa):
        x = kappa * r
        k, rad = _k_and_radial(lam, x)
        if form == "k2":
            return lam_q / (2.0 * r * r) * kappa * k * k
        if form == "k2_kappa3":
            return kappa**3 * k * k
        # ∂_r(r k(κr)) at radius r equals the r = 1 expression in x = κr
        return kappa / (r * r) * rad * rad

    est = integrate_semi_infinite(f, 0.0, 2.0 * r, spec)
    exact = math.pi / (4.0 * r**4) * lam_q / math.cosh(math.pi * lam)
    return est, exact


def lambda_identity(x, form="k2_lam", spec=QuadSpec(rel_tol=1e-10, abs_tol=1e-300)):
    """λ-integrals of k_{iλ−½}(x)² weighted by λ tanh πλ, at x = κr.

    ``"k2_lam"``: ∫k² λ tanh = e^{−2x}/(2x);
    ``"k2_lam3"``: ∫k² λ³ tanh = (x + ¼) e^{−2x}/(2x);
    ``"rderiv2_lam"``: ∫(∂_r(r k))² λ tanh = (x² − x + ½) e^{−2x}/(2x).
    """
    x = float(x)
    if form not in LAMBDA_FORMS:
        raise ValueError(f"unknown form {form!r}")

    def f(lam):
        k, rad = _k_and_radial(lam, x)
        w = lam * np.tanh(math.pi * lam)
        if form == "k2_lam":
            return w * k * k
        if form == "k2_lam3":
            return w * lam * lam * k * k
        return w * rad * rad

    est = integrate_semi_infinite(f, 0.0, math.pi, spec)
    poly = {"k2_lam": 1.0, "k2_lam3": x + 0.25, "rderiv2_lam": x * x - x + 0.5}[form]
    return est, poly * math.exp(-2.0 * x) / (2.0 * x)


def sech_tanh_moment(spec=QuadSpec(rel_tol=1e-12, abs_tol=1e-300)):
    """∫ λ(λ²+¼) sech πλ tanh πλ dλ = 1/(2π)."""

    def f(lam):
        return lam * (lam * lam + 0.25) * np.tanh(math.pi * lam) / np.cosh(math.pi * lam)

    return integrate_semi_infinite(f, 0.0, math.pi, spec), 1.0 / (2.0 * math.pi)
