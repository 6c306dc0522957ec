import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_cone.quadrature import (
    Estimate,
    QuadratureError,
    QuadSpec,
    integrate_finite,
    integrate_semi_infinite,
    sum_truncated,
)

TIGHT = QuadSpec(rel_tol=1e-12, abs_tol=1e-15)

# (label, callable returning an Estimate, exact value)
HONESTY_LIBRARY = [
    ("x^2 on [0,1]", lambda s: integrate_finite(lambda x: x * x, 0, 1, s), 1 / 3),
    ("sin on [0,pi]", lambda s: integrate_finite(np.sin, 0, math.pi, s), 2.0),
    ("log(1/x) on [0,1]", lambda s: integrate_finite(lambda x: np.log(1 / x), 0, 1, s), 1.0),
    ("x^-1/2 on [0,1]", lambda s: integrate_finite(lambda x: x**-0.5, 0, 1, s), 2.0),
    ("4/(1+x^2) on [0,1]", lambda s: integrate_finite(lambda x: 4 / (1 + x * x), 0, 1, s), math.pi),
    ("exp(-x) on [0,inf)", lambda s: integrate_semi_infinite(lambda x: np.exp(-x), 0, 1.0, s), 1.0),
    ("x^3 exp(-x^2)", lambda s: integrate_semi_infinite(lambda x: x**3 * np.exp(-x * x), 0, 1.0, s), 0.5),
    ("sech x", lambda s: integrate_semi_infinite(lambda x: 1 / np.cosh(x), 0, 1.0, s), math.pi / 2),
    ("x exp(-x) sin x", lambda s: integrate_semi_infinite(lambda x: x * np.exp(-x) * np.sin(x), 0, 1.0, s), 0.5),
    (
        "lam(lam^2+1/4) sech tanh",
        lambda s: integrate_semi_infinite(
            lambda x: x * (x * x + 0.25) * np.tanh(math.pi * x) / np.cosh(math.pi * x), 0, math.pi, s
        ),
        1 / (2 * math.pi),
    ),
]


@pytest.mark.parametrize("label,run,exact", HONESTY_LIBRARY, ids=[h[0] for h in HONESTY_LIBRARY])
@pytest.mark.parametrize("spec", [QuadSpec(), TIGHT, QuadSpec(rel_tol=1e-5, abs_tol=1e-8)])
def test_error_estimate_is_honest(label, run, exact, spec):
    est = run(spec)
    assert est.converged
    assert abs(est.value - exact) <= 3 * est.err
    assert est.err <= spec.tolerance(est.value)


@pytest.mark.parametrize("label,run,exact", HONESTY_LIBRARY, ids=[h[0] for h in HONESTY_LIBRARY])
def test_tolerance_halving(label, run, exact):
    first = run(QuadSpec())
    second = run(QuadSpec().halved())
    assert abs(second.value - first.value) < first.err


def test_endpoints_are_never_evaluated():
    seen = []

    def f(x):
        seen.append(x.copy())
        return np.ones_like(x)

    integrate_finite(f, 0.0, 1.0)
    xs = np.concatenate(seen)
    assert xs.min() > 0.0 and xs.max() < 1.0


def test_budget_exhaustion_is_reported():
    est = integrate_finite(lambda x: np.sin(200 * x) ** 2, 0, 10, QuadSpec(max_subdivisions=3))
    assert not est.converged
    assert est.err > 0


def test_non_finite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate_finite(lambda x: np.where(x > 0.5, np.inf, 1.0), 0, 1)


def test_vector_valued_integrand_reports_parts():
    est = integrate_finite(lambda x: np.vstack([x, x * x]), 0, 1, TIGHT)
    assert est.parts == pytest.approx([0.5, 1 / 3], rel=1e-13)
    assert est.value == pytest.approx(5 / 6, rel=1e-13)


def test_fixed_tail_policy():
    spec = QuadSpec(tail_policy="fixed", upper=2.0)
    est = integrate_semi_infinite(lambda x: np.exp(-x), 0.0, 1.0, spec)
    assert est.value == pytest.approx(1 - math.exp(-2), rel=1e-12)


def test_slow_tail_is_flagged():
    # decays far slower than the stated envelope, so the doubling check never settles
    est = integrate_semi_infinite(lambda x: 1 / (1 + x) ** 1.5, 0.0, 50.0, QuadSpec(max_doublings=3))
    assert not est.converged


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0)
    with pytest.raises(ValueError):
        QuadSpec(max_subdivisions=0)
    with pytest.raises(ValueError):
        QuadSpec(tail_policy="other")
    with pytest.raises(ValueError):
        QuadSpec(tail_policy="fixed")
    with pytest.raises(ValueError):
        Estimate(1.0, -1.0, 1, True)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=8),
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=0.1, max_value=4),
)
def test_polynomials_integrate_exactly(coeffs, a, width):
    b = a + width
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(b) - poly.integ()(a)
    est = integrate_finite(poly, a, b, TIGHT)
    assert est.converged
    assert abs(est.value - exact) <= 3 * est.err + 1e-13 * max(1.0, np.abs(coeffs).max() * 5**8)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.2, max_value=5.0), st.integers(min_value=0, max_value=4))
def test_gamma_moments_semi_infinite(rate, k):
    est = integrate_semi_infinite(lambda x: x**k * np.exp(-rate * x), 0.0, rate, TIGHT)
    exact = math.factorial(k) / rate ** (k + 1)
    assert est.converged
    assert abs(est.value - exact) <= max(3 * est.err, 1e-14 * exact)


class TestSumTruncated:
    def test_geometric_derivative(self):
        q = 1 / 3
        est = sum_truncated(lambda m: m * q**m, q, TIGHT, start=1)
        assert est.value == pytest.approx(0.75, rel=1e-12)
        assert abs(est.value - 0.75) <= est.err + 1e-16

    def test_ghost_geometry(self):
        th, th0 = 2.5, 0.8
        q = (1 + math.cos(th)) * (1 - math.cos(th0)) / ((1 - math.cos(th)) * (1 + math.cos(th0)))
        est = sum_truncated(lambda m: m * q**m, q, TIGHT, start=1)
        exact = math.sin(th) ** 2 * math.sin(th0) ** 2 / (4 * (math.cos(th) - math.cos(th0)) ** 2)
        assert est.value == pytest.approx(exact, rel=1e-11)

    def test_zero_series(self):
        est = sum_truncated(lambda m: 0.0, 0.5)
        assert est.value == 0.0 and est.converged

    def test_estimates_are_accumulated(self):
        est = sum_truncated(lambda m: Estimate(0.5**m, 1e-14, 15, True), 0.5, QuadSpec(), start=0)
        assert est.value == pytest.approx(2.0, rel=1e-8)
        assert est.evaluations % 15 == 0 and est.evaluations >= 15 * 20
        assert est.err >= 1e-14 * 10

    def test_divergent_series_hits_cap(self):
        est = sum_truncated(lambda m: 1.0, 0.5, max_terms=50)
        assert not est.converged

    def test_ratio_hint_validation(self):
        with pytest.raises(ValueError):
            sum_truncated(lambda m: 1.0, 1.0)
