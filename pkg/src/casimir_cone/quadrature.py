"""Adaptive Gauss-Kronrod quadrature on finite and semi-infinite ranges, and
geometric-tail truncated sums.

Integrands are called with a 1-D array of abscissae and may return either a
1-D array of values or a ``(ncomp, n)`` array. In the second case the
adaptive control acts on the component sum and the per-component integrals
are reported in :attr:`Estimate.parts`.
"""

import heapq
import math
from dataclasses import dataclass, field, replace

import numpy as np

# 7-point Gauss / 15-point Kronrod pair (abscissae on [0, 1], symmetric)
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadSpec:
    """Accuracy and truncation policy shared by all integrators.

    ``tail_policy`` is ``"envelope"`` (cut off where a caller-stated
    exponential envelope falls below tolerance, then verify by doubling) or
    ``"fixed"`` (integrate up to ``upper`` exactly).
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    tail_policy: str = "envelope"
    upper: float = math.inf
    max_doublings: int = 8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.tail_policy not in ("envelope", "fixed"):
            raise ValueError(f"unknown tail_policy {self.tail_policy!r}")
        if self.tail_policy == "fixed" and not math.isfinite(self.upper):
            raise ValueError("fixed tail policy needs a finite upper bound")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))

    def halved(self):
        return replace(self, rel_tol=self.rel_tol / 2, abs_tol=self.abs_tol / 2)


@dataclass
class Estimate:
    value: float
    err: float
    evaluations: int
    converged: bool
    parts: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not self.err >= 0:
            raise ValueError(f"negative error estimate {self.err!r}")

    def __add__(self, other):
        parts = None
        if self.parts is not None and other.parts is not None:
            parts = self.parts + other.parts
        return Estimate(
            self.value + other.value,
            self.err + other.err,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
            parts,
        )


def _as_components(y, n):
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        return y[None, :], False
    if y.ndim == 2 and y.shape[1] == n:
        return y, True
    raise ValueError(f"integrand returned shape {y.shape} for {n} abscissae")


def _gk_panels(f, lo, hi):
    """Apply the 15-point rule to each panel [lo[i], hi[i]] with one call of f."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (centre[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y, multi = _as_components(f(x), x.size)
    ncomp = y.shape[0]
    y = y.reshape(ncomp, lo.size, 15)
    if not np.all(np.isfinite(y)):
        raise QuadratureError("integrand returned a non-finite value")
    kron = (y * _WEIGHTS_K).sum(axis=2) * half
    gauss = (y * _WEIGHTS_G).sum(axis=2) * half
    tot = y.sum(axis=0)
    k_tot = kron.sum(axis=0)
    g_tot = gauss.sum(axis=0)
    abs_int = (np.abs(tot) * _WEIGHTS_K).sum(axis=1) * np.abs(half)
    mean = k_tot / (2 * half)
    asc = (np.abs(tot - mean[:, None]) * _WEIGHTS_K).sum(axis=1) * np.abs(half)
    err = np.abs(k_tot - g_tot)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(asc > 0, asc * np.minimum(1.0, (200.0 * err / asc) ** 1.5), err)
    floor = 50 * _EPS * abs_int
    err = np.where(abs_int > np.finfo(float).tiny / (50 * _EPS), np.maximum(scaled, floor), scaled)
    return kron, err, multi


def integrate_finite(f, a, b, spec=QuadSpec(), initial_panels=1):
    """Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].

    The endpoints are never evaluated. Returns an :class:`Estimate`; when the
    subdivision budget runs out the best estimate is returned with
    ``converged=False``.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    edges = np.linspace(a, b, int(initial_panels) + 1)
    kron, err, multi = _gk_panels(f, edges[:-1], edges[1:])
    evaluations = 15 * (edges.size - 1)
    heap = []
    ncomp = kron.shape[0]
    total = kron.sum(axis=1)
    total_err = float(err.sum())
    for i in range(edges.size - 1):
        heapq.heappush(heap, (-err[i], edges[i], edges[i + 1], kron[:, i].copy()))
    panels = len(heap)
    converged = True
    while total_err > spec.tolerance(total.sum()):
        if panels >= spec.max_subdivisions:
            converged = False
            break
        e0, lo, hi, k0 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            heapq.heappush(heap, (e0, lo, hi, k0))
            converged = False
            break
        k2, e2, _ = _gk_panels(f, np.array([lo, mid]), np.array([mid, hi]))
        evaluations += 30
        total = total - k0 + k2.sum(axis=1)
        total_err += float(e2.sum()) + e0
        heapq.heappush(heap, (-e2[0], lo, mid, k2[:, 0].copy()))
        heapq.heappush(heap, (-e2[1], mid, hi, k2[:, 1].copy()))
        panels += 1
        if panels % 64 == 0:
            # resum to shed accumulated rounding in the running totals
            total = np.sum([h[3] for h in heap], axis=0)
            total_err = float(sum(-h[0] for h in heap))
    total_err = max(total_err, 0.0)
    parts = total if multi else None
    return Estimate(float(total.sum()), total_err, evaluations, converged, parts)


def integrate_semi_infinite(f, a, decay_rate_hint, spec=QuadSpec(), start_width=None):
    """Integrate f over [a, inf) for integrands bounded by C exp(-rate x).

    The range is first cut at ``a + W`` with ``W = ln(1/rel_tol)/rate`` (or
    ``start_width``), then doubled until the newly added slab contributes
    less than the tolerance. With ``tail_policy="fixed"`` the integral runs
    to ``spec.upper`` instead.
    """
    a = float(a)
    if spec.tail_policy == "fixed":
        return integrate_finite(f, a, spec.upper, spec)
    if not decay_rate_hint > 0:
        raise ValueError("decay_rate_hint must be positive")
    width = start_width
    if width is None:
        width = (math.log(1.0 / spec.rel_tol) + 3.0) / decay_rate_hint
    upper = a + width
    est = integrate_finite(f, a, upper, spec)
    for _ in range(spec.max_doublings):
        slab = integrate_finite(f, upper, upper + (upper - a), spec)
        est = est + slab
        upper = upper + (upper - a)
        if abs(slab.value) + slab.err <= spec.tolerance(est.value):
            return est
    est.converged = False
    return est


def sum_truncated(term, ratio_hint, spec=QuadSpec(), start=0, max_terms=10_000, min_terms=2):
    """Sum ``term(n)`` for n >= start until the geometric tail bound is below tolerance.

    ``term`` may return a float or an :class:`Estimate`; estimate errors are
    accumulated. The tail after term n is bounded by ``|t_n| r / (1 - r)``
    with ``r = max(ratio_hint, |t_n / t_(n-1)|)``. The bound is added to the
    reported error.
    """
    if not 0.0 <= ratio_hint < 1.0:
        raise ValueError("ratio_hint must lie in [0, 1)")
    total = 0.0
    err = 0.0
    evaluations = 0
    converged = True
    parts = None
    prev = None
    n = start
    count = 0
    while True:
        t = term(n)
        if isinstance(t, Estimate):
            err += t.err
            evaluations += t.evaluations
            converged = converged and t.converged
            if t.parts is not None:
                parts = t.parts.copy() if parts is None else parts + t.parts
            t = t.value
        else:
            evaluations += 1
        t = float(t)
        total += t
        count += 1
        if count >= min_terms:
            if t == 0.0 and (prev is None or prev == 0.0):
                break
            if prev is not None and prev != 0.0:
                r = max(ratio_hint, abs(t / prev))
                if r < 1.0:
                    tail = abs(t) * r / (1.0 - r)
                    if tail <= spec.tolerance(total):
                        err += tail
                        break
        if count >= max_terms:
            converged = False
            break
        prev = t
        n += 1
    return Estimate(total, err, evaluations, converged, parts)
