"""Integral and uniform norms on [0, 2pi) without normalizing factors.

``norm_ls(f, s)`` computes (int_0^{2pi} |f|^s dt)^{1/s} for 1 <= s < inf by
adaptive Gauss-Legendre quadrature with panels pinned at the integrand's
kinks (registered breakpoints and detected sign changes of f), and the
sup-norm for s = inf via a dense grid followed by golden-section polishing
of the leading local maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate, golden_maximize_batch
from .series import TrigSeries, SampledFunction, TWO_PI

INF = float("inf")

# grid points per oscillation for the s = inf dense scan
SUP_POINTS_PER_OSC = 4096
_MAX_GRID = 1 << 23


@dataclass(frozen=True)
class NormResult:
    value: float
    est_error: float
    method: str


def conjugate_exponent(s):
    """Holder conjugate s' = s/(s-1), with 1 <-> inf."""
    s = float(s)
    if s == 1.0:
        return INF
    if s == INF:
        return 1.0
    if s < 1.0:
        raise ValueError("exponent must satisfy s >= 1")
    return s / (s - 1.0)


def cos_norm(u):
    """||cos||_u on [0, 2pi): (2 sqrt(pi) Gamma((u+1)/2) / Gamma(u/2+1))^(1/u)."""
    u = float(u)
    if u == INF:
        return 1.0
    if u < 1.0:
        raise ValueError("exponent must satisfy u >= 1")
    log_val = (math.log(2.0) + 0.5 * math.log(math.pi)
               + math.lgamma((u + 1.0) / 2.0) - math.lgamma(u / 2.0 + 1.0))
    return math.exp(log_val / u)


def _descriptor(f):
    if isinstance(f, TrigSeries):
        return f.values, max(f.degree(), 1), ()
    if isinstance(f, SampledFunction):
        return f.values, f.osc_degree, f.breakpoints
    raise TypeError("expected a TrigSeries or SampledFunction")


def _sign_change_points(values_fn, osc):
    """Locate sign changes of f on [-pi, pi) by scan plus vectorized bisection."""
    m = max(512, 64 * (osc + 1))
    t = -np.pi + TWO_PI * np.arange(m + 1) / m
    v = values_fn(t)
    signs = np.sign(v)
    hits = list(t[:-1][v[:-1] == 0.0])
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if idx.size:
        lo = t[idx].copy()
        hi = t[idx + 1].copy()
        vlo = v[idx].copy()
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            vm = values_fn(mid)
            go_right = np.sign(vm) == np.sign(vlo)
            lo = np.where(go_right, mid, lo)
            vlo = np.where(go_right, vm, vlo)
            hi = np.where(go_right, hi, mid)
        hits.extend(0.5 * (lo + hi))
    return hits


def _sup_norm(values_fn, osc, points_per_osc):
    m = min(points_per_osc * (osc + 1), _MAX_GRID)
    t = -np.pi + TWO_PI * np.arange(m) / m
    v = np.abs(values_fn(t))
    grid_max = float(v.max())
    # local maxima on the circular grid
    is_peak = (v >= np.roll(v, 1)) & (v >= np.roll(v, -1))
    peaks = np.nonzero(is_peak)[0]
    if peaks.size == 0:
        return grid_max, 0.0
    top = peaks[np.argsort(v[peaks])[::-1][:8]]
    h = TWO_PI / m
    _, refined = golden_maximize_batch(lambda pts: np.abs(values_fn(pts)),
                                       t[top] - h, t[top] + h)
    best = max(grid_max, float(refined.max()))
    return best, abs(best - grid_max)


def norm_ls_result(f, s, *, rel_tol=1e-10, points_per_osc=SUP_POINTS_PER_OSC) -> NormResult:
    """Norm with an error estimate and the method used ('quadrature' or 'sup_scan')."""
    s = float(s)
    values_fn, osc, registered = _descriptor(f)
    if s == INF:
        value, est = _sup_norm(values_fn, osc, points_per_osc)
        return NormResult(value, est, "sup_scan")
    if s < 1.0:
        raise ValueError("exponent must satisfy s >= 1")

    smooth_power = s == 2.0 or (s == int(s) and int(s) % 2 == 0)
    breakpoints = list(registered)
    if not smooth_power:
        breakpoints.extend(_sign_change_points(values_fn, osc))

    integrand = lambda t: np.abs(values_fn(t)) ** s
    res = integrate(integrand, -np.pi, np.pi, rel_tol=rel_tol,
                    breakpoints=breakpoints, min_panels=max(16, 2 * (osc + 1)))
    if res.value <= 0.0:
        return NormResult(0.0, res.est_error, "quadrature")
    value = res.value ** (1.0 / s)
    rel = res.est_error / max(res.value, 1e-300)
    return NormResult(value, value * rel / s, "quadrature")


def norm_ls(f, s, *, rel_tol=1e-10, points_per_osc=SUP_POINTS_PER_OSC) -> float:
    """The L_s norm (or sup-norm for s = inf) of a series or sampled function."""
    return norm_ls_result(f, s, rel_tol=rel_tol, points_per_osc=points_per_osc).value
