"""Adaptive composite Gauss-Legendre quadrature on finite intervals.

The integration strategy used throughout the package: split the interval at
known breakpoints (kinks of piecewise integrands, detected sign changes),
lay down composite 16-point Gauss-Legendre panels, and double the panel
count until two successive refinements agree to the requested tolerance.
The last refinement difference is reported as the error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

_GL_NODES, _GL_WEIGHTS = leggauss(16)


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested tolerance."""

    def __init__(self, message, achieved_tol=None, value=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol
        self.value = value


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    est_error: float
    n_evals: int
    levels: int
    converged: bool


def _panel_edges(a, b, breakpoints, min_panels):
    pts = [a, b]
    for x in breakpoints:
        x = float(x)
        if a < x < b:
            pts.append(x)
    pts = np.array(sorted(set(pts)))
    # split each segment so panels are roughly uniform and at least min_panels total
    total = b - a
    edges = [a]
    for lo, hi in zip(pts[:-1], pts[1:]):
        k = max(1, int(np.ceil((hi - lo) / total * min_panels)))
        edges.extend(np.linspace(lo, hi, k + 1)[1:])
    return np.array(edges)


def _composite(fn, edges):
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    vals = np.asarray(fn(pts), dtype=np.float64)
    return float(np.dot(vals, wts)), pts.size


def _refine(edges):
    mid = 0.5 * (edges[1:] + edges[:-1])
    out = np.empty(edges.size + mid.size)
    out[0::2] = edges
    out[1::2] = mid
    return out


def integrate(fn, a, b, *, rel_tol=1e-10, abs_tol=1e-13, breakpoints=(),
              min_panels=8, max_levels=14, raise_on_failure=True):
    """Integrate a vectorized callable over [a, b].

    Parameters
    ----------
    fn : callable
        Maps a 1-D array of points to integrand values.
    breakpoints : iterable of float
        Interior points where the integrand loses smoothness; panel edges are
        pinned there so each panel sees a smooth piece.
    min_panels : int
        Initial panel count (increase for highly oscillatory integrands).
    rel_tol, abs_tol : float
        Refinement stops once two successive levels differ by less than
        ``max(rel_tol * |I|, abs_tol)``.
    """
    edges = _panel_edges(float(a), float(b), breakpoints, min_panels)
    value, n_evals = _composite(fn, edges)
    levels = 0
    for levels in range(1, max_levels + 1):
        edges = _refine(edges)
        new_value, n = _composite(fn, edges)
        n_evals += n
        diff = abs(new_value - value)
        value = new_value
        if diff <= max(rel_tol * abs(new_value), abs_tol):
            return QuadratureResult(value, diff, n_evals, levels, True)
    achieved = diff / max(abs(value), 1e-300)
    if raise_on_failure:
        raise QuadratureError(
            f"quadrature did not converge after {max_levels} refinements; "
            f"achieved relative tolerance {achieved:.3e} (target {rel_tol:.3e})",
            achieved_tol=achieved, value=value)
    return QuadratureResult(value, diff, n_evals, max_levels, False)


def golden_maximize_batch(fn, lo, hi, *, iters=45):
    """Golden-section maximum search on many brackets at once.

    ``fn`` maps an array of points to values; one vectorized evaluation per
    iteration services every bracket.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - np.sqrt(5.0)) / 2.0
    lo = np.asarray(lo, dtype=np.float64).copy()
    hi = np.asarray(hi, dtype=np.float64).copy()
    x1 = lo + invphi2 * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1 = np.asarray(fn(x1), dtype=np.float64)
    f2 = np.asarray(fn(x2), dtype=np.float64)
    for _ in range(iters):
        right = f1 < f2
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        query = np.where(right, lo + invphi * (hi - lo), lo + invphi2 * (hi - lo))
        fq = np.asarray(fn(query), dtype=np.float64)
        x1_old, f1_old = x1, f1
        x1 = np.where(right, x2, query)
        f1 = np.where(right, f2, fq)
        x2 = np.where(right, query, x1_old)
        f2 = np.where(right, fq, f1_old)
    xm = 0.5 * (lo + hi)
    fm = np.asarray(fn(xm), dtype=np.float64)
    best = np.maximum(fm, np.maximum(f1, f2))
    xs = np.where(fm >= np.maximum(f1, f2), xm, np.where(f1 >= f2, x1, x2))
    return xs, best


def golden_maximize(fn, a, b, *, tol=1e-12, max_iter=120):
    """Golden-section search for the maximum of a unimodal scalar function."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - np.sqrt(5.0)) / 2.0
    h = b - a
    x1 = a + invphi2 * h
    x2 = a + invphi * h
    f1 = fn(x1)
    f2 = fn(x2)
    for _ in range(max_iter):
        if h <= tol:
            break
        if f1 < f2:
            a = x1
            x1, f1 = x2, f2
            h = b - a
            x2 = a + invphi * h
            f2 = fn(x2)
        else:
            b = x2
            x2, f2 = x1, f1
            h = b - a
            x1 = a + invphi2 * h
            f1 = fn(x1)
    xs = (a + b) / 2.0
    return xs, max(f1, f2, fn(xs))
