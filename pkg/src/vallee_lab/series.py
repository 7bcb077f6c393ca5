"""Finite trigonometric series and the classical summation operators.

A :class:`TrigSeries` stores the constant term (with the a0/2 convention)
and dense cosine/sine coefficient arrays for harmonics 1..N.  The summation
operators implemented here are the Fourier partial sum, the Fejer mean and
the two-parameter de la Vallee Poussin mean V_{n,p} (the average of the p
partial sums of orders n-p .. n-1), together with the deviation f - V_{n,p}(f)
expressed through per-harmonic weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._accel import eval_trig, eval_trig_sparse

TWO_PI = 2.0 * np.pi

# harmonics with |coef| below this fraction of the largest are skipped by the
# sparse evaluation fast path (well under the 1e-12 tolerances asserted anywhere)
_SPARSE_CUTOFF = 1e-18


@dataclass(frozen=True)
class TrigSeries:
    """Finite trigonometric series a0/2 + sum_{k=1}^{N} a_k cos(kt) + b_k sin(kt)."""

    a0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
            raise ValueError("cosine and sine coefficient arrays must be 1-D and equally long")
        if not (np.isfinite(self.a0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("series coefficients must be finite")
        a = a.copy()
        b = b.copy()
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, n=0):
        return cls(0.0, np.zeros(max(n, 0)), np.zeros(max(n, 0)))

    @classmethod
    def harmonic(cls, k, cos_coef=0.0, sin_coef=0.0, a0=0.0):
        """Single-harmonic series a0/2 + cos_coef*cos(kt) + sin_coef*sin(kt)."""
        if k < 1:
            raise ValueError("harmonic index must be >= 1")
        a = np.zeros(k)
        b = np.zeros(k)
        a[k - 1] = cos_coef
        b[k - 1] = sin_coef
        return cls(a0, a, b)

    @classmethod
    def from_pairs(cls, a0, pairs):
        pairs = list(pairs)
        a = np.array([p[0] for p in pairs], dtype=np.float64)
        b = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(a0, a, b)

    # -- basic queries -------------------------------------------------------

    @property
    def n(self):
        """Length of the coefficient storage (degree bound)."""
        return self.a.shape[0]

    def degree(self):
        """Largest harmonic with a nonzero coefficient pair, or 0."""
        nz = np.nonzero((self.a != 0.0) | (self.b != 0.0))[0]
        return int(nz[-1] + 1) if nz.size else 0

    def coef(self, k):
        """Coefficient pair (a_k, b_k); k = 0 returns (a0, 0)."""
        if k == 0:
            return self.a0, 0.0
        if k <= self.n:
            return float(self.a[k - 1]), float(self.b[k - 1])
        return 0.0, 0.0

    # -- evaluation ----------------------------------------------------------

    def values(self, t):
        """Evaluate on a 1-D array of points."""
        t = np.ascontiguousarray(t, dtype=np.float64)
        d = self.degree()
        if d == 0:
            return np.full(t.shape, 0.5 * self.a0)
        a = self.a[:d]
        b = self.b[:d]
        mags = np.abs(a) + np.abs(b)
        top = mags.max()
        active = np.nonzero(mags > _SPARSE_CUTOFF * top)[0]
        # sparse path pays off when most harmonics are negligible
        if active.size <= d // 4:
            ks = (active + 1).astype(np.float64)
            vals = eval_trig_sparse(ks, a[active], b[active], t)
            return vals + 0.5 * self.a0
        return eval_trig(self.a0, a, b, t)

    def __call__(self, t):
        if np.isscalar(t):
            return float(self.values(np.array([float(t)]))[0])
        return self.values(np.asarray(t, dtype=np.float64))

    # -- arithmetic -----------------------------------------------------------

    def _aligned(self, other):
        n = max(self.n, other.n)
        pad = lambda x: np.pad(x, (0, n - x.shape[0]))
        return pad(self.a), pad(self.b), pad(other.a), pad(other.b)

    def __add__(self, other):
        sa, sb, oa, ob = self._aligned(other)
        return TrigSeries(self.a0 + other.a0, sa + oa, sb + ob)

    def __sub__(self, other):
        sa, sb, oa, ob = self._aligned(other)
        return TrigSeries(self.a0 - other.a0, sa - oa, sb - ob)

    def __mul__(self, c):
        c = float(c)
        return TrigSeries(c * self.a0, c * self.a, c * self.b)

    __rmul__ = __mul__

    def truncated(self, k):
        """Series with all harmonics above k removed (k >= 0)."""
        if k < 0:
            raise ValueError("truncation order must be >= 0")
        return TrigSeries(self.a0, self.a[:k], self.b[:k])


def evaluate(f: TrigSeries, t: float) -> float:
    """Point evaluation of a trigonometric series."""
    return f(t)


@dataclass(frozen=True)
class SampledFunction:
    """A 2pi-periodic function given by an evaluator on [-pi, pi).

    ``breakpoints`` lists points (in [-pi, pi)) where the function loses
    smoothness; quadrature panels are pinned there.  ``osc_degree`` hints at
    the effective oscillation so evaluation grids can be sized.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    smoothness: str = "analytic"
    breakpoints: tuple = field(default=())
    osc_degree: int = 1

    def __post_init__(self):
        if self.smoothness not in ("trig_poly", "analytic", "piecewise_linear"):
            raise ValueError(f"unknown smoothness hint {self.smoothness!r}")
        bp = tuple(sorted(float(np.mod(x + np.pi, TWO_PI) - np.pi) for x in self.breakpoints))
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "osc_degree", max(1, int(self.osc_degree)))

    def values(self, t):
        t = np.asarray(t, dtype=np.float64)
        reduced = np.mod(t + np.pi, TWO_PI) - np.pi
        return np.asarray(self.evaluator(reduced), dtype=np.float64)

    def __call__(self, t):
        if np.isscalar(t):
            return float(self.values(np.array([float(t)]))[0])
        return self.values(t)


# ---------------------------------------------------------------------------
# summation operators
# ---------------------------------------------------------------------------

def partial_sum(f: TrigSeries, k: int) -> TrigSeries:
    """Fourier partial sum of order k (truncation to harmonics <= k)."""
    if k < 0:
        raise ValueError("partial sum order must be >= 0")
    return f.truncated(k)


def vp_weight(n: int, p: int, k: int) -> float:
    """Multiplier of harmonic k in V_{n,p}: 1 up to n-p, then (n-k)/p, then 0."""
    _check_np(n, p)
    if k <= n - p:
        return 1.0
    if k <= n - 1:
        return (n - k) / p
    return 0.0


def deviation_weight(n: int, p: int, k: int) -> float:
    """Multiplier of harmonic k in f - V_{n,p}(f) for k >= n-p+1.

    Equals 1 - (n-k)/p on the transition band n-p+1 <= k <= n-1 and 1 from
    k = n on.  Indices at or below n-p are rejected (the weight vanishes
    there and the band formula does not apply).
    """
    _check_np(n, p)
    if k <= n - p:
        raise ValueError(f"deviation weight needs k >= n-p+1 (got k={k}, n-p={n - p})")
    if k >= n:
        return 1.0
    return 1.0 - (n - k) / p


def _check_np(n, p):
    if not (isinstance(n, (int, np.integer)) and isinstance(p, (int, np.integer))):
        raise TypeError("n and p must be integers")
    if p < 1 or p > n:
        raise ValueError(f"require 1 <= p <= n (got n={n}, p={p})")


def vp_sum(f: TrigSeries, n: int, p: int) -> TrigSeries:
    """de la Vallee Poussin mean V_{n,p}(f), computed in multiplier form."""
    _check_np(n, p)
    d = min(f.n, n - 1)
    a = f.a[:d].copy()
    b = f.b[:d].copy()
    ks = np.arange(1, d + 1)
    w = np.ones(d)
    band = ks > n - p
    w[band] = (n - ks[band]) / p
    return TrigSeries(f.a0, a * w, b * w)


def vp_sum_by_averaging(f: TrigSeries, n: int, p: int) -> TrigSeries:
    """V_{n,p}(f) as the literal average (1/p) sum of partial sums S_{n-p}..S_{n-1}."""
    _check_np(n, p)
    acc = partial_sum(f, n - p) * (1.0 / p)
    for k in range(n - p + 1, n):
        acc = acc + partial_sum(f, k) * (1.0 / p)
    return acc


def fejer_sum(f: TrigSeries, n: int) -> TrigSeries:
    """Fejer mean of order n-1; coincides with V_{n,n}(f)."""
    if n < 1:
        raise ValueError("Fejer mean needs n >= 1")
    return vp_sum(f, n, n)


def vp_deviation(f: TrigSeries, n: int, p: int) -> TrigSeries:
    """Deviation f - V_{n,p}(f)."""
    _check_np(n, p)
    a = f.a.copy()
    b = f.b.copy()
    d = f.n
    ks = np.arange(1, d + 1)
    w = np.zeros(d)
    band = (ks >= n - p + 1) & (ks <= n - 1)
    w[band] = 1.0 - (n - ks[band]) / p
    w[ks >= n] = 1.0
    return TrigSeries(0.0, a * w, b * w)


# ---------------------------------------------------------------------------
# projection of sampled functions onto finite series
# ---------------------------------------------------------------------------

def _next_pow2(x):
    return 1 << int(np.ceil(np.log2(max(2, x))))


def project_series(fn, degree: int, *, n_fft=None):
    """Project a periodic function onto harmonics 0..degree via a uniform FFT.

    The trapezoid-rule coefficients carry aliasing error bounded by the
    coefficient tail beyond the grid's Nyquist range, so the grid is sized
    well past ``degree``.  Returns the series and the largest coefficient
    magnitude in the top quarter of the kept band (a decay estimate for the
    discarded tail).
    """
    if degree < 1:
        raise ValueError("projection degree must be >= 1")
    if n_fft is None:
        n_fft = min(_next_pow2(max(4096, 64 * (degree + 1))), 1 << 20)
    grid = TWO_PI * np.arange(n_fft) / n_fft
    vals = fn.values(grid) if hasattr(fn, "values") else np.asarray(fn(grid), dtype=np.float64)
    spec = np.fft.rfft(vals) / n_fft
    kmax = min(degree, spec.shape[0] - 1)
    a = 2.0 * spec[1:kmax + 1].real
    b = -2.0 * spec[1:kmax + 1].imag
    series = TrigSeries(2.0 * spec[0].real, a, b)
    top = slice(max(1, 3 * kmax // 4), kmax + 1)
    edge = float(np.max(np.hypot(a[top.start - 1:], b[top.start - 1:]))) if kmax >= 1 else 0.0
    return series, edge
