"""Kernel sums with certified truncation tails.

Every infinite sum here is truncated at an index K where the remainder is
dominated by a geometric series: each sequence family supplies a certified
ratio bound rho_K >= sup_{k>K} psi(k+1)/psi(k), so the discarded tail is at
most psi(K+1)/(1-rho_K).  Results carry that bound in a
:class:`KernelSample`.

The geometric band kernel Z_q(t) P(t) -- the product of the envelope
1/sqrt(1-2q cos t+q^2) with the phase-shifted band sum
sum_{k=n-p+1}^{n} q^k cos(kt + theta_q(t) - beta pi/2) -- equals the double
tail sum sum_{k=n-p}^{n-1} sum_{j>k} q^j cos(jt - beta pi/2); both sides are
implemented, and the identity is exercised by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .psi import (dq_limit, psi_value, psi_values, _log_values,
                  ratio_upper_bound, tail_sum_bound, UnsupportedPsiError)
from .series import TrigSeries
from .psi import psi_integral

_TRUNCATION_CAP = 1 << 22


class KernelTruncationError(RuntimeError):
    """The certified tail bound cannot reach the requested tolerance."""


@dataclass(frozen=True)
class KernelSample:
    """A truncated kernel value plus a certified bound on the discarded tail."""

    value: float
    truncation_k: int
    tail_bound: float


def _truncation_index(psi, k_start, tol):
    """Smallest power-of-two-ish K >= k_start with certified tail <= tol."""
    K = max(int(k_start) + 8, 16)
    while True:
        bound = tail_sum_bound(psi, K)
        if bound <= tol:
            break
        if K > _TRUNCATION_CAP:
            raise KernelTruncationError(
                f"tail bound {bound:.3e} still above tol={tol:.3e} at K={K}; "
                "the ratio limit is too close to 1 for this tolerance")
        K *= 2
    # walk back down to trim obviously oversized windows
    lo = max(int(k_start), K // 2)
    while lo < K and tail_sum_bound(psi, (lo + K) // 2) <= tol:
        K = (lo + K) // 2
    return K


# ---------------------------------------------------------------------------
# envelope / phase / band sum of the geometric comparison kernel
# ---------------------------------------------------------------------------

def poisson_envelope(q, t):
    """1 / sqrt(1 - 2 q cos t + q^2) (the modulus of 1/(1 - q e^{it}))."""
    t = np.asarray(t, dtype=np.float64)
    return 1.0 / np.sqrt(1.0 - 2.0 * q * np.cos(t) + q * q)


def poisson_phase(q, t):
    """arctan(q sin t / (1 - q cos t)) (the argument of 1/(1 - q e^{it}))."""
    t = np.asarray(t, dtype=np.float64)
    return np.arctan2(q * np.sin(t), 1.0 - q * np.cos(t))


def vp_band_sum(q, beta, n, p, t):
    """sum_{k=n-p+1}^{n} q^k cos(kt + theta_q(t) - beta pi/2)."""
    if not 1 <= p <= n:
        raise ValueError("require 1 <= p <= n")
    t = np.asarray(t, dtype=np.float64)
    theta = poisson_phase(q, t)
    acc = np.zeros_like(t)
    for k in range(n - p + 1, n + 1):
        acc += q ** k * np.cos(k * t + theta - beta * np.pi / 2.0)
    return acc


def vp_band_kernel_values(q, beta, n, p, t):
    """Z_q(t) * vp_band_sum(...) on a grid (backend-accelerated)."""
    return _accel.vp_band(q, beta, n, p, np.ascontiguousarray(t, dtype=np.float64))


# ---------------------------------------------------------------------------
# truncated psi kernels
# ---------------------------------------------------------------------------

def psi_kernel_values(psi, beta, t, tol=1e-12):
    """Values of sum_{k>=1} psi(k) cos(kt - beta pi/2) on a grid, truncated."""
    if dq_limit(psi) >= 1.0:
        raise UnsupportedPsiError("kernel sums need a ratio limit below 1")
    K = _truncation_index(psi, 1, tol)
    w = psi_values(psi, np.arange(1, K + 1))
    vals = _accel.weighted_cos_sum(w, 1, beta * np.pi / 2.0, np.ascontiguousarray(t, dtype=np.float64))
    return vals, K, tail_sum_bound(psi, K)


def psi_kernel(psi, beta, t, tol=1e-12) -> KernelSample:
    """The kernel sum_{k>=1} psi(k) cos(kt - beta pi/2) at a point."""
    vals, K, bound = psi_kernel_values(psi, beta, np.array([float(t)]), tol)
    return KernelSample(float(vals[0]), K, bound)


def _tau_weights(n, p, ks):
    ks = np.asarray(ks)
    w = np.ones(ks.shape, dtype=np.float64)
    band = (ks >= n - p + 1) & (ks <= n - 1)
    w[band] = 1.0 - (n - ks[band]) / p
    w[ks <= n - p] = 0.0
    return w


def vp_tail_kernel_values(psi, beta, n, p, j, t, tol=1e-12):
    """Values of sum_{k >= n-p+j} tau_{n,p}(k) psi(k) cos(kt - beta pi/2)."""
    if j < 1 or not 1 <= p <= n:
        raise ValueError("require j >= 1 and 1 <= p <= n")
    if dq_limit(psi) >= 1.0:
        raise UnsupportedPsiError("kernel sums need a ratio limit below 1")
    k0 = n - p + j
    K = _truncation_index(psi, k0, tol)
    ks = np.arange(k0, K + 1)
    w = _tau_weights(n, p, ks) * psi_values(psi, ks)
    vals = _accel.weighted_cos_sum(w, k0, beta * np.pi / 2.0,
                                   np.ascontiguousarray(t, dtype=np.float64))
    return vals, K, tail_sum_bound(psi, K)


def vp_tail_kernel(psi, beta, n, p, j, t, tol=1e-12) -> KernelSample:
    """The weighted deviation kernel at a point, truncated with a certified tail."""
    vals, K, bound = vp_tail_kernel_values(psi, beta, n, p, j, np.array([float(t)]), tol)
    return KernelSample(float(vals[0]), K, bound)


# ---------------------------------------------------------------------------
# tail sums of tau * psi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailSum:
    """sum_{k >= n-p+j} tau_{n,p}(k) psi(k) with a certified truncation bound.

    ``upper_bound_min`` is the coarser certified bound
    min( sum psi(k), (1/p) sum (k-n+p) psi(k) ) over the same range.
    """

    value: float
    tail_bound: float
    upper_bound_min: float


def tail_sum_tau_psi(psi, n, p, j, *, tol_rel=1e-14) -> TailSum:
    """Evaluate the weighted tail sum by its two-branch closed split."""
    if j < 1 or not 1 <= p <= n:
        raise ValueError("require j >= 1 and 1 <= p <= n")
    k0 = n - p + j
    first = psi_value(psi, k0, on_underflow="zero")
    tol = max(tol_rel * max(first, 1e-300), 1e-300)
    K = _truncation_index(psi, k0, tol)
    ks = np.arange(k0, K + 1)
    vals = psi_values(psi, ks)
    bound = tail_sum_bound(psi, K)

    if p > j:
        band = ks <= n - 1
        value = float(np.sum((ks[band] - n + p) / p * vals[band]) + np.sum(vals[~band]))
    else:
        value = float(np.sum(vals))

    plain = float(np.sum(vals)) + bound
    weighted = float(np.sum((ks - n + p) * vals)) / p
    rho = ratio_upper_bound(psi, K)
    if rho < 1.0:
        head = psi_value(psi, K + 1, on_underflow="zero")
        weighted += (head * ((K + 1 - n + p) / (1.0 - rho) + rho / (1.0 - rho) ** 2)) / p
    return TailSum(value, bound, min(plain, weighted))


# ---------------------------------------------------------------------------
# remainder after swapping psi for its geometric comparison
# ---------------------------------------------------------------------------

def geometric_gap_remainder_values(psi, beta, n, p, t, tol=1e-12):
    """Values of sum_{k>=n-p+2} tau(k) (psi(k)/psi(m) - q^{k-m}) cos(kt - beta pi/2), m = n-p+1."""
    q = dq_limit(psi)
    if not 0.0 < q < 1.0:
        raise UnsupportedPsiError("the geometric comparison needs a ratio limit in (0, 1)")
    m = n - p + 1
    log_m = float(_log_values(psi, np.array([float(m)]))[0])
    # tail of the difference is below the sum of both tails
    half = tol / 2.0
    K = _truncation_index(psi, m + 1, half * math.exp(log_m))
    Kq = m + max(8, int(math.ceil(math.log(half * (1.0 - q)) / math.log(q))))
    K = max(K, Kq)
    ks = np.arange(m + 1, K + 1)
    rel = np.exp(_log_values(psi, ks.astype(float)) - log_m)
    coef = _tau_weights(n, p, ks) * (rel - q ** (ks - m))
    vals = _accel.weighted_cos_sum(coef, m + 1, beta * np.pi / 2.0,
                                   np.ascontiguousarray(t, dtype=np.float64))
    bound = tail_sum_bound(psi, K) * math.exp(-log_m) + q ** (K + 1 - m) / (1.0 - q)
    return vals, K, bound


def geometric_gap_remainder(psi, beta, n, p, t, tol=1e-12) -> KernelSample:
    """The remainder kernel left after replacing psi by the geometric weights q^k."""
    vals, K, bound = geometric_gap_remainder_values(psi, beta, n, p, np.array([float(t)]), tol)
    return KernelSample(float(vals[0]), K, bound)


# ---------------------------------------------------------------------------
# convolution against the psi kernel; band-sum identity
# ---------------------------------------------------------------------------

def convolve(phi: TrigSeries, psi, beta, a0=0.0) -> TrigSeries:
    """Convolution (1/pi) int phi(x-t) K_beta(t) dt realized coefficientwise.

    Identical contract to :func:`vallee_lab.psi.psi_integral`; the quadrature
    route is checked against this one in the test suite.
    """
    return psi_integral(phi, psi, beta, a0)


def vp_band_identity(q, beta, n, p, t, tol=1e-12):
    """Both sides of the double-sum factorization.

    Returns (lhs, rhs) where lhs is the truncated double geometric tail sum
    sum_{k=n-p}^{n-1} sum_{j>k} q^j cos(jt - beta pi/2) as a
    :class:`KernelSample` and rhs = Z_q(t) * band_sum(t).
    """
    if not (0.0 < q < 1.0 and 1 <= p <= n):
        raise ValueError("require q in (0,1) and 1 <= p <= n")
    m = n - p + 1
    J = m + max(8, int(math.ceil(math.log(max(tol, 1e-300) * (1.0 - q) / p) / math.log(q))))
    js = np.arange(m, J + 1)
    mult = np.minimum(js - (n - p), p).astype(np.float64)
    coef = mult * q ** js
    tarr = np.array([float(t)])
    lhs = float(_accel.weighted_cos_sum(coef, m, beta * np.pi / 2.0, tarr)[0])
    tail = p * q ** (J + 1) / (1.0 - q)
    rhs = float(poisson_envelope(q, tarr)[0] * vp_band_sum(q, beta, n, p, tarr)[0])
    return KernelSample(lhs, J, tail), rhs
