"""Multiplier sequences psi(k) and the (psi, beta) coefficient calculus.

The sequence families implemented here are the ones whose ratio
psi(k+1)/psi(k) converges to some q in [0, 1): plain geometric sequences
q^k, generalized Poisson weights e^{-alpha k^r}, polyharmonic Poisson
weights q^k (1 + sum_j (1-q^2)^j/(j! 2^j) prod_nu (k+2nu)), heat-kernel
weights 2/(q^k + q^{-k}) and Neumann weights q^k/k, plus user tables with a
declared tail ratio.

Each family knows its ratio limit in closed form, a certified upper bound
on the ratio beyond any index (used for kernel tail certification), and its
ratio-gap sup eps_m = sup_{k>=m} |psi(k+1)/psi(k) - q| either in closed form
or by a windowed scan with a monotonicity certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import TrigSeries

_LOG_TINY = math.log(2.2250738585072014e-308)  # smallest normal double


class PsiError(ValueError):
    pass


class PsiUnderflowError(PsiError):
    def __init__(self, k, message=None):
        super().__init__(message or f"psi(k) underflows the double range at k={k}")
        self.k = k


class UnsupportedPsiError(PsiError):
    pass


@dataclass(frozen=True)
class PsiSequence:
    """A positive multiplier sequence with kind tag and ratio-limit metadata."""

    kind: str
    q: float = math.nan
    alpha: float = math.nan
    r: float = math.nan
    l: int = 0
    table: tuple = ()
    tail_ratio: float = math.nan

    def describe(self):
        if self.kind == "geometric":
            return f"geometric(q={self.q:g})"
        if self.kind == "gen_poisson":
            return f"gen_poisson(alpha={self.alpha:g}, r={self.r:g})"
        if self.kind == "polyharmonic":
            return f"polyharmonic(l={self.l}, q={self.q:g})"
        if self.kind == "heat":
            return f"heat(q={self.q:g})"
        if self.kind == "neumann":
            return f"neumann(q={self.q:g})"
        return f"custom(len={len(self.table)}, tail_ratio={self.tail_ratio:g})"


def _check_q(q):
    q = float(q)
    if not 0.0 < q < 1.0:
        raise PsiError(f"q must lie in (0, 1), got {q}")
    return q


def geometric(q) -> PsiSequence:
    return PsiSequence("geometric", q=_check_q(q))


def gen_poisson(alpha, r=1.0) -> PsiSequence:
    alpha = float(alpha)
    r = float(r)
    if alpha <= 0.0:
        raise PsiError("alpha must be positive")
    if r < 1.0:
        # r < 1 pushes the ratio limit to 1, outside every theorem's range
        raise PsiError("r must be >= 1 (the ratio limit leaves [0, 1) otherwise)")
    return PsiSequence("gen_poisson", alpha=alpha, r=r)


def polyharmonic(l, q) -> PsiSequence:
    l = int(l)
    if l < 1:
        raise PsiError("polyharmonic order l must be >= 1")
    return PsiSequence("polyharmonic", q=_check_q(q), l=l)


def heat(q) -> PsiSequence:
    return PsiSequence("heat", q=_check_q(q))


def neumann(q) -> PsiSequence:
    return PsiSequence("neumann", q=_check_q(q))


def custom(table, tail_ratio=None) -> PsiSequence:
    table = tuple(float(x) for x in table)
    if not table or any(x <= 0 or not math.isfinite(x) for x in table):
        raise PsiError("custom table must be non-empty and strictly positive")
    tr = math.nan if tail_ratio is None else float(tail_ratio)
    if tail_ratio is not None and not 0.0 <= tr <= 1.0:
        raise PsiError("declared tail ratio must lie in [0, 1]")
    return PsiSequence("custom", table=table, tail_ratio=tr)


# ---------------------------------------------------------------------------
# values and ratios
# ---------------------------------------------------------------------------

def _polyharmonic_factor(l, q, k):
    """P(k) with psi_l(k) = q^k P(k); polynomial in k of degree l-1."""
    k = np.asarray(k, dtype=np.float64)
    out = np.ones_like(k)
    cj = 1.0
    prod = np.ones_like(k)
    for j in range(1, l):
        cj *= (1.0 - q * q) / (2.0 * j)
        prod = prod * (k + 2.0 * (j - 1))
        out = out + cj * prod
    return out


def _log_values(psi, ks):
    """log psi(k) vectorized; -inf marks underflow to zero."""
    ks = np.asarray(ks, dtype=np.float64)
    if np.any(ks < 1):
        raise PsiError("psi(k) is defined for k >= 1")
    if psi.kind == "geometric":
        return ks * math.log(psi.q)
    if psi.kind == "gen_poisson":
        return -psi.alpha * ks ** psi.r
    if psi.kind == "polyharmonic":
        return ks * math.log(psi.q) + np.log(_polyharmonic_factor(psi.l, psi.q, ks))
    if psi.kind == "heat":
        # 2 q^k / (1 + q^{2k}), overflow-safe
        return math.log(2.0) + ks * math.log(psi.q) - np.log1p(psi.q ** (2.0 * ks))
    if psi.kind == "neumann":
        return ks * math.log(psi.q) - np.log(ks)
    if psi.kind == "custom":
        L = len(psi.table)
        out = np.empty_like(ks)
        small = ks <= L
        idx = ks[small].astype(int) - 1
        out[small] = np.log(np.array(psi.table))[idx]
        if np.any(~small):
            if math.isnan(psi.tail_ratio):
                raise UnsupportedPsiError("custom sequence has no tail rule beyond its table")
            if psi.tail_ratio == 0.0:
                out[~small] = -math.inf
            else:
                out[~small] = math.log(psi.table[-1]) + (ks[~small] - L) * math.log(psi.tail_ratio)
        return out
    raise PsiError(f"unknown kind {psi.kind!r}")


def psi_values(psi, ks, *, on_underflow="zero"):
    """Vectorized psi(k); underflowed entries become 0.0 (or raise)."""
    logs = _log_values(psi, ks)
    under = logs < _LOG_TINY
    if np.any(under) and on_underflow == "raise":
        bad = int(np.asarray(ks)[np.nonzero(under)[0][0] if under.ndim else 0])
        raise PsiUnderflowError(bad)
    out = np.where(under, 0.0, np.exp(np.where(under, 0.0, logs)))
    return out


def psi_value(psi, k, *, on_underflow="raise"):
    """psi(k) for a single index; signals underflow by default."""
    k = int(k)
    return float(psi_values(psi, np.array([k]), on_underflow=on_underflow)[0])


def psi_ratio(psi, ks):
    """psi(k+1)/psi(k), computed analytically per kind (never under/overflows)."""
    ks = np.asarray(ks, dtype=np.float64)
    if np.any(ks < 1):
        raise PsiError("ratio is defined for k >= 1")
    if psi.kind == "geometric":
        return np.full(ks.shape, psi.q)
    if psi.kind == "gen_poisson":
        return np.exp(-psi.alpha * ((ks + 1.0) ** psi.r - ks ** psi.r))
    if psi.kind == "polyharmonic":
        return psi.q * _polyharmonic_factor(psi.l, psi.q, ks + 1) / _polyharmonic_factor(psi.l, psi.q, ks)
    if psi.kind == "heat":
        q2k = psi.q ** (2.0 * ks)
        return psi.q * (1.0 + q2k) / (1.0 + q2k * psi.q * psi.q)
    if psi.kind == "neumann":
        return psi.q * ks / (ks + 1.0)
    if psi.kind == "custom":
        lo = _log_values(psi, ks)
        hi = _log_values(psi, ks + 1)
        return np.exp(hi - lo)
    raise PsiError(f"unknown kind {psi.kind!r}")


def dq_limit(psi) -> float:
    """The limit q of psi(k+1)/psi(k), in closed form per kind."""
    if psi.kind == "geometric":
        return psi.q
    if psi.kind == "gen_poisson":
        return math.exp(-psi.alpha) if psi.r == 1.0 else 0.0
    if psi.kind in ("polyharmonic", "heat", "neumann"):
        return psi.q
    if psi.kind == "custom":
        if math.isnan(psi.tail_ratio):
            raise UnsupportedPsiError("custom sequence needs a declared tail ratio")
        if not 0.0 <= psi.tail_ratio < 1.0:
            raise PsiError(f"declared ratio limit {psi.tail_ratio} lies outside [0, 1)")
        return psi.tail_ratio
    raise PsiError(f"unknown kind {psi.kind!r}")


def ratio_upper_bound(psi, K) -> float:
    """A certified bound rho >= sup_{k > K} psi(k+1)/psi(k).

    Used to dominate kernel tails by a geometric series: the bound comes
    from each family's monotone ratio behaviour (or, for polyharmonic
    weights, from the proven gap bound (2l-3) q / k).
    """
    K = int(K)
    if psi.kind == "geometric":
        return psi.q
    if psi.kind == "gen_poisson":
        # (k+1)^r - k^r is nondecreasing in k for r >= 1
        return float(psi_ratio(psi, np.array([K + 1]))[0])
    if psi.kind == "polyharmonic":
        if psi.l == 1:
            return psi.q
        return psi.q * (1.0 + (2.0 * psi.l - 3.0) / (K + 1.0))
    if psi.kind == "heat":
        return psi.q * (1.0 + psi.q ** (2.0 * (K + 1)))
    if psi.kind == "neumann":
        return psi.q
    if psi.kind == "custom":
        if math.isnan(psi.tail_ratio):
            raise UnsupportedPsiError("custom sequence has no certified tail ratio")
        L = len(psi.table)
        bound = psi.tail_ratio if psi.tail_ratio > 0 else 0.0
        ks = np.arange(max(K + 1, 1), L + 1)
        if ks.size:
            bound = max(bound, float(psi_ratio(psi, ks).max()))
        return bound
    raise PsiError(f"unknown kind {psi.kind!r}")


def tail_sum_bound(psi, K) -> float:
    """Certified upper bound on sum_{k > K} psi(k)."""
    rho = ratio_upper_bound(psi, K)
    if rho >= 1.0:
        return math.inf
    return psi_value(psi, K + 1, on_underflow="zero") / (1.0 - rho)


# ---------------------------------------------------------------------------
# ratio-gap sup eps_m
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioGapResult:
    value: float
    method: str           # 'closed_form' | 'monotone' | 'numeric'
    window_hi: int        # last index scanned (numeric methods)
    tail_bound: float     # certified bound on the unscanned tail sup
    note: str = ""


def ratio_gap_detailed(psi, m, *, force_numeric=False, window=None) -> RatioGapResult:
    """eps_m = sup_{k >= m} |psi(k+1)/psi(k) - q| with provenance."""
    m = int(m)
    if m < 1:
        raise PsiError("m must be >= 1")
    q = dq_limit(psi)

    if not force_numeric:
        if psi.kind == "geometric" or (psi.kind == "polyharmonic" and psi.l == 1):
            return RatioGapResult(0.0, "closed_form", m, 0.0, "ratio is exactly q")
        if psi.kind == "gen_poisson" and psi.r == 1.0:
            return RatioGapResult(0.0, "closed_form", m, 0.0, "ratio is exactly e^-alpha")
        if psi.kind == "heat":
            val = psi.q ** (2 * m + 1) * (1 - psi.q ** 2) / (1 + psi.q ** (2 * (m + 1)))
            return RatioGapResult(val, "closed_form", m, 0.0, "gap decreasing in k")
        if psi.kind == "neumann":
            return RatioGapResult(psi.q / (m + 1), "closed_form", m, 0.0, "gap decreasing in k")
        if psi.kind == "gen_poisson":
            # r > 1: ratio decreases monotonically to 0, so the sup sits at k = m
            val = float(psi_ratio(psi, np.array([m]))[0])
            return RatioGapResult(val, "monotone", m, 0.0, "ratio decreasing to 0")

    hi = window if window is not None else max(2000, 50 * m)
    ks = np.arange(m, hi + 1)
    gaps = np.abs(psi_ratio(psi, ks) - q)
    window_sup = float(gaps.max())
    if psi.kind == "polyharmonic" and psi.l >= 2:
        tail = (2.0 * psi.l - 3.0) * psi.q / (hi + 1.0)
        note = f"tail sup bounded by (2l-3)q/k at k={hi + 1}"
    elif psi.kind == "custom":
        tail = 0.0 if hi >= len(psi.table) else math.inf
        note = "tail ratio equals the declared limit beyond the table"
    else:
        # monotone families scanned numerically on request
        tail = float(gaps[-1])
        note = "gap decreasing on the scanned window"
    value = max(window_sup, 0.0)
    if tail > window_sup:
        value = tail
        note += "; tail bound dominates the scan"
    return RatioGapResult(value, "numeric", hi, tail, note)


def ratio_gap(psi, m, *, force_numeric=False, window=None) -> float:
    """eps_m = sup_{k >= m} |psi(k+1)/psi(k) - q|."""
    return ratio_gap_detailed(psi, m, force_numeric=force_numeric, window=window).value


def polyharmonic_ratio_gap_bound(l, q, m) -> float:
    """The proven upper bound (2l-3) q / m for polyharmonic weights, l >= 2."""
    l = int(l)
    m = int(m)
    if l < 2:
        raise PsiError("the bound applies to l >= 2")
    if m < 1:
        raise PsiError("m must be >= 1")
    return (2.0 * l - 3.0) * float(q) / m


# ---------------------------------------------------------------------------
# coefficient transforms
# ---------------------------------------------------------------------------

def _phase(beta):
    return math.remainder(float(beta) * math.pi / 2.0, 2.0 * math.pi)


def psi_derivative(f: TrigSeries, psi, beta) -> TrigSeries:
    """Coefficientwise derivative: divide harmonic k by psi(k), advance its phase by beta pi/2."""
    d = f.degree()
    if d == 0:
        return TrigSeries.zero()
    ks = np.arange(1, d + 1)
    vals = psi_values(psi, ks, on_underflow="zero")
    a = f.a[:d]
    b = f.b[:d]
    dead = (vals == 0.0) & ((a != 0.0) | (b != 0.0))
    if np.any(dead):
        raise PsiUnderflowError(int(ks[np.nonzero(dead)[0][0]]),
                                "psi underflows at a harmonic the series actually uses "
                                f"(k={int(ks[np.nonzero(dead)[0][0]])})")
    ph = _phase(beta)
    c, s = math.cos(ph), math.sin(ph)
    safe = np.where(vals == 0.0, 1.0, vals)
    na = (a * c + b * s) / safe
    nb = (b * c - a * s) / safe
    na[vals == 0.0] = 0.0
    nb[vals == 0.0] = 0.0
    return TrigSeries(0.0, na, nb)


def psi_integral(phi: TrigSeries, psi, beta, a0=0.0) -> TrigSeries:
    """Inverse transform: multiply harmonic k by psi(k), retard its phase by beta pi/2.

    The input must have no constant term (a tiny residue from floating-point
    projection is tolerated); the output constant term is set to ``a0``.
    """
    scale = max(1.0, float(np.max(np.abs(phi.a)) if phi.n else 0.0),
                float(np.max(np.abs(phi.b)) if phi.n else 0.0))
    if abs(phi.a0) > 1e-12 * scale:
        raise PsiError(f"input must be orthogonal to constants (a0={phi.a0:g})")
    d = phi.degree()
    if d == 0:
        return TrigSeries(a0, np.zeros(0), np.zeros(0))
    ks = np.arange(1, d + 1)
    vals = psi_values(psi, ks, on_underflow="zero")
    ph = _phase(beta)
    c, s = math.cos(ph), math.sin(ph)
    al = phi.a[:d]
    be = phi.b[:d]
    na = vals * (al * c - be * s)
    nb = vals * (be * c + al * s)
    return TrigSeries(a0, na, nb)
