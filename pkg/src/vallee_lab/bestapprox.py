"""Best approximation by trigonometric polynomials of order <= m-1.

Four solvers cover the exponent range: Parseval truncation for L2, a Remez
exchange with 2m alternation points (grid LP fallback) for the sup-norm, a
grid LP in dual form for L1, and damped Newton / gradient descent on the
smooth convex objective for 1 < s < inf.  The module also builds the
extremal functions used by the sharpness sweeps: the cos-power construction
|cos|^{s'-1} sign(cos), and its continuous piecewise-linear smoothing of the
sign wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .norms import norm_ls, conjugate_exponent, cos_norm, INF
from .psi import psi_ratio
from .quadrature import integrate, golden_maximize_batch, _GL_NODES, _GL_WEIGHTS
from .series import TrigSeries, SampledFunction, TWO_PI, partial_sum


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class BestApproxResult:
    value: float
    optimal_poly: TrigSeries
    solver: str               # 'parseval' | 'remez' | 'lp_grid' | 'convex_ls'
    certified_gap: float


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _basis_matrix(m, t):
    """Columns 1, cos t, sin t, ..., cos (m-1)t, sin (m-1)t at the points t."""
    cols = [np.ones_like(t)]
    for k in range(1, m):
        cols.append(np.cos(k * t))
        cols.append(np.sin(k * t))
    return np.stack(cols, axis=1)


def _coeffs_to_series(c, m):
    a = np.zeros(max(m - 1, 0))
    b = np.zeros(max(m - 1, 0))
    for k in range(1, m):
        a[k - 1] = c[2 * k - 1]
        b[k - 1] = c[2 * k]
    return TrigSeries(2.0 * c[0], a, b)


def _f_values(f, t):
    return f.values(t)


def _osc_hint(f, m):
    if isinstance(f, TrigSeries):
        return max(f.degree(), m, 1)
    return max(f.osc_degree, m, 1)


def _residual_fn(f, poly):
    if isinstance(f, TrigSeries):
        return f - poly
    return SampledFunction(lambda t: f.values(t) - poly.values(t),
                           smoothness=f.smoothness, breakpoints=f.breakpoints,
                           osc_degree=max(f.osc_degree, poly.degree()))


# ---------------------------------------------------------------------------
# L2: Parseval
# ---------------------------------------------------------------------------

def best_l2(f, m, *, rel_tol=1e-11) -> BestApproxResult:
    """E_m in L2: truncation is optimal, the error is the coefficient tail."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if isinstance(f, TrigSeries):
        poly = partial_sum(f, m - 1)
        tail = float(np.sum(f.a[m - 1:] ** 2) + np.sum(f.b[m - 1:] ** 2))
        return BestApproxResult(math.sqrt(math.pi * tail), poly, "parseval", 0.0)
    # sampled function: low coefficients and the total energy by quadrature
    bp = f.breakpoints
    panels = max(16, 2 * (f.osc_degree + 1))
    total = integrate(lambda t: f.values(t) ** 2, -np.pi, np.pi,
                      rel_tol=rel_tol, breakpoints=bp, min_panels=panels)
    err = total.est_error
    # coefficient integrals can be exactly zero; floor the stop test by the RMS
    abs_tol = 1e-11 * (1.0 + math.sqrt(max(total.value, 0.0)))
    a = np.zeros(max(m - 1, 0))
    b = np.zeros(max(m - 1, 0))
    mean = integrate(f.values, -np.pi, np.pi, rel_tol=rel_tol, abs_tol=abs_tol,
                     breakpoints=bp, min_panels=panels)
    err += abs(mean.value) * mean.est_error
    a0 = mean.value / math.pi
    low_energy = math.pi * a0 * a0 / 2.0
    for k in range(1, m):
        ck = integrate(lambda t, k=k: f.values(t) * np.cos(k * t), -np.pi, np.pi,
                       rel_tol=rel_tol, abs_tol=abs_tol, breakpoints=bp, min_panels=panels)
        sk = integrate(lambda t, k=k: f.values(t) * np.sin(k * t), -np.pi, np.pi,
                       rel_tol=rel_tol, abs_tol=abs_tol, breakpoints=bp, min_panels=panels)
        a[k - 1] = ck.value / math.pi
        b[k - 1] = sk.value / math.pi
        err += 2.0 * (abs(ck.value) * ck.est_error + abs(sk.value) * sk.est_error) / math.pi
        low_energy += math.pi * (a[k - 1] ** 2 + b[k - 1] ** 2)
    poly = TrigSeries(a0, a, b)
    val2 = max(total.value - low_energy, 0.0)
    value = math.sqrt(val2)
    gap = err / (2.0 * value) if value > 0 else math.sqrt(max(err, 0.0))
    return BestApproxResult(value, poly, "parseval", gap)


# ---------------------------------------------------------------------------
# sup-norm: Remez exchange with LP fallback
# ---------------------------------------------------------------------------

def _collapse_alternating(idx, vals):
    """Collapse circularly consecutive same-sign peaks, keeping the largest."""
    signs = np.sign(vals)
    kept = []
    for i, s, v in zip(idx, signs, np.abs(vals)):
        if kept and kept[-1][1] == s:
            if v > kept[-1][2]:
                kept[-1] = (i, s, v)
        else:
            kept.append((i, s, v))
    if len(kept) >= 2 and kept[0][1] == kept[-1][1]:
        if kept[0][2] >= kept[-1][2]:
            kept.pop()
        else:
            kept.pop(0)
    return kept


def _trim_to(kept, need):
    kept = list(kept)
    while len(kept) > need:
        j = min(range(len(kept)), key=lambda i: kept[i][2])
        kept.pop(j)
        # neighbours now share a sign; merge them (circularly)
        if len(kept) > 1:
            jl = (j - 1) % len(kept)
            jr = j % len(kept)
            if jl != jr and kept[jl][1] == kept[jr][1]:
                drop = jl if kept[jl][2] <= kept[jr][2] else jr
                kept.pop(drop)
    return kept


def lp_grid_minimax(f, m, *, grid_mult=64, sup_points_per_osc=None) -> BestApproxResult:
    """Discrete Chebyshev LP on a dense grid (fallback and oracle route)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    osc = _osc_hint(f, m)
    n_grid = grid_mult * (osc + 1)
    t = -np.pi + TWO_PI * np.arange(n_grid) / n_grid
    fv = _f_values(f, t)
    B = _basis_matrix(m, t)
    nc = B.shape[1]
    c = np.zeros(nc + 1)
    c[-1] = 1.0
    ones = np.ones((n_grid, 1))
    A = sp.csc_matrix(np.block([[B, -ones], [-B, -ones]]))
    rhs = np.concatenate([fv, -fv])
    res = linprog(c, A_ub=A, b_ub=rhs, bounds=(None, None), method="highs")
    if res.status != 0:
        raise ConvergenceError(f"minimax LP failed: {res.message}")
    poly = _coeffs_to_series(res.x[:nc], m)
    h = float(res.x[-1])
    kw = {} if sup_points_per_osc is None else {"points_per_osc": sup_points_per_osc}
    value = norm_ls(_residual_fn(f, poly), INF, **kw)
    gap = max(value - h, 0.0) + 1e-12 * (1.0 + value)
    return BestApproxResult(value, poly, "lp_grid", gap)


def best_linf(f, m, *, tol=1e-10, max_iter=80, grid_mult=64,
              initial_reference=None, sup_points_per_osc=None) -> BestApproxResult:
    """E_m in the sup-norm by Remez exchange over the 2m-point alternation set."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if isinstance(f, TrigSeries) and f.degree() <= m - 1:
        return BestApproxResult(0.0, f, "remez", 0.0)
    osc = _osc_hint(f, m)
    n_grid = grid_mult * (osc + 1)
    t = -np.pi + TWO_PI * np.arange(n_grid) / n_grid
    fv = _f_values(f, t)
    Bg = _basis_matrix(m, t)
    need = 2 * m

    if initial_reference is None:
        x = -np.pi + np.pi * np.arange(need) / m
    else:
        x = np.sort(np.asarray(initial_reference, dtype=np.float64))
        if x.size != need:
            raise ValueError(f"initial reference must contain {need} points")
    alt = np.where(np.arange(need) % 2 == 0, 1.0, -1.0)
    grid_h = TWO_PI / n_grid

    def fallback():
        return lp_grid_minimax(f, m, grid_mult=grid_mult,
                               sup_points_per_osc=sup_points_per_osc)

    h = 0.0
    best_defect = math.inf
    stalled = 0
    for _ in range(max_iter):
        A = np.column_stack([_basis_matrix(m, x), alt])
        try:
            sol = np.linalg.solve(A, _f_values(f, x))
        except np.linalg.LinAlgError:
            return fallback()
        coef, h = sol[:-1], abs(float(sol[-1]))

        def resid(pts):
            pts = np.atleast_1d(np.asarray(pts, dtype=np.float64))
            return _f_values(f, pts) - _basis_matrix(m, pts) @ coef

        e = fv - Bg @ coef
        av = np.abs(e)
        peaks = (av >= np.roll(av, 1)) & (av >= np.roll(av, -1)) & (av > 0)
        idx = np.nonzero(peaks)[0]
        kept = _collapse_alternating(idx, e[idx])
        kept = _trim_to(kept, need)
        if len(kept) != need:
            return fallback()
        # polish the grid peaks on the continuous residual, all at once
        gi = np.array([k[0] for k in sorted(kept)])
        new_x, _ = golden_maximize_batch(lambda pts: np.abs(resid(pts)),
                                         t[gi] - grid_h, t[gi] + grid_h)
        new_e = resid(new_x)
        emax = max(float(av.max()), float(np.max(np.abs(new_e))))
        defect = emax - h
        if defect <= tol * max(emax, 1e-300):
            break
        signs = np.sign(new_e)
        if np.any(signs == 0) or np.any(signs[1:] * signs[:-1] > 0):
            return fallback()
        x = new_x
        alt = signs
        # exchange can overshoot early; give up only after a patience window
        if defect < best_defect * 0.9:
            best_defect = defect
            stalled = 0
        else:
            stalled += 1
        if stalled >= 10:
            return fallback()
    else:
        return fallback()

    poly = _coeffs_to_series(coef, m)
    kw = {} if sup_points_per_osc is None else {"points_per_osc": sup_points_per_osc}
    value = norm_ls(_residual_fn(f, poly), INF, **kw)
    ref_resid = _f_values(f, x) - poly.values(x)
    lower = float(np.min(np.abs(ref_resid)))
    signs = np.sign(ref_resid)
    alternating = np.all(signs[1:] * signs[:-1] < 0)
    gap = value - lower if alternating else value
    return BestApproxResult(value, poly, "remez", max(gap, 0.0))


# ---------------------------------------------------------------------------
# L1: grid LP in dual form
# ---------------------------------------------------------------------------

def _l1_grid_solve(f, m, n_grid):
    t = -np.pi + TWO_PI * np.arange(n_grid) / n_grid
    fv = _f_values(f, t)
    B = _basis_matrix(m, t)
    w = np.full(n_grid, TWO_PI / n_grid)
    bounds = np.column_stack([-w, w])
    res = linprog(-fv, A_eq=sp.csc_matrix(B.T), b_eq=np.zeros(B.shape[1]),
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise ConvergenceError(f"L1 LP failed: {res.message}")
    coef = -res.eqlin.marginals
    return -float(res.fun), coef


def best_l1(f, m, *, grid_size=None) -> BestApproxResult:
    """E_m in L1 on a trapezoid grid; the LP is solved in dual form.

    The dual maximizes int f g over |g| <= 1 with g orthogonal to the
    polynomial space; the optimal coefficients are the negated equality
    multipliers.  The certified gap is estimated from one grid doubling.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    osc = _osc_hint(f, m)
    n_grid = int(grid_size) if grid_size else max(64 * m, 16 * (osc + 1))
    val_lo, _ = _l1_grid_solve(f, m, n_grid)
    val_hi, coef = _l1_grid_solve(f, m, 2 * n_grid)
    poly = _coeffs_to_series(coef, m)
    gap = abs(val_hi - val_lo) + 1e-12 * (1.0 + abs(val_hi))
    return BestApproxResult(val_hi, poly, "lp_grid", gap)


# ---------------------------------------------------------------------------
# 1 < s < inf: smooth convex minimization
# ---------------------------------------------------------------------------

def best_ls(f, m, s, *, tol=1e-9, max_iter=300) -> BestApproxResult:
    """E_m in L_s for 1 < s < inf.

    Newton with exact Hessian quadrature for s >= 2 (the integrand
    |r|^{s-2} is continuous there); Barzilai-Borwein damped gradient with
    backtracking for 1 < s < 2 where the objective is only C^1.
    """
    s = float(s)
    if not 1.0 < s < INF:
        raise ValueError("best_ls needs 1 < s < inf; use best_l1 / best_linf at the ends")
    if m < 1:
        raise ValueError("m must be >= 1")
    osc = _osc_hint(f, m)
    # fixed composite Gauss-Legendre grid for the optimization loop
    panels = max(64, 4 * (osc + 1))
    edges = np.linspace(-np.pi, np.pi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    fv = _f_values(f, t)
    B = _basis_matrix(m, t)

    def objective(c):
        r = fv - B @ c
        ar = np.abs(r)
        G = float(np.dot(w, ar ** s))
        g = -s * (B.T @ (w * ar ** (s - 1.0) * np.sign(r)))
        return G, g, r, ar

    # Parseval start
    if isinstance(f, TrigSeries):
        start = best_l2(f, m).optimal_poly
    else:
        start = best_l2(f, m, rel_tol=1e-9).optimal_poly
    c = np.zeros(2 * m - 1)
    c[0] = 0.5 * start.a0
    for k in range(1, m):
        ak, bk = start.coef(k)
        c[2 * k - 1] = ak
        c[2 * k] = bk

    G, g, r, ar = objective(c)
    step = np.zeros_like(c)
    g_prev = None
    gap_units = math.inf
    g_floor = 1e-13 * (1.0 + float(np.linalg.norm(g, np.inf)))
    for it in range(max_iter):
        value_scale = max(G, 1e-300) ** ((s - 1.0) / s)
        if np.linalg.norm(g, np.inf) <= max(tol * s * value_scale, g_floor):
            break
        if s >= 2.0:
            H = (B.T * (s * (s - 1.0) * w * ar ** (s - 2.0))) @ B
            H[np.diag_indices_from(H)] += 1e-14 * max(np.trace(H) / H.shape[0], 1e-300)
            try:
                step = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                step = -g
            gap_units = float(np.dot(g, np.linalg.solve(H, g))) if np.all(np.isfinite(H)) else math.inf
        else:
            if g_prev is None or not np.any(step):
                step = -g / max(np.linalg.norm(g), 1e-300)
            else:
                dg = g - g_prev
                denom = float(np.dot(step, dg))
                bb = float(np.dot(step, step)) / denom if abs(denom) > 1e-300 else 1.0
                step = -abs(bb) * g
            gap_units = float(np.linalg.norm(g) * np.linalg.norm(step))
        # backtracking line search
        lam = 1.0
        for _bt in range(60):
            G_new, g_new, r_new, ar_new = objective(c + lam * step)
            if G_new <= G + 1e-4 * lam * float(np.dot(g, step)):
                break
            lam *= 0.5
        g_prev = g
        c = c + lam * step
        step = lam * step
        G, g, r, ar = G_new, g_new, r_new, ar_new
    else:
        resid = float(np.linalg.norm(g, np.inf))
        raise ConvergenceError(
            f"L_s descent did not reach tol={tol} in {max_iter} iterations "
            f"(gradient residual {resid:.3e})", residual=resid)

    poly = _coeffs_to_series(c, m)
    value = norm_ls(_residual_fn(f, poly), s)
    gap = gap_units / (s * max(value, 1e-300) ** (s - 1.0)) if value > 0 else 0.0
    return BestApproxResult(value, poly, "convex_ls", gap)


def best_approx(f, m, s, **kw) -> BestApproxResult:
    """Dispatch to the right solver for the exponent s."""
    s = float(s)
    if s == 2.0:
        return best_l2(f, m, **kw)
    if s == INF:
        return best_linf(f, m, **kw)
    if s == 1.0:
        return best_l1(f, m, **kw)
    return best_ls(f, m, s, **kw)


# ---------------------------------------------------------------------------
# extremal constructions
# ---------------------------------------------------------------------------

def _cos_zero_breakpoints(m, beta):
    ks = np.arange(2 * m)
    tk = (np.pi / 2.0 + ks * np.pi - beta * np.pi / 2.0) / m
    return np.mod(tk + np.pi, TWO_PI) - np.pi


def cos_power_extremal(m, beta, s, E) -> SampledFunction:
    """The norm-calibrated power of a cosine: c |cos(mt + beta pi/2)|^{s'-1} sign(...) E.

    The constant c = ||cos||_{s'}^{1-s'} makes the L_s norm equal E; the
    zero polynomial is its own best approximation of order m-1 (the dual
    certificate is checked in the tests).  s = 1 is rejected: the conjugate
    power blows up and the sharpness argument needs a different family.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    s = float(s)
    if s <= 1.0:
        raise ValueError("the cos-power construction needs s in (1, inf]")
    sp_ = conjugate_exponent(s)
    c = cos_norm(sp_) ** (1.0 - sp_)
    phase = beta * np.pi / 2.0
    expo = sp_ - 1.0
    E = float(E)

    def evaluator(t):
        base = np.cos(m * t + phase)
        if expo == 0.0:
            return c * E * np.sign(base)
        return c * E * np.abs(base) ** expo * np.sign(base)

    smooth = "piecewise_linear" if expo == 0.0 else ("trig_poly" if expo == 1.0 else "analytic")
    return SampledFunction(evaluator, smoothness=smooth,
                           breakpoints=_cos_zero_breakpoints(m, beta), osc_degree=m)


def _safe_inv_gamma(x):
    if x <= 0.0 and x == int(x):
        return 0.0
    try:
        return 1.0 / math.gamma(x)
    except (OverflowError, ValueError):
        return 0.0


def cos_power_extremal_series(m, beta, s, E, degree) -> TrigSeries:
    """Exact Fourier expansion of the cos-power extremal up to ``degree``.

    The base profile |cos u|^{nu} sign(cos u) expands over odd cosine
    harmonics with coefficients 2^{1-nu} Gamma(nu+1) / (Gamma((nu+j)/2+1)
    Gamma((nu-j)/2+1)); the construction then lives on harmonics j*m.
    """
    m = int(m)
    s = float(s)
    if s <= 1.0:
        raise ValueError("the cos-power construction needs s in (1, inf]")
    sp_ = conjugate_exponent(s)
    nu = sp_ - 1.0
    c = cos_norm(sp_) ** (1.0 - sp_) * float(E)
    a = np.zeros(degree)
    b = np.zeros(degree)
    j = 1
    while j * m <= degree:
        gj = (2.0 ** (1.0 - nu) * math.gamma(nu + 1.0)
              * _safe_inv_gamma((nu + j) / 2.0 + 1.0)
              * _safe_inv_gamma((nu - j) / 2.0 + 1.0))
        k = j * m
        ph = j * beta * np.pi / 2.0
        a[k - 1] += c * gj * math.cos(ph)
        b[k - 1] += -c * gj * math.sin(ph)
        j += 2
    return TrigSeries(0.0, a, b)


def smoothed_sign_wave(m, beta, delta, E) -> SampledFunction:
    """Continuous version of E sign cos(mt + beta pi/2): linear across each
    sign change on [t_k - delta, t_k + delta], constant +-E elsewhere."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    delta = float(delta)
    if not 0.0 < delta < np.pi / (2.0 * m):
        raise ValueError(f"delta must lie in (0, pi/(2m)) = (0, {np.pi / (2 * m):.6g})")
    phase = beta * np.pi / 2.0
    E = float(E)

    def evaluator(t):
        u = m * t + phase
        k_near = np.round((u - np.pi / 2.0) / np.pi)
        du = u - (np.pi / 2.0 + k_near * np.pi)
        d = du / m
        plateau = E * np.sign(np.cos(u))
        ramp = E * np.where(k_near % 2 == 0, -1.0, 1.0) * (d / delta)
        return np.where(np.abs(d) >= delta, plateau, ramp)

    zeros = _cos_zero_breakpoints(m, beta)
    bp = np.concatenate([zeros - delta, zeros + delta])
    return SampledFunction(evaluator, smoothness="piecewise_linear",
                           breakpoints=bp, osc_degree=m)


def smoothed_sign_wave_series(m, beta, delta, E, degree) -> TrigSeries:
    """Closed-form coefficients of the smoothed sign wave.

    Box-smoothing the square wave multiplies the harmonic at j*m by
    sin(j m delta)/(j m delta); the square wave itself contributes
    (4/pi)(-1)^{(j-1)/2}/j on odd j.
    """
    m = int(m)
    delta = float(delta)
    a = np.zeros(degree)
    b = np.zeros(degree)
    j = 1
    while j * m <= degree:
        x = j * m * delta
        sinc = math.sin(x) / x if x != 0.0 else 1.0
        gj = 4.0 / math.pi * ((-1.0) ** ((j - 1) // 2)) / j * sinc
        k = j * m
        ph = j * beta * np.pi / 2.0
        a[k - 1] = float(E) * gj * math.cos(ph)
        b[k - 1] = -float(E) * gj * math.sin(ph)
        j += 2
    return TrigSeries(0.0, a, b)


def smoothing_delta(psi, n, p) -> float:
    """An admissible smoothing width for the sign-wave construction.

    Half the bound (1/m) (psi(m+1)/psi(m))^2 with m = n-p+1, capped away
    from the pi/(2m) admissibility limit.
    """
    if not 1 <= p <= n:
        raise ValueError("require 1 <= p <= n")
    m = n - p + 1
    ratio = float(psi_ratio(psi, np.array([float(m)]))[0])
    bound = ratio * ratio / m
    return min(bound / 2.0, np.pi / (4.0 * m))


def zero_poly_dual_residual(phi: SampledFunction, m, s, *, rel_tol=1e-12) -> float:
    """Largest Fourier coefficient (orders < m) of the normalized dual element.

    For 1 < s < inf the dual element is |phi|^{s-1} sign(phi); for s = inf
    it is sign(phi).  A zero residual certifies that the zero polynomial is
    a best L_s approximation of order m-1.
    """
    s = float(s)
    probe = phi.values(np.linspace(-np.pi, np.pi, 4096, endpoint=False))
    scale = float(np.max(np.abs(probe)))
    if scale == 0.0:
        return 0.0

    def dual(t):
        v = phi.values(t)
        if s == INF:
            return np.sign(v)
        return np.abs(v / scale) ** (s - 1.0) * np.sign(v)

    panels = max(16, 2 * (phi.osc_degree + 1))
    worst = 0.0
    for k in range(0, m):
        for trig in (np.cos, np.sin):
            if k == 0 and trig is np.sin:
                continue
            res = integrate(lambda t, k=k, trig=trig: dual(t) * trig(k * t),
                            -np.pi, np.pi, rel_tol=rel_tol,
                            breakpoints=phi.breakpoints, min_panels=panels)
            worst = max(worst, abs(res.value) / math.pi)
    return worst
