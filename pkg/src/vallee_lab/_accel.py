"""Backend dispatch for the hot numeric inner loops.

Everything that touches a dense evaluation grid funnels through the four
primitives below.  Two interchangeable implementations are provided: a pure
numpy one (chunked vectorized recurrences) and a numba-compiled one.  The
active backend is chosen from the environment variable ``VALLEE_LAB_BACKEND``
(``"numba"`` or ``"numpy"``); the default is numba when it imports cleanly,
with a silent fallback to numpy otherwise.

All primitives take and return 1-D float64 arrays and are deterministic:
given identical inputs both backends produce results that agree to a few ulp
(the same cosine/sine angle-addition recurrences are used on both paths).
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "VALLEE_LAB_BACKEND"
_CHUNK = 16384

_numba_impl = None
_active = None


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_eval_trig(a0, a, b, t):
    """Evaluate a0/2 + sum_k a[k-1] cos(kt) + b[k-1] sin(kt) on points t."""
    n = a.shape[0]
    out = np.empty_like(t)
    for lo in range(0, t.shape[0], _CHUNK):
        tc = t[lo:lo + _CHUNK]
        ct = np.cos(tc)
        st = np.sin(tc)
        acc = np.full(tc.shape, 0.5 * a0)
        ck = ct.copy()
        sk = st.copy()
        if n >= 1:
            acc += a[0] * ck + b[0] * sk
        for k in range(2, n + 1):
            ck, sk = ck * ct - sk * st, sk * ct + ck * st
            acc += a[k - 1] * ck + b[k - 1] * sk
        out[lo:lo + _CHUNK] = acc
    return out


def _np_eval_trig_sparse(ks, ca, cb, t):
    """Evaluate sum_i ca[i] cos(ks[i] t) + cb[i] sin(ks[i] t) on points t."""
    out = np.empty_like(t)
    for lo in range(0, t.shape[0], _CHUNK):
        tc = t[lo:lo + _CHUNK]
        acc = np.zeros(tc.shape)
        for i in range(ks.shape[0]):
            u = ks[i] * tc
            acc += ca[i] * np.cos(u) + cb[i] * np.sin(u)
        out[lo:lo + _CHUNK] = acc
    return out


def _np_vp_band(q, beta, n, p, t):
    """Envelope-times-band kernel Z(t) * sum_{k=n-p+1}^{n} q^k cos(kt + theta(t) - beta pi/2)."""
    m = n - p + 1
    out = np.empty_like(t)
    for lo in range(0, t.shape[0], _CHUNK):
        tc = t[lo:lo + _CHUNK]
        ct = np.cos(tc)
        st = np.sin(tc)
        theta = np.arctan2(q * st, 1.0 - q * ct)
        z = 1.0 / np.sqrt(1.0 - 2.0 * q * ct + q * q)
        u = m * tc + theta - beta * np.pi / 2.0
        cu = np.cos(u)
        su = np.sin(u)
        qk = q ** m
        acc = qk * cu
        for _k in range(m + 1, n + 1):
            cu, su = cu * ct - su * st, su * ct + cu * st
            qk *= q
            acc += qk * cu
        out[lo:lo + _CHUNK] = z * acc
    return out


def _np_weighted_cos_sum(w, k0, phase, t):
    """Evaluate sum_i w[i] cos((k0 + i) t - phase) on points t."""
    out = np.empty_like(t)
    for lo in range(0, t.shape[0], _CHUNK):
        tc = t[lo:lo + _CHUNK]
        ct = np.cos(tc)
        st = np.sin(tc)
        u = k0 * tc - phase
        cu = np.cos(u)
        su = np.sin(u)
        acc = w[0] * cu
        for i in range(1, w.shape[0]):
            cu, su = cu * ct - su * st, su * ct + cu * st
            acc += w[i] * cu
        out[lo:lo + _CHUNK] = acc
    return out


_NUMPY_IMPL = {
    "eval_trig": _np_eval_trig,
    "eval_trig_sparse": _np_eval_trig_sparse,
    "vp_band": _np_vp_band,
    "weighted_cos_sum": _np_weighted_cos_sum,
}


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily on first use)
# ---------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def eval_trig(a0, a, b, t):
        n = a.shape[0]
        out = np.empty_like(t)
        for j in range(t.shape[0]):
            tj = t[j]
            ct = np.cos(tj)
            st = np.sin(tj)
            ck = ct
            sk = st
            acc = 0.5 * a0
            if n >= 1:
                acc += a[0] * ck + b[0] * sk
            for k in range(2, n + 1):
                ck2 = ck * ct - sk * st
                sk = sk * ct + ck * st
                ck = ck2
                acc += a[k - 1] * ck + b[k - 1] * sk
            out[j] = acc
        return out

    @njit(cache=True)
    def eval_trig_sparse(ks, ca, cb, t):
        out = np.empty_like(t)
        for j in range(t.shape[0]):
            tj = t[j]
            acc = 0.0
            for i in range(ks.shape[0]):
                u = ks[i] * tj
                acc += ca[i] * np.cos(u) + cb[i] * np.sin(u)
            out[j] = acc
        return out

    @njit(cache=True)
    def vp_band(q, beta, n, p, t):
        m = n - p + 1
        out = np.empty_like(t)
        for j in range(t.shape[0]):
            tj = t[j]
            ct = np.cos(tj)
            st = np.sin(tj)
            theta = np.arctan2(q * st, 1.0 - q * ct)
            z = 1.0 / np.sqrt(1.0 - 2.0 * q * ct + q * q)
            u = m * tj + theta - beta * np.pi / 2.0
            cu = np.cos(u)
            su = np.sin(u)
            qk = q ** m
            acc = qk * cu
            for _k in range(m + 1, n + 1):
                cu2 = cu * ct - su * st
                su = su * ct + cu * st
                cu = cu2
                qk *= q
                acc += qk * cu
            out[j] = z * acc
        return out

    @njit(cache=True)
    def weighted_cos_sum(w, k0, phase, t):
        out = np.empty_like(t)
        for j in range(t.shape[0]):
            tj = t[j]
            ct = np.cos(tj)
            st = np.sin(tj)
            u = k0 * tj - phase
            cu = np.cos(u)
            su = np.sin(u)
            acc = w[0] * cu
            for i in range(1, w.shape[0]):
                cu2 = cu * ct - su * st
                su = su * ct + cu * st
                cu = cu2
                acc += w[i] * cu
            out[j] = acc
        return out

    return {
        "eval_trig": eval_trig,
        "eval_trig_sparse": eval_trig_sparse,
        "vp_band": vp_band,
        "weighted_cos_sum": weighted_cos_sum,
    }


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _default_backend():
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested in ("numpy", "numba"):
        return requested
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def active_backend():
    """Name of the backend currently in use ('numba' or 'numpy')."""
    global _active
    if _active is None:
        set_backend(_default_backend())
    return _active


def set_backend(name):
    """Select the backend explicitly; raises on unknown names."""
    global _active, _numba_impl
    name = name.lower()
    if name == "numpy":
        _active = "numpy"
    elif name == "numba":
        if _numba_impl is None:
            _numba_impl = _build_numba()
        _active = "numba"
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")


def _impl():
    name = active_backend()
    return _numba_impl if name == "numba" else _NUMPY_IMPL


def _as1d(t):
    arr = np.ascontiguousarray(t, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("expected a 1-D array of evaluation points")
    return arr


def eval_trig(a0, a, b, t):
    """Dense series evaluation: a0/2 + sum a_k cos(kt) + b_k sin(kt)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return _impl()["eval_trig"](float(a0), a, b, _as1d(t))


def eval_trig_sparse(ks, ca, cb, t):
    """Series evaluation restricted to the harmonics listed in ``ks``."""
    ks = np.ascontiguousarray(ks, dtype=np.float64)
    ca = np.ascontiguousarray(ca, dtype=np.float64)
    cb = np.ascontiguousarray(cb, dtype=np.float64)
    return _impl()["eval_trig_sparse"](ks, ca, cb, _as1d(t))


def vp_band(q, beta, n, p, t):
    """Geometric band kernel Z_q(t) * sum_{k=n-p+1..n} q^k cos(kt + theta - beta pi/2)."""
    return _impl()["vp_band"](float(q), float(beta), int(n), int(p), _as1d(t))


def weighted_cos_sum(w, k0, phase, t):
    """Truncated kernel sum: sum_i w[i] cos((k0+i) t - phase)."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape[0] == 0:
        return np.zeros_like(_as1d(t))
    return _impl()["weighted_cos_sum"](w, int(k0), float(phase), _as1d(t))
