"""Command-line front end: constants | best-approx | verify | sweep.

Outputs are deterministic: JSON carries the schema tag ``vallee-lab/1`` and
sweeps emit CSV with the fixed header
``n,p,lhs,rhs_leading,budget1,budget2,ratio,status``.  Invalid parameters
exit with code 2, numeric failures with 3, and a sweep with more than 10%
failed rows with 4; errors are mirrored as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import __version__
from .bestapprox import best_approx, ConvergenceError
from .constants import (sharp_constant, sharp_constant_hypergeom, budget_sigma,
                        budget_delta, elliptic_k, SeriesConvergenceError)
from .harness import VERIFIERS, extremal_sweep, resolve_p
from .kernels import KernelTruncationError
from .norms import INF
from .psi import geometric, gen_poisson, polyharmonic, heat, neumann, PsiError
from .quadrature import QuadratureError
from .series import TrigSeries

SCHEMA = "vallee-lab/1"

EXIT_BAD_PARAMS = 2
EXIT_NUMERIC = 3
EXIT_PARTIAL = 4

_NUMERIC_ERRORS = (QuadratureError, ConvergenceError, KernelTruncationError,
                   SeriesConvergenceError, np.linalg.LinAlgError)

_PI_RE = re.compile(r"^([+-]?)(\d+(?:\.\d*)?)?pi(?:/(\d+(?:\.\d*)?))?$")


class CliError(Exception):
    def __init__(self, message, code=EXIT_BAD_PARAMS):
        super().__init__(message)
        self.code = code


def parse_beta(text):
    """A real number, or a rational multiple of pi written like 'pi/2' or '-3pi/4'."""
    text = text.strip().lower()
    m = _PI_RE.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise CliError(f"cannot parse beta value {text!r}")


def parse_s(text):
    text = text.strip().lower()
    if text in ("inf", "infinity", "oo"):
        return INF
    try:
        s = float(text)
    except ValueError:
        raise CliError(f"cannot parse exponent {text!r}")
    if s < 1.0:
        raise CliError(f"exponent must satisfy s >= 1, got {s}")
    return s


def parse_p_rule(text):
    text = text.strip().lower()
    if text == "half":
        return "half"
    if text == "full":
        return "full"
    try:
        return ("fixed", int(text))
    except ValueError:
        raise CliError(f"p must be an integer, 'half' or 'full', got {text!r}")


def build_psi(args):
    kind = args.psi
    try:
        if kind == "geometric":
            _need(args, "q")
            return geometric(args.q)
        if kind == "genpoisson":
            _need(args, "alpha")
            return gen_poisson(args.alpha, args.r if args.r is not None else 1.0)
        if kind == "polyharmonic":
            _need(args, "q")
            _need(args, "l")
            return polyharmonic(args.l, args.q)
        if kind == "heat":
            _need(args, "q")
            return heat(args.q)
        if kind == "neumann":
            _need(args, "q")
            return neumann(args.q)
    except PsiError as exc:
        raise CliError(str(exc))
    raise CliError(f"unknown psi kind {kind!r}")


def _need(args, name):
    if getattr(args, name, None) is None:
        raise CliError(f"--psi {args.psi} requires --{name}")


def _emit(payload, args):
    if getattr(args, "format", "json") == "csv":
        text = payload["csv"]
    else:
        clean = {k: v for k, v in payload.items() if k != "csv"}
        text = json.dumps(clean, indent=2, allow_nan=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x):
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(float(x))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_constants(args):
    q = args.q
    if q is None or not 0.0 < q < 1.0:
        raise CliError(f"q must lie in (0, 1), got {q}")
    p = args.p
    if p < 1:
        raise CliError("p must be a positive integer")
    u_list = [parse_s(u) for u in args.u.split(",")]
    rows = []
    for u in u_list:
        K = sharp_constant(q, p, u, rel_tol=args.tol)
        resid = None
        if p == 1 and u != INF:
            ref = sharp_constant_hypergeom(q, u)
            resid = abs(K.value - ref) / ref
        rows.append({
            "u": "inf" if u == INF else u,
            "K": K.value,
            "est_error": K.est_error,
            "method": K.method,
            "sigma": budget_sigma(u, p),
            "delta": budget_delta(u),
            "hypergeom_residual": resid,
        })
    payload = {
        "schema": SCHEMA, "command": "constants",
        "q": q, "p": p, "elliptic_k": elliptic_k(q), "rows": rows,
    }
    lines = ["u,K,est_error,sigma,delta,hypergeom_residual"]
    for r in rows:
        resid = "" if r["hypergeom_residual"] is None else _fmt(r["hypergeom_residual"])
        lines.append(f"{r['u']},{_fmt(r['K'])},{_fmt(r['est_error'])},"
                     f"{r['sigma']},{r['delta']},{resid}")
    payload["csv"] = "\n".join(lines) + "\n"
    _emit(payload, args)
    return 0


def _load_function(args):
    if args.coeffs:
        with open(args.coeffs) as fh:
            data = json.load(fh)
        return TrigSeries(float(data.get("a0", 0.0)),
                          np.asarray(data.get("a", []), dtype=float),
                          np.asarray(data.get("b", []), dtype=float))
    if args.cos is not None:
        return TrigSeries.harmonic(args.cos, cos_coef=1.0)
    if args.sin is not None:
        return TrigSeries.harmonic(args.sin, sin_coef=1.0)
    raise CliError("provide the function via --coeffs FILE, --cos K or --sin K")


def cmd_best_approx(args):
    f = _load_function(args)
    s = parse_s(args.s)
    if args.m < 1:
        raise CliError("m must be >= 1")
    kw = {}
    if s == 1.0 and args.grid_size:
        kw["grid_size"] = args.grid_size
    res = best_approx(f, args.m, s, **kw)
    payload = {
        "schema": SCHEMA, "command": "best-approx",
        "m": args.m, "s": "inf" if s == INF else s,
        "value": res.value, "solver": res.solver,
        "certified_gap": res.certified_gap,
        "optimal_poly": {"a0": res.optimal_poly.a0,
                         "a": res.optimal_poly.a.tolist(),
                         "b": res.optimal_poly.b.tolist()},
    }
    _emit(payload, args)
    return 0


def _checked_config(args):
    theorem = args.theorem.upper()
    if theorem not in VERIFIERS:
        raise CliError(f"unknown theorem {args.theorem!r}")
    psi = build_psi(args)
    beta = parse_beta(args.beta)
    s = parse_s(args.s) if args.s is not None else INF
    from .psi import dq_limit
    q = dq_limit(psi)
    if theorem in ("T1", "T2") and not 0.0 < q < 1.0:
        raise CliError(f"{theorem} needs a psi kind with ratio limit in (0, 1); got q={q}")
    if theorem in ("T3", "T4") and q != 0.0:
        raise CliError(f"{theorem} needs a psi kind with ratio limit 0 "
                       f"(e.g. genpoisson with r > 1); got q={q}")
    if theorem == "T4" and s != INF:
        raise CliError("T4 is the s = inf bound; pass --s inf or omit it")
    if theorem == "T3" and s == INF:
        raise CliError("T3 covers 1 <= s < inf")
    return theorem, psi, beta, s


def cmd_verify(args):
    theorem, psi, beta, s = _checked_config(args)
    p_rule = parse_p_rule(args.p)
    n = args.n
    if n < 1:
        raise CliError("n must be >= 1")
    p = resolve_p(p_rule, n)
    m = n - p + 1
    phi_kind = args.phi
    if phi_kind == "extremal":
        from .harness import _sweep_one
        rep = _sweep_one(theorem, psi, beta, s, n, p_rule, 1.0, args.sup_points)
    else:
        if phi_kind.startswith("coeffs:"):
            with open(phi_kind.split(":", 1)[1]) as fh:
                data = json.load(fh)
            phi = TrigSeries(float(data.get("a0", 0.0)),
                             np.asarray(data.get("a", []), dtype=float),
                             np.asarray(data.get("b", []), dtype=float))
        elif phi_kind == "harmonic":
            phi = TrigSeries.harmonic(m, cos_coef=1.0)
        else:
            raise CliError(f"unknown --phi choice {phi_kind!r}")
        verifier = VERIFIERS[theorem]
        if theorem == "T4":
            rep = verifier(phi, psi, beta, n, p, sup_points=args.sup_points)
        elif theorem == "T2":
            rep = verifier(phi, psi, beta, n, p, s)
        else:
            rep = verifier(phi, psi, beta, n, p, s, sup_points=args.sup_points)
    payload = {"schema": SCHEMA, "command": "verify", "report": rep.to_dict()}
    _emit(payload, args)
    return 0


def cmd_sweep(args):
    theorem, psi, beta, s = _checked_config(args)
    if theorem == "T2":
        raise CliError("sweep covers T1, T3 and T4 (the L_s bound carries no sharpness claim)")
    p_rule = parse_p_rule(args.p)
    step = args.n_step if args.n_step else 1
    n_list = list(range(args.n_from, args.n_to + 1, step))
    if not n_list:
        raise CliError(f"empty n range {args.n_from}..{args.n_to}")
    reports = extremal_sweep(theorem, psi, beta, s, n_list, p_rule,
                             sup_points=args.sup_points)
    n_ok = sum(1 for r in reports if r.status in ("ok", "projection_warn"))
    lines = ["n,p,lhs,rhs_leading,budget1,budget2,ratio,status"]
    for r in reports:
        budgets = list(r.error_terms.values()) + [0.0, 0.0]
        lines.append(",".join([
            str(r.n), str(r.p), _fmt(r.lhs), _fmt(r.rhs_leading),
            _fmt(budgets[0]), _fmt(budgets[1]), _fmt(r.ratio), r.status,
        ]))
    payload = {
        "schema": SCHEMA, "command": "sweep", "theorem": theorem,
        "psi": psi.describe(), "beta": beta, "s": "inf" if s == INF else s,
        "rows": [r.to_dict() for r in reports],
        "csv": "\n".join(lines) + "\n",
    }
    _emit(payload, args)
    return 0 if n_ok >= 0.9 * len(reports) else EXIT_PARTIAL


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_psi_args(sp):
    sp.add_argument("--psi", default="geometric",
                    choices=["geometric", "genpoisson", "polyharmonic", "heat", "neumann"])
    sp.add_argument("--q", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--l", type=int)


def _add_io_args(sp):
    sp.add_argument("--format", default="json", choices=["json", "csv"])
    sp.add_argument("--out", default=None, help="output path (stdout when omitted)")


def build_parser():
    ap = argparse.ArgumentParser(prog="vallee-lab",
                                 description="Summation means, best approximation "
                                             "and deviation-bound verification")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="sharp constants and special-function cross-checks")
    c.add_argument("--q", type=float, required=True)
    c.add_argument("--p", type=int, default=1)
    c.add_argument("--u", default="1,2,inf", help="comma list of exponents, e.g. 1,1.5,2,inf")
    c.add_argument("--tol", type=float, default=1e-10)
    _add_io_args(c)
    c.set_defaults(fn=cmd_constants)

    b = sub.add_parser("best-approx", help="best approximation of a stored series")
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--s", default="2")
    b.add_argument("--coeffs", default=None, help="JSON file with a0, a, b arrays")
    b.add_argument("--cos", type=int, default=None, help="use the single harmonic cos(Kt)")
    b.add_argument("--sin", type=int, default=None, help="use the single harmonic sin(Kt)")
    b.add_argument("--grid-size", type=int, default=None)
    _add_io_args(b)
    b.set_defaults(fn=cmd_best_approx)

    v = sub.add_parser("verify", help="one deviation-bound report at a single (n, p)")
    v.add_argument("--theorem", default="T1")
    _add_psi_args(v)
    v.add_argument("--beta", default="0")
    v.add_argument("--s", default=None)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--p", default="1", help="integer, 'half' or 'full'")
    v.add_argument("--phi", default="harmonic",
                   help="'harmonic' (cos((n-p+1)t)), 'extremal', or 'coeffs:FILE'")
    v.add_argument("--sup-points", type=int, default=None,
                   help="sup-norm grid points per oscillation (default 4096)")
    _add_io_args(v)
    v.set_defaults(fn=cmd_verify)

    w = sub.add_parser("sweep", help="extremal sharpness sweep over a range of n")
    w.add_argument("--theorem", default="T1")
    _add_psi_args(w)
    w.add_argument("--beta", default="0")
    w.add_argument("--s", default=None)
    w.add_argument("--n-from", type=int, required=True)
    w.add_argument("--n-to", type=int, required=True)
    w.add_argument("--n-step", type=int, default=1)
    w.add_argument("--p", default="1", help="integer, 'half' or 'full'")
    w.add_argument("--sup-points", type=int, default=256,
                   help="sup-norm grid points per oscillation inside the sweep")
    _add_io_args(w)
    w.set_defaults(fn=cmd_sweep)
    return ap


def _error_json(exc, code):
    return json.dumps({"schema": SCHEMA,
                       "error": {"type": type(exc).__name__,
                                 "message": str(exc), "exit_code": code}}) + "\n"


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        sys.stderr.write(_error_json(exc, exc.code))
        return exc.code
    except (PsiError, ValueError) as exc:
        sys.stderr.write(_error_json(exc, EXIT_BAD_PARAMS))
        return EXIT_BAD_PARAMS
    except _NUMERIC_ERRORS as exc:
        sys.stderr.write(_error_json(exc, EXIT_NUMERIC))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
