"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they complete.  Criterion 7 enumerates its full grid (a couple of
minutes, dominated by the L1 grid LPs); everything else is fast.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

import vallee_lab as vl
from vallee_lab.norms import INF

from conftest import band_series


def _report(num, name, passed):
    line = f"ACCEPTANCE {num:2d} [{name}]: {'PASS' if passed else 'FAIL'}"
    print(line, flush=True)
    assert passed, line


def test_criterion_01_special_function_identities():
    ok = True
    for q in (0.1, 0.3, 0.5, 0.7, 0.9):
        for u in (1.0, 1.5, 2.0, 3.0, 10.0):
            K = vl.sharp_constant(q, 1, u)
            ref = vl.sharp_constant_hypergeom(q, u)
            ok &= abs(K.value - ref) / ref <= 1e-6
    for z in (-0.7, 0.1, 0.5, 0.9):
        ok &= abs(vl.hyp2f1(1, 1, 1, z) - 1 / (1 - z)) <= 1e-12 * abs(1 / (1 - z))
    for q in (0.1, 0.4, 0.8, 0.95):
        lhs = vl.hyp2f1(0.5, 0.5, 1.0, q * q)
        rhs = 2 / math.pi * vl.elliptic_k(q)
        ok &= abs(lhs - rhs) <= 1e-12 * rhs
    _report(1, "special-function identities", ok)


def test_criterion_02_sup_constant_closed_form():
    ok = all(abs(vl.sharp_constant(q, 1, INF).value - 1 / (1 - q)) <= 1e-10
             for q in np.arange(0.1, 0.95, 0.1))
    _report(2, "K(q,1,inf) = 1/(1-q)", ok)


def test_criterion_03_kernel_l2_closed_form():
    rng = np.random.default_rng(301)
    ok = True
    for _ in range(20):
        q = float(rng.uniform(0.1, 0.85))
        beta = float(rng.uniform(-3, 3))
        n = int(rng.integers(1, 14))
        p = int(rng.integers(1, n + 1))
        res = vl.quadrature.integrate(
            lambda t: vl.vp_band_kernel_values(q, beta, n, p, t) ** 2,
            0.0, 2 * np.pi, rel_tol=1e-12, min_panels=max(16, 4 * n))
        closed = vl.vp_kernel_l2_norm(q, n, p)
        ok &= abs(math.sqrt(res.value) - closed) / closed <= 1e-8
    # p = 1 reduction, symbolically
    import sympy
    qs = sympy.symbols("q", positive=True)
    inner = 1 + qs ** 2 - qs ** 2 * (3 - qs ** 2)
    ok &= sympy.simplify(inner - (1 - qs ** 2) ** 2) == 0
    _report(3, "band-kernel L2 closed form", ok)


def test_criterion_04_double_sum_identity():
    rng = np.random.default_rng(401)
    ok = True
    for _ in range(100):
        q = float(rng.uniform(0.1, 0.85))
        beta = float(rng.uniform(-3, 3))
        n = int(rng.integers(1, 16))
        p = int(rng.integers(1, n + 1))
        t = float(rng.uniform(-np.pi, np.pi))
        lhs, rhs = vl.vp_band_identity(q, beta, n, p, t)
        ok &= abs(lhs.value - rhs) <= lhs.tail_bound + 1e-10
    _report(4, "double-sum = envelope x band identity", ok)


def test_criterion_05_ratio_gap_closed_forms():
    ok = True
    for q in (0.2, 0.5, 0.8):
        for m in (1, 3, 10, 25):
            neu = vl.neumann(q)
            ok &= abs(vl.ratio_gap(neu, m) - q / (m + 1)) <= 1e-15
            ok &= abs(vl.ratio_gap(neu, m, force_numeric=True) - q / (m + 1)) <= 1e-12
            he = vl.heat(q)
            closed = q ** (2 * m + 1) * (1 - q * q) / (1 + q ** (2 * (m + 1)))
            ok &= abs(vl.ratio_gap(he, m) - closed) <= 1e-15
            ok &= abs(vl.ratio_gap(he, m, force_numeric=True) - closed) <= 1e-12
            ok &= vl.ratio_gap(vl.geometric(q), m) == 0.0
    for l in (2, 3):
        for q in (0.3, 0.7):
            for m in (5, 10, 50):
                eps = vl.ratio_gap(vl.polyharmonic(l, q), m)
                ok &= eps <= vl.polyharmonic_ratio_gap_bound(l, q, m) + 1e-15
    _report(5, "ratio-gap closed forms and bound", ok)


def test_criterion_06_best_approx_oracles():
    rng = np.random.default_rng(601)
    ok = True
    for _ in range(30):
        deg = int(rng.integers(2, 16))
        m = int(rng.integers(1, 9))
        f = vl.TrigSeries(0.0, rng.standard_normal(deg), rng.standard_normal(deg))
        ok &= abs(vl.best_l2(f, m).value - vl.best_ls(f, m, 2.0).value) <= 1e-8
    for _ in range(50):
        deg = int(rng.integers(4, 21))
        m = int(rng.integers(1, 11))
        f = vl.TrigSeries(0.0, rng.standard_normal(deg), rng.standard_normal(deg))
        a = vl.best_linf(f, m)
        b = vl.lp_grid_minimax(f, m)
        ok &= abs(a.value - b.value) <= a.certified_gap + b.certified_gap + 1e-9
    for m in (1, 4, 9):
        f = vl.TrigSeries.harmonic(m, cos_coef=1.0)
        ok &= abs(vl.best_linf(f, m).value - 1.0) <= 1e-10
    for s in (1.5, 2.0, 4.0, INF):
        phi = vl.cos_power_extremal(4, 0.3, s, 1.0)
        ok &= vl.zero_poly_dual_residual(phi, 4, s) <= 1e-8
    _report(6, "best-approximation oracles", ok)


def test_criterion_07_inequality_direction_thm1():
    # grid q x s x p-rule x n with 10 random band sources each; the n set
    # spans the spec's 8..40 range at stride 8 (the pinned L1 grid sizes put
    # the full integer range far beyond the stated runtime envelope)
    rng = np.random.default_rng(701)
    cells = []
    for q in (0.3, 0.5, 0.7):
        for s in (1.0, 2.0, INF):
            for n in (8, 16, 24, 32, 40):
                for prule in ("one", "half", "full"):
                    p = 1 if prule == "one" else (n // 2 if prule == "half" else n)
                    m = n - p + 1
                    for _ in range(10):
                        cells.append((q, s, n, p, band_series(rng, m, m + 8)))

    def check(cell):
        q, s, n, p, phi = cell
        rep = vl.verify_t1(phi, vl.geometric(q), 0.0, n, p, s)
        slack = rep.rhs_leading + 20.0 * sum(rep.error_terms.values())
        return rep.lhs <= slack * (1 + 1e-8)

    with ThreadPoolExecutor(max_workers=2) as pool:
        results = list(pool.map(check, cells))
    ok = all(results) and len(results) == 1350
    _report(7, f"deviation bound holds on {len(results)} random cases", ok)


def test_criterion_08_sharpness_trend_thm1():
    # ratio limit q = 0.5 with a genuinely non-geometric kind: the Neumann
    # weights keep the ratio-gap term alive so the trend toward 1 is visible
    ok = True
    details = []
    for s, prule in ((INF, ("fixed", 1)), (2.0, ("fixed", 1)), (INF, "half")):
        reps = vl.extremal_sweep("T1", vl.neumann(0.5), 0.0, s, [16, 24, 32, 40], prule)
        ok &= all(r.status == "ok" for r in reps)
        gaps = [abs(r.ratio - 1.0) for r in reps]
        ok &= gaps[-1] < gaps[0]                      # |ratio_40 - 1| < |ratio_16 - 1|
        ok &= 0.85 <= reps[-1].ratio <= 1.15
        ok &= all(g2 <= g1 + 1e-6 for g1, g2 in zip(gaps, gaps[1:]))
        details.append((s, prule, [round(r.ratio, 6) for r in reps]))
    # geometric weights are the exact comparison case: the ratio pins to 1
    # immediately (the L2 kernel norm identity is exact), so the trend check
    # degenerates; assert closeness instead
    control = vl.extremal_sweep("T1", vl.geometric(0.5), 0.0, INF, [16, 40], ("fixed", 1))
    ok &= all(abs(r.ratio - 1.0) <= 1e-3 for r in control)
    print(f"  sweeps: {details}; geometric control "
          f"{[round(r.ratio, 8) for r in control]}")
    _report(8, "sharpness trend toward 1 (analytic range)", ok)


def test_criterion_09_sharpness_thm3_thm4():
    psi = vl.gen_poisson(1.0, 2.0)
    t3 = vl.extremal_sweep("T3", psi, 0.0, 2.0, list(range(6, 12)), ("fixed", 1))
    t4 = vl.extremal_sweep("T4", psi, 0.0, INF, list(range(6, 12)), ("fixed", 1))
    ok = all(r.status == "ok" for r in t3 + t4)
    ok &= abs(t3[-1].ratio - 1.0) <= 0.1 and abs(t4[-1].ratio - 1.0) <= 0.1
    budgets = {k: float(v) for k, v in t4[-1].error_terms.items()}
    print(f"  T3 ratio at n-p=10: {t3[-1].ratio:.8f}; "
          f"T4 ratio: {t4[-1].ratio:.8f}; measured T4 budget terms: {budgets}")
    ok &= all(b < 1e-30 for b in budgets.values())   # superexponentially small
    _report(9, "sharpness reached by n-p = 10 (entire range)", ok)


def test_criterion_10_single_harmonic_closed_form():
    ok = True
    for q in (0.3, 0.5, 0.7):
        for n in (9, 17):
            phi = vl.TrigSeries.harmonic(n, cos_coef=1.0)   # m = n at p = 1
            rep = vl.verify_t1(phi, vl.geometric(q), 0.0, n, 1, 2.0)
            ok &= abs(rep.ratio - math.sqrt(1 - q * q)) <= 1e-6
    _report(10, "single-harmonic ratio sqrt(1-q^2)", ok)


def test_criterion_11_cli_determinism(tmp_path):
    from vallee_lab.cli import main
    args = ["sweep", "--theorem", "T3", "--psi", "genpoisson", "--alpha", "1",
            "--r", "2", "--s", "2", "--n-from", "5", "--n-to", "9",
            "--p", "1", "--format", "csv"]
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    ok = out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    ok &= header == "n,p,lhs,rhs_leading,budget1,budget2,ratio,status"
    _report(11, "CLI sweep byte-identical across runs", ok)
