"""Multiplier sequences: values, ratio limits, ratio-gap sups, transforms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vallee_lab.psi import (geometric, gen_poisson, polyharmonic, heat,
                            neumann, custom, psi_value, psi_values, psi_ratio,
                            dq_limit, ratio_gap, ratio_gap_detailed,
                            polyharmonic_ratio_gap_bound, psi_derivative,
                            psi_integral, ratio_upper_bound, tail_sum_bound,
                            PsiError, PsiUnderflowError, UnsupportedPsiError)
from vallee_lab.series import TrigSeries

from conftest import random_series

ALL_KINDS = [geometric(0.5), gen_poisson(0.7, 1.0), gen_poisson(1.0, 2.0),
             polyharmonic(3, 0.6), heat(0.5), neumann(0.4)]


class TestValues:
    def test_geometric(self):
        assert psi_value(geometric(0.5), 3) == pytest.approx(0.125, abs=1e-16)

    def test_neumann(self):
        assert psi_value(neumann(0.5), 2) == pytest.approx(0.125, abs=1e-16)

    def test_heat(self):
        # 2/(q + 1/q) at k=1, q=0.5
        assert psi_value(heat(0.5), 1) == pytest.approx(0.8, abs=1e-15)

    def test_heat_overflow_safe_for_tiny_q(self):
        # naive q^-k would overflow long before k = 2000
        v = psi_value(heat(0.01), 150, on_underflow="zero")
        assert v == pytest.approx(2.0 * 0.01 ** 150, rel=1e-12)

    def test_polyharmonic_order_one_is_geometric(self):
        ks = np.arange(1, 40)
        assert np.allclose(psi_values(polyharmonic(1, 0.6), ks),
                           psi_values(geometric(0.6), ks), rtol=1e-15)

    def test_polyharmonic_hand_value(self):
        # q^k (1 + (1-q^2)/2 * k) at l=2
        q, k = 0.5, 3
        expect = q ** k * (1 + (1 - q * q) / 2 * k)
        assert psi_value(polyharmonic(2, q), k) == pytest.approx(expect, rel=1e-15)

    def test_underflow_signalled_with_index(self):
        with pytest.raises(PsiUnderflowError) as err:
            psi_value(gen_poisson(1.0, 2.0), 100)
        assert err.value.k == 100

    def test_underflow_can_be_zero_filled(self):
        assert psi_value(gen_poisson(1.0, 2.0), 100, on_underflow="zero") == 0.0

    def test_constructor_validation(self):
        with pytest.raises(PsiError):
            geometric(1.0)
        with pytest.raises(PsiError):
            gen_poisson(-1.0)
        with pytest.raises(PsiError):
            gen_poisson(1.0, 0.5)
        with pytest.raises(PsiError):
            custom([1.0, -2.0])


class TestRatioLimit:
    def test_gen_poisson_r1(self):
        assert dq_limit(gen_poisson(math.log(2.0), 1.0)) == pytest.approx(0.5, abs=1e-15)

    def test_gen_poisson_r2_is_zero(self):
        assert dq_limit(gen_poisson(1.0, 2.0)) == 0.0

    def test_neumann(self):
        assert dq_limit(neumann(0.3)) == 0.3

    def test_custom_without_tail_rule_unsupported(self):
        with pytest.raises(UnsupportedPsiError):
            dq_limit(custom([1.0, 0.5, 0.25]))

    def test_custom_with_declared_tail(self):
        assert dq_limit(custom([1.0, 0.5], tail_ratio=0.5)) == 0.5

    def test_ratio_converges_to_limit(self):
        for psi in ALL_KINDS:
            q = dq_limit(psi)
            gap = abs(float(psi_ratio(psi, np.array([200.0]))[0]) - q)
            assert gap <= ratio_gap(psi, 200) + 1e-12


class TestRatioGap:
    def test_neumann_closed_form(self):
        assert ratio_gap(neumann(0.5), 3) == pytest.approx(0.125, abs=1e-16)

    def test_heat_closed_form(self):
        expect = 0.125 * 0.75 / 1.0625
        assert ratio_gap(heat(0.5), 1) == pytest.approx(expect, rel=1e-15)

    def test_geometric_identically_zero(self):
        for m in (1, 7, 123):
            assert ratio_gap(geometric(0.31), m) == 0.0

    def test_numeric_scan_matches_closed_forms(self):
        for psi in (neumann(0.5), heat(0.5), neumann(0.9), heat(0.25)):
            for m in (1, 3, 10):
                closed = ratio_gap(psi, m)
                numeric = ratio_gap(psi, m, force_numeric=True)
                assert numeric == pytest.approx(closed, abs=1e-12)

    def test_gen_poisson_monotone_certificate(self):
        psi = gen_poisson(0.8, 1.7)
        r = ratio_gap_detailed(psi, 5)
        assert r.method == "monotone"
        expect = math.exp(-0.8 * (6 ** 1.7 - 5 ** 1.7))
        assert r.value == pytest.approx(expect, rel=1e-14)

    def test_polyharmonic_bound_values(self):
        assert polyharmonic_ratio_gap_bound(2, 0.5, 10) == pytest.approx(0.05)
        assert polyharmonic_ratio_gap_bound(3, 0.9, 9) == pytest.approx(0.3)
        with pytest.raises(PsiError):
            polyharmonic_ratio_gap_bound(1, 0.5, 3)

    def test_polyharmonic_numeric_below_bound(self):
        for l in (2, 3):
            for q in (0.3, 0.7):
                psi = polyharmonic(l, q)
                for m in (5, 10, 50):
                    eps = ratio_gap(psi, m, window=2000)
                    assert eps <= polyharmonic_ratio_gap_bound(l, q, m) + 1e-15

    def test_diagnostics_report_window(self):
        r = ratio_gap_detailed(polyharmonic(2, 0.5), 4)
        assert r.method == "numeric"
        assert r.window_hi >= 2000


class TestTailCertificates:
    def test_ratio_bound_dominates(self):
        for psi in ALL_KINDS:
            bound = ratio_upper_bound(psi, 20)
            ks = np.arange(21, 500)
            assert np.all(psi_ratio(psi, ks) <= bound + 1e-14)

    def test_tail_sum_bound_dominates_brute_force(self):
        for psi in ALL_KINDS:
            bound = tail_sum_bound(psi, 10)
            brute = float(np.sum(psi_values(psi, np.arange(11, 3000))))
            assert brute <= bound + 1e-15


class TestTransforms:
    def test_derivative_divides(self):
        f = TrigSeries.harmonic(1, cos_coef=0.5)
        d = psi_derivative(f, geometric(0.5), 0.0)
        assert d.coef(1) == pytest.approx((1.0, 0.0), abs=1e-15)

    def test_derivative_rotates_quarter_turn(self):
        f = TrigSeries.harmonic(1, cos_coef=0.5)
        d = psi_derivative(f, geometric(0.5), 1.0)
        # cos(x + pi/2) = -sin x
        assert d.coef(1) == pytest.approx((0.0, -1.0), abs=1e-15)

    def test_half_turn_with_flat_weights(self):
        ones = custom([1.0] * 8, tail_ratio=0.9)
        f = TrigSeries.harmonic(1, cos_coef=1.0)
        d = psi_derivative(f, ones, 2.0)
        assert d.coef(1) == pytest.approx((-1.0, 0.0), abs=1e-14)

    def test_integral_neumann_weights(self):
        phi = TrigSeries.harmonic(2, cos_coef=1.0)
        F = psi_integral(phi, neumann(0.5), 0.0)
        assert F.coef(2) == pytest.approx((0.125, 0.0), abs=1e-16)

    def test_round_trip(self, rng):
        for psi in ALL_KINDS:
            # the r=2 weights leave the double range beyond k ~ 26
            degree = 24 if (psi.kind == "gen_poisson" and psi.r > 1) else 50
            for beta in (0.0, 1.0, 0.37, -2.5):
                phi = random_series(rng, degree)
                back = psi_derivative(psi_integral(phi, psi, beta, a0=1.3), psi, beta)
                assert np.max(np.abs(back.a - phi.a)) < 1e-12
                assert np.max(np.abs(back.b - phi.b)) < 1e-12

    def test_integral_sets_constant_term(self, rng):
        phi = random_series(rng, 5)
        F = psi_integral(phi, geometric(0.5), 0.7, a0=2.0)
        assert F.a0 == 2.0

    def test_integral_rejects_constant_term(self):
        phi = TrigSeries(1.0, np.array([1.0]), np.array([0.0]))
        with pytest.raises(PsiError):
            psi_integral(phi, geometric(0.5), 0.0)

    def test_derivative_underflow_names_harmonic(self):
        f = TrigSeries.harmonic(60, cos_coef=1.0)
        with pytest.raises(PsiUnderflowError) as err:
            psi_derivative(f, gen_poisson(1.0, 2.0), 0.0)
        assert err.value.k == 60

    def test_integral_underflow_is_benign(self):
        phi = TrigSeries.harmonic(60, cos_coef=1.0)
        F = psi_integral(phi, gen_poisson(1.0, 2.0), 0.0)
        assert F.coef(60) == (0.0, 0.0)

    @settings(max_examples=60, deadline=None)
    @given(beta=st.floats(-8.0, 8.0, allow_nan=False),
           ak=st.floats(-5.0, 5.0), bk=st.floats(-5.0, 5.0),
           k=st.integers(1, 30))
    def test_phase_rotation_is_isometry(self, beta, ak, bk, k):
        psi = geometric(0.5)
        f = TrigSeries.harmonic(k, cos_coef=ak, sin_coef=bk)
        d = psi_derivative(f, psi, beta)
        na, nb = d.coef(k)
        lhs = na * na + nb * nb
        rhs = (ak * ak + bk * bk) / psi_value(psi, k) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
