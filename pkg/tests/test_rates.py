"""Closed-form rate algebra: exponent tables, limits, and consistency."""

import math

import numpy as np
import pytest

from kqreg.rates import (
    RateParams,
    alpha_es,
    alpha_es_theta,
    alpha_general,
    alpha_quantile,
    alpha_sc2,
    beta_es,
    beta_quantile,
    figure_curve,
    table1,
    table2,
    theta_from_p,
)

from table_values import TABLE2_EXPECTED


class TestAlphaGeneral:
    def test_term3_active_cell(self):
        res = alpha_general(0.5, 1.0, 1.0, 1.0)
        assert res.value == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert res.argmin_term == 3

    def test_high_capacity_cell(self):
        res = alpha_general(0.5, 1.0, 1.0, 1.9)
        assert res.value == pytest.approx(4.0 / 3.9 - 1.0, abs=1e-12)
        assert abs(res.value - 0.026) <= 5e-4

    def test_mid_cell(self):
        assert alpha_general(0.25, 1.0, 0.5, 1.0).value == pytest.approx(4.0 / 3.5 - 1.0, abs=1e-12)

    def test_low_noise_cell(self):
        assert alpha_general(0.1, 1.0, 0.1, 0.1).value == pytest.approx(4.0 / 3.81 - 1.0, abs=1e-12)

    def test_value_equals_named_term(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            res = alpha_general(
                rng.uniform(0.01, 0.5), rng.uniform(0.1, 2.0),
                rng.uniform(0.0, 1.0), rng.uniform(0.01, 1.99),
            )
            assert res.value == min(res.terms)
            assert res.value == res.terms[res.argmin_term - 1]

    def test_accepts_params_object(self):
        p = RateParams(r=0.5, beta=1.0, theta=1.0, zeta=1.0)
        assert alpha_general(p).value == alpha_general(0.5, 1.0, 1.0, 1.0).value

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            alpha_general(0.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            alpha_general(0.6, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            alpha_general(0.5, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            alpha_general(0.5, 1.0, 1.1, 1.0)
        with pytest.raises(ValueError):
            alpha_general(0.5, 1.0, 1.0, 2.0)

    def test_nonincreasing_in_zeta(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            r = rng.uniform(0.01, 0.5)
            beta = rng.uniform(0.2, 1.5)
            theta = rng.uniform(0.05, 1.0)
            z1, z2 = sorted(rng.uniform(0.01, 1.99, size=2))
            assert alpha_general(r, beta, theta, z2).value <= alpha_general(r, beta, theta, z1).value + 1e-12


class TestTable2:
    def test_all_27_cells_match_published_values(self):
        rows = table2()
        assert len(rows) == 27
        for row in rows:
            key = (row["r"], row["theta"], row["zeta"])
            assert abs(row["alpha"] - TABLE2_EXPECTED[key]) <= 5e-4, key

    def test_grid_order(self):
        rows = table2()
        assert [r["r"] for r in rows[:3]] == [0.5, 0.5, 0.5]
        assert [r["zeta"] for r in rows[:3]] == [0.1, 1.0, 1.9]


class TestTable1:
    def test_closed_form_rows(self):
        for row in table1():
            if row["kind"] != "value":
                continue
            r = row["r"]
            if (row["theta"], row["zeta"]) == (1.0, 1.0):
                assert row["alpha"] == pytest.approx(min(r, 1.0 / 3.0), abs=1e-6)
            else:
                assert row["alpha"] == pytest.approx(min(r, 1.0 / 7.0), abs=1e-6)

    def test_zero_rows(self):
        zero_rows = [row for row in table1() if row["kind"] == "zero"]
        assert zero_rows
        for row in zero_rows:
            assert abs(row["alpha"]) <= 1e-6

    def test_positive_rows(self):
        pos_rows = [row for row in table1() if row["kind"] == "positive"]
        assert len(pos_rows) == 27
        for row in pos_rows:
            assert row["alpha"] > 0


class TestQuantileExponents:
    def test_reference_values(self):
        assert alpha_quantile(2.0) == pytest.approx(0.5, abs=1e-15)
        assert alpha_quantile(math.inf) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert alpha_quantile(1e-9) == pytest.approx(1.0 / 3.0, abs=1e-6)

    def test_range_for_p_at_least_two(self):
        for p in (2.0, 3.0, 10.0, 1e6):
            assert 0.5 <= alpha_quantile(p) < 2.0 / 3.0

    def test_beta_values(self):
        assert beta_quantile(math.inf) == pytest.approx(4.0 / 3.0, abs=1e-15)
        assert beta_quantile(2.0) == pytest.approx(1.0, abs=1e-15)

    def test_beta_is_twice_alpha(self):
        rng = np.random.default_rng(2)
        for p in list(rng.uniform(0.1, 50.0, size=50)) + [math.inf]:
            assert beta_quantile(p) == pytest.approx(2.0 * alpha_quantile(p), abs=1e-14)

    def test_positive_p_required(self):
        with pytest.raises(ValueError):
            alpha_quantile(0.0)
        with pytest.raises(ValueError):
            beta_quantile(-1.0)

    def test_theta_from_p(self):
        assert theta_from_p(math.inf, 2.0) == 1.0
        assert theta_from_p(2.0, 2.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert theta_from_p(math.inf, 4.0) == 0.5
        with pytest.raises(ValueError):
            theta_from_p(2.0, 1.0)

    def test_schedule_equalizes_all_five_terms(self):
        # with the quantile schedule and vanishing capacity exponent, every
        # term of the general minimum collapses to the quantile exponent
        for p in (1.0, 2.0, 5.0, 10.0, 100.0, math.inf):
            theta = 1.0 if math.isinf(p) else p / (p + 1.0)
            res = alpha_general(0.5, beta_quantile(p), theta, 1e-6)
            target = alpha_quantile(p)
            for term in res.terms:
                assert term == pytest.approx(target, abs=1e-5)


class TestSingleKernelExponents:
    def test_beta_es_is_one_at_theta_one(self):
        for d in (1, 5, 50):
            for a in (1.0, 3.0, 10.0):
                assert beta_es(d, a, 1.0) == 1.0

    def test_beta_es_example(self):
        assert beta_es(1, 1.0, 0.5) == pytest.approx(0.75, abs=1e-15)

    def test_beta_es_limit_in_dimension(self):
        assert beta_es(10**9, 5.0, 0.3) == pytest.approx(1.0, abs=1e-6)

    def test_alpha_es_values(self):
        assert alpha_es(2, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert alpha_es(10**9, 7.0) == pytest.approx(0.0, abs=1e-6)

    def test_alpha_es_theta_reduces_at_theta_one(self):
        for d in (1, 4, 20):
            assert alpha_es_theta(d, 2.0, 1.0) == alpha_es(d, 2.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            alpha_es(0, 1.0)
        with pytest.raises(ValueError):
            alpha_es(3, 0.5)
        with pytest.raises(ValueError):
            beta_es(3, 1.0, 1.5)


class TestComparisonExponent:
    def test_infinite_p_small_xi(self):
        assert alpha_sc2(math.inf, 0.5, 1e-9) == pytest.approx(2.0 / 3.0, abs=1e-8)

    def test_p_two_small_xi(self):
        assert alpha_sc2(2.0, 0.5, 1e-9) == pytest.approx(2.0 / 3.0, abs=1e-8)
        # the first branch alone tends to 3/4; the 2r/(r+1) branch binds
        assert (2.0 + 1.0) * 0.5 / ((2.0 + 2.0) * 0.5) == pytest.approx(0.75)

    def test_r_one_keeps_min_structure(self):
        for xi in (0.1, 0.5, 0.9):
            val = alpha_sc2(10.0, 1.0, xi)
            first = 11.0 / (12.0 + 10.0 * xi)
            assert val == pytest.approx(min(first, 1.0), abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            alpha_sc2(2.0, 1.5, 0.5)
        with pytest.raises(ValueError):
            alpha_sc2(2.0, 0.5, 1.0)


class TestHighDimComparison:
    def test_additive_exponent_eventually_dominates(self):
        # with theta = p/(p+1) the single-kernel exponent drops below the
        # dimension-free quantile exponent once d is large enough
        for p in (1.0, 2.0, 10.0, math.inf):
            theta = theta_from_p(p, 2.0)
            target = alpha_quantile(p)
            threshold = next(
                d for d in range(1, 10001)
                if alpha_es_theta(d, 1.0, theta) < target
            )
            assert threshold < 100
            for d in (threshold, 10 * threshold, 1000 * threshold):
                assert alpha_es_theta(d, 1.0, theta) < target


class TestFigureCurve:
    def test_small_dimension_point(self):
        curve = figure_curve(0.5, 0.5, 1.0, 1.0, 3)
        d, ours, theirs = curve[0]
        assert d == 1
        assert ours == pytest.approx(0.375, abs=1e-12)  # r * beta_es(1,1,0.5)
        assert theirs == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_limits(self):
        curve = figure_curve(0.5, 0.5, 1.0, 1.0, 1)
        big_ours = alpha_general(0.5, beta_es(10**9, 1.0, 0.5), 0.5, 1.0).value
        assert big_ours == pytest.approx(0.143, abs=5e-4)
        assert alpha_es(10**9, 1.0) == pytest.approx(0.0, abs=1e-6)

    def test_crossing_exists(self):
        curve = figure_curve(0.5, 0.5, 1.0, 1.0, 60)
        crossing = [d for d, ours, theirs in curve if ours > theirs]
        assert crossing, "additive exponent should win for large d"
        # single-kernel exponent wins at d = 1
        assert curve[0][1] < curve[0][2]

    def test_row_count(self):
        assert len(figure_curve(0.3, 0.5, 1.0, 2.0, 17)) == 17
        with pytest.raises(ValueError):
            figure_curve(0.3, 0.5, 1.0, 2.0, 0)
