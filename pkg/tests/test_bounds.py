import math

import mpmath as mp
import numpy as np
import pytest

from lcsgeom.bounds import (
    TheoremParams,
    binom_upper,
    cardinality_bound_improved,
    entropy_e,
    feasibility_report,
    g_function,
    improved_conditions,
    least_k_exceeding,
    log_binomial,
    required_q_basic,
    thm1_bound,
    thm2_bound,
    thm3_bound,
)
from lcsgeom.errors import UsageError

mp.mp.dps = 60


def mp_entropy(t):
    t = mp.mpf(t)
    if t == 0 or t == 1:
        return mp.mpf(0)
    return -t * mp.log(t) - (1 - t) * mp.log(1 - t)


class TestEntropy:
    def test_half_is_ln2(self):
        assert abs(entropy_e(0.5) - math.log(2)) < 1e-12

    def test_endpoints(self):
        assert entropy_e(0.0) == 0.0
        assert entropy_e(1.0) == 0.0

    def test_point_two(self):
        want = float(mp_entropy(mp.mpf("0.2")))
        assert entropy_e(0.2) == pytest.approx(want, rel=1e-12)
        assert entropy_e(0.2) == pytest.approx(0.500402, abs=5e-7)

    def test_symmetry_and_max(self):
        for t in np.linspace(0.01, 0.99, 33):
            assert entropy_e(float(t)) == pytest.approx(entropy_e(float(1 - t)), rel=1e-12)
            assert entropy_e(float(t)) <= math.log(2) + 1e-15

    def test_domain(self):
        with pytest.raises(UsageError):
            entropy_e(-0.1)
        with pytest.raises(UsageError):
            entropy_e(1.1)


class TestBinomUpper:
    def test_m_equals_n(self):
        log_bound, log_exact = binom_upper(7, 7)
        assert log_bound == pytest.approx(7.0)
        assert log_exact == pytest.approx(0.0, abs=1e-12)

    def test_block_count_form(self):
        # at n = m*k the bound collapses to m * ln(e*k)
        for m, k in ((4, 3), (10, 100), (7, 2)):
            log_bound, _ = binom_upper(m * k, m)
            assert log_bound == pytest.approx(m * math.log(math.e * k), rel=1e-12)

    def test_hand_values(self):
        log_bound, log_exact = binom_upper(10, 3)
        assert math.exp(log_exact) == pytest.approx(120.0, rel=1e-10)
        assert math.exp(log_bound) == pytest.approx((10 * math.e / 3) ** 3, rel=1e-10)

    def test_dominates_exact_on_full_grid(self):
        # margin ln C(n,m) <= m(1 + ln(n/m)) over every 1 <= m <= n <= 10^4
        lg = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, 10**4 + 1)))))
        worst = np.inf
        for n in range(1, 10**4 + 1):
            m = np.arange(1, n + 1)
            exact = lg[n] - lg[m] - lg[n - m]
            bound = m * (1 + np.log(n / m))
            worst = min(worst, float(np.min(bound - exact)))
        assert worst >= 0.0

    def test_domain(self):
        with pytest.raises(UsageError):
            binom_upper(5, 0)
        with pytest.raises(UsageError):
            binom_upper(5, 6)


def mp_thm1_log(n, k, eps, delta):
    n, k, eps, delta = map(mp.mpf, (n, k, eps, delta))
    return -n * (-mp.log(mp.e * k) / k + delta**2 * eps**2 / 16)


def mp_thm3_log(n, k, eps, delta):
    n, k, eps, delta = map(mp.mpf, (n, k, eps, delta))
    t1 = mp.e ** (-n * (-mp.log(mp.e * k) / k + delta**2 * eps**2 / 64))
    t2 = mp.e ** (n * (mp_entropy(eps / 2) - mp.log(2)) / k)
    return mp.log(t1 + t2)


class TestTheoremBounds:
    def test_thm1_vacuous_example(self):
        params = TheoremParams(n=1000, k=2, eps=0.5, delta=0.5)
        report = thm1_bound(params)
        assert report.vacuous
        assert report.terms["rate"] == pytest.approx(
            -math.log(2 * math.e) / 2 + 0.25 * 0.25 / 16, rel=1e-12
        )

    def test_thm1_boundary(self):
        # pick k, n and solve delta so the rate is exactly zero
        k, n, eps = 100, 10_000, 0.5
        delta = math.sqrt(16 * math.log(math.e * k) / k) / eps
        params = TheoremParams(n=n, k=k, eps=eps, delta=delta)
        report = thm1_bound(params)
        assert abs(report.log_value) < 1e-6
        assert report.vacuous == (report.log_value >= 0)

    def test_thm1_minimal_nonvacuous_k_order(self):
        # eps = 0.2, delta = 0.1: the 16-constant fixed point sits near 5.7e5
        k_min = least_k_exceeding(16 / (0.2**2 * 0.1**2))
        assert 10**5 < k_min < 10**7
        low = TheoremParams(n=(k_min - 1) * 2, k=k_min - 1, eps=0.2, delta=0.1)
        high = TheoremParams(n=k_min * 2, k=k_min, eps=0.2, delta=0.1)
        assert thm1_bound(low).terms["rate"] <= 0 < thm1_bound(high).terms["rate"]

    def test_thm1_matches_mpmath(self):
        for n, k, eps, delta in [
            (1000, 2, 0.5, 0.5),
            (10**8, 10**7, 0.2, 0.1),
            (10**12, 10**6, 0.3, 0.05),
        ]:
            params = TheoremParams(n=n, k=k, eps=eps, delta=delta)
            want = float(mp_thm1_log(n, k, eps, delta))
            assert thm1_bound(params).log_value == pytest.approx(want, rel=1e-9)

    def test_thm2_exactly_twice(self):
        for n, k in ((1000, 2), (10**8, 10**7)):
            params = TheoremParams(n=n, k=k, eps=0.2, delta=0.1)
            one = thm1_bound(params)
            two = thm2_bound(params)
            assert two.value == 2.0 * one.value
            assert two.log_value == math.log(2.0) + one.log_value
            assert two.terms["rate"] == one.terms["rate"]

    def test_thm2_nonvacuous_example(self):
        params = TheoremParams(n=10**8, k=10**7, eps=0.2, delta=0.1)
        report = thm2_bound(params)
        assert not report.vacuous and report.value < 1

    def test_thm3_both_terms_small(self):
        params = TheoremParams(n=10**9, k=4 * 10**6, eps=0.2, delta=0.1)
        report = thm3_bound(params)
        assert not report.vacuous
        assert report.terms["log_interval_term"] < 0
        assert report.terms["log_counting_term"] < 0

    def test_thm3_near_one_eps(self):
        params = TheoremParams(n=100, k=10, eps=0.999, delta=0.5)
        report = thm3_bound(params)
        assert not report.terms["counting_term_vacuous"]
        assert math.exp(report.terms["log_counting_term"]) > 0.9

    def test_thm3_decay_condition(self):
        # interval term decays iff k beats the 64-constant fixed point
        eps, delta = 0.2, 0.1
        k_min = least_k_exceeding(64 / (eps**2 * delta**2))
        below = TheoremParams(n=(k_min - 1), k=k_min - 1, eps=eps, delta=delta)
        above = TheoremParams(n=k_min, k=k_min, eps=eps, delta=delta)
        assert thm3_bound(below).terms["log_interval_term"] >= 0
        assert thm3_bound(above).terms["log_interval_term"] < 0

    def test_thm3_matches_mpmath(self):
        for n, k, eps, delta in [
            (10**9, 4 * 10**6, 0.2, 0.1),
            (1000, 10, 0.6, 0.4),
            (10**6, 100, 0.9, 0.9),
        ]:
            params = TheoremParams(n=n, k=k, eps=eps, delta=delta)
            want = float(mp_thm3_log(n, k, eps, delta))
            assert thm3_bound(params).log_value == pytest.approx(want, rel=1e-9)


class TestCardinality:
    def test_improved_smaller_for_small_eps(self):
        params = TheoremParams(
            n=1000, k=100, eps=0.01, delta=0.1, p1=0.9, p2=1.1
        )
        out = cardinality_bound_improved(params)
        assert out["improved_smaller"]

    def test_single_block(self):
        params = TheoremParams(n=100, k=100, eps=0.1, delta=0.1, p1=0.5, p2=1.5)
        out = cardinality_bound_improved(params)
        want = math.log(100.0) + 0.1 * math.log(math.e * 100 / 0.1) + entropy_e(0.1)
        assert out["log_improved"] == pytest.approx(want, rel=1e-12)

    def test_golden_value_and_mpmath(self):
        params = TheoremParams(n=1000, k=100, eps=0.1, delta=0.1, p1=0.5, p2=1.5)
        out = cardinality_bound_improved(params)
        k, eps, m = mp.mpf(100), mp.mpf("0.1"), 10
        want = m * (
            mp.log((mp.mpf("1.5") - mp.mpf("0.5")) * k)
            + eps * mp.log(mp.e * k / eps)
            + mp_entropy(eps)
        )
        assert out["log_improved"] == pytest.approx(float(want), rel=1e-9)


class TestRequiredQ:
    def test_hand_value(self):
        out = required_q_basic(1, 0.5)
        assert out["linear"] == pytest.approx(1 / 1296, rel=1e-12)

    def test_paper_scale(self):
        out = required_q_basic(1_260_000, 0.2)
        assert -69 <= out["log10"] <= -66

    def test_domain(self):
        with pytest.raises(UsageError):
            required_q_basic(0, 0.5)
        with pytest.raises(UsageError):
            required_q_basic(10, 2.0)


class TestLeastK:
    def test_least_property(self):
        for c in (0.5, 3.7, 1e3, 1.6e5, 1e9):
            k = least_k_exceeding(c)
            assert k > c * math.log(math.e * k)
            if k > 1:
                assert not (k - 1 > c * math.log(math.e * (k - 1)))

    def test_paper_scenario(self):
        k = least_k_exceeding(64 / (0.2**2 * 0.1**2))
        assert abs(math.log10(k) - math.log10(1.26e6)) <= 3


class TestImprovedConditions:
    PROBE = dict(eps=0.3, delta=0.2, p1=0.8, p2=1.2, eps1=0.1, eps2=0.2)

    def test_qk_matches_mpmath(self):
        params = TheoremParams(n=10**5, k=10**5, **self.PROBE)
        out = improved_conditions(params)
        k = mp.mpf(10**5)
        eps1, eps2 = mp.mpf("0.1"), mp.mpf("0.2")
        bracket = (
            (mp.mpf("1.2") - mp.mpf("0.8")) * k
            * (mp.e * k / eps1) ** eps1
            * mp.e ** (mp_entropy(eps1) + mp_entropy(eps2))
        )
        want = float(-mp.log10(bracket) / eps2)
        assert out["q_threshold_log10"] == pytest.approx(want, rel=1e-9)

    def test_combined_equals_qk_at_fixed_point(self):
        # substituting k = 16 ln(ek)/(eps1^2 delta^2) makes the two forms agree
        eps1, delta = 0.1, 0.2
        c = 16 / (eps1**2 * delta**2)
        k = least_k_exceeding(c)
        params = TheoremParams(n=k, k=k, eps=0.3, delta=delta,
                               p1=0.8, p2=1.2, eps1=eps1, eps2=0.2)
        out = improved_conditions(params)
        assert out["combined_log10"] == pytest.approx(out["q_threshold_log10"], abs=0.01)

    def test_k_condition_boolean(self):
        params = TheoremParams(n=10**6, k=10**6, **self.PROBE)
        out = improved_conditions(params)
        assert out["k_condition"] == (10**6 > 16 * math.log(math.e * 10**6) / (0.1**2 * 0.2**2))
        assert out["k_required"] == least_k_exceeding(16 / (0.1**2 * 0.2**2))

    def test_paper_order_scenarios(self):
        # published round k = 1e5; leading-order budgets near the printed values
        params = TheoremParams(n=10**5, k=10**5, **self.PROBE)
        assert abs(improved_conditions(params)["leading_log10"] + 25) <= 2
        p3 = TheoremParams(n=10**5, k=10**5, eps=0.4, delta=0.2,
                           p1=0.8, p2=1.2, eps1=0.1, eps2=0.3)
        assert abs(improved_conditions(p3)["leading_log10"] + 15) <= 2
        pk = TheoremParams(n=1000, k=1000, eps=0.5, delta=0.2,
                           p1=0.95, p2=1.05, eps1=0.1, eps2=0.4)
        assert abs(improved_conditions(pk)["leading_log10"] + 5) <= 2


class TestGFunction:
    def test_decreasing_in_eps2(self):
        vals = [g_function(10**5, 0.1, e2, 0.2, 0.8, 1.2) for e2 in (0.1, 0.2, 0.3, 0.4)]
        assert all(a < b for a, b in zip(vals, vals[1:]))  # log10 grows as eps2 grows

    def test_tiny_at_equal_small_eps(self):
        val = g_function(10**10, 0.1, 0.1, 0.2, 0.7, 1.3)
        assert val < -30

    def test_dominates_combined_on_grid(self):
        rng = np.random.default_rng(55)
        for _ in range(100):
            k = int(rng.integers(10, 10**6))
            eps1 = float(rng.uniform(0.05, 0.4))
            eps2 = float(rng.uniform(0.05, 0.4))
            delta = float(rng.uniform(0.05, 0.5))
            p1 = float(rng.uniform(0.3, 0.95))
            p2 = float(rng.uniform(1.05, 3.0))
            params = TheoremParams(n=k, k=k, eps=0.3, delta=delta,
                                   p1=p1, p2=p2, eps1=eps1, eps2=eps2)
            combined = improved_conditions(params)["combined_log10"]
            assert g_function(k, eps1, eps2, delta, p1, p2) >= combined

    def test_domain(self):
        with pytest.raises(UsageError):
            g_function(0, 0.1, 0.1, 0.2, 0.5, 2.0)
        with pytest.raises(UsageError):
            g_function(10, 0.1, 0.1, -0.2, 0.5, 2.0)


class TestFeasibility:
    def test_basic_scenario(self):
        report = feasibility_report(eps=0.2, delta=0.1)
        assert abs(math.log10(report["basic"]["k_min"]) - math.log10(1.26e6)) <= 3
        assert report["basic"]["q_threshold_log10"] <= -66
        assert report["basic"]["verdict"] == "infeasible for Monte Carlo"

    def test_improved_scenario_verdict(self):
        report = feasibility_report(
            eps=0.3, delta=0.2, eps1=0.1, eps2=0.2, p1=0.8, p2=1.2
        )
        assert "improved" in report
        assert report["improved"]["verdict"] == "difficult for Monte Carlo"

    def test_q_hat_comparison(self):
        report = feasibility_report(
            eps=0.3, delta=0.2, eps1=0.1, eps2=0.4, p1=0.95, p2=1.05, q_hat=1e-4
        )
        qh = report["q_hat"]
        assert qh["verdict"] == "q_hat too large"
        assert qh["margin_log10"] < 0

    def test_q_hat_within_budget(self):
        report = feasibility_report(eps=0.5, delta=0.9, q_hat=1e-9)
        # basic threshold at eps=0.5, delta=0.9: k_min small, budget ~ (6k)^-4
        assert report["q_hat"]["verdict"] in ("q_hat within budget", "q_hat too large")
        ok = report["q_hat"]["log10"] <= report["q_hat"]["threshold_log10"]
        assert (report["q_hat"]["verdict"] == "q_hat within budget") == ok

    def test_extreme_grids_stay_finite(self):
        for k in (1, 10, 10**6, 10**12):
            n = k * 10**6 if k <= 10**12 // 10**6 else k
            params = TheoremParams(n=n, k=k, eps=0.2, delta=0.1)
            for fn in (thm1_bound, thm2_bound, thm3_bound):
                assert math.isfinite(fn(params).log_value)
        assert math.isfinite(required_q_basic(10**12, 0.01)["log10"])
        assert math.isfinite(g_function(10**12, 0.01, 0.01, 0.01, 0.99, 1.01))
