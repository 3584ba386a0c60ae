import math

import numpy as np
import pytest

from conftest import make_pair
from oracles import brute_event_b, oracle_lcs

from lcsgeom.bounds import TheoremParams, entropy_e, thm1_bound
from lcsgeom.core import AlphabetDistribution, StringPair
from lcsgeom.errors import ConfigError, UsageError
from lcsgeom.properties import (
    PropertySpec,
    bound_event_B,
    check_event_B,
    estimate_qk,
    evaluate_property,
)


class TestPropertySpec:
    def test_unknown_id(self):
        with pytest.raises(ConfigError):
            PropertySpec("no_such_property")

    def test_missing_params(self):
        with pytest.raises(ConfigError):
            PropertySpec("lcs_ratio")

    def test_json_roundtrip(self):
        spec = PropertySpec("lcs_ratio", {"theta": 0.5})
        assert PropertySpec.from_json(spec.to_json()) == spec


class TestEvaluate:
    def test_always_true(self):
        pair = StringPair.from_text("ab", "ba")
        assert evaluate_property(PropertySpec("always_true"), pair.x, pair.y) == 1
        assert evaluate_property(PropertySpec("always_false"), pair.x, pair.y) == 0

    def test_lcs_ratio_worked_example(self):
        pair = StringPair.from_text("0010", "0110")
        spec = PropertySpec("lcs_ratio", {"theta": 0.5})
        assert evaluate_property(spec, pair.x, pair.y) == 1  # LCS 3 >= 0.5*4

    def test_length_window(self, binary):
        spec = PropertySpec("length_window", {"lo": 0.5, "hi": 2})
        pair = make_pair([0] * 4, [0] * 10, binary)
        assert evaluate_property(spec, pair.x, pair.y) == 0
        pair2 = make_pair([0] * 4, [0] * 8, binary)
        assert evaluate_property(spec, pair2.x, pair2.y) == 1

    def test_unique_lcs(self):
        unique = StringPair.from_text("abc", "abc")
        assert evaluate_property(PropertySpec("unique_lcs"), unique.x, unique.y) == 1
        ambiguous = StringPair.from_text("mother", "mutter")  # (3,3) vs (3,4)
        assert evaluate_property(PropertySpec("unique_lcs"), ambiguous.x, ambiguous.y) == 0

    def test_score_gap(self):
        pair = StringPair.from_text("0101", "0101")
        spec = PropertySpec("score_gap", {"theta": 0.2, "gamma_star": 0.8})
        # LCS 4 >= (0.8 - 0.2) * 4 = 2.4
        assert evaluate_property(spec, pair.x, pair.y) == 1


class TestEstimateQk:
    def test_always_true_gives_zero(self, binary):
        spec = PropertySpec("always_true")
        est = estimate_qk(binary, spec, 3, 2 / 3, 4 / 3, trials=10, seed=1)
        assert est.q_hat == 0.0

    def test_exact_enumeration_worked_example(self, binary):
        # failure of "LCS >= 1" at k=3, l=3 is exactly P(no common letter) = 2/64
        spec = PropertySpec("lcs_ratio", {"theta": 1 / 3})
        est = estimate_qk(binary, spec, 3, 2 / 3, 4 / 3, trials=10, seed=1)
        per_l = {e.l: e for e in est.per_l}
        assert set(per_l) == {2, 3, 4}
        assert all(e.exact for e in est.per_l)
        assert per_l[3].q == pytest.approx(1 / 32, abs=0)
        assert per_l[2].q == pytest.approx(1 / 16, abs=0)
        assert est.q_hat == pytest.approx(1 / 16, abs=0)

    def test_exact_weighted_alphabet(self):
        skew = AlphabetDistribution(("0", "1"), (0.9, 0.1))
        spec = PropertySpec("lcs_ratio", {"theta": 1.0})  # LCS >= k
        est = estimate_qk(skew, spec, 1, 0.5, 1.5, trials=10, seed=1)
        # k = l = 1: failure iff letters differ: 2 * 0.9 * 0.1
        assert est.per_l[0].q == pytest.approx(0.18, rel=1e-12)

    def test_monte_carlo_agrees_with_exact(self, binary):
        spec = PropertySpec("lcs_ratio", {"theta": 0.5})
        exact = estimate_qk(binary, spec, 6, 0.5, 1.5, trials=0, seed=3)
        mc = estimate_qk(binary, spec, 6, 0.5, 1.5, trials=4000, seed=3, exact_below=1)
        for e_exact, e_mc in zip(exact.per_l, mc.per_l):
            assert e_exact.exact and not e_mc.exact
            tol = 3 * max(e_mc.stderr, 1e-3)
            assert abs(e_exact.q - e_mc.q) <= tol

    def test_q_hat_monotone_in_threshold(self, binary):
        # weakening the property can only lower the failure probability
        prev = None
        for theta in (0.9, 0.6, 0.3, 0.1):
            spec = PropertySpec("lcs_ratio", {"theta": theta})
            est = estimate_qk(binary, spec, 4, 0.75, 1.25, trials=0, seed=1)
            if prev is not None:
                assert est.q_hat <= prev
            prev = est.q_hat

    def test_empty_window(self, binary):
        with pytest.raises(UsageError):
            estimate_qk(binary, PropertySpec("always_true"), 3, 1.2, 1.25, trials=1, seed=0)

    def test_csv(self, binary):
        est = estimate_qk(binary, PropertySpec("always_true"), 2, 0.5, 1.5, trials=1, seed=0)
        lines = est.to_csv().strip().splitlines()
        assert lines[0] == "l,q_l,stderr,exact"
        assert len(lines) == 1 + len(est.per_l)


class TestBoundEventB:
    PARAMS = TheoremParams(
        n=100, k=10, eps=0.3, delta=0.2, p1=0.5, p2=2.0, eps1=0.1, eps2=0.2
    )

    def test_zero_q_reduces_to_interval_term(self):
        report = bound_event_B(self.PARAMS, 0.0)
        want = thm1_bound(
            TheoremParams(n=100, k=10, eps=0.1, delta=0.2, p1=0.5, p2=2.0)
        ).log_value
        assert report.log_value == want
        assert report.terms["log_counting_term"] == -math.inf

    def test_budget_collapse_identity(self):
        # q = (6k)^(-1/eps2) with count base 3 collapses the counting term
        # to exp((H(eps2) - ln 2) m)
        k, eps2, m = 10, 0.2, 10
        q = (6 * k) ** (-1 / eps2)
        report = bound_event_B(self.PARAMS, q, mode="basic", cardinality_base=3.0)
        want = m * (entropy_e(eps2) - math.log(2.0))
        assert report.terms["log_counting_term"] == pytest.approx(want, rel=1e-9)

    def test_improved_matches_mpmath(self):
        import mpmath as mp

        mp.mp.dps = 50
        q_hat = 1e-6
        report = bound_event_B(self.PARAMS, q_hat, mode="improved")
        k, m = mp.mpf(10), 10
        eps1, eps2 = mp.mpf("0.1"), mp.mpf("0.2")
        h = lambda t: -t * mp.log(t) - (1 - t) * mp.log(1 - t)
        bracket = (
            (mp.mpf(2) - mp.mpf("0.5")) * k
            * (mp.e * k / eps1) ** eps1
            * mp.e ** h(eps1)
            * mp.mpf(q_hat) ** eps2
            * mp.e ** h(eps2)
        )
        want = float(m * mp.log(bracket))
        assert report.terms["log_counting_term"] == pytest.approx(want, rel=1e-9)

    def test_monotone_in_q_hat(self):
        values = [
            bound_event_B(self.PARAMS, q).log_value
            for q in (0.0, 1e-12, 1e-6, 1e-3, 0.1, 1.0)
        ]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_domain(self):
        with pytest.raises(UsageError):
            bound_event_B(self.PARAMS, 1.5)
        with pytest.raises(UsageError):
            bound_event_B(self.PARAMS, 0.5, mode="bogus")


class TestCheckEventB:
    def test_always_true_holds(self):
        pair = StringPair.from_text("0010", "0110")
        report = check_event_B(pair.x, pair.y, 2, 0.5, PropertySpec("always_true"))
        assert report.holds
        assert report.min_satisfying_over_optimal == 2

    def test_always_false_fails(self):
        pair = StringPair.from_text("0010", "0110")
        report = check_event_B(pair.x, pair.y, 2, 0.5, PropertySpec("always_false"))
        assert not report.holds
        assert report.min_satisfying_over_optimal == 0

    def test_unary_hand_case(self):
        # n=4, k=2: every piece is nonempty so "LCS >= 1" holds on every
        # (block, piece) pair; the event holds for every eps
        pair = StringPair.from_text("aaaa", "aaaa")
        spec = PropertySpec("lcs_ratio", {"theta": 0.5})
        for eps in (0.1, 0.5, 0.9):
            report = check_event_B(pair.x, pair.y, 2, eps, spec)
            assert report.holds
            assert report.min_satisfying_over_optimal == 2

    def test_agrees_with_enumeration(self, binary):
        rng = np.random.default_rng(73)
        spec = PropertySpec("lcs_ratio", {"theta": 0.5})

        def prop(xs_piece, ys_piece):
            return 1 if oracle_lcs(xs_piece, ys_piece) >= 0.5 * len(xs_piece) else 0

        for _ in range(200):
            m = int(rng.integers(1, 6))
            n = 2 * m
            xs = rng.integers(0, 2, size=n).tolist()
            ys = rng.integers(0, 2, size=n).tolist()
            pair = make_pair(xs, ys, binary)
            for eps in (0.25, 0.5):
                report = check_event_B(pair.x, pair.y, 2, eps, spec)
                want_holds, want_min = brute_event_b(xs, ys, 2, eps, prop)
                assert report.holds == want_holds
                assert report.min_satisfying_over_optimal == want_min

    def test_vacuous_when_not_decomposable(self):
        pair = StringPair.from_text("0011", "1100")
        report = check_event_B(pair.x, pair.y, 2, 0.5, PropertySpec("always_false"))
        assert report.holds and not report.decomposable
        assert report.min_satisfying_over_optimal is None
