"""Closed-form evaluation of the counting and probability bounds.

Everything is computed in log-space so extreme parameter grids
(k up to 1e12, n up to 1e18) stay finite.  A bound whose value reaches 1 is
reported as vacuous rather than clamped: the exponential statements are
asymptotic, and at desk scale most direct evaluations carry no information.

Naming used throughout:
  eps, eps1, eps2 : proportion parameters in (0,1)
  delta           : the curvature gap of the rate curve (positive)
  p1 < 1 < p2     : length-ratio window
  n = m * k       : total length, block count, block length
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import UsageError

_LN10 = math.log(10.0)


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


@dataclass(frozen=True)
class TheoremParams:
    """Parameter block shared by the exponential bounds; n = m * k."""

    n: int
    k: int
    eps: float
    delta: float
    p1: Optional[float] = None
    p2: Optional[float] = None
    eps1: Optional[float] = None
    eps2: Optional[float] = None

    def __post_init__(self):
        if self.k < 1:
            raise UsageError("k must be at least 1")
        if self.n < 1 or self.n % self.k:
            raise UsageError("n must be a positive multiple of k")
        if not (0 < self.eps < 1):
            raise UsageError("eps must lie in (0,1)")
        if self.delta <= 0:
            raise UsageError("delta must be positive")
        for name in ("eps1", "eps2"):
            v = getattr(self, name)
            if v is not None and not (0 < v < 1):
                raise UsageError(f"{name} must lie in (0,1)")
        if (self.p1 is None) != (self.p2 is None):
            raise UsageError("p1 and p2 must be supplied together")
        if self.p1 is not None and not (0 < self.p1 < 1 < self.p2):
            raise UsageError("need 0 < p1 < 1 < p2")

    @property
    def m(self) -> int:
        return self.n // self.k

    def require_window(self) -> tuple[float, float]:
        if self.p1 is None:
            raise UsageError("this bound needs p1 and p2")
        return self.p1, self.p2

    def require_split(self) -> tuple[float, float]:
        if self.eps1 is None or self.eps2 is None:
            raise UsageError("this bound needs eps1 and eps2")
        return self.eps1, self.eps2

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "eps": self.eps,
            "delta": self.delta,
            "p1": self.p1,
            "p2": self.p2,
            "eps1": self.eps1,
            "eps2": self.eps2,
        }


@dataclass(frozen=True)
class BoundReport:
    """A probability-scale bound carried in log-space.

    `value` is exp(log_value) when representable (inf when it overflows);
    vacuous means the bound is >= 1 and carries no information.  `terms`
    lists the log-values of the summands for two-term bounds.
    """

    log_value: float
    value: float
    vacuous: bool
    inputs: dict
    terms: dict[str, float]

    @property
    def log10_value(self) -> float:
        return self.log_value / _LN10

    def to_json(self) -> dict:
        # JSON has no Infinity; the log companions stay informative
        return {
            "log_value": _finite_or_none(self.log_value),
            "log10_value": _finite_or_none(self.log10_value),
            "value": _finite_or_none(self.value),
            "vacuous": self.vacuous,
            "terms": {k: _finite_or_none(v) for k, v in self.terms.items()},
            "inputs": dict(self.inputs),
        }


def _report(log_value: float, inputs: dict, terms: Optional[dict] = None) -> BoundReport:
    try:
        value = math.exp(log_value)
    except OverflowError:
        value = math.inf
    return BoundReport(
        log_value=log_value,
        value=value,
        vacuous=log_value >= 0.0,
        inputs=inputs,
        terms=terms or {},
    )


def _log_add(a: float, b: float) -> float:
    """log(exp(a) + exp(b)) without leaving log-space."""
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def entropy_e(t: float) -> float:
    """Natural-log binary entropy -t*ln(t) - (1-t)*ln(1-t); 0 at the endpoints."""
    if not (0.0 <= t <= 1.0):
        raise UsageError("entropy argument must lie in [0,1]")
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log(t) - (1.0 - t) * math.log(1.0 - t)


def log_binomial(n: int, m: int) -> float:
    """Exact ln C(n, m) via lgamma."""
    if not (0 <= m <= n):
        raise UsageError("need 0 <= m <= n")
    return math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)


def binom_upper(n: int, m: int) -> tuple[float, float]:
    """(ln of the (e*n/m)^m bound, exact ln C(n, m)); the bound dominates."""
    if not (1 <= m <= n):
        raise UsageError("need 1 <= m <= n")
    log_bound = m * (1.0 + math.log(n / m))
    return log_bound, log_binomial(n, m)


def cardinality_bound_improved(params: TheoremParams) -> dict:
    """Log of ((p2-p1)*k * (e*k/eps)^eps * exp(H(eps)))^m, the sharper count
    of interval-respecting cut vectors, compared against the basic m*ln(e*k)."""
    p1, p2 = params.require_window()
    eps, k, m = params.eps, params.k, params.m
    per_block = (
        math.log((p2 - p1) * k)
        + eps * math.log(math.e * k / eps)
        + entropy_e(eps)
    )
    improved = m * per_block
    basic = m * math.log(math.e * k)
    return {
        "log_improved": improved,
        "log_basic": basic,
        "improved_smaller": improved < basic,
    }


def _main_exponent(k: int, eps: float, delta: float, denom: float) -> float:
    """-ln(e*k)/k + delta^2 * eps^2 / denom: positive means real decay."""
    return -math.log(math.e * k) / k + delta * delta * eps * eps / denom


def thm1_bound(params: TheoremParams) -> BoundReport:
    """Failure bound exp(-n * (-ln(e*k)/k + delta^2 eps^2 / 16)) for the
    interval event; vacuous iff the exponent argument is <= 0."""
    rate = _main_exponent(params.k, params.eps, params.delta, 16.0)
    return _report(-params.n * rate, params.to_json(), {"rate": rate})


def thm2_bound(params: TheoremParams) -> BoundReport:
    """Diagonal-band failure bound: exactly twice the interval-event bound."""
    base = thm1_bound(params)
    log_value = math.log(2.0) + base.log_value
    return BoundReport(
        log_value=log_value,
        value=2.0 * base.value,
        vacuous=log_value >= 0.0,
        inputs=base.inputs,
        terms=base.terms,
    )


def thm3_bound(params: TheoremParams) -> BoundReport:
    """Property-event failure bound:
    exp(-n(-ln(e*k)/k + delta^2 eps^2/64)) + exp(n(H(eps/2) - ln 2)/k)."""
    rate = _main_exponent(params.k, params.eps, params.delta, 64.0)
    log_t1 = -params.n * rate
    log_t2 = params.n * (entropy_e(params.eps / 2.0) - math.log(2.0)) / params.k
    report = _report(_log_add(log_t1, log_t2), params.to_json())
    terms = {
        "log_interval_term": log_t1,
        "log_counting_term": log_t2,
        "interval_term_vacuous": log_t1 >= 0.0,
        "counting_term_vacuous": log_t2 >= 0.0,
    }
    return BoundReport(
        log_value=report.log_value,
        value=report.value,
        vacuous=report.vacuous,
        inputs=report.inputs,
        terms=terms,
    )


def required_q_basic(k: int, eps: float) -> dict:
    """Failure-probability budget (6k)^(-2/eps) demanded by the basic
    property theorem, in linear and log10 form."""
    if k < 1:
        raise UsageError("k must be at least 1")
    if not (0 < eps < 1):
        raise UsageError("eps must lie in (0,1)")
    log10_q = -(2.0 / eps) * math.log10(6.0 * k)
    linear = 10.0 ** log10_q if log10_q > -300 else 0.0
    return {"log10": log10_q, "linear": linear}


def least_k_exceeding(c: float) -> int:
    """Least integer k >= 1 with k > c * ln(e*k), by doubling then bisection."""
    if c <= 0:
        return 1

    def ok(k: int) -> bool:
        return k > c * math.log(math.e * k)

    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > 10**18:
            raise UsageError("no feasible k below 1e18")
    if hi == 1:
        return 1
    lo = hi // 2  # ok(lo) is False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def improved_conditions(params: TheoremParams) -> dict:
    """The sharpened feasibility pair for the split proportions eps1/eps2.

    k_condition: k > 16 ln(e*k) / (eps1^2 delta^2), with the least such k.
    q_threshold: the exact budget
        ((p2-p1)*k * (e*k/eps1)^eps1 * exp(H(eps1)+H(eps2)))^(-1/eps2).
    combined: same with k eliminated through the k-condition, i.e.
        (eps1^2 delta^2 / ((p2-p1) * 16 ln(e*k) * (e*k/eps1)^eps1
         * exp(H(eps1)+H(eps2))))^(1/eps2).
    leading: the order-of-magnitude proxy ((p2-p1)*k)^(-1/eps2) that drops
    the slowly-varying factors; this is the quantity the back-of-envelope
    feasibility arithmetic tracks.
    """
    p1, p2 = params.require_window()
    eps1, eps2 = params.require_split()
    k, delta = params.k, params.delta
    c = 16.0 / (eps1 * eps1 * delta * delta)
    k_required = least_k_exceeding(c)
    k_ok = k > c * math.log(math.e * k)

    spread = (p2 - p1) * k
    log_bracket = (
        math.log(spread)
        + eps1 * math.log(math.e * k / eps1)
        + entropy_e(eps1)
        + entropy_e(eps2)
    )
    log10_qk = -(log_bracket / eps2) / _LN10

    log_fraction = (
        2.0 * math.log(eps1)
        + 2.0 * math.log(delta)
        - math.log(p2 - p1)
        - math.log(16.0)
        - math.log(math.log(math.e * k))
        - eps1 * math.log(math.e * k / eps1)
        - entropy_e(eps1)
        - entropy_e(eps2)
    )
    log10_combined = (log_fraction / eps2) / _LN10

    log10_leading = -(math.log(spread) / eps2) / _LN10

    return {
        "k": k,
        "k_condition": k_ok,
        "k_required": k_required,
        "q_threshold_log10": log10_qk,
        "combined_log10": log10_combined,
        "leading_log10": log10_leading,
    }


def g_function(
    k: int, eps1: float, eps2: float, delta: float, p1: float, p2: float
) -> float:
    """log10 of (eps1^2 delta^2 / ((p2-p1) * 16 * ln(3k)))^(1/eps2).

    A simplified stand-in that dominates the combined condition on realistic
    parameter grids: if even this is out of Monte Carlo reach, so is the
    exact budget.
    """
    if k < 1:
        raise UsageError("k must be at least 1")
    for name, v in (("eps1", eps1), ("eps2", eps2)):
        if not (0 < v < 1):
            raise UsageError(f"{name} must lie in (0,1)")
    if delta <= 0 or not (0 < p1 < 1 < p2):
        raise UsageError("need delta > 0 and 0 < p1 < 1 < p2")
    log_fraction = (
        2.0 * math.log(eps1)
        + 2.0 * math.log(delta)
        - math.log(p2 - p1)
        - math.log(16.0)
        - math.log(math.log(3.0 * k))
    )
    return (log_fraction / eps2) / _LN10


# Monte Carlo reach on a desk machine: bands for the feasibility verdict.
_FEASIBLE_LOG10 = -8.0
_HOPELESS_LOG10 = -30.0


def _verdict(log10_threshold: float) -> str:
    if log10_threshold >= _FEASIBLE_LOG10:
        return "feasible for Monte Carlo"
    if log10_threshold > _HOPELESS_LOG10:
        return "difficult for Monte Carlo"
    return "infeasible for Monte Carlo"


def feasibility_report(
    eps: float,
    delta: float,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
    p1: Optional[float] = None,
    p2: Optional[float] = None,
    q_hat: Optional[float] = None,
) -> dict:
    """Automate the feasibility arithmetic for the property program.

    Basic route: least k beating the 64 ln(e*k)/(eps^2 delta^2) condition and
    the failure budget (6k)^(-2/eps) it implies.  Improved route (when the
    split eps1/eps2 and the window are supplied): least k for the 16-constant
    condition plus exact / leading / simplified budgets at that k.  If q_hat
    is given it is compared against the sharpest applicable exact budget.
    """
    if not (0 < eps < 1):
        raise UsageError("eps must lie in (0,1)")
    if delta <= 0:
        raise UsageError("delta must be positive")

    c_basic = 64.0 / (eps * eps * delta * delta)
    k_basic = least_k_exceeding(c_basic)
    q_basic = required_q_basic(k_basic, eps)
    basic = {
        "k_min": k_basic,
        "q_threshold_log10": q_basic["log10"],
        "verdict": _verdict(q_basic["log10"]),
    }

    report: dict = {"eps": eps, "delta": delta, "basic": basic}
    best_exact_log10 = q_basic["log10"]

    if eps1 is not None and eps2 is not None and p1 is not None and p2 is not None:
        k_req = least_k_exceeding(16.0 / (eps1 * eps1 * delta * delta))
        n_probe = k_req  # any multiple of k works; conditions ignore n
        probe = TheoremParams(
            n=n_probe, k=k_req, eps=eps, delta=delta,
            p1=p1, p2=p2, eps1=eps1, eps2=eps2,
        )
        cond = improved_conditions(probe)
        improved = {
            "k_min": k_req,
            "q_threshold_log10": cond["q_threshold_log10"],
            "combined_log10": cond["combined_log10"],
            "leading_log10": cond["leading_log10"],
            "g_log10": g_function(k_req, eps1, eps2, delta, p1, p2),
            "verdict": _verdict(cond["leading_log10"]),
        }
        report["improved"] = improved
        best_exact_log10 = max(best_exact_log10, cond["q_threshold_log10"])

    if q_hat is not None:
        if not (0.0 <= q_hat <= 1.0):
            raise UsageError("q_hat must lie in [0,1]")
        log10_q_hat = math.log10(q_hat) if q_hat > 0 else -math.inf
        ok = log10_q_hat <= best_exact_log10
        report["q_hat"] = {
            "value": q_hat,
            "log10": log10_q_hat,
            "threshold_log10": best_exact_log10,
            "margin_log10": best_exact_log10 - log10_q_hat,
            "verdict": "q_hat within budget" if ok else "q_hat too large",
        }

    return report
