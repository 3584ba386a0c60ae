"""Property predicates on string pairs and the property-propagation event.

A property is a total 0/1 function on pairs of strings.  The machinery has
three parts: estimating q(k) = the worst failure probability over the
admissible y-length window [k*p1, k*p2]; assembling the failure bound for
the everywhere-most-blocks-satisfy event from q(k); and deciding that event
exactly on a concrete pair via the same lexicographic cut DP used for the
interval event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .blocks import _check_setting, _cut_dp, _CEIL_SLACK
from .bounds import BoundReport, TheoremParams, _log_add, _report, entropy_e, thm1_bound
from .core import AlphabetDistribution, Sequence, _lcs_len_arrays, lcs_length, sample_letters
from .errors import ConfigError, UsageError
from .geometry import _match_points_arrays
from .rng import STREAM_X, STREAM_Y

_BUILTIN_IDS = ("always_true", "always_false", "lcs_ratio", "score_gap",
                "unique_lcs", "length_window")


@dataclass(frozen=True)
class PropertySpec:
    """Serializable spec for a built-in property.

    ids and params:
      always_true / always_false : none
      lcs_ratio    : {theta}         LCS(x,y) >= theta * |x|
      score_gap    : {theta, gamma_star}
                                     LCS(x,y) >= (gamma_star - theta) * (|x|+|y|)/2
      unique_lcs   : none            exactly one optimal alignment
      length_window: {lo, hi}        |y|/|x| within [lo, hi]
    """

    id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in _BUILTIN_IDS:
            raise ConfigError(f"unknown property id {self.id!r}")
        needed = {
            "lcs_ratio": ("theta",),
            "score_gap": ("theta", "gamma_star"),
            "length_window": ("lo", "hi"),
        }.get(self.id, ())
        for key in needed:
            if key not in self.params:
                raise ConfigError(f"property {self.id!r} needs parameter {key!r}")

    def to_json(self) -> dict:
        return {"id": self.id, "params": dict(self.params)}

    @classmethod
    def from_json(cls, obj: dict) -> "PropertySpec":
        if not isinstance(obj, dict) or "id" not in obj:
            raise ConfigError("property spec must be {id, params}")
        return cls(str(obj["id"]), dict(obj.get("params", {})))


def _evaluate_arrays(spec: PropertySpec, xd: np.ndarray, yd: np.ndarray,
                     piece_lcs: Optional[int] = None) -> int:
    """0/1 on raw index arrays; piece_lcs short-circuits LCS-based checks."""
    sid = spec.id
    if sid == "always_true":
        return 1
    if sid == "always_false":
        return 0
    if sid == "length_window":
        if xd.size == 0:
            return 0
        ratio = yd.size / xd.size
        return 1 if spec.params["lo"] <= ratio <= spec.params["hi"] else 0
    if sid == "lcs_ratio":
        score = piece_lcs if piece_lcs is not None else _lcs_len_arrays(xd, yd)
        return 1 if score >= spec.params["theta"] * xd.size else 0
    if sid == "score_gap":
        score = piece_lcs if piece_lcs is not None else _lcs_len_arrays(xd, yd)
        target = (spec.params["gamma_star"] - spec.params["theta"]) * (xd.size + yd.size) / 2.0
        return 1 if score >= target else 0
    if sid == "unique_lcs":
        # the union of all optimal alignments has exactly lcs points
        # iff there is a single optimal alignment
        score = _lcs_len_arrays(xd, yd)
        return 1 if len(_match_points_arrays(xd, yd)) == score else 0
    raise ConfigError(f"unknown property id {sid!r}")


def evaluate_property(spec: PropertySpec, x: Sequence, y: Sequence) -> int:
    """Deterministic, total 0/1 evaluation."""
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    return _evaluate_arrays(spec, x.data, y.data)


@dataclass(frozen=True)
class PerLengthEstimate:
    l: int
    q: float
    stderr: float
    exact: bool

    def to_json(self) -> dict:
        return {"l": self.l, "q": self.q, "stderr": self.stderr, "exact": self.exact}


@dataclass(frozen=True)
class QkEstimate:
    k: int
    p1: float
    p2: float
    per_l: tuple[PerLengthEstimate, ...]
    q_hat: float

    def to_csv(self) -> str:
        lines = ["l,q_l,stderr,exact"]
        for e in self.per_l:
            lines.append(f"{e.l},{e.q},{e.stderr},{int(e.exact)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "p1": self.p1,
            "p2": self.p2,
            "per_l": [e.to_json() for e in self.per_l],
            "q_hat": self.q_hat,
        }


def _window(k: int, p1: float, p2: float) -> list[int]:
    lo = math.ceil(k * p1 - _CEIL_SLACK)
    hi = math.floor(k * p2 + _CEIL_SLACK)
    lo = max(lo, 0)
    return list(range(lo, hi + 1))


def _exact_failure_probability(
    dist: AlphabetDistribution, spec: PropertySpec, k: int, l: int
) -> float:
    probs = dist.probabilities
    a = dist.size
    total = 0.0
    # weighted enumeration over every (x, y) outcome
    x_space = [
        (np.array(tx, dtype=np.int16), math.prod(probs[s] for s in tx))
        for tx in product(range(a), repeat=k)
    ]
    y_space = [
        (np.array(ty, dtype=np.int16), math.prod(probs[s] for s in ty))
        for ty in product(range(a), repeat=l)
    ]
    for xd, wx in x_space:
        for yd, wy in y_space:
            if not _evaluate_arrays(spec, xd, yd):
                total += wx * wy
    return total


def estimate_qk(
    dist: AlphabetDistribution,
    spec: PropertySpec,
    k: int,
    p1: float,
    p2: float,
    trials: int,
    seed: int,
    exact_below: int = 2**20,
) -> QkEstimate:
    """Failure probability per admissible length l, and their maximum q_hat.

    Lengths with |alphabet|^(k+l) <= exact_below are enumerated exactly
    (stderr 0); the rest are Monte Carlo with per-(l, trial) streams.
    """
    if k < 1:
        raise UsageError("k must be at least 1")
    window = _window(k, p1, p2)
    if not window:
        raise UsageError("empty length window: need ceil(k*p1) <= floor(k*p2)")
    per_l: list[PerLengthEstimate] = []
    for l in window:
        if dist.size ** (k + l) <= exact_below:
            q = _exact_failure_probability(dist, spec, k, l)
            per_l.append(PerLengthEstimate(l=l, q=q, stderr=0.0, exact=True))
        else:
            if trials < 1:
                raise UsageError("trials must be at least 1 for Monte Carlo lengths")
            fails = 0
            for t in range(trials):
                xd = sample_letters(dist, k, seed, l, t, STREAM_X)
                yd = sample_letters(dist, l, seed, l, t, STREAM_Y)
                fails += 1 - _evaluate_arrays(spec, xd, yd)
            q = fails / trials
            stderr = math.sqrt(max(q * (1.0 - q), 0.0) / trials)
            per_l.append(PerLengthEstimate(l=l, q=q, stderr=stderr, exact=False))
    q_hat = max(e.q for e in per_l)
    return QkEstimate(k=k, p1=p1, p2=p2, per_l=tuple(per_l), q_hat=q_hat)


def bound_event_B(
    params: TheoremParams,
    q_hat: float,
    mode: str = "basic",
    cardinality_base: float = math.e,
) -> BoundReport:
    """Failure bound for the property event, assembled from the interval-event
    term plus a counting term.

    basic mode:    interval term (split eps1) + (c*k)^m q^(eps2 m) e^(H(eps2) m),
                   c = cardinality_base (e by default, 3 selectable).
    improved mode: counting term uses the sharper cut-vector count
                   ((p2-p1)k (ek/eps1)^eps1 e^(H(eps1)))^m.
    """
    if not (0.0 <= q_hat <= 1.0):
        raise UsageError("q_hat must lie in [0,1]")
    if mode not in ("basic", "improved"):
        raise UsageError("mode must be 'basic' or 'improved'")
    eps1, eps2 = params.require_split()
    k, m = params.k, params.m

    interval_params = TheoremParams(
        n=params.n, k=k, eps=eps1, delta=params.delta,
        p1=params.p1, p2=params.p2,
    )
    log_a = thm1_bound(interval_params).log_value

    log_q = math.log(q_hat) if q_hat > 0.0 else -math.inf
    if mode == "basic":
        per_block = math.log(cardinality_base * k) + eps2 * log_q + entropy_e(eps2)
    else:
        p1, p2 = params.require_window()
        per_block = (
            math.log((p2 - p1) * k)
            + eps1 * math.log(math.e * k / eps1)
            + entropy_e(eps1)
            + eps2 * log_q
            + entropy_e(eps2)
        )
    log_count = m * per_block if q_hat > 0.0 else -math.inf

    report = _report(_log_add(log_a, log_count), params.to_json())
    terms = {
        "log_interval_term": log_a,
        "log_counting_term": log_count,
        "interval_term_vacuous": log_a >= 0.0,
        "counting_term_vacuous": log_count >= 0.0,
        "mode": mode,
        "cardinality_base": cardinality_base,
    }
    return BoundReport(
        log_value=report.log_value,
        value=report.value,
        vacuous=report.vacuous,
        inputs=report.inputs,
        terms=terms,
    )


@dataclass(frozen=True)
class EventBReport:
    """Exact decision: does every LCS-attaining cut vector yield at least
    ceil((1-eps) m) property-satisfying block pairs?

    Vacuous-True (fields None) when no cut vector attains the LCS.
    """

    holds: bool
    min_satisfying_over_optimal: Optional[int]
    threshold: int
    witness: Optional[tuple[int, ...]]
    lcs: int
    best_score: int
    decomposable: bool

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "min_satisfying_over_optimal": self.min_satisfying_over_optimal,
            "threshold": self.threshold,
            "witness": None if self.witness is None else list(self.witness),
            "lcs": self.lcs,
            "best_score": self.best_score,
            "decomposable": self.decomposable,
        }


def check_event_B(
    x: Sequence, y: Sequence, k: int, eps: float, spec: PropertySpec
) -> EventBReport:
    """Lexicographic cut DP: maximize score, then minimize the number of
    satisfying (block, piece) pairs; compare the minimum to the threshold."""
    if not (0 < eps < 1):
        raise UsageError("eps must lie in (0,1)")
    n, m = _check_setting(x, y, k)
    xd, yd = x.data, y.data

    def edge(i: int, a: int, b: int, w: int) -> int:
        return _evaluate_arrays(spec, xd[(i - 1) * k : i * k], yd[a:b], piece_lcs=w)

    best, min_sat, witness = _cut_dp(x, y, k, edge)
    total = lcs_length(x, y)
    threshold = math.ceil((1.0 - eps) * m - _CEIL_SLACK)
    if best < total:
        return EventBReport(
            holds=True,
            min_satisfying_over_optimal=None,
            threshold=threshold,
            witness=None,
            lcs=total,
            best_score=best,
            decomposable=False,
        )
    return EventBReport(
        holds=min_sat >= threshold,
        min_satisfying_over_optimal=min_sat,
        threshold=threshold,
        witness=witness.r,
        lcs=total,
        best_score=best,
        decomposable=True,
    )
