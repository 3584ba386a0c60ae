"""Cut-vector machinery: constrained scores, optimal cuts, and interval events.

X is tiled into m blocks of length k (n = m*k).  A cut vector
r = (r_0, ..., r_m) with 0 = r_0 < r_1 < ... < r_m = n assigns block i to
the y-interval [r_{i-1}+1, r_i].  The constrained score sums the per-piece
LCS values; it never exceeds the unconstrained LCS, and a cut vector is
called optimal when it attains it.

The interval event asks whether EVERY optimal cut vector keeps at least
ceil((1-eps) * m) of its piece lengths inside [k*p1, k*p2].  The decision is
exact: a DP over (block index, cut position) maximizes the score and, among
maximizers, minimizes the number of in-range pieces.  If no cut vector
attains the LCS at all, the quantifier ranges over an empty set and the
event holds vacuously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .core import AlphabetDistribution, Sequence, _lcs_len_arrays, lcs_length, sample_pair
from .errors import ResourceError, UsageError

# Slack absorbing the binary representation of fractions like 0.1 when the
# real threshold (1-eps)*m happens to be an integer.
_CEIL_SLACK = 1e-9


@dataclass(frozen=True)
class BlockPartition:
    """Cut vector r with block length k; n = r[-1], m = n // k."""

    r: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise UsageError("block length k must be at least 1")
        r = self.r
        if len(r) < 2 or r[0] != 0:
            raise UsageError("cut vector must start at r_0 = 0")
        if any(a >= b for a, b in zip(r, r[1:])):
            raise UsageError("cut vector must be strictly increasing")
        if r[-1] != (len(r) - 1) * self.k:
            raise UsageError("cut vector must end at r_m = m*k")

    @property
    def m(self) -> int:
        return len(self.r) - 1

    @property
    def n(self) -> int:
        return self.r[-1]

    def lengths(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.r, self.r[1:]))

    def to_json(self) -> list[int]:
        return list(self.r)

    @classmethod
    def from_json(cls, arr: list[int], k: int) -> "BlockPartition":
        return cls(tuple(int(v) for v in arr), k)

    @classmethod
    def diagonal(cls, n: int, k: int) -> "BlockPartition":
        if n % k:
            raise UsageError("k must divide n")
        return cls(tuple(range(0, n + 1, k)), k)


@dataclass(frozen=True)
class EventAParams:
    """Interval-event parameters: eps in (0,1), 0 < p1 < 1 < p2, k >= 1."""

    eps: float
    p1: float
    p2: float
    k: int

    def __post_init__(self):
        if not (0 < self.p1 < 1 < self.p2):
            raise UsageError("need 0 < p1 < 1 < p2")
        if not (0 < self.eps < 1):
            raise UsageError("eps must lie in (0,1)")
        if self.k < 1:
            raise UsageError("k must be at least 1")

    def good_length(self, length: int) -> bool:
        # real comparison, no rounding of k*p1 / k*p2
        return self.k * self.p1 <= length <= self.k * self.p2

    def threshold(self, m: int) -> int:
        return math.ceil((1.0 - self.eps) * m - _CEIL_SLACK)


@dataclass(frozen=True)
class EventAReport:
    """Exact decision for the interval event.

    min_good_over_optimal is the minimum over all LCS-attaining cut vectors
    of the number of in-range piece lengths; None when no cut vector attains
    the LCS (min over the empty set), in which case the event holds
    vacuously.  best_score is the maximum constrained score actually
    reachable, and decomposable records whether it equals the LCS.
    """

    holds: bool
    min_good_over_optimal: Optional[int]
    threshold: int
    witness: Optional[BlockPartition]
    lcs: int
    best_score: int
    decomposable: bool

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "min_good_over_optimal": self.min_good_over_optimal,
            "threshold": self.threshold,
            "witness": None if self.witness is None else self.witness.to_json(),
            "lcs": self.lcs,
            "best_score": self.best_score,
            "decomposable": self.decomposable,
        }


def _check_setting(x: Sequence, y: Sequence, k: int) -> tuple[int, int]:
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    n = len(x)
    if len(y) != n:
        raise UsageError("cut-vector machinery requires |x| = |y|")
    if n == 0:
        raise UsageError("empty strings have no block structure")
    if k < 1 or n % k:
        raise UsageError("k must be a positive divisor of n")
    return n, n // k


def _block_masks(block: np.ndarray) -> tuple[dict[int, int], int]:
    masks: dict[int, int] = {}
    for pos, sym in enumerate(block.tolist()):
        masks[sym] = masks.get(sym, 0) | (1 << pos)
    return masks, (1 << block.size) - 1


def constrained_score(x: Sequence, y: Sequence, part: BlockPartition) -> int:
    """Sum of per-piece LCS values under the cut vector; always <= LCS(x, y)."""
    n, m = _check_setting(x, y, part.k)
    if part.n != n or part.m != m:
        raise UsageError("partition does not match the string length")
    xd, yd = x.data, y.data
    k = part.k
    return sum(
        _lcs_len_arrays(xd[(i - 1) * k : i * k], yd[part.r[i - 1] : part.r[i]])
        for i in range(1, m + 1)
    )


def _cut_dp(
    x: Sequence,
    y: Sequence,
    k: int,
    edge_flag: Optional[Callable[[int, int, int, int], int]] = None,
) -> tuple[int, Optional[int], Optional[BlockPartition]]:
    """Maximize the constrained score; among maximizers minimize the sum of
    edge flags.

    edge_flag(i, a, b, piece_lcs) is a 0/1 weight for assigning block i to
    y-piece (a, b]; None means no secondary objective.  Returns
    (best_score, min_flag_sum, witness).  Piece LCS values are produced by
    restarting a bit-parallel scan per (block, piece-start), so no weight
    tensor is ever materialized.
    """
    n, m = _check_setting(x, y, k)
    xd, yd = x.data, y.data
    ytail = yd.tolist()

    NEG = -1  # scores are nonnegative; -1 marks unreachable states
    BIG = n + 1
    score = [[NEG] * (n + 1) for _ in range(m + 1)]
    flags = [[BIG] * (n + 1) for _ in range(m + 1)]
    parent: list[list[int]] = [[-1] * (n + 1) for _ in range(m + 1)]
    score[0][0] = 0
    flags[0][0] = 0

    for i in range(1, m + 1):
        masks, full = _block_masks(xd[(i - 1) * k : i * k])
        get = masks.get
        prev_score = score[i - 1]
        prev_flags = flags[i - 1]
        cur_score = score[i]
        cur_flags = flags[i]
        cur_parent = parent[i]
        b_cap = n - (m - i)
        for a in range(i - 1, b_cap):
            base = prev_score[a]
            if base < 0:
                continue
            base_flags = prev_flags[a]
            v = full
            for b in range(a + 1, b_cap + 1):
                sym = ytail[b - 1]
                mk = get(sym, 0)
                u = v & mk
                v = ((v + u) | (v & ~mk)) & full
                w = k - bin(v).count("1")
                cand = base + w
                if cand < cur_score[b]:
                    continue
                cf = base_flags
                if edge_flag is not None:
                    cf += edge_flag(i, a, b, w)
                if cand > cur_score[b] or cf < cur_flags[b]:
                    cur_score[b] = cand
                    cur_flags[b] = cf
                    cur_parent[b] = a

    best = score[m][n]
    if best < 0:
        raise UsageError("no feasible cut vector (should not happen when k | n)")
    cuts = [n]
    b = n
    for i in range(m, 0, -1):
        b = parent[i][b]
        cuts.append(b)
    cuts.reverse()
    witness = BlockPartition(tuple(cuts), k)
    min_flags = flags[m][n] if edge_flag is not None else None
    return best, min_flags, witness


def best_partition(x: Sequence, y: Sequence, k: int) -> tuple[int, BlockPartition]:
    """Maximum constrained score over all cut vectors, with a witness.

    Equals LCS(x, y) whenever some optimal alignment decomposes along the
    block boundaries with nonempty pieces; rare instances exist where every
    optimal alignment needs an empty piece and the maximum falls short.
    """
    score, _, witness = _cut_dp(x, y, k)
    return score, witness


def check_event_A(x: Sequence, y: Sequence, params: EventAParams) -> EventAReport:
    """Exact interval-event decision over all LCS-attaining cut vectors."""
    n, m = _check_setting(x, y, params.k)

    def edge(i: int, a: int, b: int, w: int) -> int:
        return 1 if params.good_length(b - a) else 0

    best, min_good, witness = _cut_dp(x, y, params.k, edge)
    total = lcs_length(x, y)
    threshold = params.threshold(m)
    if best < total:
        # no cut vector attains the LCS: the event quantifies over an empty
        # set and holds vacuously
        return EventAReport(
            holds=True,
            min_good_over_optimal=None,
            threshold=threshold,
            witness=None,
            lcs=total,
            best_score=best,
            decomposable=False,
        )
    return EventAReport(
        holds=min_good >= threshold,
        min_good_over_optimal=min_good,
        threshold=threshold,
        witness=witness,
        lcs=total,
        best_score=best,
        decomposable=True,
    )


def enumerate_optimal_partitions(
    x: Sequence, y: Sequence, k: int, cap: int = 100_000
) -> list[BlockPartition]:
    """All LCS-attaining cut vectors, by direct enumeration (test oracle).

    Intended for small n; raises ResourceError when more than `cap` optimal
    vectors exist.
    """
    n, m = _check_setting(x, y, k)
    total = lcs_length(x, y)
    xd, yd = x.data, y.data
    out: list[BlockPartition] = []
    found = 0
    for cuts in combinations(range(1, n), m - 1):
        r = (0,) + cuts + (n,)
        s = 0
        for i in range(1, m + 1):
            s += _lcs_len_arrays(xd[(i - 1) * k : i * k], yd[r[i - 1] : r[i]])
            if s + (m - i) * k < total:  # remaining blocks add at most k each
                s = -1
                break
        if s == total:
            found += 1
            if found > cap:
                raise ResourceError(
                    f"more than cap={cap} optimal cut vectors (found {found}+)"
                )
            out.append(BlockPartition(r, k))
    return out


@dataclass(frozen=True)
class LemmaGapReport:
    """Monte Carlo estimate of E[constrained - LCS] for one fixed cut vector."""

    mean: float
    stderr: float
    ci95: tuple[float, float]
    trials: int
    bound: float  # -0.5 * delta * eps * n for the supplied delta
    below_bound: bool

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "ci95": list(self.ci95),
            "trials": self.trials,
            "bound": self.bound,
            "below_bound": self.below_bound,
        }


def empirical_lemma_gap(
    dist: AlphabetDistribution,
    n: int,
    k: int,
    params: EventAParams,
    part: BlockPartition,
    trials: int,
    seed: int,
    delta: float,
) -> LemmaGapReport:
    """Estimate E[L_n(r) - LC_n] for a cut vector violating the interval
    condition, and compare the mean against -0.5 * delta * eps * n."""
    if trials < 1:
        raise UsageError("trials must be at least 1")
    if delta <= 0:
        raise UsageError("delta must be positive")
    if part.n != n or part.k != k:
        raise UsageError("partition does not match (n, k)")
    m = part.m
    good = sum(1 for length in part.lengths() if params.good_length(length))
    if good >= params.threshold(m):
        raise UsageError(
            "cut vector satisfies the interval condition; the expectation gap "
            "hypothesis requires a violating vector"
        )
    total = 0
    total_sq = 0
    for t in range(trials):
        pair = sample_pair(dist, n, n, seed, trial=t)
        gap = constrained_score(pair.x, pair.y, part) - lcs_length(pair.x, pair.y)
        total += gap
        total_sq += gap * gap
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    stderr = math.sqrt(var / trials) if trials > 1 else float("inf")
    bound = -0.5 * delta * params.eps * n
    return LemmaGapReport(
        mean=mean,
        stderr=stderr,
        ci95=(mean - 1.96 * stderr, mean + 1.96 * stderr),
        trials=trials,
        bound=bound,
        below_bound=mean <= bound,
    )
