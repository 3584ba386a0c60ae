"""Two-dimensional representation of optimal alignments.

A match point (i, j) is a matched letter pair that occurs in at least one
optimal alignment.  The envelope records, per x-index, the lowest and
highest y-index over all match points; every optimal alignment is squeezed
between the two polylines.  The diagonal band check decides whether the
envelope stays between the lines

    y = p1*x - p1*n*eps - p1*k        (lower)
    y = (1/p1)*x + (1/p1)*(n*eps + k) (upper).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Sequence, _prefix_cells, lcs_length
from .errors import UsageError


@dataclass(frozen=True)
class Envelope:
    """Sparse per-x-index hull of all optimal alignments.

    `points` maps 1-based x-index i to (lo, hi): the min and max 1-based
    y-index over match points in column i.  Indices never matched by any
    optimal alignment are absent.
    """

    n: int
    lcs: int
    points: dict[int, tuple[int, int]]

    def __post_init__(self):
        for i, (lo, hi) in self.points.items():
            if lo > hi:
                raise UsageError(f"envelope lo > hi at index {i}")
        if len(self.points) < self.lcs:
            raise UsageError("envelope must cover at least lcs distinct x-indices")

    def max_rescaled_deviation(self) -> float:
        """max over defined i of max(|lo - i|, |hi - i|) / n."""
        if not self.points or self.n == 0:
            return 0.0
        dev = max(max(abs(lo - i), abs(hi - i)) for i, (lo, hi) in self.points.items())
        return dev / self.n


@dataclass(frozen=True)
class DiagonalBand:
    """Band parameters; requires 0 < p1 < 1, eps in (0,1), k >= 1."""

    p1: float
    eps: float
    k: int
    n: int

    def __post_init__(self):
        if not (0 < self.p1 < 1):
            raise UsageError("p1 must lie strictly between 0 and 1")
        if not (0 < self.eps < 1):
            raise UsageError("eps must lie in (0,1)")
        if self.k < 1:
            raise UsageError("k must be at least 1")

    def lower(self, x: float) -> float:
        return self.p1 * x - self.p1 * self.n * self.eps - self.p1 * self.k

    def upper(self, x: float) -> float:
        return (x + self.n * self.eps + self.k) / self.p1


@dataclass(frozen=True)
class BandCheck:
    holds: bool
    violations: list[tuple[int, int, str]]  # (i, j, "below"|"above")


def _match_points_arrays(xd: np.ndarray, yd: np.ndarray) -> set[tuple[int, int]]:
    if xd.size == 0 or yd.size == 0:
        return set()
    pre = _prefix_cells(xd, yd)
    suf = _prefix_cells(xd[::-1], yd[::-1])[::-1, ::-1]
    total = int(pre[-1, -1])
    through = pre[:-1, :-1] + 1 + suf[1:, 1:]
    mask = (xd[:, None] == yd[None, :]) & (through == total)
    return {(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(mask))}


def match_points(x: Sequence, y: Sequence) -> set[tuple[int, int]]:
    """All 1-based pairs (i, j) contained in at least one optimal alignment.

    (i, j) qualifies iff x_i = y_j and the best alignment forced through the
    match still scores the full LCS:
    prefix[i-1][j-1] + 1 + suffix[i][j] == |LCS(x, y)|.
    """
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    return _match_points_arrays(x.data, y.data)


def envelope(x: Sequence, y: Sequence) -> Envelope:
    """Per-x-index min/max y-index over all match points."""
    pts = match_points(x, y)
    per_i: dict[int, tuple[int, int]] = {}
    for i, j in sorted(pts):
        lo, hi = per_i.get(i, (j, j))
        per_i[i] = (min(lo, j), max(hi, j))
    return Envelope(n=len(x), lcs=lcs_length(x, y), points=per_i)


def check_diagonal_event(env: Envelope, band: DiagonalBand) -> BandCheck:
    """True iff every envelope point lies on or between the band lines."""
    if band.n != env.n:
        raise UsageError(f"band n={band.n} does not match envelope n={env.n}")
    violations: list[tuple[int, int, str]] = []
    for i in sorted(env.points):
        lo, hi = env.points[i]
        for j in {lo, hi}:
            if j < band.lower(i):
                violations.append((i, j, "below"))
            if j > band.upper(i):
                violations.append((i, j, "above"))
    return BandCheck(holds=not violations, violations=violations)


def export_figure(env: Envelope, band: Optional[DiagonalBand], fmt: str) -> str:
    """Serialize the envelope (plus band lines) as csv, json, or svg."""
    if fmt == "csv":
        return _to_csv(env, band)
    if fmt == "json":
        return _to_json(env, band)
    if fmt == "svg":
        return _to_svg(env, band)
    raise UsageError(f"unknown figure format {fmt!r}")


def _band_json(band: Optional[DiagonalBand]) -> Optional[dict]:
    if band is None:
        return None
    return {"p1": band.p1, "eps": band.eps, "k": band.k}


def _to_csv(env: Envelope, band: Optional[DiagonalBand]) -> str:
    lines = [f"# n={env.n} lcs={env.lcs}"]
    if band is not None:
        lines.append(f"# band p1={band.p1} eps={band.eps} k={band.k}")
    lines.append("i,lo,hi")
    for i in sorted(env.points):
        lo, hi = env.points[i]
        lines.append(f"{i},{lo},{hi}")
    return "\n".join(lines) + "\n"


def _to_json(env: Envelope, band: Optional[DiagonalBand]) -> str:
    obj = {
        "n": env.n,
        "lcs": env.lcs,
        "points": [
            {"i": i, "lo": env.points[i][0], "hi": env.points[i][1]}
            for i in sorted(env.points)
        ],
        "band": _band_json(band),
    }
    return json.dumps(obj, sort_keys=True)


_VIEW = 1000  # fixed square viewbox; linear index-to-pixel scaling


def _to_svg(env: Envelope, band: Optional[DiagonalBand]) -> str:
    n = max(env.n, 1)
    sx = _VIEW / n

    def px(i: float) -> float:
        return round(i * sx, 3)

    def py(j: float) -> float:
        # svg y grows downward; clamp into the plot box
        return round(_VIEW - min(max(j, 0.0), n) * sx, 3)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_VIEW} {_VIEW}">',
        f'<rect x="0" y="0" width="{_VIEW}" height="{_VIEW}" '
        f'fill="white" stroke="black"/>',
        f'<line x1="0" y1="{_VIEW}" x2="{_VIEW}" y2="0" '
        f'stroke="gray" stroke-dasharray="4 4"/>',
    ]
    if band is not None:
        for which, color in (("lower", "red"), ("upper", "blue")):
            fn = band.lower if which == "lower" else band.upper
            pts = " ".join(f"{px(i)},{py(fn(i))}" for i in range(0, n + 1, max(1, n // 200)))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}"/>')
    for key, color in ((0, "black"), (1, "green")):
        coords = [
            f"{px(i)},{py(env.points[i][key])}" for i in sorted(env.points)
        ]
        if coords:
            parts.append(
                f'<polyline points="{" ".join(coords)}" fill="none" stroke="{color}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
