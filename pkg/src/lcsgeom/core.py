"""Alphabet model, seeded string sampling, and exact LCS primitives.

Symbols are stored as small integer indices into an ordered alphabet; text
I/O converts characters at the boundary.  Length-only queries use a
bit-parallel scan over the shorter string (exact, verified against the full
table), while `prefix_table` / `suffix_table` materialize complete DP tables
for the geometry layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigError, UsageError
from .rng import STREAM_X, STREAM_Y, stream_generator

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class AlphabetDistribution:
    """Ordered alphabet plus a letter distribution.

    Invariants: symbols distinct and nonempty, probabilities strictly
    positive and summing to 1 within 1e-12.
    """

    symbols: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise ConfigError("alphabet needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ConfigError("alphabet symbols must be distinct")
        if len(self.probabilities) != len(self.symbols):
            raise ConfigError("one probability per symbol required")
        if any(p <= 0 for p in self.probabilities):
            raise ConfigError("probabilities must be strictly positive")
        if abs(sum(self.probabilities) - 1.0) > _PROB_TOL:
            raise ConfigError("probabilities must sum to 1 within 1e-12")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index_of(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise UsageError(f"symbol {symbol!r} not in alphabet") from None

    @classmethod
    def uniform(cls, symbols: Iterable[str]) -> "AlphabetDistribution":
        syms = tuple(symbols)
        if not syms:
            raise ConfigError("alphabet needs at least one symbol")
        p = 1.0 / len(syms)
        return cls(syms, tuple(p for _ in syms))

    @classmethod
    def binary_uniform(cls) -> "AlphabetDistribution":
        return cls(("0", "1"), (0.5, 0.5))

    @classmethod
    def from_json(cls, obj: dict) -> "AlphabetDistribution":
        try:
            return cls(tuple(obj["symbols"]), tuple(float(p) for p in obj["probs"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"alphabet spec must be {{symbols, probs}}: {exc}") from None

    def to_json(self) -> dict:
        return {"symbols": list(self.symbols), "probs": list(self.probabilities)}


@dataclass(frozen=True)
class Sequence:
    """A string over an alphabet, stored as an array of symbol indices."""

    data: np.ndarray
    alphabet: AlphabetDistribution

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.int16)
        if arr.ndim != 1:
            raise UsageError("sequence data must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.alphabet.size):
            raise UsageError("sequence contains out-of-alphabet symbol index")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __len__(self) -> int:
        return int(self.data.size)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Sequence)
            and self.alphabet == other.alphabet
            and np.array_equal(self.data, other.data)
        )

    @property
    def text(self) -> str:
        return "".join(self.alphabet.symbols[i] for i in self.data.tolist())

    @classmethod
    def from_text(cls, text: str, alphabet: AlphabetDistribution) -> "Sequence":
        return cls(np.array([alphabet.index_of(c) for c in text], dtype=np.int16), alphabet)


@dataclass(frozen=True)
class StringPair:
    """Two sequences over the same alphabet, optionally carrying the seed
    that produced them."""

    x: Sequence
    y: Sequence
    seed: Optional[int] = None

    def __post_init__(self):
        if self.x.alphabet != self.y.alphabet:
            raise UsageError("both sequences must share one alphabet")

    @classmethod
    def from_text(
        cls,
        x_text: str,
        y_text: str,
        alphabet: Optional[AlphabetDistribution] = None,
    ) -> "StringPair":
        if alphabet is None:
            alphabet = AlphabetDistribution.uniform(sorted(set(x_text) | set(y_text)) or ["?"])
        return cls(Sequence.from_text(x_text, alphabet), Sequence.from_text(y_text, alphabet))


@dataclass(frozen=True)
class ScoreTable:
    """Full LCS dynamic-programming table.

    Prefix orientation: cell[i][j] = |LCS(x[:i], y[:j])|.
    Suffix orientation: cell[i][j] = |LCS(x[i:], y[j:])|.
    """

    cells: np.ndarray
    orientation: str  # "prefix" | "suffix"

    def __post_init__(self):
        if self.orientation not in ("prefix", "suffix"):
            raise UsageError("orientation must be 'prefix' or 'suffix'")
        self.cells.setflags(write=False)

    @property
    def rows(self) -> int:
        return int(self.cells.shape[0])

    @property
    def cols(self) -> int:
        return int(self.cells.shape[1])

    def cell(self, i: int, j: int) -> int:
        return int(self.cells[i, j])


def sample_letters(
    dist: AlphabetDistribution, length: int, seed: int, *indices: int
) -> np.ndarray:
    """Length i.i.d. symbol indices from the stream keyed (seed, *indices)."""
    if length < 0:
        raise UsageError("length must be nonnegative")
    gen = stream_generator(seed, *indices)
    cum = np.cumsum(np.asarray(dist.probabilities))
    cum[-1] = 1.0  # guard against rounding in the last bin
    return np.searchsorted(cum, gen.random(length), side="right").astype(np.int16)


def sample_pair(
    dist: AlphabetDistribution,
    len_x: int,
    len_y: int,
    seed: int,
    trial: int = 0,
) -> StringPair:
    """Independent i.i.d. pair; deterministic for fixed (dist, lengths, seed, trial)."""
    if len_x < 0 or len_y < 0:
        raise UsageError("lengths must be nonnegative")
    x = Sequence(sample_letters(dist, len_x, seed, trial, STREAM_X), dist)
    y = Sequence(sample_letters(dist, len_y, seed, trial, STREAM_Y), dist)
    return StringPair(x, y, seed=seed)


def _lcs_len_arrays(xd: np.ndarray, yd: np.ndarray) -> int:
    """Bit-parallel LCS length on raw index arrays.

    The shorter array becomes the pattern (one bit per position); the longer
    one is streamed.  State ones mark pattern positions not yet absorbed, so
    the length is the number of zero bits after the scan.
    """
    if xd.size > yd.size:
        xd, yd = yd, xd
    k = int(xd.size)
    if k == 0:
        return 0
    masks: dict[int, int] = {}
    for pos, sym in enumerate(xd.tolist()):
        masks[sym] = masks.get(sym, 0) | (1 << pos)
    full = (1 << k) - 1
    v = full
    get = masks.get
    for sym in yd.tolist():
        m = get(sym, 0)
        u = v & m
        v = ((v + u) | (v & ~m)) & full
    return k - bin(v).count("1")


def _lcs_rows(xd: np.ndarray, yd: np.ndarray) -> int:
    """Two-row reference DP, kept as an internal cross-check of the bit scan."""
    prev = np.zeros(yd.size + 1, dtype=np.int32)
    for i in range(xd.size):
        eq = (yd == xd[i]).astype(np.int32)
        cand = np.maximum(prev[1:], prev[:-1] + eq)
        cur = np.empty_like(prev)
        cur[0] = 0
        cur[1:] = np.maximum.accumulate(cand)
        prev = cur
    return int(prev[-1])


def lcs_length(x: Sequence, y: Sequence) -> int:
    """Exact LCS length of the two sequences."""
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    return _lcs_len_arrays(x.data, y.data)


def _prefix_cells(xd: np.ndarray, yd: np.ndarray) -> np.ndarray:
    nx, ny = int(xd.size), int(yd.size)
    table = np.zeros((nx + 1, ny + 1), dtype=np.int32)
    for i in range(1, nx + 1):
        eq = (yd == xd[i - 1]).astype(np.int32)
        cand = np.maximum(table[i - 1, 1:], table[i - 1, :-1] + eq)
        # within-row dependency L[i][j] = max(cand[j], L[i][j-1]) collapses
        # to a running maximum
        table[i, 1:] = np.maximum.accumulate(cand)
    return table


def prefix_table(x: Sequence, y: Sequence) -> ScoreTable:
    """cell[i][j] = |LCS(x[:i], y[:j])|."""
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    return ScoreTable(_prefix_cells(x.data, y.data), "prefix")


def suffix_table(x: Sequence, y: Sequence) -> ScoreTable:
    """cell[i][j] = |LCS(x[i:], y[j:])|."""
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    rev = _prefix_cells(x.data[::-1], y.data[::-1])
    return ScoreTable(np.ascontiguousarray(rev[::-1, ::-1]), "suffix")


def backtrace(x: Sequence, y: Sequence) -> list[tuple[int, int]]:
    """One canonical optimal alignment as 1-based matched index pairs.

    Tie-breaking: matching equal letters is always taken (it is always
    optimal), and when skipping, decreasing i is preferred over decreasing j.
    """
    if x.alphabet != y.alphabet:
        raise UsageError("sequences use different alphabets")
    table = _prefix_cells(x.data, y.data)
    xd, yd = x.data, y.data
    i, j = int(xd.size), int(yd.size)
    pairs: list[tuple[int, int]] = []
    while i > 0 and j > 0:
        if xd[i - 1] == yd[j - 1]:
            pairs.append((i, j))
            i -= 1
            j -= 1
        elif table[i - 1, j] == table[i, j]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    return pairs
