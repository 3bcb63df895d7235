"""Core types and exact primitives: bit strings, half-open intervals, the
trivial one-symbol bound, and the exact LCS dynamic program.

Conventions used across the package:

* A string position is 0-based; an Interval(lo, hi) denotes the half-open
  slice [lo, hi) of positions, so len == hi - lo and two intervals are
  disjoint iff one ends before the other starts.
* All certified quantities are exact integers; density and threshold
  comparisons happen in Fraction arithmetic, never floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, ContractError, DomainError, ParseError, RangeError

TRACE_CELL_CAP = 10**8  # full-table cells allowed in traced exact LCS
_PY_DP_CELL_CAP = 4096  # below this, a pure-python DP beats numpy call overhead


class BitString:
    """Immutable binary string backed by a uint8 numpy array.

    Prefix sums and the positions of ones/zeros are built lazily and cached;
    they make interval counts O(1) and subsequence stepping O(log n).
    """

    __slots__ = ("bits", "_prefix", "_ones_pos", "_zeros_pos")

    def __init__(self, bits: np.ndarray):
        arr = np.ascontiguousarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ContractError("BitString expects a 1-d array of bits")
        if arr.size and arr.max(initial=0) > 1:
            off = int(np.argmax(arr > 1))
            raise ParseError(f"bit value {int(arr[off])} is not 0/1", off)
        arr.setflags(write=False)
        self.bits = arr
        self._prefix = None
        self._ones_pos = None
        self._zeros_pos = None

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        try:
            raw = s.encode("ascii")
        except UnicodeEncodeError as exc:
            raise ParseError("non-ascii character in bit string", exc.start) from None
        arr = np.frombuffer(raw, dtype=np.uint8)
        bad = (arr != ord("0")) & (arr != ord("1"))
        if bad.any():
            off = int(np.argmax(bad))
            raise ParseError(f"invalid character {chr(int(arr[off]))!r}", off)
        return cls((arr - ord("0")).astype(np.uint8))

    # -- cached views ------------------------------------------------------

    @property
    def prefix_ones(self) -> np.ndarray:
        if self._prefix is None:
            p = np.zeros(len(self.bits) + 1, dtype=np.int64)
            np.cumsum(self.bits, out=p[1:])
            p.setflags(write=False)
            self._prefix = p
        return self._prefix

    @property
    def ones_positions(self) -> np.ndarray:
        if self._ones_pos is None:
            p = np.flatnonzero(self.bits).astype(np.int64)
            p.setflags(write=False)
            self._ones_pos = p
        return self._ones_pos

    @property
    def zeros_positions(self) -> np.ndarray:
        if self._zeros_pos is None:
            p = np.flatnonzero(self.bits == 0).astype(np.int64)
            p.setflags(write=False)
            self._zeros_pos = p
        return self._zeros_pos

    # -- counting ----------------------------------------------------------

    def ones(self, lo: int = 0, hi: int | None = None) -> int:
        hi = len(self.bits) if hi is None else hi
        p = self.prefix_ones
        return int(p[hi] - p[lo])

    def zeros(self, lo: int = 0, hi: int | None = None) -> int:
        hi = len(self.bits) if hi is None else hi
        return (hi - lo) - self.ones(lo, hi)

    # -- derived strings ----------------------------------------------------

    def sub(self, lo: int, hi: int) -> "BitString":
        if not (0 <= lo <= hi <= len(self.bits)):
            raise RangeError(f"slice [{lo},{hi}) outside string of length {len(self.bits)}")
        return BitString(self.bits[lo:hi].copy())

    def complement(self) -> "BitString":
        return BitString((1 - self.bits).astype(np.uint8))

    def to01(self) -> str:
        return (self.bits + ord("0")).tobytes().decode("ascii")

    # -- dunder -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i: int) -> int:
        return int(self.bits[i])

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        s = self.to01()
        if len(s) > 40:
            s = s[:18] + "..." + s[-18:]
        return f"BitString({s!r}, n={len(self.bits)})"


@dataclass(frozen=True)
class Interval:
    """Half-open interval [lo, hi) of string positions."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi):
            raise RangeError(f"bad interval [{self.lo},{self.hi})")

    def __len__(self) -> int:
        return self.hi - self.lo

    @property
    def empty(self) -> bool:
        return self.lo == self.hi

    def contains(self, other: "Interval") -> bool:
        return other.empty or (self.lo <= other.lo and other.hi <= self.hi)

    def disjoint(self, other: "Interval") -> bool:
        return self.hi <= other.lo or other.hi <= self.lo

    def aligned(self, step: int) -> bool:
        return self.lo % step == 0 and self.hi % step == 0

    def within(self, n: int) -> bool:
        return self.hi <= n


def round_to(iv: Interval, step: int) -> Interval:
    """Largest step-aligned subinterval of iv.

    May be empty; an empty result is anchored at floor(hi/step)*step. Always
    satisfies len(result) > len(iv) - 2*step.
    """
    if step < 1:
        raise ContractError("alignment step must be >= 1")
    lo2 = -((-iv.lo) // step) * step
    hi2 = (iv.hi // step) * step
    if lo2 > hi2:
        return Interval(hi2, hi2)
    return Interval(lo2, hi2)


@dataclass(frozen=True)
class MatchingTrace:
    """A witness matching: (x-index, y-index) pairs, strictly increasing in
    both coordinates, matched bits equal."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def is_valid(self, x: BitString, y: BitString) -> bool:
        px, py = -1, -1
        for xi, yj in self.pairs:
            if not (px < xi < len(x) and py < yj < len(y)):
                return False
            if x[xi] != y[yj]:
                return False
            px, py = xi, yj
        return True


def trivial_lcs(x: BitString, y: BitString, I: Interval | None = None,
                J: Interval | None = None) -> int:
    """max(min(zeros(x_I), zeros(y_J)), min(ones(x_I), ones(y_J))).

    The longest constant common subsequence; at least half the LCS, since the
    LCS has at most min-zeros zeros and min-ones ones.
    """
    xlo, xhi = (I.lo, I.hi) if I is not None else (0, len(x))
    ylo, yhi = (J.lo, J.hi) if J is not None else (0, len(y))
    ox, oy = x.ones(xlo, xhi), y.ones(ylo, yhi)
    zx, zy = (xhi - xlo) - ox, (yhi - ylo) - oy
    return max(min(zx, zy), min(ox, oy))


def _lcs_rows_python(xb: list[int], yb: list[int]) -> int:
    prev = [0] * (len(yb) + 1)
    for c in xb:
        cur = [0]
        best = 0
        ap = cur.append
        for j, d in enumerate(yb):
            v = prev[j] + 1 if c == d else prev[j + 1]
            if v > best:
                best = v
            ap(best)
        prev = cur
    return prev[-1]


def _lcs_rows_numpy(xbits: np.ndarray, ybits: np.ndarray) -> int:
    # Row recurrence: t[j] = max(prev[j], prev[j-1] + eq); the running max of
    # t recovers the in-row dependency because rows are nondecreasing.
    yb = ybits.astype(np.int32)
    prev = np.zeros(len(yb) + 1, dtype=np.int32)
    cur = np.zeros_like(prev)  # column 0 must stay 0 across row swaps
    for c in xbits:
        np.maximum(prev[1:], prev[:-1] + (yb == c), out=cur[1:])
        np.maximum.accumulate(cur[1:], out=cur[1:])
        prev, cur = cur, prev
    return int(prev[-1])


def exact_lcs(x: BitString, y: BitString, trace: bool = False):
    """Exact LCS length by the standard quadratic DP.

    With trace=False returns the length. With trace=True returns
    (length, MatchingTrace); the full table is materialized, capped at
    TRACE_CELL_CAP cells (CapacityError beyond). Walkback tie-break is fixed:
    prefer moving in y, then in x, then taking the diagonal match.
    """
    n, m = len(x), len(y)
    if not trace:
        if n == 0 or m == 0:
            return 0
        if n * m <= _PY_DP_CELL_CAP:
            return _lcs_rows_python(x.bits.tolist(), y.bits.tolist())
        if n > m:
            x, y = y, x
            n, m = m, n
        return _lcs_rows_numpy(x.bits, y.bits)

    if n * m > TRACE_CELL_CAP:
        raise CapacityError(f"traced DP needs {n * m} cells > {TRACE_CELL_CAP}")
    if n == 0 or m == 0:
        return 0, MatchingTrace(())
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    yb = y.bits.astype(np.int32)
    for i in range(1, n + 1):
        prev = table[i - 1]
        row = table[i]
        np.maximum(prev[1:], prev[:-1] + (yb == x.bits[i - 1]), out=row[1:])
        np.maximum.accumulate(row[1:], out=row[1:])
    pairs = []
    i, j = n, m
    while i > 0 and j > 0:
        v = table[i, j]
        if v == table[i, j - 1]:
            j -= 1
        elif v == table[i - 1, j]:
            i -= 1
        else:
            pairs.append((i - 1, j - 1))
            i -= 1
            j -= 1
    pairs.reverse()
    return int(table[n, m]), MatchingTrace(tuple(pairs))


def exact_lcs_batch(xmat: np.ndarray, ymat: np.ndarray) -> np.ndarray:
    """Row-DP LCS for a batch of pairs: xmat is (B, n), ymat is (B, m).

    Values other than 0/1 act as padding that never matches, so rows may hold
    strings of different true lengths, padded with e.g. 2.
    """
    if xmat.ndim != 2 or ymat.ndim != 2 or xmat.shape[0] != ymat.shape[0]:
        raise ContractError("batch inputs must be 2-d with equal batch size")
    b, n = xmat.shape
    m = ymat.shape[1]
    prev = np.zeros((b, m + 1), dtype=np.int32)
    cur = np.zeros_like(prev)  # column 0 must stay 0 across row swaps
    ym = ymat.astype(np.int16)
    for i in range(n):
        xi = xmat[:, i].astype(np.int16)[:, None]
        np.maximum(prev[:, 1:], prev[:, :-1] + ((ym == xi) & (xi <= 1)), out=cur[:, 1:])
        np.maximum.accumulate(cur[:, 1:], axis=1, out=cur[:, 1:])
        prev, cur = cur, prev
    return prev[:, -1].copy()


def is_gamma_balanced(x: BitString, gamma: Fraction, I: Interval | None = None) -> bool:
    """One-density within [1/2 - gamma, 1/2 + gamma], inclusive at both ends."""
    lo, hi = (I.lo, I.hi) if I is not None else (0, len(x))
    if hi == lo:
        raise DomainError("density of an empty interval is undefined")
    ones = x.ones(lo, hi)
    length = hi - lo
    return abs(Fraction(2 * ones - length)) <= 2 * gamma * length


def is_subsequence(s: BitString, y: BitString, J: Interval | None = None) -> bool:
    """Greedy test that s embeds in y (restricted to J if given)."""
    lo, hi = (J.lo, J.hi) if J is not None else (0, len(y))
    if not (0 <= lo <= hi <= len(y)):
        raise RangeError(f"interval [{lo},{hi}) outside string of length {len(y)}")
    if len(s) == 0:
        return True
    if len(s) > hi - lo:
        return False
    op, zp = y.ones_positions, y.zeros_positions
    cursor = lo
    for b in s.bits.tolist():
        arr = op if b else zp
        k = int(np.searchsorted(arr, cursor))
        if k >= len(arr) or arr[k] >= hi:
            return False
        cursor = int(arr[k]) + 1
    return True
