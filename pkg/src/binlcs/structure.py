"""Block classification and advantage witnesses.

A width-w block of x is classified as either:

* coarse(ell, b): some window of power-of-two length ell >= eps^2*w is
  imbalanced toward bit b (count of b at least ceil((1+eps^2)*ell/2)), or
* fine(ell): no coarse window exists, the block carries at least eps*w
  ell-plus-flags (oscillation markers at scale ell < eps^2*w), and the
  alternating pattern (0^ell 1^ell)^ceil(eps*w/ell) embeds in the block, or
* unclassified: neither holds (possible only under relaxed profiles).

For a classified block, get_interval extracts an aligned interval I' plus an
explicit common-subsequence witness showing the block beats the halved
baseline inside I'. The matching property on the y side (is_q) is hereditary
under extension, which justifies the binary searches in the covering stage.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BitString, Interval, exact_lcs, is_subsequence, round_to
from .errors import ContractError, RangeError
from .params import Params


def _ceil_frac(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


@dataclass(frozen=True)
class PType:
    """Classification outcome for one block."""

    kind: str  # "coarse" | "fine" | "unclassified"
    ell: int | None = None
    bit: int | None = None

    def __post_init__(self):
        if self.kind not in ("coarse", "fine", "unclassified"):
            raise ContractError(f"bad type kind {self.kind!r}")
        if self.kind == "coarse" and (self.ell is None or self.bit not in (0, 1)):
            raise ContractError("coarse type needs ell and bit")
        if self.kind == "fine" and (self.ell is None or self.bit is not None):
            raise ContractError("fine type needs ell only")

    @classmethod
    def coarse(cls, ell: int, bit: int) -> "PType":
        return cls("coarse", ell, bit)

    @classmethod
    def fine(cls, ell: int) -> "PType":
        return cls("fine", ell)

    @classmethod
    def unclassified(cls) -> "PType":
        return cls("unclassified")


@dataclass(frozen=True)
class AdvantageWitness:
    """An aligned interval plus an explicit subsequence of x_interval.

    claimed is the bound the construction stands for after rounding
    (len(interval)/2 + (delta_code/2)*w as an exact Fraction). The honest
    certified quantity is len(subsequence); downstream consumers only ever
    certify min of the two (and, for coarse types, the is_q guarantee).
    A witness may be degenerate (empty interval / empty subsequence) when
    rounding at coarse grids swallows the construction; consumers skip those.
    """

    interval: Interval
    subsequence: BitString
    claimed: Fraction
    ptype: PType

    @property
    def degenerate(self) -> bool:
        return len(self.subsequence) == 0


def coarse_p_threshold(eps: Fraction, ell: int) -> int:
    """Minimum b-count making a length-ell window of x count as imbalanced:
    ceil((1/2 + eps^2) * ell). Strictly stronger than the y-side threshold;
    the gap (eps^2*ell/2 >= delta_code*w at the profile's own constants) is
    what lets the y-side property survive delta_code*w deletions."""
    return _ceil_frac((1 + 2 * eps * eps) * ell / 2)


def coarse_q_threshold(eps: Fraction, ell: int) -> int:
    """Minimum b-count y must carry for the matching property:
    ceil((1+eps^2)*ell/2)."""
    return _ceil_frac((1 + eps * eps) * ell / 2)


def _pow2s_desc(w: int, floor_frac: Fraction) -> list[int]:
    out = []
    t = w
    while t >= 1 and Fraction(t) >= floor_frac:
        out.append(t)
        t //= 2
    return out


def is_ell_flag(x: BitString, i: int, ell: int) -> bool:
    """True iff ones number i and i+ell exist (1-indexed) and strictly more
    than 10*(ell-1) zeros lie between them. O(1) via ones positions:
    pos(i+ell) - pos(i) > 11*ell - 10."""
    if i < 1 or ell < 1:
        raise ContractError("flag indices are 1-based and ell >= 1")
    pos = x.ones_positions
    if i + ell > len(pos):
        return False
    return int(pos[i + ell - 1] - pos[i - 1]) > 11 * ell - 10


def is_ell_plus_flag(x: BitString, i: int, ell: int, w: int) -> bool:
    """True iff i is a t-flag for some power-of-two t with ell <= t <= w."""
    t = ell
    while t <= w:
        if is_ell_flag(x, i, t):
            return True
        t *= 2
    return False


def _flag_vector(x: BitString, t: int) -> np.ndarray:
    """Boolean vector over one-indices i=1..count-t: is i a t-flag."""
    pos = x.ones_positions
    if len(pos) <= t:
        return np.zeros(0, dtype=bool)
    return (pos[t:] - pos[:-t]) > (11 * t - 10)


def plus_flag_mask(x: BitString, ell: int, w: int) -> np.ndarray:
    """Boolean vector over all one-indices: is i an ell-plus-flag."""
    mask = np.zeros(len(x.ones_positions), dtype=bool)
    t = ell
    while t <= w:
        v = _flag_vector(x, t)
        mask[: len(v)] |= v
        t *= 2
    return mask


def _coarse_scan(x: BitString, params: Params) -> PType | None:
    """First imbalanced window in canonical order: ell descending from w down
    to the smallest power of two >= eps^2*w, checking b=0 before b=1."""
    w = len(x)
    eps2w = params.eps * params.eps * w
    prefix = x.prefix_ones
    for ell in _pow2s_desc(w, eps2w):
        k = coarse_p_threshold(params.eps, ell)
        c1 = prefix[ell:] - prefix[:-ell]
        if int(c1.min(initial=ell)) <= ell - k:
            return PType.coarse(ell, 0)
        if int(c1.max(initial=0)) >= k:
            return PType.coarse(ell, 1)
    return None


def fine_reps(params: Params, ell: int) -> int:
    """Copies of 0^ell 1^ell in the y-side template: ceil(eps*w/(5*ell))."""
    return _ceil_frac(params.eps * params._require_w() / (5 * ell))


def fine_template(params: Params, ell: int) -> BitString:
    """(0^ell 1^ell)^fine_reps, what fine blocks oscillate against."""
    r = fine_reps(params, ell)
    unit = np.concatenate([np.zeros(ell, dtype=np.uint8), np.ones(ell, dtype=np.uint8)])
    return BitString(np.tile(unit, r))


def _alternating(ell: int, reps: int) -> BitString:
    unit = np.concatenate([np.zeros(ell, dtype=np.uint8), np.ones(ell, dtype=np.uint8)])
    return BitString(np.tile(unit, reps))


def _fine_conditions(x: BitString, ell: int, params: Params) -> bool:
    w = len(x)
    flags = int(plus_flag_mask(x, ell, w).sum())
    if Fraction(flags) < params.eps * w:
        return False
    r_p = _ceil_frac(params.eps * w / ell)
    return is_subsequence(_alternating(ell, r_p), x)


def get_p_type(x: BitString, params: Params) -> PType:
    """Classify one block. Scan order is fixed: coarse (ell descending,
    b=0 first), then fine (ell ascending while ell < eps^2*w), else
    unclassified."""
    w = params._require_w()
    if len(x) != w:
        raise ContractError(f"block length {len(x)} != w = {w}")
    hit = _coarse_scan(x, params)
    if hit is not None:
        return hit
    eps2w = params.eps * params.eps * w
    ell = 1
    while Fraction(ell) < eps2w:
        if _fine_conditions(x, ell, params):
            return PType.fine(ell)
        ell *= 2
    return PType.unclassified()


def satisfies_p(x: BitString, t: PType, params: Params) -> bool:
    """Does this block satisfy the given property (not necessarily the
    canonical first one)?"""
    w = params._require_w()
    if len(x) != w:
        raise ContractError(f"block length {len(x)} != w = {w}")
    if t.kind == "coarse":
        if Fraction(t.ell) < params.eps * params.eps * w or t.ell > w:
            return False
        prefix = x.prefix_ones
        c1 = prefix[t.ell:] - prefix[: -t.ell]
        cb = (t.ell - c1) if t.bit == 0 else c1
        return int(cb.max(initial=0)) >= coarse_p_threshold(params.eps, t.ell)
    if t.kind == "fine":
        if Fraction(t.ell) >= params.eps * params.eps * w:
            return False
        if _coarse_scan(x, params) is not None:
            return False
        return _fine_conditions(x, t.ell, params)
    raise ContractError("unclassified has no property to satisfy")


def classify_blocks(x: BitString, params: Params) -> list[PType]:
    """Classify each full width-w block of x (trailing partial block ignored)."""
    w = params._require_w()
    return [get_p_type(x.sub(k * w, (k + 1) * w), params) for k in range(len(x) // w)]


class QTable:
    """Preprocessed y answering nxt(b, ell, j): the smallest j' such that
    y[j:j'] contains at least ell copies of bit b (None when fewer than ell
    remain). Nondecreasing in j and in ell. Queries are binary searches over
    the positions arrays, so preprocessing is linear space."""

    __slots__ = ("y", "_sentinel")

    def __init__(self, y: BitString):
        self.y = y
        y.ones_positions
        y.zeros_positions
        self._sentinel = len(y) + 1

    @property
    def sentinel(self) -> int:
        return self._sentinel

    def nxt(self, b: int, ell: int, j: int) -> int | None:
        if ell < 1 or j < 0:
            raise ContractError("nxt needs ell >= 1 and j >= 0")
        arr = self.y.ones_positions if b else self.y.zeros_positions
        k = int(np.searchsorted(arr, j))
        if k + ell > len(arr):
            return None
        return int(arr[k + ell - 1]) + 1

    def nxt_vec(self, b: int, ell: int, starts: np.ndarray) -> np.ndarray:
        """Vectorized nxt; undefined entries (and sentinel inputs) saturate to
        the sentinel len(y)+1."""
        arr = self.y.ones_positions if b else self.y.zeros_positions
        k = np.searchsorted(arr, starts)
        ok = k + ell <= len(arr)
        out = np.full(len(starts), self._sentinel, dtype=np.int64)
        out[ok] = arr[k[ok] + ell - 1] + 1
        return out

    def chain_landing(self, ell: int, reps: int, starts: np.ndarray) -> np.ndarray:
        """Landing points after reps rounds of (ell zeros, then ell ones)
        greedy matching from each start; sentinel-saturating."""
        cur = np.asarray(starts, dtype=np.int64)
        for _ in range(reps):
            cur = self.nxt_vec(0, ell, cur)
            cur = self.nxt_vec(1, ell, cur)
        return cur


def build_q_table(y: BitString) -> QTable:
    return QTable(y)


def is_q(q: QTable, J: Interval, t: PType, params: Params) -> bool:
    """Does y_J have the matching property for type t?

    coarse(ell, b): count of b in y_J >= ceil((1+eps^2)*ell/2). O(1).
    fine(ell): greedily matching (0^ell 1^ell)^fine_reps from J.lo lands at
    or before J.hi. O(reps * log|y|).
    """
    if t.kind == "unclassified":
        raise ContractError("unclassified type has no matching property")
    if not J.within(len(q.y)):
        raise RangeError(f"J = [{J.lo},{J.hi}) outside y of length {len(q.y)}")
    if t.kind == "coarse":
        cnt = q.y.ones(J.lo, J.hi) if t.bit else q.y.zeros(J.lo, J.hi)
        return cnt >= coarse_q_threshold(params.eps, t.ell)
    j = J.lo
    for _ in range(fine_reps(params, t.ell)):
        j = q.nxt(0, t.ell, j)
        if j is None:
            return False
        j = q.nxt(1, t.ell, j)
        if j is None:
            return False
    return j <= J.hi


# -- witness construction ----------------------------------------------------


def _coarse_witness(x: BitString, t: PType, params: Params) -> AdvantageWitness:
    w = len(x)
    k = coarse_p_threshold(params.eps, t.ell)
    prefix = x.prefix_ones
    c1 = prefix[t.ell:] - prefix[: -t.ell]
    cb = (t.ell - c1) if t.bit == 0 else c1
    hits = cb >= k
    if not hits.any():
        raise ContractError("block does not satisfy the claimed coarse property")
    start = int(np.argmax(hits))  # leftmost qualifying window
    window = Interval(start, start + t.ell)
    iv = round_to(window, params.grid_x)
    if iv.empty:
        run = 0
    else:
        run = x.ones(iv.lo, iv.hi) if t.bit else x.zeros(iv.lo, iv.hi)
    bit_arr = np.full(run, t.bit, dtype=np.uint8)
    claimed = Fraction(len(iv), 2) + params.delta_code * w / 2
    return AdvantageWitness(iv, BitString(bit_arr), claimed, t)


def _largest_flag_scale(xp: BitString, i: int, ell: int, w: int) -> int | None:
    best = None
    t = ell
    while t <= w:
        if is_ell_flag(xp, i, t):
            best = t
        t *= 2
    return best


def _fine_counter_loop(xp: BitString, ell: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    """Emit the oscillation witness for a fine window.

    Walks the ones of xp left to right; a flagged one contributes itself plus
    1 + 10*(t-1) of the gap zeros that make it a t-flag (largest qualifying
    power-of-two t >= ell), then skips ahead t ones; an unflagged one
    contributes just itself. Returns (bits, positions within xp), positions
    strictly increasing.
    """
    ones = xp.ones_positions
    zeros = xp.zeros_positions
    bits: list[int] = []
    pos: list[int] = []
    i = 1
    n1 = len(ones)
    while i <= n1:
        p = int(ones[i - 1])
        bits.append(1)
        pos.append(p)
        t = _largest_flag_scale(xp, i, ell, w)
        if t is not None:
            need = 1 + 10 * (t - 1)
            k0 = int(np.searchsorted(zeros, p))
            for z in zeros[k0: k0 + need]:
                bits.append(0)
                pos.append(int(z))
            i += t
        else:
            i += 1
    return np.asarray(bits, dtype=np.uint8), np.asarray(pos, dtype=np.int64)


def _fine_witness(x: BitString, t: PType, params: Params) -> AdvantageWitness:
    w = len(x)
    eps = params.eps
    ell = t.ell
    win_len = min(w, _ceil_frac(4 * eps * eps * w))
    flag_target = _ceil_frac(2 * eps**3 * w)

    fpos = x.ones_positions[plus_flag_mask(x, ell, w)]
    starts = np.arange(0, w - win_len + 1, dtype=np.int64)
    counts = np.searchsorted(fpos, starts + win_len) - np.searchsorted(fpos, starts)
    enough = counts >= flag_target
    if enough.any():
        a = int(np.argmax(enough))  # leftmost window meeting the target
    else:
        a = int(np.argmax(counts))  # fallback: leftmost window with most flags
    raw = Interval(a, min(w, a + win_len + _ceil_frac(11 * eps * eps * w)))

    xp = x.sub(raw.lo, raw.hi)
    bits, rel_pos = _fine_counter_loop(xp, ell, w)
    template = fine_template(params, ell)
    wit = BitString(bits)
    glob_pos = rel_pos + raw.lo
    if not is_subsequence(wit, template):
        # keep only a longest common subsequence with the template
        _, tr = exact_lcs(wit, template, trace=True)
        keep = np.asarray([xi for xi, _ in tr.pairs], dtype=np.int64)
        wit = BitString(bits[keep])
        glob_pos = glob_pos[keep]

    iv = round_to(raw, params.grid_x)
    if iv.empty:
        sel = np.zeros(0, dtype=np.int64)
    else:
        sel = np.flatnonzero((glob_pos >= iv.lo) & (glob_pos < iv.hi))
    wit = BitString(wit.bits[sel])
    claimed = Fraction(len(iv), 2) + params.delta_code * w / 2
    return AdvantageWitness(iv, wit, claimed, t)


def get_interval(x: BitString, t: PType, params: Params) -> AdvantageWitness:
    """Extract the advantage witness for a classified block.

    The returned interval is grid-aligned within [0, w]; the subsequence
    provably embeds in x_interval (positions are tracked explicitly) and, for
    fine types, in the alternating template. The construction is checked
    against the claimed property first (ContractError on mismatch).
    """
    w = params._require_w()
    if len(x) != w:
        raise ContractError(f"block length {len(x)} != w = {w}")
    if t.kind == "unclassified":
        raise ContractError("cannot extract a witness for an unclassified block")
    if not satisfies_p(x, t, params):
        raise ContractError(f"block does not satisfy {t}")
    if t.kind == "coarse":
        return _coarse_witness(x, t, params)
    return _fine_witness(x, t, params)
