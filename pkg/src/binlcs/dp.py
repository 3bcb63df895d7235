"""Rectangle dynamic program over the (gamma*w, theta*w) grid.

full_lcs sweeps the grid row by row. Each cell (i, j) holds the best total
certified count over ordered collections of rectangles confined to the prefix
rectangle [0, gamma*w*i) x [0, theta*w*j); a rectangle can extend a collection
whose cell lies at its lower corner. Because every rectangle spans at least
one grid step in each axis, rows only ever look at strictly earlier rows and
the sweep touches each rectangle exactly once.

The traceback stores, per cell, the first maximizing rectangle in canonical
order, recorded only where the cell strictly beats both neighbors; the
walkback therefore prefers moving up, then left, then taking a rectangle,
which makes chains deterministic.

reconstruct() turns a chain into an actual common subsequence: count-certified
rectangles contribute a constant run of the majority bit, near-equal windows
contribute a prefix of a traced exact LCS, and structure rectangles contribute
a prefix of the block's advantage witness. The result is re-verified against
both strings before it is returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BitString, exact_lcs, is_subsequence
from .errors import ContractError
from .params import Params
from .covering import CertifiedRectangle, RectangleSet
from .structure import get_interval, get_p_type

_NO_PRED = np.iinfo(np.int64).max


@dataclass
class DpGrid:
    """values[i][j] is the best certified total within the grid prefix
    [0, grid_x * i) x [0, grid_y * j); nondecreasing along both axes."""

    values: np.ndarray
    grid_x: int
    grid_y: int
    rects: RectangleSet
    row_starts: np.ndarray
    pred: np.ndarray | None = None

    def rects_at(self, i: int, j: int) -> list[CertifiedRectangle]:
        lo, hi = int(self.row_starts[i]), int(self.row_starts[i + 1])
        return [self.rects[k] for k in range(lo, hi)
                if self.rects.imax_j[k] // self.grid_y == j]


def _as_set(rects) -> RectangleSet:
    if isinstance(rects, RectangleSet):
        return rects
    return RectangleSet.from_rectangles(rects)


def build_grid(x: BitString, y: BitString, rects, params: Params,
               trace: bool = False) -> DpGrid:
    p = params if params.w is not None else params.with_input(len(x))
    gx, gy = p.grid_x, p.grid_y
    nx = (len(x) // p.w) * p.w
    ny = (len(y) // p.w) * p.w
    X, Y = nx // gx, ny // gy
    rs = _as_set(rects)

    for name, col, step, limit in (
        ("imin_i", rs.imin_i, gx, nx), ("imax_i", rs.imax_i, gx, nx),
        ("imin_j", rs.imin_j, gy, ny), ("imax_j", rs.imax_j, gy, ny),
    ):
        if len(col) and ((col % step).any() or col.max(initial=0) > limit):
            raise ContractError(f"rectangle {name} off the grid or out of bounds")
    if len(rs) and ((rs.imax_i == rs.imin_i) | (rs.imax_j == rs.imin_j)).any():
        raise ContractError("empty rectangle side certifies nothing")

    ri = rs.imax_i // gx
    pi = (rs.imin_i // gx).astype(np.int64)
    pj = (rs.imin_j // gy).astype(np.int64)
    ja = (rs.imax_j // gy).astype(np.int64)
    kap = rs.kappa.astype(np.int64)
    row_starts = np.searchsorted(ri, np.arange(X + 2))

    vals = np.zeros((X + 1, Y + 1), dtype=np.int64)
    pred = np.full((X + 1, Y + 1), _NO_PRED, dtype=np.int64) if trace else None
    for i in range(1, X + 1):
        lo, hi = int(row_starts[i]), int(row_starts[i + 1])
        row = vals[i]
        if hi > lo:
            sl = slice(lo, hi)
            cand = vals[pi[sl], pj[sl]] + kap[sl]
            np.maximum.at(row, ja[sl], cand)
        np.maximum(row, vals[i - 1], out=row)
        np.maximum.accumulate(row, out=row)
        if trace and hi > lo:
            e = ja[sl]
            win = (cand == row[e]) & (row[e] > vals[i - 1, e]) & (row[e] > row[e - 1])
            if win.any():
                np.minimum.at(pred[i], e[win], np.arange(lo, hi, dtype=np.int64)[win])
    return DpGrid(vals, gx, gy, rs, row_starts, pred)


def _walkback(grid: DpGrid) -> list[CertifiedRectangle]:
    vals, pred, rs = grid.values, grid.pred, grid.rects
    pi = rs.imin_i // grid.grid_x
    pj = rs.imin_j // grid.grid_y
    i, j = vals.shape[0] - 1, vals.shape[1] - 1
    picks = []
    while i > 0 and j > 0 and vals[i, j] > 0:
        v = vals[i, j]
        if vals[i - 1, j] == v:
            i -= 1
        elif vals[i, j - 1] == v:
            j -= 1
        else:
            k = pred[i, j]
            if k == _NO_PRED:
                raise ContractError("cell improves on both neighbors but has no rectangle")
            picks.append(int(k))
            i, j = int(pi[k]), int(pj[k])
    picks.reverse()
    return [rs[k] for k in picks]


def full_lcs(x: BitString, y: BitString, rects, params: Params,
             trace: bool = False):
    """Best total certified count over ordered rectangle collections.

    Returns (value, chain) where chain is None unless trace is requested; the
    chain's rectangles are pairwise ordered and their counts sum to value.
    """
    grid = build_grid(x, y, rects, params, trace=trace)
    value = int(grid.values[-1, -1])
    if not trace:
        return value, None
    chain = _walkback(grid)
    if sum(r.kappa for r in chain) != value:
        raise ContractError("trace total disagrees with the DP value")
    for a, b in zip(chain, chain[1:]):
        if not (a.imax_i <= b.imin_i and a.imax_j <= b.imin_j):
            raise ContractError("trace rectangles are not ordered")
    return value, chain


def _block_witness(x: BitString, k: int, p: Params):
    blk = x.sub(k * p.w, (k + 1) * p.w)
    return get_interval(blk, get_p_type(blk, p), p)


def reconstruct(x: BitString, y: BitString, chain, params: Params,
                block_witnesses=None) -> BitString:
    """Splice per-rectangle witnesses of a DP chain into one common
    subsequence of x and y, of length exactly the chain's certified total.
    block_witnesses (as produced by cover) avoids recomputing structure
    witnesses; without it they are rebuilt from x."""
    p = params if params.w is not None else params.with_input(len(x))
    pieces = []
    prev_i = prev_j = 0
    for r in chain:
        if r.imin_i < prev_i or r.imin_j < prev_j:
            raise ContractError("chain is not an ordered collection")
        prev_i, prev_j = r.imax_i, r.imax_j
        xw = x.sub(r.imin_i, r.imax_i)
        yw = y.sub(r.imin_j, r.imax_j)
        if r.source in ("global", "trivial", "trivial_square"):
            if min(xw.zeros(), yw.zeros()) >= r.kappa:
                bit = 0
            elif min(xw.ones(), yw.ones()) >= r.kappa:
                bit = 1
            else:
                raise ContractError("count certificate does not hold in the window")
            pieces.append(np.full(r.kappa, bit, dtype=np.uint8))
        elif r.source == "eq_lcs":
            got, tr = exact_lcs(xw, yw, trace=True)
            if got < r.kappa:
                raise ContractError("window cannot realize the certified count")
            keep = [xi for xi, _ in tr.pairs[: r.kappa]]
            pieces.append(xw.bits[keep])
        else:
            k = r.imin_i // p.w
            wit = block_witnesses[k] if block_witnesses is not None else _block_witness(x, k, p)
            if wit is None or len(wit.subsequence) < r.kappa:
                raise ContractError("structure witness shorter than the certified count")
            pieces.append(wit.subsequence.bits[: r.kappa])
    bits = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.uint8)
    out = BitString(bits)
    if not (is_subsequence(out, x) and is_subsequence(out, y)):
        raise ContractError("reconstruction failed verification against the inputs")
    return out
