"""Test-support oracles.

Everything here is deliberately simple and, where needed, exponential or
quadratic: these are the independent routes the property tests compare the
fast implementations against. Nothing in this module is used by the
production pipeline.
"""
from __future__ import annotations

from fractions import Fraction

from .core import BitString, Interval, MatchingTrace, exact_lcs
from .errors import CapacityError, ContractError
from .params import Params

_BRUTE_CAP = 20


def matched_window(trace: MatchingTrace, I: Interval) -> Interval:
    """Smallest y-interval containing the partners of all x-indices in I.

    When no bit of I is matched there is no unique smallest window; we anchor
    an empty interval immediately after the partner of the last matched
    x-index before I (at 0 if there is none). Under this convention the
    windows of the blocks of any partition of x stay pairwise disjoint.
    """
    lo = None
    hi = None
    anchor = 0
    for xi, yi in trace.pairs:
        if xi < I.lo:
            anchor = yi + 1
        elif xi < I.hi:
            if lo is None:
                lo = yi
            hi = yi + 1
        else:
            break
    if lo is None:
        return Interval(anchor, anchor)
    return Interval(lo, hi)


def _before(a, b) -> bool:
    # a entirely precedes b in both coordinates (touching allowed)
    return a.imax_i <= b.imin_i and a.imax_j <= b.imin_j


def brute_ordered_max(rects) -> int:
    """Exact maximum kappa-sum over totally ordered sub-collections.

    rects: iterable of objects with imin_i/imax_i/imin_j/imax_j/kappa.
    Exponential DFS over chains; capped at 20 rectangles. This is the slow
    independent route against which the rectangle DP is validated.
    """
    items = sorted(rects, key=lambda r: (r.imin_i, r.imin_j))
    if len(items) > _BRUTE_CAP:
        raise CapacityError(f"{len(items)} rectangles exceeds brute-force cap {_BRUTE_CAP}")

    def go(idx: int, last) -> int:
        if idx == len(items):
            return 0
        best = go(idx + 1, last)
        r = items[idx]
        if last is None or _before(last, r):
            best = max(best, int(r.kappa) + go(idx + 1, r))
        return best

    return go(0, None)


def lemma_bad_check(x: BitString, y: BitString, w2: int, params: Params) -> bool:
    """Block-level quality of a canonical matching.

    Splits x into width-w2 blocks, finds each block's matched window under a
    traced exact matching, and counts blocks whose window LCS falls below
    (1 - sqrt(delta)) * w2. Returns True iff LCS(x,y) < (1-delta)|x| (claim
    vacuous) or the bad count is at most sqrt(delta) * |x| / w2.

    Irrational thresholds are decided exactly in integers:
    lcs < (1-sqrt(d))*w2  <=>  (w2-lcs)^2 * den(d) > num(d) * w2^2, and
    count <= sqrt(d)*m    <=>  count^2 * den(d) <= num(d) * m^2.
    """
    n = len(x)
    if w2 < 1 or n % w2 != 0:
        raise ContractError(f"w2 = {w2} must divide |x| = {n}")
    d = Fraction(params.delta)
    total, trace = exact_lcs(x, y, trace=True)
    m = n // w2
    bad = 0
    for k in range(m):
        iv = Interval(k * w2, (k + 1) * w2)
        win = matched_window(trace, iv)
        lcs_k = exact_lcs(x.sub(iv.lo, iv.hi), y.sub(win.lo, win.hi))
        gap = w2 - lcs_k
        if gap > 0 and gap * gap * d.denominator > d.numerator * w2 * w2:
            bad += 1
    if Fraction(total) < (1 - d) * n:
        return True
    return bad * bad * d.denominator <= d.numerator * m * m
