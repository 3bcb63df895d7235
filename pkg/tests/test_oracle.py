import itertools
from collections import namedtuple

import numpy as np
import pytest

from binlcs import BitString, Interval, exact_lcs
from binlcs.errors import CapacityError, ContractError
from binlcs.oracle import brute_ordered_max, lemma_bad_check, matched_window
from binlcs.params import Params

from helpers import bs, rand_bits

Rect = namedtuple("Rect", "imin_i imax_i imin_j imax_j kappa")


class TestMatchedWindow:
    def test_identity_matching(self):
        x = bs("01100101")
        _, tr = exact_lcs(x, x, trace=True)
        assert matched_window(tr, Interval(2, 5)) == Interval(2, 5)

    def test_full_range(self):
        x = bs("0101")
        y = bs("0011")
        n, tr = exact_lcs(x, y, trace=True)
        win = matched_window(tr, Interval(0, 4))
        assert len(tr.pairs) == n == 3
        assert win.within(4) and len(win) >= 3

    def test_unmatched_block_anchors_after_predecessor(self):
        x = bs("1" * 8 + "0" * 8 + "1" * 8)
        y = bs("1" * 16)
        _, tr = exact_lcs(x, y, trace=True)
        mid = matched_window(tr, Interval(8, 16))
        assert mid.empty
        left = matched_window(tr, Interval(0, 8))
        right = matched_window(tr, Interval(16, 24))
        assert left.disjoint(mid) and mid.disjoint(right) and left.disjoint(right)

    def test_no_pairs_at_all(self):
        x = bs("000")
        y = bs("111")
        _, tr = exact_lcs(x, y, trace=True)
        assert tr.pairs == ()
        assert matched_window(tr, Interval(0, 3)) == Interval(0, 0)

    def test_partition_windows_pairwise_disjoint(self, rng):
        for _ in range(60):
            n = int(rng.integers(20, 120))
            m = int(rng.integers(20, 120))
            x = BitString(rand_bits(rng, n, 0.5))
            y = BitString(rand_bits(rng, m, 0.4))
            _, tr = exact_lcs(x, y, trace=True)
            assert tr.is_valid(x, y)
            block = int(rng.integers(3, 17))
            wins = [
                matched_window(tr, Interval(lo, min(lo + block, n)))
                for lo in range(0, n, block)
            ]
            for a, b in itertools.combinations(wins, 2):
                assert a.disjoint(b)


class TestBruteOrderedMax:
    def test_empty(self):
        assert brute_ordered_max([]) == 0

    def test_single(self):
        assert brute_ordered_max([Rect(0, 4, 0, 4, 5)]) == 5

    def test_chain_vs_heavy(self):
        chain = [
            Rect(0, 2, 0, 2, 3),
            Rect(2, 4, 2, 4, 3),
            Rect(4, 6, 4, 6, 3),
        ]
        heavy = Rect(1, 5, 1, 5, 8)  # overlaps every chain element
        assert brute_ordered_max(chain) == 9
        assert brute_ordered_max(chain + [heavy]) == max(9, 8)
        heavier = Rect(1, 5, 1, 5, 20)
        assert brute_ordered_max(chain + [heavier]) == 20

    def test_touching_rectangles_are_comparable(self):
        a = Rect(0, 3, 0, 3, 2)
        b = Rect(3, 5, 3, 5, 2)
        assert brute_ordered_max([a, b]) == 4

    def test_x_overlap_blocks_chaining(self):
        a = Rect(0, 4, 0, 2, 2)
        b = Rect(3, 6, 2, 4, 2)  # x-ranges overlap
        assert brute_ordered_max([a, b]) == 2

    def test_capacity(self):
        rects = [Rect(i, i + 1, i, i + 1, 1) for i in range(21)]
        with pytest.raises(CapacityError):
            brute_ordered_max(rects)

    def test_against_subset_enumeration(self, rng):
        def ordered(a, b):
            return (a.imax_i <= b.imin_i and a.imax_j <= b.imin_j) or (
                b.imax_i <= a.imin_i and b.imax_j <= a.imin_j
            )

        for _ in range(40):
            k = int(rng.integers(0, 9))
            rects = []
            for _ in range(k):
                i0 = int(rng.integers(0, 20))
                j0 = int(rng.integers(0, 20))
                rects.append(
                    Rect(i0, i0 + int(rng.integers(1, 6)), j0,
                         j0 + int(rng.integers(1, 6)), int(rng.integers(1, 10)))
                )
            best = 0
            for size in range(len(rects) + 1):
                for sub in itertools.combinations(rects, size):
                    if all(ordered(a, b) for a, b in itertools.combinations(sub, 2)):
                        best = max(best, sum(r.kappa for r in sub))
            assert brute_ordered_max(rects) == best


class TestLemmaBadCheck:
    def test_identical_strings(self):
        p = Params.desk(w=64)
        x = bs("0110100101101001" * 4)
        assert lemma_bad_check(x, x, 8, p) is True

    def test_scattered_deletions(self, rng):
        p = Params.desk(w=64)
        for _ in range(30):
            x = BitString(rand_bits(rng, 64, 0.5))
            drop = rng.choice(64, size=int(p.delta * 64), replace=False)
            keep = np.ones(64, dtype=bool)
            keep[drop] = False
            y = BitString(x.bits[keep])
            assert lemma_bad_check(x, y, 8, p) is True

    def test_vacuous_when_lcs_small(self):
        p = Params.desk(w=64)
        assert lemma_bad_check(bs("0" * 64), bs("1" * 64), 8, p) is True

    def test_block_width_must_divide(self):
        p = Params.desk(w=64)
        with pytest.raises(ContractError):
            lemma_bad_check(bs("0" * 64), bs("0" * 64), 7, p)

    def test_concentrated_damage_stays_in_budget(self, rng):
        # wiping one of eight blocks (delta*|x| bits) leaves at most
        # sqrt(delta)*8 = 2 bad blocks; desk delta is 1/8
        p = Params.desk(w=64)
        x = BitString(rand_bits(rng, 64, 0.5))
        keep = np.ones(64, dtype=bool)
        keep[8:16] = False
        y = BitString(x.bits[keep])
        assert lemma_bad_check(x, y, 8, p) is True
