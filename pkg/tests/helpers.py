"""Shared test utilities: independent oracles and input enumeration.

The oracles here are deliberately written in plain python with the most
boring algorithms available, so they share no code (and ideally no failure
modes) with the vectorized production paths they check.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from binlcs.core import BitString


def lcs_table_oracle(a: str, b: str) -> int:
    """Textbook full-table LCS, scalar python."""
    n, m = len(a), len(b)
    t = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        ti, tp = t[i], t[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                ti[j] = tp[j - 1] + 1
            else:
                ti[j] = tp[j] if tp[j] >= ti[j - 1] else ti[j - 1]
    return t[n][m]


def lcs_enum_oracle(a: str, b: str) -> int:
    """Exponential: longest subsequence of a that embeds in b. Only for tiny a."""
    assert len(a) <= 12
    for k in range(min(len(a), len(b)), 0, -1):
        for picks in combinations(range(len(a)), k):
            s = "".join(a[i] for i in picks)
            if is_subseq_oracle(s, b):
                return k
    return 0


def is_subseq_oracle(s: str, t: str) -> bool:
    it = iter(t)
    return all(c in it for c in s)


def rand_bits(rng: np.random.Generator, n: int, p: float = 0.5) -> BitString:
    return BitString((rng.random(n) < p).astype(np.uint8))


def all_bitstrings(n: int) -> np.ndarray:
    """(2**n, n) uint8 matrix of every length-n bit string, row i = binary of i."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    codes = np.arange(2**n, dtype=np.uint64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)[None, :]
    return ((codes >> shifts) & 1).astype(np.uint8)


def bs(s: str) -> BitString:
    return BitString.from_str(s)
