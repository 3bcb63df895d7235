"""
From arbitrary inputs to the balanced core
==========================================

The covering stage wants x exactly balanced and y no poorer in either
bit. Real inputs are anything at all, so the front end normalizes:
swap the strings so x is the shorter one, flip both when ones are the
scarce bit, shave surplus zeros, and split into cases by how imbalanced
x still is. Mildly imbalanced inputs go to the covering pipeline; badly
imbalanced ones go to a dedicated oracle, because there the counting
bound is already close to optimal. Every step is recorded and can be
replayed.
"""
import numpy as np

from binlcs import (
    BitString,
    Oracles,
    Params,
    approx_lcs,
    exact_lcs,
    replay_steps,
    trivial_lcs,
)

rng = np.random.default_rng(23)
p = Params.desk()
oz = Oracles()


def show(tag, x, y):
    v, trace = approx_lcs(x, y, p, oz)
    ex = exact_lcs(x, y)
    print(f"{tag:28s} case={trace.case_label:14s} bound={v:5d} "
          f"exact={ex:5d} trivial={trivial_lcs(x, y):5d}")
    assert trivial_lcs(x, y) <= v <= ex
    return trace


# near-balanced: straight into covering
x = BitString((rng.random(6000) < 0.49).astype(np.uint8))
y = BitString((rng.random(9000) < 0.52).astype(np.uint8))
tr = show("near-balanced", x, y)

# the recorded steps replay to the exact pair the solver worked on
x2, y2 = replay_steps(x, y, tr.steps)
print("  replayed solver pair:", len(x2), "x", len(y2),
      "| x2 balanced:", x2.ones() == x2.zeros())
print("  steps:", [s["op"] for s in tr.steps])

# ones-heavy strings get complemented first (zeros become the majority)
x = BitString((rng.random(6000) < 0.8).astype(np.uint8))
y = BitString((rng.random(9000) < 0.7).astype(np.uint8))
show("ones-heavy", x, y)

# extremely imbalanced: the counting bound is within (1+delta0) of the
# minority count, report it outright
x = BitString((rng.random(6000) < 0.05).astype(np.uint8))
y = BitString((rng.random(9000) < 0.5).astype(np.uint8))
show("strongly imbalanced", x, y)


def with_counts(n, ones):
    bits = np.r_[np.ones(ones, np.uint8), np.zeros(n - ones, np.uint8)]
    return BitString(rng.permutation(bits))


# in between: imbalanced enough that covering cannot take over, not so
# imbalanced that the shortcut fires; handed to the dedicated oracle
x = with_counts(6000, 2500)       # 41.7% ones
y = with_counts(9000, 6350)       # zeros are y's scarce bit
show("oracle middle ground", x, y)

# both sides nearly constant: the counting bound itself is the answer
x = BitString(np.ones(4000, np.uint8))
y = BitString((rng.random(9000) < 0.95).astype(np.uint8))
show("near-constant", x, y)

# tiny inputs shortcut to the exact table
show("tiny", BitString.from_str("0110"), BitString.from_str("1010011"))
