"""
Certified rectangles and the chain DP
=====================================

The covering stage tiles the (x, y) index plane with rectangles, each
carrying a count kappa it can prove: inside this x-interval crossed with
this y-interval, some common subsequence of length kappa exists. The DP
then picks the heaviest chain of pairwise-ordered rectangles; the chain
total is the reported lower bound.
"""
from collections import Counter

import numpy as np

from binlcs import BitString, Params, cover, exact_lcs, full_lcs

rng = np.random.default_rng(11)

# x must be exactly balanced and y at least as rich in both bits;
# the reduction stage normally arranges this before covering runs
blocks = rng.permutation(np.r_[np.zeros(16, np.uint8), np.ones(16, np.uint8)])
x = BitString(np.repeat(blocks, 64))
assert x.ones() == x.zeros()
y = BitString(rng.integers(0, 2, 4096).astype(np.uint8))

p = Params.desk().with_input(len(x))
res = cover(x, y, p, eq_lcs="exact")

# census by emitting family
fams = Counter(r.source for r in res.rects)
print("rectangles by family:", dict(fams))
print("diagnostics:", {k: res.diagnostics[k]
                       for k in ("w", "m_x", "m_y", "rects")})

# chain DP over the cover, with the optimal chain traced out
value, chain = full_lcs(x, y, res.rects, p, trace=True)
print("\nchain value:", value, "over", len(chain), "rectangles; first few:")
for r in chain[:6]:
    print(f"  x[{r.imin_i}:{r.imax_i}] * y[{r.imin_j}:{r.imax_j}]"
          f"  kappa={r.kappa}  via {r.source}")

# the bound is certified, so it can never exceed the truth
truth = exact_lcs(x, y)
print("\nexact LCS:", truth)
print("bound/exact =", round(value / truth, 4), "(>= 0.5 guaranteed)")
assert value <= truth

# swapping in the cheap counting oracle for the window family trades
# bound quality for speed; soundness is unaffected
res2 = cover(x, y, p, eq_lcs="trivial")
v2, _ = full_lcs(x, y, res2.rects, p)
print("with counting oracle instead:", v2, "(still <=", truth, ")")
assert v2 <= truth
