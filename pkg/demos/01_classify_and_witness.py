"""
Block classification and advantage witnesses
============================================

Every width-w block of the left string gets a structure type: "coarse"
when some power-of-two window leans heavily on one bit, "fine" when the
block oscillates fast enough to embed a long alternating template. The
type comes with a witness: an interval of the block plus a subsequence
that any admissible right-hand window must also contain.
"""
import numpy as np

from binlcs import BitString, Params, fine_template, get_interval, get_p_type

rng = np.random.default_rng(7)
p = Params.desk(w=1024)

# a block drowning in zeros classifies coarse with bit 0
heavy = BitString((rng.random(1024) < 0.2).astype(np.uint8))
t = get_p_type(heavy, p)
print("zero-heavy block ->", t.kind, "ell =", t.ell, "bit =", t.bit)

wit = get_interval(heavy, t, p)
print("witness interval:", (wit.interval.lo, wit.interval.hi),
      "| subsequence length:", len(wit.subsequence))
# the witness is a run of the dominant bit inside the interval; its
# length alone beats half the interval, which is where the gain over
# the counting bound comes from
print("interval/2 =", len(wit.interval) / 2,
      " witness =", len(wit.subsequence))

# a perfectly alternating block classifies fine at scale 1
osc = BitString.from_str("01" * 512)
t2 = get_p_type(osc, p)
print("\nalternating block ->", t2.kind, "ell =", t2.ell)

# fine types promise the matching side contains this template
print("template any partner window must embed:",
      fine_template(p, t2.ell).to01()[:24], "...")

# a fair coin block usually still classifies coarse at this profile:
# among all power-of-two windows down to ~eps^2*w, some window drifts
# past the (1/2 + eps^2) threshold with high probability
fair = BitString(rng.integers(0, 2, 1024).astype(np.uint8))
t3 = get_p_type(fair, p)
print("\nfair random block ->", t3.kind, "ell =", t3.ell, "bit =", t3.bit)
