"""
Benchmark harness and scaling behavior
======================================

The bench module turns (generator spec, generator spec) pairs into one
CSV row each: bound, exact value when affordable, approximation ratio,
rectangle census, and per-phase timings. Specs are seeds, not strings,
so a report line pins down its instance completely.
"""
import io
import sys
import time

from binlcs import (
    GenSpec,
    Oracles,
    Params,
    cover,
    full_lcs,
    generate,
    run_suite,
    write_report,
)

p = Params.desk()
oz = Oracles(eq_lcs="trivial", imbalanced="trivial")

# a small suite over three families, exact values included (lengths are
# far below the default 4096^2 cap)
pairs = []
for s in range(4):
    pairs.append((GenSpec("uniform", 768, 10 + s, {"p": 0.5}),
                  GenSpec("uniform", 1024, 20 + s, {"p": 0.5})))
    pairs.append((GenSpec("periodic", 768, 30 + s, {"ell": 8}),
                  GenSpec("periodic", 1024, 40 + s, {"ell": 8, "noise": 0.02})))
    pairs.append((GenSpec("adversarial_imbalanced", 768, 50 + s, {"skew": 0.3}),
                  GenSpec("uniform", 1024, 60 + s, {"p": 0.5})))

rows = run_suite(pairs, p, oz)
buf = io.StringIO()
write_report(buf, rows)
print(buf.getvalue())

# ratios by family
by_fam = {}
for r in rows:
    by_fam.setdefault(r["family"], []).append(r["ratio_approx"])
for fam, rs in sorted(by_fam.items()):
    print(f"{fam:40s} mean ratio {sum(rs) / len(rs):.3f}")

# scaling probe: fix x, double y, time the covering + DP stages only.
# rectangle output grows linearly in |y|, so the wall time should land
# near 2x per doubling
print("\ncover+dp wall time, |x| = 2^13 fixed:")
x = generate(GenSpec("periodic", 2**13, 7, {"ell": 32}))
pp = p.with_input(len(x))
prev = None
for k in range(14, 18):
    y = generate(GenSpec("periodic", 2**k, 8, {"ell": 32}))
    t0 = time.perf_counter()
    res = cover(x, y, pp, eq_lcs="trivial")
    full_lcs(x, y, res.rects, pp)
    dt = time.perf_counter() - t0
    note = f"  ({dt / prev:.2f}x)" if prev else ""
    print(f"  |y| = 2^{k}: {dt * 1000:8.1f} ms{note}")
    prev = dt

sys.exit(0)
