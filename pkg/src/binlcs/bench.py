"""Instance generators and the measurement harness.

Strings are generated from a named splittable PRNG (numpy Philox, pinned in
the report header) so that any (family, length, seed) triple reproduces the
same bits on any machine. run_suite executes the full pipeline per instance
pair and reports bounds, ratios, per-phase wall times and rectangle counts;
the exact column is filled only when both strings fit under the cap.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import BitString, exact_lcs, trivial_lcs
from .covering import cover
from .dp import full_lcs
from .errors import ConfigError
from .params import Params
from .reduction import Oracles, approx_lcs, replay_steps
from .structure import classify_blocks

PRNG_NAME = "numpy-philox4x64"
SCHEMA_LINE = f"# schema=1 prng={PRNG_NAME}"
CSV_COLUMNS = (
    "family,length_x,length_y,seed,trivial,approx,exact,ratio_approx,"
    "rects_trivial,rects_square,rects_eqlcs,rects_structure,"
    "t_classify_us,t_cover_us,t_dp_us"
)

FAMILIES = ("uniform", "periodic", "coarse_blocks", "concat", "adversarial_imbalanced")
EXACT_CAP_DEFAULT = 4096


@dataclass(frozen=True)
class GenSpec:
    """One reproducible string: family + length + 64-bit seed + family args."""

    family: str
    length: int
    seed: int
    args: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown generator family {self.family!r}")
        if self.length < 0:
            raise ConfigError("length must be nonnegative")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must fit in 64 bits")

    def to_json(self) -> str:
        return json.dumps(
            {"family": self.family, "length": self.length, "seed": self.seed, **self.args},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "GenSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"generator spec is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("generator spec must be a JSON object")
        return cls.from_dict(obj)

    @classmethod
    def from_dict(cls, obj: dict) -> "GenSpec":
        try:
            family = obj["family"]
            length = int(obj["length"])
            seed = int(obj.get("seed", 0))
        except KeyError as exc:
            raise ConfigError(f"generator spec missing field {exc}") from exc
        args = {k: v for k, v in obj.items() if k not in ("family", "length", "seed")}
        return cls(family, length, seed, args)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _unit(value, name) -> float:
    v = float(value)
    if not (0.0 <= v <= 1.0):
        raise ConfigError(f"{name} must lie in [0, 1], got {value}")
    return v


def generate(spec: GenSpec) -> BitString:
    n = spec.length
    a = spec.args
    if spec.family == "uniform":
        p = _unit(a.get("p", 0.5), "one-density p")
        bits = (_rng(spec.seed).random(n) < p).astype(np.uint8)
        return BitString(bits)
    if spec.family == "periodic":
        ell = int(a.get("ell", 1))
        if ell < 1:
            raise ConfigError("periodic ell must be >= 1")
        noise = _unit(a.get("noise", 0.0), "noise rate")
        unit = np.r_[np.zeros(ell, np.uint8), np.ones(ell, np.uint8)]
        base = np.tile(unit, n // (2 * ell) + 1)[:n]
        if noise:
            flips = _rng(spec.seed).random(n) < noise
            base = base ^ flips.astype(np.uint8)
        return BitString(base)
    if spec.family == "coarse_blocks":
        blen = int(a.get("block", 256))
        if blen < 1:
            raise ConfigError("coarse block length must be >= 1")
        densities = a.get("densities", [0.05, 0.95])
        if not densities:
            raise ConfigError("coarse_blocks needs at least one density")
        dens = [_unit(d, "block density") for d in densities]
        rng = _rng(spec.seed)
        out = np.empty(n, dtype=np.uint8)
        for k in range(0, n, blen):
            d = dens[(k // blen) % len(dens)]
            out[k:k + blen] = (rng.random(min(blen, n - k)) < d).astype(np.uint8)
        return BitString(out)
    if spec.family == "concat":
        parts = [GenSpec.from_dict(p) if isinstance(p, dict) else p
                 for p in spec.args.get("parts", [])]
        if not parts:
            raise ConfigError("concat needs a nonempty parts list")
        if sum(p.length for p in parts) != n:
            raise ConfigError("concat length must equal the sum of part lengths")
        return BitString(np.concatenate([generate(p).bits for p in parts]))
    # adversarial_imbalanced: exactly round(skew*n) ones at random positions
    skew = _unit(spec.args.get("skew", 0.05), "skew")
    k = int(round(skew * n))
    bits = np.zeros(n, dtype=np.uint8)
    if k:
        bits[_rng(spec.seed).choice(n, size=k, replace=False)] = 1
    return BitString(bits)


def _phase_times(x, y, params, oracles, trace):
    """Re-run the solver phases on the normalized pair for timing; returns
    (times_us, rect_counts). Zeroes when the instance never reaches the
    covering stage (shortcut or imbalanced-oracle cases)."""
    label = trace.case_label
    if label not in ("case1", "case2a", "case3a"):
        return (0, 0, 0), {"global": 0, "trivial": 0, "trivial_square": 0,
                           "eq_lcs": 0, "structure": 0}
    x2, y2 = replay_steps(x, y, trace.steps)
    p = params if params.w is not None else params.with_input(len(x2))
    t0 = time.perf_counter()
    classify_blocks(x2.sub(0, (len(x2) // p.w) * p.w), p)
    t1 = time.perf_counter()
    res = cover(x2, y2, p, eq_lcs=oracles.eq_lcs)
    t2 = time.perf_counter()
    full_lcs(x2, y2, res.rects, p)
    t3 = time.perf_counter()
    us = (int((t1 - t0) * 1e6), int((t2 - t1) * 1e6), int((t3 - t2) * 1e6))
    return us, res.rects.counts_by_source()


def run_instance(spec_x: GenSpec, spec_y: GenSpec, params: Params | None = None,
                 oracles: Oracles | None = None, exact_cap: int = EXACT_CAP_DEFAULT) -> dict:
    p = params or Params.desk()
    oz = oracles or Oracles()
    x, y = generate(spec_x), generate(spec_y)
    bound, trace = approx_lcs(x, y, p, oz)
    times, counts = _phase_times(x, y, p, oz, trace)
    ex = None
    if len(x) <= exact_cap and len(y) <= exact_cap:
        ex = exact_lcs(x, y)
    family = spec_x.family if spec_x.family == spec_y.family else (
        spec_x.family + "|" + spec_y.family)
    ratio = None
    if ex is not None:
        ratio = 1.0 if ex == 0 else bound / ex
    return {
        "family": family,
        "length_x": len(x),
        "length_y": len(y),
        "seed": spec_x.seed,
        "trivial": trivial_lcs(x, y),
        "approx": bound,
        "exact": ex,
        "ratio_approx": ratio,
        # the global rectangle carries the same count certificate as the
        # per-interval trivial family, so it is folded into rects_trivial
        "rects_trivial": counts["trivial"] + counts["global"],
        "rects_square": counts["trivial_square"],
        "rects_eqlcs": counts["eq_lcs"],
        "rects_structure": counts["structure"],
        "t_classify_us": times[0],
        "t_cover_us": times[1],
        "t_dp_us": times[2],
    }


def run_suite(pairs, params: Params | None = None, oracles: Oracles | None = None,
              exact_cap: int = EXACT_CAP_DEFAULT, workers: int = 1) -> list:
    """Run every (GenSpec, GenSpec) pair; rows come back in input order."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(run_instance, sx, sy, params, oracles, exact_cap)
                    for sx, sy in pairs]
            return [f.result() for f in futs]
    return [run_instance(sx, sy, params, oracles, exact_cap) for sx, sy in pairs]


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def write_report(fp, rows, with_header: bool = True) -> None:
    """Append-only CSV sink; the header pins schema version and PRNG."""
    if with_header:
        fp.write(SCHEMA_LINE + "\n")
        fp.write(CSV_COLUMNS + "\n")
    cols = CSV_COLUMNS.split(",")
    for row in rows:
        fp.write(",".join(_csv_cell(row[c]) for c in cols) + "\n")
