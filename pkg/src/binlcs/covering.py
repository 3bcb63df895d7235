"""Certified-rectangle covering.

cover() emits every rectangle family of the covering stage:

* global: one rectangle over the whole (truncated) strings, certified by the
  trivial count bound.
* trivial: for every gamma*w-aligned I and every theta*w-aligned right
  endpoint, the minimal J whose trivial bound clears (1/2 - sqrt(delta))|I|,
  and the minimal J clearing (1/2 + gamma/2)|I|; certified by the trivial
  bound of the found pair.
* trivial_square: every gamma*w-aligned I against every theta*w-aligned J of
  the same length, certified by the trivial bound.
* eq_lcs: every w-block of x against every theta*w-aligned J with |J| within
  a (1 +- alpha) band of w, certified by a pluggable near-equal-length LCS
  oracle (exact DP by default).
* structure: for every classified w-block with a usable advantage witness and
  every right endpoint, the minimal J of length >= (1+0.9*beta)*w whose
  matching property holds; the certified count is the witness-backed bound.

All searches for "minimal J" exploit monotonicity (count prefixes, or the
hereditary matching property) and are realized as vectorized sorted lookups;
tests cross-check them against linear scans.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BitString, Interval, trivial_lcs
from .errors import ConfigError, ContractError
from .params import Params
from .structure import (
    AdvantageWitness,
    PType,
    build_q_table,
    classify_blocks,
    coarse_q_threshold,
    fine_reps,
    get_interval,
)

SOURCES = ("global", "trivial", "trivial_square", "eq_lcs", "structure")
_SOURCE_CODE = {name: k for k, name in enumerate(SOURCES)}

CSV_HEADER = "imin_i,imax_i,imin_j,imax_j,kappa,source"


@dataclass(frozen=True)
class CertifiedRectangle:
    imin_i: int
    imax_i: int
    imin_j: int
    imax_j: int
    kappa: int
    source: str

    def __post_init__(self):
        if not (0 <= self.imin_i <= self.imax_i and 0 <= self.imin_j <= self.imax_j):
            raise ContractError("rectangle corners out of order")
        if self.kappa < 1:
            raise ContractError("certified count must be positive")
        if self.source not in _SOURCE_CODE:
            raise ContractError(f"unknown source {self.source!r}")


class RectangleSet:
    """Column-oriented immutable set of certified rectangles in canonical
    order (imax_i, imax_j, source, imin_i, imin_j, kappa), exact duplicates
    removed. Coordinates are int32 (inputs beyond 2^31 bits are rejected
    upstream)."""

    __slots__ = ("imin_i", "imax_i", "imin_j", "imax_j", "kappa", "source_code")

    def __init__(self, imin_i, imax_i, imin_j, imax_j, kappa, source_code, normalize=True):
        cols = [
            np.ascontiguousarray(c, dtype=np.int32)
            for c in (imin_i, imax_i, imin_j, imax_j, kappa)
        ]
        code = np.ascontiguousarray(source_code, dtype=np.int8)
        n = len(code)
        if any(len(c) != n for c in cols):
            raise ContractError("column length mismatch")
        if normalize and n:
            cols, code = _canonicalize(cols, code)
        self.imin_i, self.imax_i, self.imin_j, self.imax_j, self.kappa = cols
        self.source_code = code
        for c in cols:
            c.setflags(write=False)
        code.setflags(write=False)

    def __len__(self) -> int:
        return len(self.source_code)

    def __getitem__(self, k: int) -> CertifiedRectangle:
        return CertifiedRectangle(
            int(self.imin_i[k]), int(self.imax_i[k]), int(self.imin_j[k]),
            int(self.imax_j[k]), int(self.kappa[k]), SOURCES[self.source_code[k]],
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    def to_list(self) -> list[CertifiedRectangle]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RectangleSet):
            return NotImplemented
        return len(self) == len(other) and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in self.__slots__
        )

    @classmethod
    def empty(cls) -> "RectangleSet":
        z = np.zeros(0, dtype=np.int32)
        return cls(z, z, z, z, z, np.zeros(0, dtype=np.int8), normalize=False)

    @classmethod
    def from_rectangles(cls, rects) -> "RectangleSet":
        rows = list(rects)
        return cls(
            [r.imin_i for r in rows], [r.imax_i for r in rows],
            [r.imin_j for r in rows], [r.imax_j for r in rows],
            [r.kappa for r in rows],
            np.asarray([_SOURCE_CODE[r.source] for r in rows], dtype=np.int8),
        )

    def counts_by_source(self) -> dict:
        out = {}
        for k, name in enumerate(SOURCES):
            out[name] = int(np.count_nonzero(self.source_code == k))
        return out


# canonical sort significance: imax_i, imax_j, source, imin_i, imin_j, kappa,
# expressed as indices into cols + [code]
_SIGNIFICANCE = (1, 3, 5, 0, 2, 4)


def _key_layout(bounds):
    """Greedy split of the significance-ordered fields into int64 budgets.

    bounds are inclusive per-field maxima in cols + [code] order; the result
    is a list of key groups, each a list of (field index, bit width) whose
    widths sum to <= 63, so rows packed group-wise into int64 keys compare
    exactly like the lexicographic order over the raw fields."""
    layout, cur, used = [], [], 0
    for i in _SIGNIFICANCE:
        b = int(bounds[i]).bit_length() + 1
        if used + b > 63:
            layout.append(cur)
            cur, used = [], 0
        cur.append((i, b))
        used += b
    layout.append(cur)
    return layout


def _pack_keys(layout, n, vals):
    """vals: six arrays or scalars in cols + [code] order."""
    keys = []
    for g in layout:
        key = np.zeros(n, dtype=np.int64)
        for i, b in g:
            key <<= b
            v = vals[i]
            if isinstance(v, np.ndarray):
                key |= v.astype(np.int64, copy=False)
            elif v:
                key |= int(v)
        keys.append(key)
    return keys


def _sorted_unique_keys(keys):
    if len(keys) == 1:
        order = np.argsort(keys[0], kind="stable")
    else:
        order = np.lexsort(tuple(reversed(keys)))
    keys = [k[order] for k in keys]
    n = len(order)
    if n > 1:
        same = np.ones(n - 1, dtype=bool)
        for k in keys:
            same &= k[1:] == k[:-1]
        keep = np.ones(n, dtype=bool)
        keep[1:] = ~same
        keys = [k[keep] for k in keys]
    return keys


def _unpack_keys(layout, keys):
    out = [None] * 6
    for g, key in zip(layout, keys):
        shift = 0
        for i, b in reversed(g):
            field = (key >> shift) & ((1 << b) - 1)
            out[i] = field.astype(np.int8 if i == 5 else np.int32)
            shift += b
    return out[:5], out[5]


def _canonicalize(cols, code):
    """Sort rows into canonical order and drop exact duplicates.

    Fast path packs the six fields into as few int64 keys as their value
    ranges allow (usually two). The keys encode rows bijectively, so the
    sort, the duplicate scan, and the surviving columns are all computed on
    the keys alone; the wide int32 columns are only rebuilt at the end by
    shifts, never gathered through a permutation. Each key costs one stable
    sorting pass, adaptive and near-linear on mostly-ordered input. Negative
    values fall back to a plain lexsort."""
    allc = cols + [code]
    n = len(code)
    if any(int(c.min(initial=0)) < 0 for c in allc):
        order = np.lexsort(tuple(allc[i] for i in reversed(_SIGNIFICANCE)))
        out = [c[order] for c in allc]
        same = np.ones(n - 1, dtype=bool)
        for c in out:
            same &= c[1:] == c[:-1]
        keep = np.ones(n, dtype=bool)
        keep[1:] = ~same
        return [c[keep] for c in out[:5]], out[5][keep]
    layout = _key_layout([int(c.max(initial=0)) for c in allc])
    keys = _sorted_unique_keys(_pack_keys(layout, n, allc))
    return _unpack_keys(layout, keys)


def dump_csv(rects: RectangleSet, fp) -> None:
    """Write the canonical CSV (LF newlines). fp is a text file object."""
    fp.write(CSV_HEADER + "\n")
    body = np.column_stack([rects.imin_i, rects.imax_i, rects.imin_j, rects.imax_j, rects.kappa])
    for row, code in zip(body.tolist(), rects.source_code.tolist()):
        fp.write(",".join(str(v) for v in row) + "," + SOURCES[code] + "\n")


def dumps_csv(rects: RectangleSet) -> str:
    buf = io.StringIO()
    dump_csv(rects, buf)
    return buf.getvalue()


def load_csv(fp) -> RectangleSet:
    header = fp.readline().strip()
    if header != CSV_HEADER:
        raise ConfigError(f"unexpected rectangle CSV header {header!r}")
    rows = [line.strip().split(",") for line in fp if line.strip()]
    return RectangleSet(
        [int(r[0]) for r in rows], [int(r[1]) for r in rows],
        [int(r[2]) for r in rows], [int(r[3]) for r in rows],
        [int(r[4]) for r in rows],
        np.asarray([_SOURCE_CODE[r[5]] for r in rows], dtype=np.int8),
    )


# -- the near-equal-length LCS oracle ----------------------------------------


def _check_band(nx: int, ny: int, alpha: Fraction) -> None:
    if not ((1 - alpha) * nx <= ny <= (1 + alpha) * nx):
        raise ContractError(
            f"window length {ny} outside the (1 +- {alpha}) band around {nx}"
        )


def make_eq_oracle(kind: str, params: Params):
    """Shipped oracles: "exact" (full DP; the default), "trivial" (count
    bound; fast and still sound). "external" must be registered first via
    register_eq_oracle."""
    if kind in _EXTERNAL_EQ:
        fn = _EXTERNAL_EQ[kind]
    elif kind == "exact":
        from .core import exact_lcs

        fn = lambda xb, yb: exact_lcs(xb, yb)
    elif kind == "trivial":
        fn = lambda xb, yb: trivial_lcs(xb, yb)
    else:
        raise ConfigError(f"unknown eq oracle {kind!r}")

    alpha = params.alpha

    def oracle(xb: BitString, yb: BitString) -> int:
        _check_band(len(xb), len(yb), alpha)
        return int(fn(xb, yb))

    oracle.kind = kind
    return oracle


_EXTERNAL_EQ: dict = {}


def register_eq_oracle(name: str, fn) -> None:
    """Hook for an external near-linear equal-length implementation."""
    _EXTERNAL_EQ[name] = fn


# -- covering ----------------------------------------------------------------


@dataclass
class CoverResult:
    rects: RectangleSet
    diagnostics: dict
    block_types: list
    block_witnesses: list

    def __iter__(self):
        return iter(self.rects)


class _Emit:
    """Accumulates rectangle rows pre-packed into canonical sort keys.

    The y-side corners every family emits are whole grid cells, so they are
    carried in grid units; with the x side bounded by the truncated length,
    the five order-significant fields (imax_i, imax_j, source, imin_i,
    imin_j) then fit a single int64 key per row at bench scales. kappa rides
    in an int32 sidecar: within one covering run it is a pure function of
    the other five fields (each family derives it deterministically from the
    rectangle geometry), so the key alone decides both order and duplicate
    identity, and key ties may be permuted freely without changing the
    output.

    Rows arrive in named streams. A stream flagged presorted promises its
    chunks concatenate to a key-ascending run (the grid family enumerates
    b-major then endpoint-major to earn this); other streams are sorted at
    build time. build() then merges the runs positionally, so no sort ever
    touches the dominant stream."""

    def __init__(self, nx, Y, gy):
        self.gy = gy
        # field order here is canonical sort significance
        bounds = (nx, Y, len(SOURCES) - 1, nx, Y)
        self.layout, cur, used = [], [], 0
        for f, bound in enumerate(bounds):
            b = int(bound).bit_length()
            if used + b > 63:
                self.layout.append(cur)
                cur, used = [], 0
            cur.append((f, b))
            used += b
        self.layout.append(cur)
        self.streams = {}

    def add(self, imin_i, imax_i, jmin_g, jmax_g, kappa, code, stream, presorted):
        # j corners arrive in grid units; code may be a per-row array
        vals = (imax_i, jmax_g, code, imin_i, jmin_g)
        n = 1
        for v in vals:
            if isinstance(v, np.ndarray) and v.ndim:
                n = len(v)
                break
        keys = []
        for g in self.layout:
            key = np.zeros(n, dtype=np.int64)
            for f, b in g:
                key <<= b
                v = vals[f]
                if isinstance(v, np.ndarray) and v.ndim:
                    key |= v.astype(np.int64, copy=False)
                elif v:
                    key |= int(v)
            keys.append(key)
        if isinstance(kappa, np.ndarray) and kappa.ndim:
            kap = kappa.astype(np.int32, copy=False)
        else:
            kap = np.full(n, kappa, dtype=np.int32)
        st = self.streams.setdefault(stream, {"presorted": presorted, "chunks": []})
        st["chunks"].append((keys, kap))

    def build(self) -> RectangleSet:
        if not self.streams:
            return RectangleSet.empty()
        ng = len(self.layout)
        if ng > 1:
            # wide layout (inputs near the 2^31 cap): one stable multi-key sort
            chunks = [c for s in self.streams.values() for c in s["chunks"]]
            keys = [np.concatenate([c[0][g] for c in chunks]) for g in range(ng)]
            kap = np.concatenate([c[1] for c in chunks])
            order = np.lexsort(tuple(reversed(keys)))
            keys = [k[order] for k in keys]
            kap = kap[order]
            if len(kap) > 1:
                same = np.ones(len(kap) - 1, dtype=bool)
                for k in keys:
                    same &= k[1:] == k[:-1]
                keep = np.ones(len(kap), dtype=bool)
                keep[1:] = ~same
                keys = [k[keep] for k in keys]
                kap = kap[keep]
        else:
            runs = []
            for s in self.streams.values():
                k = np.concatenate([c[0][0] for c in s["chunks"]])
                v = np.concatenate([c[1] for c in s["chunks"]])
                if not s["presorted"] and len(k) > 1:
                    o = np.argsort(k)  # key ties are identical rows
                    k, v = k[o], v[o]
                runs.append((k, v))
            runs.sort(key=lambda r: len(r[0]), reverse=True)
            k, v = runs[0]
            if len(runs) > 1:
                rk = np.concatenate([r[0] for r in runs[1:]])
                rv = np.concatenate([r[1] for r in runs[1:]])
                o = np.argsort(rk)
                rk, rv = rk[o], rv[o]
                pos = np.searchsorted(k, rk) + np.arange(len(rk), dtype=np.int64)
                n = len(k) + len(rk)
                mk = np.empty(n, dtype=np.int64)
                mv = np.empty(n, dtype=np.int32)
                rest = np.ones(n, dtype=bool)
                rest[pos] = False
                mk[pos], mv[pos] = rk, rv
                mk[rest], mv[rest] = k, v
                k, v = mk, mv
            if len(k) > 1 and bool(np.any(k[1:] == k[:-1])):
                keep = np.ones(len(k), dtype=bool)
                keep[1:] = k[1:] != k[:-1]
                k, v = k[keep], v[keep]
            keys, kap = [k], v
        out = [None] * 5
        for g, key in zip(self.layout, keys):
            shift = 0
            for f, b in reversed(g):
                field = (key >> shift) & ((1 << b) - 1)
                out[f] = field.astype(np.int8 if f == 2 else np.int32)
                shift += b
        gy = np.int32(self.gy)
        return RectangleSet(
            out[3], out[0], out[4] * gy, out[1] * gy, kap, out[2],
            normalize=False,
        )


def _aligned_prefixes(s: BitString, step: int, n: int):
    # int32 keeps every derived needle/count array half-width (n < 2^31)
    idx = np.arange(0, n + 1, step, dtype=np.int64)
    ones = s.prefix_ones[idx].astype(np.int32)
    zeros = idx.astype(np.int32) - ones
    return zeros, ones


def _sqrt_floor_2Ldelta(L: int, delta: Fraction) -> int:
    # floor(2 * L * sqrt(delta)) in exact integer arithmetic
    return math.isqrt(4 * L * L * delta.numerator // delta.denominator)


def threshold_low(L: int, delta: Fraction) -> int:
    """ceil((1/2 - sqrt(delta)) * L), exactly."""
    return max(0, (L - _sqrt_floor_2Ldelta(L, delta) + 1) // 2)


def threshold_high(L: int, gamma: Fraction) -> int:
    """ceil((1/2 + gamma/2) * L), exactly."""
    num = L * (gamma.denominator + gamma.numerator)
    return -(-num // (2 * gamma.denominator))


def _minimal_start(prefix_pts: np.ndarray, need: np.ndarray) -> np.ndarray:
    """Largest aligned index p with prefix_pts[p] <= need, else -1.
    prefix_pts is nondecreasing; vectorized."""
    return np.searchsorted(prefix_pts, need, side="right").astype(np.int32) - 1


def _trivial_kappa(z_i, o_i, dz, do):
    return np.maximum(np.minimum(z_i, dz), np.minimum(o_i, do))


def cover(x: BitString, y: BitString, params: Params, eq_lcs="exact") -> CoverResult:
    """Run the covering stage. eq_lcs is an oracle name ("exact", "trivial",
    a registered external name) or a callable (x_block, y_window) -> count."""
    if x.ones() != x.zeros() or x.ones() > min(y.ones(), y.zeros()):
        raise ContractError(
            "covering needs 1(x) = 0(x) <= min(1(y), 0(y)); run the reduction first"
        )
    if len(x) >= 2**31 or len(y) >= 2**31:
        raise ContractError("inputs beyond 2^31 bits are not supported")
    p = params if params.w is not None else params.with_input(len(x))
    w = p.w
    nx = (len(x) // w) * w
    ny = (len(y) // w) * w
    diag = {
        "w": w,
        "truncated_x_bits": len(x) - nx,
        "truncated_y_bits": len(y) - ny,
        "grid_x": p.grid_x,
        "grid_y": p.grid_y,
    }
    if nx == 0 or ny == 0:
        diag["rects"] = 0
        return CoverResult(RectangleSet.empty(), diag, [], [])

    xt = x.sub(0, nx)
    yt = y.sub(0, ny)
    gx, gy = p.grid_x, p.grid_y
    X, Y = nx // gx, ny // gy
    m_x, m_y = nx // w, ny // w
    diag.update(m_x=m_x, m_y=m_y, grid_cells_x=X, grid_cells_y=Y)

    Zx, Ox = _aligned_prefixes(xt, gx, nx)
    Zy, Oy = _aligned_prefixes(yt, gy, ny)
    emit = _Emit(nx, Y, gy)

    # (a) global rectangle
    k0 = trivial_lcs(xt, yt)
    if k0 >= 1:
        emit.add(0, nx, 0, Y, k0, _SOURCE_CODE["global"],
                 stream="global", presorted=True)

    _family_grid(emit, p, Zx, Ox, Zy, Oy, gx, gy, X, Y)
    _family_eq(emit, xt, yt, p, eq_lcs, Zy, Oy, w, gy, Y, m_x)
    types, wits = _family_structure(emit, xt, yt, p, w, gy, Y, m_x)

    rects = emit.build()
    # enumeration size guard: every family has a closed-form row bound
    pair_count = X * (X + 1) // 2
    cap = (
        1
        + 2 * pair_count * Y            # minimal-J family, two thresholds
        + pair_count * (Y + 1)          # squares
        + m_x * (Y + 1) * (2 * int(p.alpha * w) // gy + 1)   # eq band
        + m_x * Y                       # structure
    )
    if len(rects) > cap:
        raise ContractError(f"rectangle enumeration exceeded its bound ({len(rects)} > {cap})")
    diag["rects"] = len(rects)
    diag["by_source"] = rects.counts_by_source()
    return CoverResult(rects, diag, types, wits)


def _family_grid(emit, p, Zx, Ox, Zy, Oy, gx, gy, X, Y):
    """Minimal-start trivial rectangles and aligned squares, emitted jointly.

    Enumeration runs b-major (right x corner), then endpoint-major on the y
    grid, so rows leave already in canonical key order: within one (b, e)
    cell the two trivial start candidates per a (deduplicated, start
    ascending) precede the square row, and the a axis ascends inside each
    source. The stream therefore never needs sorting. Per (a, e) cell the
    trivial start is the largest aligned s whose window still carries the
    threshold count on some bit; the square start is s = e - |I|/gy."""
    t_low = np.asarray(
        [0] + [threshold_low(d * gx, p.delta) for d in range(1, X + 1)],
        dtype=np.int32)
    t_high = np.asarray(
        [0] + [threshold_high(d * gx, p.gamma) for d in range(1, X + 1)],
        dtype=np.int32)
    src_t = _SOURCE_CODE["trivial"]
    src_q = _SOURCE_CODE["trivial_square"]
    for b in range(1, X + 1):
        arng = np.arange(b, dtype=np.int32)
        z_I = Zx[b] - Zx[:b]
        o_I = Ox[b] - Ox[:b]
        d = b - arng
        Tl, Th = t_low[d], t_high[d]
        lgq = ((d.astype(np.int64) * gx) // gy).astype(np.int32)
        # column layout of one endpoint row: 2 trivial slots per a, then the
        # square slot per a
        acol = np.concatenate([np.repeat(arng, 2), arng])
        srow = np.concatenate(
            [np.full(2 * b, src_t, np.int8), np.full(b, src_q, np.int8)])
        zrow, orow = z_I[acol], o_I[acol]
        is_triv = (srow == src_t)[None, :]
        echunk = max(1, (1 << 19) // (3 * b))
        for e0 in range(0, Y, echunk):
            e_idx = np.arange(e0 + 1, min(e0 + echunk, Y) + 1, dtype=np.int32)
            E = len(e_idx)
            Zye, Oye = Zy[e_idx], Oy[e_idx]
            starts = []
            for T in (Tl, Th):
                pz = _minimal_start(Zy, Zye[None, :] - T[:, None])
                po = _minimal_start(Oy, Oye[None, :] - T[:, None])
                pz[z_I < T] = -1
                po[o_I < T] = -1
                st = np.maximum(pz, po)
                st[T < 1] = -1
                starts.append(st)  # (b, E)
            sl, sh = starts
            both = (sl >= 0) & (sh >= 0)
            s1 = np.where(both, np.minimum(sl, sh), np.maximum(sl, sh))
            s2 = np.where(both & (sl != sh), np.maximum(sl, sh), np.int32(-1))
            sq = e_idx[None, :] - lgq[:, None]
            S = np.concatenate(
                [np.stack([s1.T, s2.T], axis=2).reshape(E, 2 * b), sq.T],
                axis=1)  # (E, 3b)
            Sc = np.maximum(S, 0)
            dz = Zye[:, None] - Zy[Sc]
            do = Oye[:, None] - Oy[Sc]
            kap = np.maximum(np.minimum(zrow, dz), np.minimum(orow, do))
            # trivial rows carry their threshold count by construction;
            # squares only exist once they certify at least one match
            valid = (S >= 0) & (is_triv | (kap >= 1))
            if not valid.any():
                continue
            shape = (E, 3 * b)
            emit.add(
                np.broadcast_to(acol, shape)[valid] * gx, b * gx,
                S[valid], np.broadcast_to(e_idx[:, None], shape)[valid],
                kap[valid], np.broadcast_to(srow, shape)[valid],
                stream="grid", presorted=True,
            )


def _family_eq(emit, xt, yt, p, eq_lcs, Zy, Oy, w, gy, Y, m_x):
    code = _SOURCE_CODE["eq_lcs"]
    alpha = p.alpha
    lg_min = max(1, -((-(w - int(alpha * w))) // gy))  # ceil((1-alpha)w / gy)
    lg_max = (w + int(alpha * w)) // gy                # floor((1+alpha)w / gy)
    kind = eq_lcs if isinstance(eq_lcs, str) else None
    oracle = make_eq_oracle(eq_lcs, p) if isinstance(eq_lcs, str) else eq_lcs

    for k in range(m_x):
        xb = xt.sub(k * w, (k + 1) * w)
        zb, ob = xb.zeros(), xb.ones()
        for lg in range(lg_min, lg_max + 1):
            n_pos = Y - lg + 1
            if n_pos <= 0:
                continue
            q = np.arange(n_pos, dtype=np.int64)
            if kind == "trivial":
                dz = Zy[q + lg] - Zy[q]
                do = Oy[q + lg] - Oy[q]
                kap = _trivial_kappa(zb, ob, dz, do)
            elif kind == "exact":
                kap = _batched_window_lcs(xb, yt, lg * gy, gy, n_pos)
            else:
                kap = np.asarray(
                    [oracle(xb, yt.sub(int(qq) * gy, int(qq) * gy + lg * gy)) for qq in q],
                    dtype=np.int64,
                )
                # a common-subsequence count cannot exceed the block length
                if int(kap.max(initial=0)) > w:
                    raise ContractError(
                        f"eq oracle returned a count above the {w}-bit block"
                    )
            keep = kap >= 1
            if keep.any():
                emit.add(k * w, (k + 1) * w, q[keep], q[keep] + lg, kap[keep],
                         code, stream="eq", presorted=False)


def _batched_window_lcs(xb: BitString, yt: BitString, win_len: int, step: int, n_pos: int):
    from numpy.lib.stride_tricks import as_strided

    from .core import exact_lcs_batch

    ymat = as_strided(
        yt.bits, shape=(n_pos, win_len), strides=(step * yt.bits.strides[0], yt.bits.strides[0])
    )
    xmat = np.broadcast_to(xb.bits, (n_pos, len(xb)))
    return exact_lcs_batch(xmat, ymat).astype(np.int64)


def _family_structure(emit, xt, yt, p, w, gy, Y, m_x):
    code = _SOURCE_CODE["structure"]
    types = classify_blocks(xt, p)
    wits = []
    qt = build_q_table(yt)
    alpha_gain = p.alpha * w
    min_len = -((-((1 + Fraction(9, 10) * p.beta) * w)) // 1)  # ceil((1+0.9*beta)*w)
    e_idx = np.arange(1, Y + 1, dtype=np.int64)
    reach_cache: dict = {}

    for k, t in enumerate(types):
        if t.kind == "unclassified":
            wits.append(None)
            continue
        wit = get_interval(xt.sub(k * w, (k + 1) * w), t, p)
        wits.append(wit)
        if wit.degenerate:
            continue
        kap = int(Fraction(len(wit.interval), 2) + alpha_gain)
        kap = min(kap, len(wit.subsequence))
        if t.kind == "coarse":
            kap = min(kap, coarse_q_threshold(p.eps, t.ell))
        if kap < 1:
            continue
        # largest aligned start with the matching property, per right endpoint
        key = (t.kind, t.ell, t.bit)
        if key not in reach_cache:
            reach_cache[key] = _property_start_bound(qt, t, p, gy, Y)
        p_star = reach_cache[key]
        # the length floor |J| >= min_len caps the start from above
        cap = (e_idx * gy - int(min_len)) // gy
        start = np.minimum(p_star, cap)
        ok = start >= 0
        if not ok.any():
            continue
        s = start[ok]
        e = e_idx[ok]
        lo = k * w + wit.interval.lo
        hi = k * w + wit.interval.hi
        emit.add(lo, hi, s, e, kap, code, stream="structure", presorted=False)
    return types, wits


def _property_start_bound(qt, t: PType, p: Params, gy: int, Y: int) -> np.ndarray:
    """For each aligned right endpoint e, the largest aligned start s such
    that y[s:e] has the matching property for t (-1 when none). Monotone
    structure: counts are prefix differences; the fine chain landing is
    nondecreasing in the start."""
    e_pos = np.arange(1, Y + 1, dtype=np.int64) * gy
    if t.kind == "coarse":
        pref = qt.y.prefix_ones if t.bit else (np.arange(len(qt.y) + 1) - qt.y.prefix_ones)
        pts = pref[np.arange(0, Y * gy + 1, gy)]
        need = pts[1:] - coarse_q_threshold(p.eps, t.ell)
        return _minimal_start(pts, need)
    reps = fine_reps(p, t.ell)
    starts = np.arange(0, Y * gy + 1, gy, dtype=np.int64)
    landing = qt.chain_landing(t.ell, reps, starts)
    # landing is nondecreasing; valid starts for endpoint e are those with
    # landing <= e, i.e. a prefix of the start grid
    return np.searchsorted(landing, e_pos, side="right").astype(np.int64) - 1
