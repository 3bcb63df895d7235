"""Command-line surface.

One subcommand per pipeline stage plus generators and the bench harness.
Exit codes: 0 success, 1 computation/contract failure, 2 usage or parse
error. Data goes to stdout, diagnostics to stderr. Inline bit strings are
capped at 10^6 characters; longer inputs must come from files, which are
memory-mapped rather than slurped.
"""
from __future__ import annotations

import argparse
import json
import mmap
import os
import sys

import numpy as np

from .bench import EXACT_CAP_DEFAULT, GenSpec, generate, run_suite, write_report
from .core import BitString, exact_lcs, is_subsequence, trivial_lcs
from .covering import cover, dump_csv, dumps_csv, load_csv, RectangleSet
from .dp import full_lcs, reconstruct
from .errors import ConfigError, ContractError, LcsApproxError, ParseError
from .oracle import brute_ordered_max
from .params import Params, parse_fraction
from .reduction import Oracles, approx_lcs, replay_steps
from .structure import classify_blocks

INLINE_CAP = 10**6
WORKERS_ENV = "BINLCS_WORKERS"

_WS = (0x20, 0x09, 0x0A, 0x0D)


def _parse_bits(data) -> BitString:
    """Accept ASCII '0'/'1' with interleaved whitespace; any other byte is a
    parse error reported by its offset in the raw input."""
    arr = np.frombuffer(data, dtype=np.uint8)
    ok = (arr == 0x30) | (arr == 0x31)
    bad = ~(np.isin(arr, _WS) | ok)
    off = int(np.argmax(bad)) if bad.any() else -1
    byte = int(arr[off]) if off >= 0 else 0
    bits = (arr[ok] - 0x30).astype(np.uint8) if off < 0 else None
    # the frame lives on in any raised traceback; drop the buffer view so a
    # memory-mapped source can still be closed
    del arr, ok, bad
    if off >= 0:
        raise ParseError(f"invalid byte 0x{byte:02x}", off)
    return BitString(bits)


def _read_path(path: str) -> BitString:
    if path == "-":
        return _parse_bits(sys.stdin.buffer.read())
    with open(path, "rb") as f:
        if os.fstat(f.fileno()).st_size == 0:
            return BitString(np.zeros(0, dtype=np.uint8))
        with mmap.mmap(f.fileno(), 0, access=mmap.ACCESS_READ) as mm:
            return _parse_bits(mm)


def _load_spec(value: str) -> GenSpec:
    if value.lstrip().startswith("{"):
        return GenSpec.from_json(value)
    with open(value, "r", encoding="ascii") as f:
        return GenSpec.from_json(f.read())


def _resolve_input(args, axis: str) -> BitString:
    inline = getattr(args, f"{axis}_str")
    path = getattr(args, axis)
    spec = getattr(args, f"{axis}_spec")
    if inline is not None:
        if len(inline) > INLINE_CAP:
            raise ConfigError(
                f"--{axis}-str is limited to {INLINE_CAP} characters; "
                f"pass a file via --{axis} instead")
        return _parse_bits(inline.encode("ascii", errors="replace"))
    if path is not None:
        return _read_path(path)
    if spec is not None:
        return generate(_load_spec(spec))
    raise ConfigError(f"no input for {axis}: give --{axis}, --{axis}-str or --{axis}-spec")


def _resolve_pair(args) -> tuple[BitString, BitString]:
    if getattr(args, "x", None) == "-" and getattr(args, "y", None) == "-":
        raise ConfigError("--x and --y cannot both read from stdin")
    return _resolve_input(args, "x"), _resolve_input(args, "y")


def _resolve_params(args) -> tuple[Params, str]:
    p = Params.from_profile(args.profile)
    label = args.profile
    if args.set:
        over = {}
        for item in args.set:
            name, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"--set expects name=value, got {item!r}")
            if name == "w":
                over[name] = int(value)
            else:
                over[name] = parse_fraction(value)
        p = p.override(**over)
        label = label + ":" + ",".join(sorted(args.set))
    return p, label


def _check_format(args, allowed: tuple) -> str:
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise ConfigError(
            f"--format {fmt} is not supported by '{args.cmd}' (allowed: {', '.join(allowed)})")
    return fmt


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w", encoding="ascii", newline="")
    return None


# --- witness assembly for approx --trace ------------------------------------

_MAIN2_CASES = ("case1", "case2a", "case3a")


def _map_back(s: BitString, steps) -> BitString:
    # swap and zero-deletion steps leave a common subsequence valid for the
    # originals; only complement steps change its bits
    flips = sum(1 for st in steps if st.get("op") == "complement_bits")
    return s.complement() if flips % 2 else s


def _witness(x, y, bound, trace, params, oracles):
    """A common subsequence of the original pair of length exactly bound,
    plus the rectangle chain when the DP stage ran."""
    chain_rows = RectangleSet.empty()
    cand = None
    if trace.case_label in _MAIN2_CASES:
        x2, y2 = replay_steps(x, y, trace.steps)
        p = params if params.w is not None else params.with_input(len(x2))
        res = cover(x2, y2, p, eq_lcs=oracles.eq_lcs)
        value, chain = full_lcs(x2, y2, res.rects, p, trace=True)
        if chain:
            chain_rows = RectangleSet.from_rectangles(chain)
        if value == bound:
            s = reconstruct(x2, y2, chain, p, block_witnesses=res.block_witnesses)
            cand = _map_back(s, trace.steps)
    if cand is None:
        # the count anchor won (or no DP ran): a majority-bit run suffices
        if min(x.zeros(), y.zeros()) >= bound:
            cand = BitString(np.zeros(bound, dtype=np.uint8))
        elif min(x.ones(), y.ones()) >= bound:
            cand = BitString(np.ones(bound, dtype=np.uint8))
        else:
            # oracle value beat the anchor (imbalanced cases): recover a
            # witness on the final pair with the traced exact DP
            x2, y2 = replay_steps(x, y, trace.steps)
            _, tr = exact_lcs(x2, y2, trace=True)
            keep = [xi for xi, _ in tr.pairs[:bound]]
            cand = _map_back(BitString(x2.bits[np.asarray(keep, dtype=np.int64)]),
                             trace.steps)
    if len(cand) != bound or not (is_subsequence(cand, x) and is_subsequence(cand, y)):
        raise ContractError("witness assembly failed to certify the reported bound")
    return cand, chain_rows


# --- subcommand bodies -------------------------------------------------------

def _cmd_approx(args, out):
    p, label = _resolve_params(args)
    x, y = _resolve_pair(args)
    fmt = _check_format(args, ("json", "plain"))
    oracles = Oracles(eq_lcs=args.eq_oracle, imbalanced=args.imb_oracle)
    bound, trace = approx_lcs(x, y, p, oracles)
    obj = {"bound": bound}
    if args.check_exact:
        ex = exact_lcs(x, y)
        t = trivial_lcs(x, y)
        if not (t <= bound <= ex):
            raise ContractError(
                f"bound {bound} violates trivial={t} <= bound <= exact={ex}")
        obj["exact"] = ex
        obj["ratio"] = 1.0 if ex == 0 else bound / ex
    obj["case_trace"] = trace.steps
    obj["params_profile"] = label
    if fmt == "plain":
        out.write(f"{bound}\n")
    else:
        out.write(json.dumps(obj) + "\n")
    if args.trace:
        wit, chain_rows = _witness(x, y, bound, trace, p, oracles)
        out.write(dumps_csv(chain_rows))
        out.write(f"reconstructed_subsequence={''.join(map(str, wit.bits.tolist()))}\n")
    return 0


def _cmd_scalar(args, out, fn):
    x, y = _resolve_pair(args)
    fmt = _check_format(args, ("plain", "json"))
    value = fn(x, y)
    out.write(json.dumps({"value": value}) + "\n" if fmt == "json" else f"{value}\n")
    return 0


def _cmd_classify(args, out):
    p, _ = _resolve_params(args)
    x = _resolve_input(args, "x")
    fmt = _check_format(args, ("plain", "json"))
    p = p if p.w is not None else p.with_input(len(x))
    xt = x.sub(0, (len(x) // p.w) * p.w)
    types = classify_blocks(xt, p) if len(xt) else []
    if fmt == "json":
        out.write(json.dumps([
            {"block": i, "kind": t.kind, "ell": t.ell, "bit": t.bit}
            for i, t in enumerate(types)]) + "\n")
        return 0
    for i, t in enumerate(types):
        ell = "-" if t.ell is None else str(t.ell)
        bit = "-" if t.bit is None else str(t.bit)
        out.write(f"{i}\t{t.kind}\t{ell}\t{bit}\n")
    return 0


def _cmd_cover(args, out):
    p, _ = _resolve_params(args)
    x, y = _resolve_pair(args)
    res = cover(x, y, p, eq_lcs=args.eq_oracle)
    if args.dump:
        _check_format(args, ("csv",))
        dump_csv(res.rects, out)
        return 0
    fmt = _check_format(args, ("json", "plain"))
    if fmt == "json":
        out.write(json.dumps(res.diagnostics) + "\n")
    else:
        for k, v in res.diagnostics.items():
            out.write(f"{k}={v}\n")
    return 0


def _cmd_bench(args, out):
    p, _ = _resolve_params(args)
    _check_format(args, ("csv",))
    with open(args.pairs, "r", encoding="ascii") as f:
        raw = json.load(f)
    if not isinstance(raw, list):
        raise ConfigError("--pairs file must hold a JSON list of [spec_x, spec_y] pairs")
    pairs = []
    for entry in raw:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ConfigError("each pairs entry must be a two-element list")
        pairs.append((GenSpec.from_dict(entry[0]), GenSpec.from_dict(entry[1])))
    oracles = Oracles(eq_lcs=args.eq_oracle, imbalanced=args.imb_oracle)
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    rows = run_suite(pairs, p, oracles, exact_cap=args.exact_cap, workers=workers)
    if args.out:
        fresh = not (os.path.exists(args.out) and os.path.getsize(args.out) > 0)
        with open(args.out, "a", encoding="ascii", newline="") as f:
            write_report(f, rows, with_header=fresh)
    else:
        write_report(out, rows, with_header=True)
    return 0


def _cmd_gen(args, out):
    spec = _load_spec(args.spec)
    s = generate(spec)
    out.write("".join(map(str, s.bits.tolist())) + "\n")
    return 0


def _cmd_dev(args, out):
    if args.op == "ordered-max":
        with open(args.rects, "r", encoding="ascii", newline="") as f:
            rects = load_csv(f)
        out.write(f"{brute_ordered_max(rects.to_list())}\n")
        return 0
    raise ConfigError(f"unknown dev op {args.op!r}")


def _add_input_flags(sp, axes=("x", "y")):
    for axis in axes:
        g = sp.add_mutually_exclusive_group()
        g.add_argument(f"--{axis}", metavar="PATH",
                       help=f"{axis} input file of 0/1 text ('-' for stdin)")
        g.add_argument(f"--{axis}-str", metavar="BITS",
                       help=f"inline {axis} input (max {INLINE_CAP} chars)")
        g.add_argument(f"--{axis}-spec", metavar="SPEC",
                       help=f"generator spec (inline JSON or a path) for {axis}")


def _add_common(sp):
    sp.add_argument("--profile", choices=("desk", "paper"), default="desk")
    sp.add_argument("--set", action="append", metavar="NAME=VALUE",
                    help="override one parameter (exact fractions accepted)")
    sp.add_argument("--format", choices=("json", "csv", "plain"), default=None)
    sp.add_argument("--out", metavar="PATH", help="write data here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="binlcs",
        description="certified lower bounds on the LCS of binary strings")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("approx", help="certified approximate LCS lower bound")
    _add_input_flags(sp)
    _add_common(sp)
    sp.add_argument("--check-exact", action="store_true",
                    help="also run the exact DP and assert the sandwich bound")
    sp.add_argument("--trace", action="store_true",
                    help="emit the rectangle chain CSV and a witness subsequence")
    sp.add_argument("--eq-oracle", choices=("exact", "trivial"), default="exact")
    sp.add_argument("--imb-oracle", choices=("exact", "trivial"), default="exact")

    for name, about in (("exact", "exact LCS via dynamic programming"),
                        ("trivial", "majority-bit count bound")):
        sp = sub.add_parser(name, help=about)
        _add_input_flags(sp)
        _add_common(sp)

    sp = sub.add_parser("classify", help="per-block structure types of x")
    _add_input_flags(sp, axes=("x",))
    _add_common(sp)

    sp = sub.add_parser("cover", help="certified rectangle covering")
    _add_input_flags(sp)
    _add_common(sp)
    sp.add_argument("--dump", action="store_true", help="emit the rectangle CSV")
    sp.add_argument("--eq-oracle", choices=("exact", "trivial"), default="exact")

    sp = sub.add_parser("bench", help="run a generated instance suite")
    _add_common(sp)
    sp.add_argument("--pairs", required=True, metavar="PATH",
                    help="JSON list of [spec_x, spec_y] generator pairs")
    sp.add_argument("--exact-cap", type=int, default=EXACT_CAP_DEFAULT)
    sp.add_argument("--eq-oracle", choices=("exact", "trivial"), default="exact")
    sp.add_argument("--imb-oracle", choices=("exact", "trivial"), default="exact")

    sp = sub.add_parser("gen", help="produce one generated string")
    _add_common(sp)
    sp.add_argument("--spec", required=True, metavar="SPEC",
                    help="generator spec (inline JSON or a path)")

    sp = sub.add_parser("dev", help="internal test oracles")
    _add_common(sp)
    sp.add_argument("--op", required=True, choices=("ordered-max",))
    sp.add_argument("--rects", metavar="PATH", help="rectangle CSV input")
    return ap


_BODIES = {
    "approx": _cmd_approx,
    "exact": lambda a, o: _cmd_scalar(a, o, exact_lcs),
    "trivial": lambda a, o: _cmd_scalar(a, o, trivial_lcs),
    "classify": _cmd_classify,
    "cover": _cmd_cover,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
    "dev": _cmd_dev,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed to stderr
        return int(exc.code or 0)
    sink = None
    try:
        sink = _open_out(args) if args.cmd != "bench" else None
        out = sink if sink is not None else sys.stdout
        return _BODIES[args.cmd](args, out)
    except (ConfigError, ParseError) as exc:
        print(f"binlcs: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream consumer closed early (e.g. head); not our failure
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (LcsApproxError, OSError) as exc:
        print(f"binlcs: {exc}", file=sys.stderr)
        return 1
    finally:
        if sink is not None:
            sink.close()


if __name__ == "__main__":
    sys.exit(main())
