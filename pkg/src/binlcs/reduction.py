"""Reduction from arbitrary binary inputs to the balanced core solver.

approx_lcs normalizes the pair (swap so x is the shorter string, complement
so zeros dominate), takes the count bound outright when the zero side is
heavily dominant, and otherwise deletes zeros from the right of both strings
until the minority counts agree, then dispatches by which string attains each
minimum:

* case 1: x is exactly balanced -- covering + rectangle DP directly.
* case 2 (1(x) = 0(y) = t): either x is nearly balanced (case 2a: delete its
  surplus zeros and run the core solver) or the ones of x are scarce
  (case 2b: complement and hand off to the imbalanced oracle).
* case 3 (0(x) = 1(y) = t): complementing both strings lands exactly in
  case 2; the trace records the extra complement step.

Every transformation only deletes characters or applies LCS-preserving maps,
so the final bound is a true lower bound for the ORIGINAL pair; the returned
trace replays to the pair handed to the inner solver. The result is clamped
from below by the count bound of the original pair, which keeps the
unconditional 1/2-approximation even at desk-scale constants.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BitString, exact_lcs, trivial_lcs
from .covering import cover
from .dp import full_lcs
from .errors import ConfigError, ContractError
from .params import Params


@dataclass(frozen=True)
class Oracles:
    """Pluggable backends: eq_lcs feeds the covering stage, imbalanced
    serves case 2b/3b. Either a shipped name or a callable."""

    eq_lcs: object = "exact"
    imbalanced: object = "exact"


_EXTERNAL_IMB: dict = {}


def register_imbalanced_oracle(name: str, fn) -> None:
    _EXTERNAL_IMB[name] = fn


def make_imbalanced_oracle(kind, params: Params):
    if callable(kind):
        fn = kind
    elif kind in _EXTERNAL_IMB:
        fn = _EXTERNAL_IMB[kind]
    elif kind == "exact":
        fn = exact_lcs
    elif kind == "trivial":
        fn = trivial_lcs
    else:
        raise ConfigError(f"unknown imbalanced oracle {kind!r}")
    rho = params.rho

    def oracle(x: BitString, y: BitString) -> int:
        if len(x) > len(y):
            raise ContractError("imbalanced oracle needs |x| <= |y|")
        if x.zeros() != y.ones():
            raise ContractError(
                f"imbalanced oracle needs 0(x) = 1(y), got {x.zeros()} != {y.ones()}"
            )
        if Fraction(x.zeros()) > (Fraction(1, 2) - rho) * len(x):
            raise ContractError("imbalanced oracle needs 0(x) <= (1/2 - rho)|x|")
        return int(fn(x, y))

    return oracle


@dataclass
class ReductionTrace:
    """Normalization steps plus the certified bound. Steps replay on the
    original inputs to the pair handed to the inner solver; case_label
    entries are annotations and do not transform anything."""

    steps: list = field(default_factory=list)
    final_bound: int = 0

    @property
    def case_label(self) -> str | None:
        for s in reversed(self.steps):
            if s.get("op") == "case_label":
                return s["label"]
        return None


def _delete_zeros_right(s: BitString, count: int) -> BitString:
    if count == 0:
        return s
    zp = s.zeros_positions
    if count > len(zp):
        raise ContractError(f"cannot delete {count} zeros from a string with {len(zp)}")
    return BitString(np.delete(s.bits, zp[len(zp) - count:]))


def replay_steps(x: BitString, y: BitString, steps) -> tuple:
    """Apply the transformation steps of a trace to a pair."""
    for s in steps:
        op = s["op"]
        if op == "swap_xy":
            x, y = y, x
        elif op == "complement_bits":
            x, y = x.complement(), y.complement()
        elif op == "truncate_zeros":
            x = _delete_zeros_right(x, s["x"])
            y = _delete_zeros_right(y, s["y"])
        elif op == "case_label":
            pass
        else:
            raise ConfigError(f"unknown trace step {op!r}")
    return x, y


def _main2(x: BitString, y: BitString, params: Params, oracles: Oracles) -> int:
    p = params if params.w is not None else params.with_input(len(x))
    res = cover(x, y, p, eq_lcs=oracles.eq_lcs)
    value, _ = full_lcs(x, y, res.rects, p)
    return value


def _case2(x, y, params, oracles, steps, prefix):
    # here 1(x) = 0(y) = t <= 0(x); x may carry surplus zeros
    if Fraction(x.ones()) >= (Fraction(1, 2) - params.rho) * len(x):
        steps.append({"op": "case_label", "label": prefix + "a"})
        surplus = x.zeros() - x.ones()
        if surplus:
            steps.append({"op": "truncate_zeros", "x": surplus, "y": 0})
            x = _delete_zeros_right(x, surplus)
        return _main2(x, y, params, oracles)
    steps.append({"op": "case_label", "label": prefix + "b"})
    steps.append({"op": "complement_bits"})
    oracle = make_imbalanced_oracle(oracles.imbalanced, params)
    return oracle(x.complement(), y.complement())


def balanced_approx(x: BitString, y: BitString, params: Params | None = None,
                    oracles: Oracles | None = None, _steps: list | None = None) -> int:
    """Core dispatch for pairs with min(1(x),1(y)) = min(0(x),0(y))."""
    p = params or Params.desk()
    oz = oracles or Oracles()
    steps = _steps if _steps is not None else []
    if len(x) > len(y):
        raise ContractError("balanced dispatch needs |x| <= |y|")
    t = min(x.ones(), y.ones())
    if t != min(x.zeros(), y.zeros()):
        raise ContractError("balanced dispatch needs equal minority counts")

    if x.zeros() == t and x.ones() == t:
        steps.append({"op": "case_label", "label": "case1"})
        return _main2(x, y, p, oz)
    if y.zeros() == t and x.ones() == t:
        return _case2(x, y, p, oz, steps, "case2")
    if not (x.zeros() == t and y.ones() == t):
        raise ContractError("count case analysis is not exhaustive; dispatch bug")
    steps.append({"op": "complement_bits"})
    return _case2(x.complement(), y.complement(), p, oz, steps, "case3")


def approx_lcs(x: BitString, y: BitString, params: Params | None = None,
               oracles: Oracles | None = None):
    """Certified LCS lower bound for arbitrary binary strings.

    Returns (bound, ReductionTrace). The bound never drops below the count
    bound of the original pair, hence never below half the true LCS.
    """
    p = params or Params.desk()
    oz = oracles or Oracles()
    steps = []
    cx, cy = x, y
    if len(cx) > len(cy):
        cx, cy = cy, cx
        steps.append({"op": "swap_xy"})
    if min(cx.zeros(), cy.zeros()) < min(cx.ones(), cy.ones()):
        cx, cy = cx.complement(), cy.complement()
        steps.append({"op": "complement_bits"})
    min0 = min(cx.zeros(), cy.zeros())
    min1 = min(cx.ones(), cy.ones())
    anchor = max(min0, min1)  # trivial bound; swap/complement invariant

    if min0 >= (1 + p.delta0) * min1:
        steps.append({"op": "case_label", "label": "trivial_shortcut"})
        return anchor, ReductionTrace(steps, anchor)

    surplus = min0 - min1
    if surplus:
        steps.append({"op": "truncate_zeros", "x": surplus, "y": surplus})
        cx = _delete_zeros_right(cx, surplus)
        cy = _delete_zeros_right(cy, surplus)
    inner = balanced_approx(cx, cy, p, oz, _steps=steps)
    bound = max(anchor, inner)
    return bound, ReductionTrace(steps, bound)
