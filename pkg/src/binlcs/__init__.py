"""binlcs: certified lower bounds on the LCS of two binary strings.

The pipeline classifies fixed-width blocks of x by their oscillation
structure, covers the (x, y) plane with rectangles carrying proven LCS lower
bounds, and chains rectangles with a grid DP. A reduction wrapper handles
arbitrary (imbalanced, unequal-length) inputs. Every reported bound is exact
and never exceeds the true LCS; it is also never less than half of it.
"""
from __future__ import annotations

from .core import (
    BitString,
    Interval,
    MatchingTrace,
    exact_lcs,
    exact_lcs_batch,
    is_gamma_balanced,
    is_subsequence,
    round_to,
    trivial_lcs,
)
from .errors import (
    CapacityError,
    ConfigError,
    ContractError,
    DomainError,
    LcsApproxError,
    ParseError,
    RangeError,
)
from .params import Params, derive_w, parse_fraction
from .structure import (
    AdvantageWitness,
    PType,
    QTable,
    build_q_table,
    classify_blocks,
    fine_template,
    get_interval,
    get_p_type,
    is_q,
    satisfies_p,
)
from .covering import (
    CertifiedRectangle,
    CoverResult,
    RectangleSet,
    cover,
    dump_csv,
    dumps_csv,
    load_csv,
    make_eq_oracle,
    register_eq_oracle,
)
from .dp import DpGrid, build_grid, full_lcs, reconstruct
from .reduction import (
    Oracles,
    ReductionTrace,
    approx_lcs,
    balanced_approx,
    make_imbalanced_oracle,
    register_imbalanced_oracle,
    replay_steps,
)
from .oracle import brute_ordered_max, matched_window
from .bench import GenSpec, generate, run_suite, write_report

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "Interval",
    "MatchingTrace",
    "Params",
    "exact_lcs",
    "exact_lcs_batch",
    "is_gamma_balanced",
    "is_subsequence",
    "round_to",
    "trivial_lcs",
    "derive_w",
    "parse_fraction",
    "PType",
    "AdvantageWitness",
    "QTable",
    "classify_blocks",
    "fine_template",
    "get_p_type",
    "get_interval",
    "satisfies_p",
    "build_q_table",
    "is_q",
    "CertifiedRectangle",
    "RectangleSet",
    "CoverResult",
    "cover",
    "make_eq_oracle",
    "register_eq_oracle",
    "dump_csv",
    "dumps_csv",
    "load_csv",
    "DpGrid",
    "build_grid",
    "full_lcs",
    "reconstruct",
    "Oracles",
    "ReductionTrace",
    "approx_lcs",
    "balanced_approx",
    "replay_steps",
    "make_imbalanced_oracle",
    "register_imbalanced_oracle",
    "brute_ordered_max",
    "matched_window",
    "GenSpec",
    "generate",
    "run_suite",
    "write_report",
    "LcsApproxError",
    "ContractError",
    "RangeError",
    "DomainError",
    "CapacityError",
    "ConfigError",
    "ParseError",
    "__version__",
]
