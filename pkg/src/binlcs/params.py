"""Parameter profiles.

All constants are exact Fractions. Two named profiles ship:

* desk: relaxed constants sized so every guarantee is exercisable at test
  scale (block widths 2**10..2**12, strings up to 2**20) while keeping all
  unconditional soundness facts intact.
* paper: the asymptotic ladder (eps=1e-5 with the derived chain of constants);
  its advantage guarantees only bite at astronomically large inputs, so it is
  exposed for completeness and parameter-validation tests.

The block width w is derived from the input length as the closest power of
two to n/log2(n) (ties toward the smaller; never above n; 1 for n <= 2).
Grid steps gamma*w and theta*w must be powers of two so that block boundaries
stay on-grid; gamma and theta are therefore restricted to unit-numerator
dyadic fractions. Steps clamp to 1 when the product falls below 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .errors import ConfigError, ContractError

_FRACTION_FIELDS = ("eps", "delta_code", "alpha", "beta", "gamma", "delta",
                    "theta", "rho", "delta0")


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def parse_fraction(text: str) -> Fraction:
    """Parse '1/8', '0.125', '1/2**68' style exact constants."""

    def side(tok: str) -> Fraction:
        tok = tok.strip()
        if "**" in tok:
            base, _, exp = tok.partition("**")
            return Fraction(int(base)) ** int(exp)
        return Fraction(tok)

    try:
        if "/" in text:
            num, _, den = text.partition("/")
            return side(num) / side(den)
        return side(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse fraction {text!r}: {exc}") from None


@dataclass(frozen=True)
class Params:
    profile: str
    eps: Fraction
    delta_code: Fraction
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction
    theta: Fraction
    rho: Fraction
    delta0: Fraction
    w: int | None = None

    def __post_init__(self):
        for name in _FRACTION_FIELDS:
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))
                v = getattr(self, name)
            if not (0 < v < 1):
                raise ConfigError(f"{name} = {v} outside (0, 1)")
        if self.theta != self.delta:
            raise ConfigError(f"theta ({self.theta}) must equal delta ({self.delta})")
        if self.gamma < self.theta:
            raise ConfigError("gamma must be >= theta (x grid no finer than y grid)")
        for name in ("gamma", "theta"):
            v = getattr(self, name)
            if v.numerator != 1 or not _is_pow2(v.denominator):
                raise ConfigError(f"{name} must be 1/2**k, got {v}")
        if self.profile == "paper":
            chain = [
                ("delta_code", self.eps**4 / 2),
                ("beta", self.alpha**2),
                ("gamma", self.beta**2 / 2),
                ("delta", self.gamma**8),
                ("delta0", 5 * self.delta),
                ("rho", self.delta / 10),
            ]
            for name, want in chain:
                if getattr(self, name) != want:
                    raise ConfigError(f"paper profile requires {name} = {want}")
        if self.w is not None:
            if not _is_pow2(self.w):
                raise ConfigError(f"w must be a power of two, got {self.w}")

    # -- profiles ------------------------------------------------------------

    @classmethod
    def desk(cls, w: int | None = None) -> "Params":
        return cls(
            profile="desk",
            eps=Fraction(1, 20),
            delta_code=Fraction(1, 100),
            alpha=Fraction(1, 4),
            beta=Fraction(1, 8),
            gamma=Fraction(1, 4),
            delta=Fraction(1, 8),
            theta=Fraction(1, 8),
            rho=Fraction(1, 20),
            delta0=Fraction(1, 10),
            w=w,
        )

    @classmethod
    def paper(cls, w: int | None = None) -> "Params":
        eps = Fraction(1, 10**5)
        alpha = Fraction(1, 2**68)
        beta = alpha**2
        gamma = beta**2 / 2
        delta = gamma**8
        return cls(
            profile="paper",
            eps=eps,
            delta_code=eps**4 / 2,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            delta=delta,
            theta=delta,
            rho=delta / 10,
            delta0=5 * delta,
            w=w,
        )

    @classmethod
    def from_profile(cls, name: str, w: int | None = None) -> "Params":
        if name == "desk":
            return cls.desk(w)
        if name == "paper":
            return cls.paper(w)
        raise ConfigError(f"unknown profile {name!r} (expected desk or paper)")

    # -- derived -------------------------------------------------------------

    def override(self, **kwargs) -> "Params":
        """Replace individual fields; the result is re-validated. Overriding a
        knob of the "paper" profile relabels it "paper-custom", which drops
        that profile's coupled-constant validation."""
        known = {f.name for f in fields(self)}
        for k in kwargs:
            if k not in known:
                raise ConfigError(f"unknown parameter {k!r}")
        if kwargs and self.profile == "paper" and "profile" not in kwargs:
            kwargs = {**kwargs, "profile": "paper-custom"}
        return replace(self, **kwargs)

    def with_input(self, n: int) -> "Params":
        return replace(self, w=derive_w(n))

    def with_w(self, w: int) -> "Params":
        return replace(self, w=w)

    def _require_w(self) -> int:
        if self.w is None:
            raise ContractError("params.w is unset; call with_input or with_w first")
        return self.w

    @property
    def grid_x(self) -> int:
        """Alignment step on the x side: max(1, gamma*w), a power of two."""
        w = self._require_w()
        step = self.gamma * w
        return max(1, int(step)) if step >= 1 else 1

    @property
    def grid_y(self) -> int:
        """Alignment step on the y side: max(1, theta*w), a power of two."""
        w = self._require_w()
        step = self.theta * w
        return max(1, int(step)) if step >= 1 else 1

    def as_dict(self) -> dict:
        d = {name: str(getattr(self, name)) for name in _FRACTION_FIELDS}
        d["profile"] = self.profile
        d["w"] = self.w
        return d


def derive_w(n: int) -> int:
    """Closest power of two to n/log2(n); ties toward the smaller; <= n."""
    if n < 0:
        raise ContractError("negative length")
    if n <= 2:
        return 1
    target = n / math.log2(n)
    k = int(math.floor(math.log2(target)))
    lo, hi = 2**k, 2 ** (k + 1)
    w = lo if (target - lo) <= (hi - target) else hi
    cap = 2 ** int(math.floor(math.log2(n)))
    return min(w, cap)
