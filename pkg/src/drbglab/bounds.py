"""Concrete security arithmetic for the generator's distinguishing bound.

Everything is computed as exact rationals; base-2 logarithms are attached
for presentation only. The headline quantity is

    total = numCalls * (prf_advantage + (1 + blocksPerCall)^2 / 2^eta)

where the PRF advantage term instantiates the HMAC-as-PRF assumption for
an adversary running in time and space at most 2^t:

    prf_advantage = 2^(2t - 256) + 2^(t - 255).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def _log2_fraction(value: Fraction) -> float:
    """log2 of a positive rational, safe for huge numerators/denominators."""
    if value <= 0:
        return float("-inf")
    return math.log2(value.numerator) - math.log2(value.denominator)


def format_rational(value: Fraction) -> str:
    """Render n/2^k when the denominator is a power of two, else n/d."""
    den = value.denominator
    if den == 1:
        return str(value.numerator)
    if den & (den - 1) == 0:
        return f"{value.numerator}/2^{den.bit_length() - 1}"
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Log2Quantity:
    """An exact rational with its base-2 logarithm and a display form."""

    value: Fraction
    expression: str | None = None

    @property
    def log2(self) -> float:
        return _log2_fraction(self.value)

    @property
    def vacuous(self) -> bool:
        """A probability bound >= 1 carries no information."""
        return self.value >= 1

    def __str__(self) -> str:
        body = self.expression or format_rational(self.value)
        return f"{body} (log2 = {self.log2:.6g})"


@dataclass(frozen=True)
class BoundInputs:
    t: int
    num_calls: int
    blocks_per_call: int
    eta: int

    def __post_init__(self) -> None:
        if not 0 <= self.t < 256:
            raise ValueError(f"t must be in [0, 256), got {self.t}")
        if self.num_calls < 1 or self.blocks_per_call < 1 or self.eta < 1:
            raise ValueError("num_calls, blocks_per_call and eta must be >= 1")


def _pow2(exp: int) -> Fraction:
    return Fraction(1 << exp) if exp >= 0 else Fraction(1, 1 << -exp)


def prf_advantage_hmac(t: int) -> Log2Quantity:
    """Distinguishing advantage granted to a 2^t-bounded adversary against
    HMAC-SHA256 as a PRF: 2^(2t-256) + 2^(t-255), exact.

    For t >= 128 the first term reaches 1 and the bound is vacuous (the
    returned quantity's ``vacuous`` flag is set); callers should surface
    that rather than trust the number.
    """
    if not 0 <= t < 256:
        raise ValueError(f"t must be in [0, 256), got {t}")
    value = _pow2(2 * t - 256) + _pow2(t - 255)
    expression = f"2^{2 * t - 256} + 2^{t - 255}"
    return Log2Quantity(value, expression)


def pr_collisions(blocks_per_call: int, eta: int) -> Fraction:
    """Per-call collision term (1 + blocksPerCall)^2 / 2^eta, exact."""
    if blocks_per_call < 0 or eta < 1:
        raise ValueError("blocks_per_call must be >= 0 and eta >= 1")
    return Fraction((1 + blocks_per_call) ** 2, 1 << eta)


def total_bound(inputs: BoundInputs) -> Log2Quantity:
    """numCalls * (prf_advantage_hmac(t) + pr_collisions(b, eta)), exact."""
    per_call = prf_advantage_hmac(inputs.t).value + pr_collisions(
        inputs.blocks_per_call, inputs.eta
    )
    return Log2Quantity(inputs.num_calls * per_call)


def birthday_exact(samples: int, space: int) -> Fraction:
    """Exact probability that ``samples`` uniform draws from a set of size
    ``space`` contain a repeat: 1 - prod_{j<samples} (space - j)/space.

    0 when samples <= 1; 1 when samples exceed the space (pigeonhole).
    """
    if samples < 0 or space < 1:
        raise ValueError("samples must be >= 0 and space >= 1")
    if samples <= 1:
        return Fraction(0)
    if samples > space:
        return Fraction(1)
    numer = 1
    for j in range(samples):
        numer *= space - j
    return 1 - Fraction(numer, space**samples)
