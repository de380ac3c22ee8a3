"""A small exact-probability monad for finite randomized computations.

A computation is a finite tree built from three node kinds:

- ``Return(value)`` — a finished computation;
- ``Sample(width, k)`` — draw a uniform integer in ``[0, 2**width)`` and
  continue with ``k(drawn)``;
- ``Query(input, k)`` — ask an oracle and continue with ``k(answer)``.

Plain computations contain no ``Query`` nodes; oracle-bearing ones are
turned into plain ones by :func:`run_with_oracle`, which threads an
explicit oracle state through every query.

Two semantics are provided: :func:`exact_dist` enumerates every sample
path and returns exact rational probabilities (``fractions.Fraction``),
and :func:`sample` runs one pseudorandom path from a 64-bit seed using a
SplitMix64 stream, so Monte Carlo estimates are reproducible across
platforms and parallel schedules.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from scipy.stats import beta


class EnumerationCapExceeded(Exception):
    """A sample path wanted more random bits than the enumeration cap."""


@dataclass(frozen=True)
class Return:
    value: Any


@dataclass(frozen=True)
class Sample:
    width: int
    k: Callable[[int], "Comp"]

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"Sample width must be >= 1, got {self.width}")


@dataclass(frozen=True)
class Query:
    input: Any
    k: Callable[[Any], "Comp"]


Comp = Return | Sample | Query


def bind(comp: Comp, f: Callable[[Any], Comp]) -> Comp:
    """Sequence ``comp`` with ``f`` applied to its result (monadic bind)."""
    if isinstance(comp, Return):
        return f(comp.value)
    if isinstance(comp, Sample):
        return Sample(comp.width, lambda x, _k=comp.k: bind(_k(x), f))
    return Query(comp.input, lambda a, _k=comp.k: bind(_k(a), f))


def mapc(comp: Comp, f: Callable[[Any], Any]) -> Comp:
    """Apply a pure function to the result of a computation."""
    return bind(comp, lambda x: Return(f(x)))


def sample_bits(width: int) -> Comp:
    """Uniform integer in ``[0, 2**width)`` as a computation."""
    return Sample(width, Return)


def query(input: Any) -> Comp:
    """Single oracle query returning the oracle's answer."""
    return Query(input, Return)


@dataclass(frozen=True)
class Oracle:
    """Stateful oracle: ``transition(state, input)`` is a computation of
    ``(answer, new_state)``."""

    transition: Callable[[Any, Any], Comp]
    initial_state: Any


def run_with_oracle(comp: Comp, oracle: Oracle) -> Comp:
    """Resolve every Query through ``oracle``, threading its state.

    Returns a plain computation of ``(result, final_oracle_state)``.
    """

    def go(c: Comp, state: Any) -> Comp:
        if isinstance(c, Return):
            return Return((c.value, state))
        if isinstance(c, Sample):
            return Sample(c.width, lambda x, _k=c.k: go(_k(x), state))
        trans = oracle.transition(state, c.input)
        return bind(trans, lambda ans_state, _k=c.k: go(_k(ans_state[0]), ans_state[1]))

    return go(comp, oracle.initial_state)


@dataclass(frozen=True)
class Distribution:
    """Finite map from outcomes to exact rational probabilities."""

    probs: tuple[tuple[Any, Fraction], ...]

    @staticmethod
    def from_dict(d: dict[Any, Fraction]) -> "Distribution":
        items = tuple(sorted(d.items(), key=lambda kv: repr(kv[0])))
        total = sum(p for (_, p) in items)
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for (_, p) in items):
            raise ValueError("negative probability")
        return Distribution(items)

    def pr(self, value: Any) -> Fraction:
        for v, p in self.probs:
            if v == value:
                return p
        return Fraction(0)

    @property
    def pr_true(self) -> Fraction:
        """Mass on True — the quantity game lemmas compare."""
        return self.pr(True)

    def support(self) -> list[Any]:
        return [v for (v, _) in self.probs]

    def items(self) -> Iterator[tuple[Any, Fraction]]:
        return iter(self.probs)

    def map(self, f: Callable[[Any], Any]) -> "Distribution":
        out: dict[Any, Fraction] = {}
        for v, p in self.probs:
            w = f(v)
            out[w] = out.get(w, Fraction(0)) + p
        return Distribution.from_dict(out)


DEFAULT_PATH_BITS = 24


def exact_dist(comp: Comp, max_path_bits: int = DEFAULT_PATH_BITS) -> Distribution:
    """Exact outcome distribution by full path enumeration.

    Every Sample(w) splits probability uniformly over its 2**w branches.
    A path that would consume more than ``max_path_bits`` random bits
    raises EnumerationCapExceeded (the enumeration would take ~2**bits
    steps, so the cap is a runtime guard as much as a semantic one).
    Outcome values must be hashable; use tuples, not dicts, for oracle
    states that end up in results.
    """
    acc: dict[Any, Fraction] = {}
    stack: list[tuple[Comp, int]] = [(comp, 0)]
    while stack:
        c, bits = stack.pop()
        while True:
            if isinstance(c, Return):
                acc[c.value] = acc.get(c.value, Fraction(0)) + Fraction(1, 1 << bits)
                break
            if isinstance(c, Query):
                raise TypeError(
                    "computation still contains Query nodes; "
                    "apply run_with_oracle first"
                )
            if bits + c.width > max_path_bits:
                raise EnumerationCapExceeded(
                    f"path needs more than {max_path_bits} random bits"
                )
            bits += c.width
            for x in range(1, 1 << c.width):
                stack.append((c.k(x), bits))
            c = c.k(0)
    return Distribution.from_dict(acc)


def statistical_distance(a: Distribution, b: Distribution) -> Fraction:
    """Total variation distance, (1/2) sum |a(x) - b(x)|, exact."""
    support = {v for (v, _) in a.probs} | {v for (v, _) in b.probs}
    return sum((abs(a.pr(v) - b.pr(v)) for v in support), Fraction(0)) / 2


# ------------------------------------------------------------------ sampling

_SM64_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class _SplitMix64:
    """Counter-based 64-bit stream; constants are the reference ones."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64
        self._buf = 0
        self._buf_bits = 0

    def next64(self) -> int:
        self.state = (self.state + _SM64_GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def bits(self, width: int) -> int:
        while self._buf_bits < width:
            self._buf = (self._buf << 64) | self.next64()
            self._buf_bits += 64
        self._buf_bits -= width
        out = self._buf >> self._buf_bits
        self._buf &= (1 << self._buf_bits) - 1
        return out


def sample(comp: Comp, seed: int) -> Any:
    """Run one pseudorandom path, deterministic in ``seed``."""
    stream = _SplitMix64(seed)
    c = comp
    while not isinstance(c, Return):
        if isinstance(c, Query):
            raise TypeError(
                "computation still contains Query nodes; "
                "apply run_with_oracle first"
            )
        c = c.k(stream.bits(c.width))
    return c.value


@dataclass(frozen=True)
class AdvantageEstimate:
    """Monte Carlo estimate of Pr[computation = True]."""

    estimate: float
    ci_low: float
    ci_high: float
    trials: int

    def contains(self, p: float | Fraction) -> bool:
        return self.ci_low <= float(p) <= self.ci_high


def estimate_pr_true(
    comp: Comp, trials: int, seed: int, confidence: float = 0.99
) -> AdvantageEstimate:
    """Frequency of True over ``trials`` runs with a Clopper-Pearson
    two-sided confidence interval (exact binomial).

    Per-trial seeds are ``seed + i``, so the result does not depend on
    how trials are scheduled.
    """
    if trials < 100:
        raise ValueError(f"trials must be >= 100, got {trials}")
    hits = sum(1 for i in range(trials) if sample(comp, seed + i) is True)
    alpha = 1.0 - confidence
    low = 0.0 if hits == 0 else float(beta.ppf(alpha / 2, hits, trials - hits + 1))
    high = 1.0 if hits == trials else float(beta.ppf(1 - alpha / 2, hits + 1, trials - hits))
    return AdvantageEstimate(hits / trials, low, high, trials)
