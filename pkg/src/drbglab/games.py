"""Executable security games for the block-level generator.

The generator's pseudorandomness argument is a hybrid argument: the real
experiment (adversary sees PRF-driven output) is connected to the ideal
one (adversary sees uniform bits) through a family of hybrid games, and
adjacent hybrids are compared by swapping a PRF oracle for a random
function and then for a random-bits oracle, with a "bad event"
(duplicate oracle inputs) controlling the last gap. This module builds
every one of those games as a finite probabilistic computation
(:mod:`.prob`) over ``eta``-bit blocks and checks the bridging lemmas as
*exact rational* distribution equalities at small ``eta``, falling back
to Monte Carlo estimation when enumeration is infeasible.

Two evaluation paths compute game probabilities:

- the faithful path runs :func:`~drbglab.prob.exact_dist` directly on
  the game's computation tree (feasible only when the total sampled
  bits are small), and
- a factored evaluator that exploits the games' structure: blocks from
  random-bits calls are independent uniform draws, unused samples (for
  example an instantiate key that no call ever applies) marginalize
  out, and the adversary is folded incrementally over output blocks so
  intermediate distributions stay small.

The two paths are interchangeable — tests pin their equality on every
game family — and both are exact. Checks pick the factored evaluator
when the adversary supports incremental folding and the state-space
estimate fits a budget, the faithful path when the bit count is small,
and Monte Carlo otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, NamedTuple

from .bounds import format_rational, pr_collisions
from .prf import Bits, Block, prf_small
from .prob import (
    AdvantageEstimate,
    Comp,
    Oracle,
    Return,
    bind,
    estimate_pr_true,
    exact_dist,
    mapc,
    query,
    run_with_oracle,
    sample_bits,
)

ZEROES: Bits = (0,) * 8  # the one-octet 0x00 separator, as bits


class KV(NamedTuple):
    """Generator working state: key block and chaining block."""

    k: Block
    v: Block


# --------------------------------------------------------------- adversaries
#
# An adversary is a callable from the full output (list of per-call lists
# of Blocks) to a Comp of bool. The built-in adversaries additionally
# implement an incremental fold protocol (initial/absorb/finish_pr/
# state_bound) that the factored evaluator uses to keep distributions
# over adversary states small.


@dataclass(frozen=True)
class ConstantAdversary:
    result: bool

    def __call__(self, outputs: list[list[Block]]) -> Comp:
        return Return(self.result)

    def initial(self) -> Any:
        return None

    def absorb(self, state: Any, value: int, eta: int) -> Any:
        return None

    def finish_pr(self, state: Any) -> Fraction:
        return Fraction(1 if self.result else 0)

    def state_bound(self, eta: int, total_blocks: int) -> int:
        return 1


@dataclass(frozen=True)
class FirstBitAdversary:
    """True iff the first bit (MSB) of the very first block is 1."""

    def __call__(self, outputs: list[list[Block]]) -> Comp:
        for sub in outputs:
            if sub:
                return Return(sub[0].bits()[0] == 1)
        return Return(False)

    def initial(self) -> Any:
        return None

    def absorb(self, state: Any, value: int, eta: int) -> Any:
        if state is None:
            return (value >> (eta - 1)) & 1
        return state

    def finish_pr(self, state: Any) -> Fraction:
        return Fraction(1 if state == 1 else 0)

    def state_bound(self, eta: int, total_blocks: int) -> int:
        return 3


_DUP = "dup"  # absorbing fold state once a repeated block is seen


@dataclass(frozen=True)
class CollisionAdversary:
    """True iff any two output blocks (anywhere in the run) are equal.

    At small eta this is a strong distinguisher: the real game's chained
    PRF values collide with different statistics than uniform blocks.
    """

    def __call__(self, outputs: list[list[Block]]) -> Comp:
        seen: set[Block] = set()
        for sub in outputs:
            for block in sub:
                if block in seen:
                    return Return(True)
                seen.add(block)
        return Return(False)

    def initial(self) -> Any:
        return frozenset()

    def absorb(self, state: Any, value: int, eta: int) -> Any:
        if state == _DUP or value in state:
            return _DUP if state == _DUP or value in state else state
        return state | {value}

    def finish_pr(self, state: Any) -> Fraction:
        return Fraction(1 if state == _DUP else 0)

    def state_bound(self, eta: int, total_blocks: int) -> int:
        space = 1 << eta
        if space > 64:
            return 1 << 62  # effectively "do not use the factored path"
        total = 1
        for k in range(1, min(total_blocks, space) + 1):
            total += math.comb(space, k)
        return total + 1


def constant(result: bool) -> ConstantAdversary:
    return ConstantAdversary(result)


first_bit = FirstBitAdversary()
collision_detector = CollisionAdversary()


def _has_fold_protocol(adv: Any) -> bool:
    return all(
        hasattr(adv, name) for name in ("initial", "absorb", "finish_pr", "state_bound")
    )


# ----------------------------------------------------------------- parameters


def small_prf(eta: int) -> Callable[[Block, Bits], Block]:
    """The default eta-bit PRF (truncated keyed hash over encoded input)."""

    def f(key: Block, input_bits: Bits) -> Block:
        return prf_small(eta, key, input_bits)

    return f


class HybridParams:
    """Shared parameters of the game family.

    eta: block width in bits; num_calls: generate calls in a run;
    blocks_per_call: blocks per generate call; prf: (Block, Bits) ->
    Block; adversary: callable from full output to Comp of bool.
    """

    def __init__(
        self,
        eta: int,
        num_calls: int,
        blocks_per_call: int,
        prf: Callable[[Block, Bits], Block] | None = None,
        adversary: Any = None,
    ) -> None:
        if eta < 1:
            raise ValueError(f"eta must be >= 1, got {eta}")
        if num_calls < 1 or blocks_per_call < 1:
            raise ValueError("num_calls and blocks_per_call must be >= 1")
        self.eta = eta
        self.num_calls = num_calls
        self.blocks_per_call = blocks_per_call
        self.prf = prf if prf is not None else small_prf(eta)
        self.adversary = adversary if adversary is not None else collision_detector
        self._prf_memo: dict[tuple[int, str, int], int] = {}

    @property
    def request_list(self) -> tuple[int, ...]:
        return (self.blocks_per_call,) * self.num_calls

    def block(self, value: int) -> Block:
        return Block(self.eta, value)

    def prf_int(self, key: int, kind: str, value: int) -> int:
        """Integer-domain PRF: kind 'c' is a chain input (eta bits),
        kind 'r' is a rekey input (eta bits + the zero octet)."""
        memo_key = (key, kind, value)
        hit = self._prf_memo.get(memo_key)
        if hit is not None:
            return hit
        bits = self.block(value).bits()
        if kind == "r":
            bits = bits + ZEROES
        out = self.prf(self.block(key), bits).value
        self._prf_memo[memo_key] = out
        return out


def _sample_block(p: HybridParams) -> Comp:
    return mapc(sample_bits(p.eta), lambda x: Block(p.eta, x))


# ------------------------------------------------------ generator, block level


def gen_loop(p: HybridParams, k: Block, v: Block, n: int) -> tuple[list[Block], Block]:
    """The output chain: n applications of f_k, each block feeding the
    next; returns the blocks and the final chaining value (v when n=0)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    blocks: list[Block] = []
    cur = v
    for _ in range(n):
        cur = p.prf(k, cur.bits())
        blocks.append(cur)
    return blocks, cur


def generate_spec(p: HybridParams, state: KV, n: int) -> Comp:
    """One full generate call: chain, rekey with the zero-octet pad,
    then the final v update. Deterministic, so a point-mass Comp."""
    blocks, v_last = gen_loop(p, state.k, state.v, n)
    k2 = p.prf(state.k, v_last.bits() + ZEROES)
    v2 = p.prf(k2, v_last.bits())
    return Return((blocks, KV(k2, v2)))


def generate_noV(p: HybridParams, state: KV, n: int) -> Comp:
    """Generate without the trailing v update: the last chain block
    stays as the new v."""
    blocks, v_last = gen_loop(p, state.k, state.v, n)
    k2 = p.prf(state.k, v_last.bits() + ZEROES)
    return Return((blocks, KV(k2, v_last)))


def generate_v(p: HybridParams, state: KV, n: int) -> Comp:
    """Generate with the v update moved to the front: update v first,
    chain from the updated value, rekey, and keep the last chain block
    as the new v."""
    v1 = p.prf(state.k, state.v.bits())
    blocks, v_last = gen_loop(p, state.k, v1, n)
    k2 = p.prf(state.k, v_last.bits() + ZEROES)
    return Return((blocks, KV(k2, v_last)))


def generate_rb(p: HybridParams, n: int) -> Comp:
    """n independent uniform blocks — the ideal generate call."""

    def go(remaining: int, acc: tuple[Block, ...]) -> Comp:
        if remaining == 0:
            return Return(list(acc))
        return bind(_sample_block(p), lambda b: go(remaining - 1, acc + (b,)))

    return go(n, ())


def generate_rb_intermediate(p: HybridParams, state: KV, n: int) -> Comp:
    """Ideal generate inside a hybrid: fresh uniform output blocks, key
    left untouched, and the chaining value replaced by the last output
    block (by a fresh uniform block when n = 0).

    Keeping the key and chaining the last block is load-bearing: hybrid
    i+1 must equal the random-bits-oracle game at index i, whose rekey
    answer plays the untouched-key role and whose last chain answer is
    exactly the last visible block. Resampling (k, v) fresh here would
    break that equality for PRFs with visible structure.
    """
    if n == 0:
        return mapc(_sample_block(p), lambda b: ([], KV(state.k, b)))

    def go(remaining: int, acc: tuple[Block, ...]) -> Comp:
        if remaining == 0:
            return Return((list(acc), KV(state.k, acc[-1])))
        return bind(_sample_block(p), lambda b: go(remaining - 1, acc + (b,)))

    return go(n, ())


def instantiate_spec(p: HybridParams) -> Comp:
    """Idealized instantiate: independent uniform key and chaining block."""
    return bind(
        _sample_block(p),
        lambda k: mapc(_sample_block(p), lambda v: KV(k, v)),
    )


def oracle_map(
    step: Callable[[Any, int], Comp], init: Any, requests: tuple[int, ...] | list[int]
) -> Comp:
    """Stateful left-to-right map inside Comp: step(state, request) ->
    Comp of (output, state); returns ([outputs...], final_state)."""
    requests = tuple(requests)
    if not requests:
        return Return(([], init))
    return bind(
        step(init, requests[0]),
        lambda out_st: mapc(
            oracle_map(step, out_st[1], requests[1:]),
            lambda rest: ([out_st[0]] + rest[0], rest[1]),
        ),
    )


# ------------------------------------------------------------------ the games


def g_real(p: HybridParams) -> Comp:
    """Real experiment: PRF-driven generator, adversary sees all output."""
    return bind(
        instantiate_spec(p),
        lambda kv: bind(
            oracle_map(lambda st, n: generate_spec(p, st, n), kv, p.request_list),
            lambda outs_st: p.adversary(outs_st[0]),
        ),
    )


def g_ideal(p: HybridParams) -> Comp:
    """Ideal experiment: every call returns fresh uniform blocks."""

    def go(calls: int, acc: tuple) -> Comp:
        if calls == 0:
            return p.adversary([list(sub) for sub in acc])
        return bind(
            generate_rb(p, p.blocks_per_call),
            lambda bs: go(calls - 1, acc + (tuple(bs),)),
        )

    return go(p.num_calls, ())


def g1_prg(p: HybridParams) -> Comp:
    """The real game with every v update moved to the front of the next
    call: first call skips the initial update, later calls perform it,
    nobody updates v at the end."""

    def step(st: tuple[int, KV], n: int) -> Comp:
        calls_so_far, kv = st
        comp = generate_noV(p, kv, n) if calls_so_far == 0 else generate_v(p, kv, n)
        return mapc(comp, lambda out: (out[0], (calls_so_far + 1, out[1])))

    return bind(
        instantiate_spec(p),
        lambda kv: bind(
            oracle_map(step, (0, kv), p.request_list),
            lambda outs_st: p.adversary(outs_st[0]),
        ),
    )


def choose_generate(
    p: HybridParams, i: int, calls_so_far: int, state: KV, n: int
) -> Comp:
    """Hybrid-i call dispatch: calls before i are ideal, call i itself
    and everything after use the PRF (the first PRF call skips the
    initial v update). Returns (blocks, (calls_so_far + 1, state'))."""
    if calls_so_far < i:
        comp = generate_rb_intermediate(p, state, n)
    elif calls_so_far == 0:
        comp = generate_noV(p, state, n)
    else:
        comp = generate_v(p, state, n)
    return mapc(comp, lambda out: (out[0], (calls_so_far + 1, out[1])))


def gi_prg(p: HybridParams, i: int) -> Comp:
    """Hybrid game i: first i calls ideal, the rest PRF-driven."""

    def step(st: tuple[int, KV], n: int) -> Comp:
        return choose_generate(p, i, st[0], st[1], n)

    return bind(
        instantiate_spec(p),
        lambda kv: bind(
            oracle_map(step, (0, kv), p.request_list),
            lambda outs_st: p.adversary(outs_st[0]),
        ),
    )


# ------------------------------------------------------------------- oracles
#
# Oracle state is the query trace: a tuple of (input bit tuple, answer
# Block) pairs, in query order. Every oracle records every query —
# including repeats — so the bad event (a duplicate input) can be read
# off the final trace.


def f_oracle(p: HybridParams, k: Block) -> Oracle:
    """The PRF with a fixed key, wrapped as a (deterministic) oracle."""

    def transition(trace: tuple, inp: Bits) -> Comp:
        ans = p.prf(k, inp)
        return Return((ans, trace + ((inp, ans),)))

    return Oracle(transition, ())


def random_func(p: HybridParams) -> Oracle:
    """Lazily sampled random function: fresh uniform block on a new
    input, the cached block on a repeated one. Repeats are still
    recorded in the trace."""

    def transition(trace: tuple, inp: Bits) -> Comp:
        for past_inp, past_ans in trace:
            if past_inp == inp:
                return Return((past_ans, trace + ((inp, past_ans),)))
        return mapc(_sample_block(p), lambda b: (b, trace + ((inp, b),)))

    return Oracle(transition, ())


def rb_oracle(p: HybridParams) -> Oracle:
    """Random-bits oracle: fresh uniform block on every query, caching
    nothing."""

    def transition(trace: tuple, inp: Bits) -> Comp:
        return mapc(_sample_block(p), lambda b: (b, trace + ((inp, b),)))

    return Oracle(transition, ())


def _trace_has_duplicate_input(trace: tuple) -> bool:
    inputs = [inp for (inp, _) in trace]
    return len(set(inputs)) < len(inputs)


# ------------------------------------------------- the PRF-reduction adversary


def _generate_oc(p: HybridParams, state: KV, n: int, nov: bool) -> Comp:
    """Oracle-routed generate call: every PRF application becomes a
    Query. Shapes mirror generate_noV / generate_v; the rekey query
    carries the zero-octet pad, so its input length differs from every
    chain input and cannot duplicate one."""

    def chain(cur: Block, remaining: int, acc: tuple[Block, ...]) -> Comp:
        if remaining == 0:
            return bind(
                query(cur.bits() + ZEROES),
                lambda k2: Return((list(acc), KV(k2, cur))),
            )
        return bind(query(cur.bits()), lambda b: chain(b, remaining - 1, acc + (b,)))

    if nov:
        return chain(state.v, n, ())
    return bind(query(state.v.bits()), lambda v1: chain(v1, n, ()))


def prf_adversary(p: HybridParams, i: int) -> Comp:
    """The reduction adversary: runs the full pipeline with calls before
    i ideal, call i routed through the provided oracle, calls after i on
    the concrete PRF, then hands all output to the distinguisher."""
    if not 0 <= i <= p.num_calls:
        raise ValueError(f"i must be in 0..{p.num_calls}, got {i}")

    def go(call: int, state: KV, outs: tuple) -> Comp:
        if call == p.num_calls:
            return p.adversary([list(sub) for sub in outs])
        n = p.blocks_per_call
        if call < i:
            comp = generate_rb_intermediate(p, state, n)
        elif call == i:
            comp = _generate_oc(p, state, n, nov=(i == 0))
        else:
            comp = generate_v(p, state, n)
        return bind(comp, lambda out: go(call + 1, out[1], outs + (tuple(out[0]),)))

    return bind(instantiate_spec(p), lambda kv: go(0, kv, ()))


def gi_prf(p: HybridParams, i: int) -> Comp:
    """Hybrid i with call i's PRF applications served by an external
    fresh-key PRF oracle."""
    return bind(
        _sample_block(p),
        lambda kstar: mapc(
            run_with_oracle(prf_adversary(p, i), f_oracle(p, kstar)),
            lambda rs: rs[0],
        ),
    )


def gi_rf(p: HybridParams, i: int) -> Comp:
    """Hybrid i with call i served by a lazily sampled random function."""
    return mapc(run_with_oracle(prf_adversary(p, i), random_func(p)), lambda rs: rs[0])


def gi_rb(p: HybridParams, i: int) -> Comp:
    """Hybrid i with call i served by the random-bits oracle."""
    return mapc(run_with_oracle(prf_adversary(p, i), rb_oracle(p)), lambda rs: rs[0])


def gi_rf_dups_bad(p: HybridParams, i: int) -> Comp:
    """(answer, bad) for the random-function game; bad = duplicate input."""
    return mapc(
        run_with_oracle(prf_adversary(p, i), random_func(p)),
        lambda rs: (rs[0], _trace_has_duplicate_input(rs[1])),
    )


def gi_rb_bad(p: HybridParams, i: int) -> Comp:
    """(answer, bad) for the random-bits game; bad = duplicate input."""
    return mapc(
        run_with_oracle(prf_adversary(p, i), rb_oracle(p)),
        lambda rs: (rs[0], _trace_has_duplicate_input(rs[1])),
    )


# ----------------------------------------------------------- fast exact path
#
# Distributions here are dicts {point: Fraction}. A point carries the
# adversary's fold state plus whatever the remaining pipeline still
# needs (chaining value, key, bad flag, random-function cache). Samples
# that nothing ever reads — the instantiate key in a fully ideal
# prefix, the external PRF key when call i does not exist — are simply
# not enumerated: a uniform value that is never used marginalizes out
# of the outcome distribution. Tests pin this path's output to the
# faithful enumeration's on every game family.


class _FastEval:
    def __init__(self, p: HybridParams) -> None:
        self.p = p
        self.adv = p.adversary

    # --- deterministic per-call kernels (integer domain)

    def _det_chain(self, k: int, v: int) -> tuple[list[int], int]:
        blocks = []
        cur = v
        for _ in range(self.p.blocks_per_call):
            cur = self.p.prf_int(k, "c", cur)
            blocks.append(cur)
        return blocks, cur

    def _det_spec(self, k: int, v: int) -> tuple[list[int], int, int]:
        blocks, last = self._det_chain(k, v)
        k2 = self.p.prf_int(k, "r", last)
        return blocks, k2, self.p.prf_int(k2, "c", last)

    def _det_nov(self, k: int, v: int) -> tuple[list[int], int, int]:
        blocks, last = self._det_chain(k, v)
        return blocks, self.p.prf_int(k, "r", last), last

    def _det_v(self, k: int, v: int) -> tuple[list[int], int, int]:
        return self._det_nov(k, self.p.prf_int(k, "c", v))

    # --- helpers

    def _absorb(self, state: Any, blocks: list[int]) -> Any:
        for b in blocks:
            state = self.adv.absorb(state, b, self.p.eta)
        return state

    def _det_tail(self, adv_state: Any, k: int, v: int, calls: int, first_nov: bool) -> Any:
        for idx in range(calls):
            if idx == 0 and first_nov:
                blocks, k, v = self._det_nov(k, v)
            else:
                blocks, k, v = self._det_v(k, v)
            adv_state = self._absorb(adv_state, blocks)
        return adv_state

    def _enum_block(self, dist: dict, fn: Callable[[Any, int], Any]) -> dict:
        out: dict = {}
        scale = Fraction(1, 1 << self.p.eta)
        for point, pr in dist.items():
            base = pr * scale
            for x in range(1 << self.p.eta):
                new = fn(point, x)
                out[new] = out.get(new, Fraction(0)) + base
        return out

    def _rb_prefix(self, calls: int) -> dict:
        """Distribution over (adv_state, last_block) after `calls` ideal
        calls; last_block is None before any block is drawn."""
        dist = {(self.adv.initial(), None): Fraction(1)}
        eta = self.p.eta
        for _ in range(calls):
            for _ in range(self.p.blocks_per_call):
                dist = self._enum_block(
                    dist, lambda pt, x: (self.adv.absorb(pt[0], x, eta), x)
                )
        return dist

    def _finish(self, dist: dict) -> Fraction:
        total = Fraction(0)
        for adv_state, pr in dist.items():
            total += pr * self.adv.finish_pr(adv_state)
        return total

    @staticmethod
    def _marginal_adv(dist: dict) -> dict:
        out: dict = {}
        for (adv_state, _last), pr in dist.items():
            out[adv_state] = out.get(adv_state, Fraction(0)) + pr
        return out

    # --- closed games

    def _pr_two_block_det(self, run: Callable[[Any, int, int], Any]) -> Fraction:
        """Enumerate the instantiate pair and run a deterministic pipeline."""
        space = 1 << self.p.eta
        weight = Fraction(1, space * space)
        total = Fraction(0)
        for k0 in range(space):
            for v0 in range(space):
                total += weight * self.adv.finish_pr(run(self.adv.initial(), k0, v0))
        return total

    def pr_g_real(self) -> Fraction:
        def run(adv_state: Any, k: int, v: int) -> Any:
            for _ in range(self.p.num_calls):
                blocks, k, v = self._det_spec(k, v)
                adv_state = self._absorb(adv_state, blocks)
            return adv_state

        return self._pr_two_block_det(run)

    def pr_g1_prg(self) -> Fraction:
        return self._pr_two_block_det(
            lambda adv_state, k, v: self._det_tail(
                adv_state, k, v, self.p.num_calls, first_nov=True
            )
        )

    def pr_g_ideal(self) -> Fraction:
        dist = self._rb_prefix(self.p.num_calls)
        return self._finish(self._marginal_adv(dist))

    def pr_gi_prg(self, i: int) -> Fraction:
        j = min(i, self.p.num_calls)
        if j == 0:
            return self._pr_two_block_det(
                lambda adv_state, k, v: self._det_tail(
                    adv_state, k, v, self.p.num_calls, first_nov=True
                )
            )
        prefix = self._rb_prefix(j)
        remaining = self.p.num_calls - j
        if remaining == 0:
            return self._finish(self._marginal_adv(prefix))
        # the instantiate key is untouched by ideal calls and feeds the
        # first PRF call; enumerate it here, per surviving point
        space = 1 << self.p.eta
        weight = Fraction(1, space)
        total = Fraction(0)
        for (adv_state, last), pr in prefix.items():
            base = pr * weight
            for k0 in range(space):
                end = self._det_tail(adv_state, k0, last, remaining, first_nov=False)
                total += base * self.adv.finish_pr(end)
        return total

    # --- oracle-swapped games for hybrid index i

    def gi_oracle_dist(self, i: int, mode: str) -> dict:
        """Joint distribution over (answer, bad) for gi_{prf,rf,rb}(i).

        mode 'prf' enumerates the external key and runs call i
        deterministically; 'rb' answers every query fresh; 'rf' caches
        answers per input. bad is a duplicate input within call i's
        trace (the rekey input has a different length from every chain
        input, so only chain inputs can collide).
        """
        if not 0 <= i < self.p.num_calls:
            raise ValueError(f"i must be in 0..{self.p.num_calls - 1}, got {i}")
        p = self.p
        nov = i == 0
        n = p.blocks_per_call
        space = 1 << p.eta
        weight = Fraction(1, space)

        if nov:
            # v entering call 0 is the sampled instantiate v: enumerate it
            start = {(self.adv.initial(), None): Fraction(1)}
            entry = self._enum_block(start, lambda pt, x: (pt[0], x))
        else:
            entry = self._rb_prefix(i)

        after_call: dict = {}

        def record(point: Any, pr: Fraction) -> None:
            after_call[point] = after_call.get(point, Fraction(0)) + pr

        if mode == "prf":
            # deterministic given the external key: replay the query
            # sequence and read the bad event off the input list
            for (adv_state, v_in), pr in entry.items():
                base = pr * weight
                for kstar in range(space):
                    inputs = [v_in]
                    cur = v_in
                    if not nov:  # hidden first query updates v
                        cur = p.prf_int(kstar, "c", cur)
                        inputs.append(cur)
                    adv2 = adv_state
                    for _ in range(n):
                        prev = cur
                        cur = p.prf_int(kstar, "c", prev)
                        adv2 = self.adv.absorb(adv2, cur, p.eta)
                        if _ < n - 1:
                            inputs.append(cur)
                    # inputs now holds every chain input of the call
                    bad = len(set(inputs)) < len(inputs)
                    k2 = p.prf_int(kstar, "r", cur)
                    record((adv2, bad, k2, cur), base)
        else:
            # one merged distribution layer per query; points carry the
            # adversary fold state, the bad flag, the set of chain
            # inputs used so far, the random-function cache (rf only,
            # sorted for canonical merging) and the pending chain value
            hidden_first = not nov
            total_queries = n + (1 if hidden_first else 0)
            layer: dict = {}
            for (adv_state, v_in), pr in entry.items():
                key = (adv_state, False, frozenset((v_in,)), (), v_in)
                layer[key] = layer.get(key, Fraction(0)) + pr
            for done in range(total_queries):
                visible = not (hidden_first and done == 0)
                nxt: dict = {}

                def put(point: Any, pr: Fraction) -> None:
                    nxt[point] = nxt.get(point, Fraction(0)) + pr

                for (adv2, bad, seen, cache, cur), prob in layer.items():
                    if done > 0:  # the first input is v_in, seeded above
                        if cur in seen:
                            bad = True
                        seen = seen | {cur}
                    cached = None
                    if mode == "rf":
                        for c_in, c_ans in cache:
                            if c_in == cur:
                                cached = c_ans
                                break
                    if cached is not None:
                        adv3 = self.adv.absorb(adv2, cached, p.eta) if visible else adv2
                        put((adv3, bad, seen, cache, cached), prob)
                        continue
                    for ans in range(space):
                        adv3 = self.adv.absorb(adv2, ans, p.eta) if visible else adv2
                        cache2 = cache
                        if mode == "rf":
                            cache2 = tuple(sorted(cache + ((cur, ans),)))
                        put((adv3, bad, seen, cache2, ans), prob * weight)
                layer = nxt
            # rekey query: its input carries the zero-octet pad, so it
            # can never duplicate a chain input; answer is fresh in both
            # rf and rb modes (the input is new either way)
            for (adv2, bad, _seen, _cache, cur), prob in layer.items():
                for k2 in range(space):
                    record((adv2, bad, k2, cur), prob * weight)

        # tail calls i+1 .. num_calls-1 are concrete and deterministic
        out: dict = {}
        remaining = p.num_calls - 1 - i
        for (adv_state, bad, k2, v_last), pr in after_call.items():
            end = self._det_tail(adv_state, k2, v_last, remaining, first_nov=False)
            p_true = self.adv.finish_pr(end)
            for answer, mass in ((True, p_true), (False, 1 - p_true)):
                if mass == 0:
                    continue
                key = (answer, bad)
                out[key] = out.get(key, Fraction(0)) + pr * mass
        return out

    def pr_gi_oracle(self, i: int, mode: str) -> Fraction:
        dist = self.gi_oracle_dist(i, mode)
        return sum(
            (pr for (answer, _), pr in dist.items() if answer), Fraction(0)
        )

    def pr_gi_prf(self, i: int) -> Fraction:
        if i >= self.p.num_calls:
            # call i never happens; the oracle and its key are unused
            return self.pr_gi_prg(self.p.num_calls)
        return self.pr_gi_oracle(i, "prf")

    def pr_gi_rf(self, i: int) -> Fraction:
        return self.pr_gi_oracle(i, "rf")

    def pr_gi_rb(self, i: int) -> Fraction:
        return self.pr_gi_oracle(i, "rb")


# ------------------------------------------------------------- game registry


def build_game(p: HybridParams, game: str, i: int | None = None) -> Comp:
    """The faithful computation tree for a named game."""
    if game == "g_real":
        return g_real(p)
    if game == "g1_prg":
        return g1_prg(p)
    if game == "g_ideal":
        return g_ideal(p)
    if i is None:
        raise ValueError(f"game {game!r} needs a hybrid index i")
    if game == "gi_prg":
        return gi_prg(p, i)
    if game == "gi_prf":
        return gi_prf(p, i)
    if game == "gi_rf":
        return gi_rf(p, i)
    if game == "gi_rb":
        return gi_rb(p, i)
    raise ValueError(f"unknown game {game!r}")


def naive_bits(p: HybridParams, game: str, i: int | None = None) -> int:
    """Total sampled bits on the longest path of the faithful tree —
    the cost driver for direct enumeration."""
    eta, nc, bpc = p.eta, p.num_calls, p.blocks_per_call
    inst = 2 * eta
    if game in ("g_real", "g1_prg"):
        return inst
    if game == "g_ideal":
        return nc * bpc * eta
    if i is None:
        raise ValueError(f"game {game!r} needs a hybrid index i")
    ideal = min(i, nc) * bpc * eta
    if game == "gi_prg":
        return inst + ideal
    if game == "gi_prf":
        return inst + eta + ideal
    if game in ("gi_rf", "gi_rb", "gi_rf_bad", "gi_rb_bad"):
        if i >= nc:
            return inst + ideal
        queries = bpc + (2 if i > 0 else 1)
        return inst + ideal + queries * eta
    raise ValueError(f"unknown game {game!r}")


# ------------------------------------------------------------ value intervals
#
# Exact values and Monte Carlo estimates flow through the same interval
# algebra: an exact Fraction is a zero-width interval, an estimate is
# its confidence interval. Equality checks become interval overlap,
# inequalities compare the favourable endpoints, and |a - b| / sums /
# scalings propagate endpoints, so one code path serves both modes.


@dataclass(frozen=True)
class Iv:
    lo: Any
    mid: Any
    hi: Any
    exact: bool

    @staticmethod
    def of_fraction(value: Fraction) -> "Iv":
        return Iv(value, value, value, True)

    @staticmethod
    def of_estimate(est: AdvantageEstimate) -> "Iv":
        return Iv(est.ci_low, est.estimate, est.ci_high, False)

    def __str__(self) -> str:
        if self.exact:
            return format_rational(self.mid)
        return f"~{float(self.mid):.5f} ci[{float(self.lo):.5f}, {float(self.hi):.5f}]"


def iv_absdiff(a: Iv, b: Iv) -> Iv:
    lo = max(a.lo - b.hi, b.lo - a.hi, 0 * a.lo)
    hi = max(a.hi - b.lo, b.hi - a.lo)
    return Iv(lo, abs(a.mid - b.mid), max(hi, 0 * hi), a.exact and b.exact)


def iv_add(a: Iv, b: Iv) -> Iv:
    return Iv(a.lo + b.lo, a.mid + b.mid, a.hi + b.hi, a.exact and b.exact)


def iv_scale(n: int, a: Iv) -> Iv:
    return Iv(n * a.lo, n * a.mid, n * a.hi, a.exact)


def iv_equal(a: Iv, b: Iv) -> bool:
    if a.exact and b.exact:
        return a.mid == b.mid
    return a.lo <= b.hi and b.lo <= a.hi


def iv_leq(a: Iv, b: Iv) -> bool:
    if a.exact and b.exact:
        return a.mid <= b.mid
    return a.lo <= b.hi


# ------------------------------------------------------------- the evaluator


DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 0x5EED
DEFAULT_NAIVE_BITS_CAP = 22
DEFAULT_FAST_OPS_CAP = 2_000_000


class GameEvaluator:
    """Computes game probabilities, picking the cheapest sound method.

    Preference order: the factored exact evaluator (adversary must
    support incremental folding and the state-space proxy must fit
    ``fast_ops_cap``), then faithful enumeration (total sampled bits at
    most ``naive_bits_cap``), then Monte Carlo with Clopper-Pearson
    intervals. Results are memoized per evaluator, so a lemma suite
    shares work across checks.
    """

    def __init__(
        self,
        p: HybridParams,
        trials: int = DEFAULT_TRIALS,
        seed: int = DEFAULT_SEED,
        naive_bits_cap: int = DEFAULT_NAIVE_BITS_CAP,
        fast_ops_cap: int = DEFAULT_FAST_OPS_CAP,
    ) -> None:
        self.p = p
        self.trials = trials
        self.seed = seed
        self.naive_bits_cap = naive_bits_cap
        self._pr: dict[tuple, Iv] = {}
        self._joint: dict[tuple, Any] = {}
        self._fast: _FastEval | None = None
        if _has_fold_protocol(p.adversary) and p.eta <= 24:
            space = 1 << p.eta
            bound = p.adversary.state_bound(p.eta, p.num_calls * p.blocks_per_call)
            if bound * space * space <= fast_ops_cap:
                self._fast = _FastEval(p)
        self.modes_used: set[str] = set()

    # -- Pr[game outputs True]

    def pr(self, game: str, i: int | None = None) -> Iv:
        key = (game, i)
        if key not in self._pr:
            self._pr[key] = self._compute_pr(game, i)
        return self._pr[key]

    def _compute_pr(self, game: str, i: int | None) -> Iv:
        if self._fast is not None:
            self.modes_used.add("factored")
            fast = self._fast
            if game == "g_real":
                return Iv.of_fraction(fast.pr_g_real())
            if game == "g1_prg":
                return Iv.of_fraction(fast.pr_g1_prg())
            if game == "g_ideal":
                return Iv.of_fraction(fast.pr_g_ideal())
            if game == "gi_prg":
                return Iv.of_fraction(fast.pr_gi_prg(i))
            if game == "gi_prf":
                return Iv.of_fraction(fast.pr_gi_prf(i))
            if game == "gi_rf":
                return Iv.of_fraction(fast.pr_gi_rf(i))
            if game == "gi_rb":
                return Iv.of_fraction(fast.pr_gi_rb(i))
            raise ValueError(f"unknown game {game!r}")
        comp = build_game(self.p, game, i)
        if naive_bits(self.p, game, i) <= self.naive_bits_cap:
            self.modes_used.add("enumerated")
            return Iv.of_fraction(exact_dist(comp, self.naive_bits_cap + 1).pr_true)
        self.modes_used.add("monte-carlo")
        return Iv.of_estimate(estimate_pr_true(comp, self.trials, self.seed))

    # -- the bad event and the joint (answer, no-bad) masses

    def _joint_dist(self, oracle: str, i: int) -> Any:
        key = (oracle, i)
        if key in self._joint:
            return self._joint[key]
        if not 0 <= i < self.p.num_calls:
            raise ValueError(f"i must be in 0..{self.p.num_calls - 1}, got {i}")
        if self._fast is not None:
            self.modes_used.add("factored")
            value: Any = ("exact", self._fast.gi_oracle_dist(i, oracle))
        else:
            builder = gi_rb_bad if oracle == "rb" else gi_rf_dups_bad
            comp = builder(self.p, i)
            if naive_bits(self.p, f"gi_{oracle}_bad", i) <= self.naive_bits_cap:
                self.modes_used.add("enumerated")
                dist = exact_dist(comp, self.naive_bits_cap + 1)
                value = (
                    "exact",
                    {outcome: pr for outcome, pr in dist.items()},
                )
            else:
                self.modes_used.add("monte-carlo")
                outcomes = [(a, b) for a in (True, False) for b in (True, False)]
                value = (
                    "mc",
                    {
                        o: estimate_pr_true(
                            mapc(comp, lambda x, _o=o: x == _o),
                            self.trials,
                            self.seed,
                        )
                        for o in outcomes
                    },
                )
        self._joint[key] = value
        return value

    def pr_bad(self, oracle: str, i: int) -> Iv:
        kind, dist = self._joint_dist(oracle, i)
        if kind == "exact":
            total = sum(
                (pr for (_, bad), pr in dist.items() if bad), Fraction(0)
            )
            return Iv.of_fraction(total)
        true_bad = dist[(True, True)]
        false_bad = dist[(False, True)]
        return Iv(
            true_bad.ci_low + false_bad.ci_low,
            true_bad.estimate + false_bad.estimate,
            min(true_bad.ci_high + false_bad.ci_high, 1.0),
            False,
        )

    def pr_joint_no_bad(self, oracle: str, i: int, answer: bool) -> Iv:
        kind, dist = self._joint_dist(oracle, i)
        if kind == "exact":
            return Iv.of_fraction(dist.get((answer, False), Fraction(0)))
        return Iv.of_estimate(dist[(answer, False)])

    @property
    def mode(self) -> str:
        if "monte-carlo" in self.modes_used:
            return "monte-carlo"
        return "exact"


# ------------------------------------------------------------- lemma checks


EQUALITY_LEMMAS = (
    "Generate_move_v_update",
    "G_real_is_first_hybrid",
    "G_ideal_is_last_hybrid",
    "Gi_prog_equiv_prf_oracle",
    "Gi_prog_equiv_rb_oracle",
    "Gi_rb_rf_return_bad_same",
    "Gi_rb_rf_no_bad_same",
)

INEQUALITY_CHECKS = (
    "fundamental_lemma",
    "Gi_Pr_bad_event_collisions",
    "hybrid_argument",
)

ALL_CHECKS = EQUALITY_LEMMAS + INEQUALITY_CHECKS + ("main_theorem",)


@dataclass(frozen=True)
class LemmaCheck:
    """One verified (in)equality: an instance of a named lemma."""

    lemma: str
    i: int | None
    mode: str
    passed: bool
    lhs: str
    rhs: str
    relation: str = "=="
    detail: str = ""

    def line(self) -> str:
        where = "" if self.i is None else f" i={self.i}"
        verdict = "pass" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return (
            f"{self.lemma}{where}: {verdict} [{self.mode}] "
            f"{self.lhs} {self.relation} {self.rhs}{extra}"
        )


def _mode_of(*values: Iv) -> str:
    return "exact" if all(v.exact for v in values) else "monte-carlo"


def _eq_check(lemma: str, i: int | None, lhs: Iv, rhs: Iv, detail: str = "") -> LemmaCheck:
    return LemmaCheck(
        lemma, i, _mode_of(lhs, rhs), iv_equal(lhs, rhs), str(lhs), str(rhs), "==", detail
    )


def _leq_check(lemma: str, i: int | None, lhs: Iv, rhs: Iv, detail: str = "") -> LemmaCheck:
    return LemmaCheck(
        lemma, i, _mode_of(lhs, rhs), iv_leq(lhs, rhs), str(lhs), str(rhs), "<=", detail
    )


def check_lemma(
    p: HybridParams,
    lemma: str,
    i: int | None = None,
    evaluator: GameEvaluator | None = None,
) -> list[LemmaCheck]:
    """Check one named lemma, at one hybrid index or at every
    admissible index (the default)."""
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    nc = p.num_calls

    def indices(upper: int) -> list[int]:
        if i is not None:
            if not 0 <= i <= upper:
                raise ValueError(f"i must be in 0..{upper} for {lemma}, got {i}")
            return [i]
        return list(range(upper + 1))

    if lemma == "Generate_move_v_update":
        return [_eq_check(lemma, None, ev.pr("g_real"), ev.pr("g1_prg"))]
    if lemma == "G_real_is_first_hybrid":
        return [_eq_check(lemma, None, ev.pr("g1_prg"), ev.pr("gi_prg", 0))]
    if lemma == "G_ideal_is_last_hybrid":
        return [_eq_check(lemma, None, ev.pr("g_ideal"), ev.pr("gi_prg", nc))]
    if lemma == "Gi_prog_equiv_prf_oracle":
        return [
            _eq_check(lemma, j, ev.pr("gi_prg", j), ev.pr("gi_prf", j))
            for j in indices(nc)
        ]
    if lemma == "Gi_prog_equiv_rb_oracle":
        return [
            _eq_check(lemma, j, ev.pr("gi_prg", j + 1), ev.pr("gi_rb", j))
            for j in indices(nc - 1)
        ]
    if lemma == "Gi_rb_rf_return_bad_same":
        return [
            _eq_check(lemma, j, ev.pr_bad("rb", j), ev.pr_bad("rf", j))
            for j in indices(nc - 1)
        ]
    if lemma == "Gi_rb_rf_no_bad_same":
        out = []
        for j in indices(nc - 1):
            pieces = [
                (
                    answer,
                    ev.pr_joint_no_bad("rb", j, answer),
                    ev.pr_joint_no_bad("rf", j, answer),
                )
                for answer in (True, False)
            ]
            passed = all(iv_equal(lhs, rhs) for _, lhs, rhs in pieces)
            lhs_s = ", ".join(f"P[a={a} & !bad]={lhs}" for a, lhs, _ in pieces)
            rhs_s = ", ".join(f"{rhs}" for _, _, rhs in pieces)
            mode = _mode_of(*(v for _, lhs, rhs in pieces for v in (lhs, rhs)))
            out.append(LemmaCheck(lemma, j, mode, passed, lhs_s, rhs_s, "=="))
        return out
    if lemma == "fundamental_lemma":
        out = []
        for j in indices(nc - 1):
            gap = iv_absdiff(ev.pr("gi_rf", j), ev.pr("gi_rb", j))
            out.append(
                _leq_check(
                    lemma,
                    j,
                    gap,
                    ev.pr_bad("rb", j),
                    detail="|Pr[rf] - Pr[rb]| vs Pr[bad]",
                )
            )
        return out
    if lemma == "Gi_Pr_bad_event_collisions":
        bound = Iv.of_fraction(pr_collisions(p.blocks_per_call, p.eta))
        return [
            _leq_check(lemma, j, ev.pr_bad("rb", j), bound, detail="bad vs (1+n)^2/2^eta")
            for j in indices(nc - 1)
        ]
    if lemma == "hybrid_argument":
        first = ev.pr("gi_prg", 0)
        last = ev.pr("gi_prg", nc)
        end_to_end = iv_absdiff(first, last)
        adjacent = [
            iv_absdiff(ev.pr("gi_prg", j), ev.pr("gi_prg", j + 1)) for j in range(nc)
        ]
        total = adjacent[0]
        for step in adjacent[1:]:
            total = iv_add(total, step)
        return [
            _leq_check(
                lemma,
                None,
                end_to_end,
                total,
                detail=f"telescoped over {nc} adjacent pairs",
            )
        ]
    if lemma == "main_theorem":
        return [main_theorem_check(p, evaluator=ev).check]
    raise ValueError(f"unknown lemma {lemma!r}")


def run_all_lemmas(
    p: HybridParams, evaluator: GameEvaluator | None = None
) -> list[LemmaCheck]:
    """All seven equality lemmas and all three inequality checks, each
    at every admissible hybrid index, sharing one evaluator."""
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    out: list[LemmaCheck] = []
    for lemma in EQUALITY_LEMMAS + INEQUALITY_CHECKS:
        out.extend(check_lemma(p, lemma, evaluator=ev))
    return out


def bad_event_probability(p: HybridParams, i: int, evaluator=None) -> Iv:
    """Pr[some oracle input repeats] in the random-bits game at hybrid i."""
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    return ev.pr_bad("rb", i)


def check_identical_until_bad(
    p: HybridParams, i: int, evaluator: GameEvaluator | None = None
) -> list[LemmaCheck]:
    """The identical-until-bad package at hybrid i: equal bad
    probability, equal joint no-bad outcome masses, and the
    fundamental-lemma gap bound they imply."""
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    out: list[LemmaCheck] = []
    for lemma in ("Gi_rb_rf_return_bad_same", "Gi_rb_rf_no_bad_same", "fundamental_lemma"):
        out.extend(check_lemma(p, lemma, i=i, evaluator=ev))
    return out


def adjacent_distance(p: HybridParams, i: int, evaluator=None) -> Iv:
    """|Pr[hybrid i wins] - Pr[hybrid i+1 wins]|."""
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    return iv_absdiff(ev.pr("gi_prg", i), ev.pr("gi_prg", i + 1))


@dataclass(frozen=True)
class EndToEndReport:
    end_to_end: Iv
    adjacent: tuple[Iv, ...]
    total: Iv
    telescope_ok: bool


def end_to_end_distance(p: HybridParams, evaluator=None) -> EndToEndReport:
    """Distance between the first and last hybrid, with the telescoping
    decomposition into adjacent distances."""
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    adjacent = tuple(adjacent_distance(p, j, ev) for j in range(p.num_calls))
    total = adjacent[0]
    for step in adjacent[1:]:
        total = iv_add(total, step)
    end_to_end = iv_absdiff(ev.pr("gi_prg", 0), ev.pr("gi_prg", p.num_calls))
    return EndToEndReport(end_to_end, adjacent, total, iv_leq(end_to_end, total))


@dataclass(frozen=True)
class MainTheoremReport:
    """The concrete end-to-end bound, numerically instantiated.

    lhs is the adversary's real-vs-ideal advantage; prf_gap is the worst
    PRF-vs-random-function gap over hybrid indices (the PRF advantage of
    the constructed reduction); collisions is the closed-form bad-event
    bound; rhs = num_calls * (prf_gap + collisions).
    """

    lhs: Iv
    prf_gap: Iv
    collisions: Iv
    rhs: Iv
    check: LemmaCheck


def main_theorem_check(p: HybridParams, evaluator=None) -> MainTheoremReport:
    ev = evaluator if evaluator is not None else GameEvaluator(p)
    lhs = iv_absdiff(ev.pr("g_real"), ev.pr("g_ideal"))
    gaps = [
        iv_absdiff(ev.pr("gi_prf", j), ev.pr("gi_rf", j)) for j in range(p.num_calls)
    ]
    prf_gap = gaps[0]
    for gap in gaps[1:]:
        if gap.mid > prf_gap.mid:
            prf_gap = gap
    collisions = Iv.of_fraction(pr_collisions(p.blocks_per_call, p.eta))
    rhs = iv_scale(p.num_calls, iv_add(prf_gap, collisions))
    check = _leq_check(
        "main_theorem",
        None,
        lhs,
        rhs,
        detail=(
            f"advantage vs num_calls*(prf_gap + collisions); "
            f"prf_gap={prf_gap}, collisions={collisions}"
        ),
    )
    return MainTheoremReport(lhs, prf_gap, collisions, rhs, check)


# ------------------------------------------------------------- calibration


def calibration_games() -> list[tuple[str, Comp, Fraction]]:
    """Twenty enumerable games with their exact win probabilities,
    for calibrating the Monte Carlo estimator: each exact value should
    fall inside the estimator's confidence interval about as often as
    the confidence level promises.
    """
    specs: list[tuple[str, int, int, int, Any, str, int | None]] = [
        ("g_real", 2, 2, 2, collision_detector, "collision", None),
        ("g_real", 3, 3, 2, collision_detector, "collision", None),
        ("g_real", 2, 3, 2, first_bit, "first_bit", None),
        ("g1_prg", 2, 2, 2, collision_detector, "collision", None),
        ("g_ideal", 2, 2, 2, collision_detector, "collision", None),
        ("g_ideal", 3, 2, 2, collision_detector, "collision", None),
        ("g_ideal", 1, 3, 2, first_bit, "first_bit", None),
        ("g_ideal", 2, 2, 2, constant(True), "constant", None),
        ("gi_prg", 2, 2, 2, collision_detector, "collision", 1),
        ("gi_prg", 2, 2, 2, collision_detector, "collision", 2),
        ("gi_prg", 3, 2, 2, collision_detector, "collision", 1),
        ("gi_prg", 1, 2, 2, collision_detector, "collision", 1),
        ("gi_prf", 2, 2, 2, collision_detector, "collision", 1),
        ("gi_prf", 3, 2, 2, collision_detector, "collision", 0),
        ("gi_prf", 3, 2, 1, collision_detector, "collision", 1),
        ("gi_rf", 2, 2, 2, collision_detector, "collision", 0),
        ("gi_rf", 2, 2, 2, collision_detector, "collision", 1),
        ("gi_rb", 2, 2, 2, collision_detector, "collision", 0),
        ("gi_rb", 2, 2, 1, collision_detector, "collision", 1),
        ("gi_rb", 2, 2, 2, first_bit, "first_bit", 1),
    ]
    out = []
    for game, eta, nc, bpc, adversary, adv_name, i in specs:
        p = HybridParams(eta, nc, bpc, adversary=adversary)
        comp = build_game(p, game, i)
        exact = exact_dist(comp, max_path_bits=18).pr_true
        where = "" if i is None else f" i={i}"
        name = f"{game}{where} eta={eta} calls={nc} blocks={bpc} adv={adv_name}"
        out.append((name, comp, exact))
    return out
