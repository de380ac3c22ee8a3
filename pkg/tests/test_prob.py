"""The probability monad: exact enumeration, oracles, and the sampler."""

from fractions import Fraction

import pytest

from drbglab.prob import (
    AdvantageEstimate,
    Distribution,
    EnumerationCapExceeded,
    Oracle,
    Query,
    Return,
    Sample,
    bind,
    estimate_pr_true,
    exact_dist,
    mapc,
    query,
    run_with_oracle,
    sample,
    sample_bits,
    statistical_distance,
)

F = Fraction


def coin() -> Sample:
    return sample_bits(1)


class TestCombinators:
    def test_return_is_point_mass(self):
        d = exact_dist(Return(42))
        assert d.pr(42) == 1
        assert d.support() == [42]

    def test_sample_uniform(self):
        d = exact_dist(sample_bits(3))
        assert all(d.pr(x) == F(1, 8) for x in range(8))

    def test_bind_sequences(self):
        # sum of two independent coin flips: 1/4, 1/2, 1/4
        comp = bind(coin(), lambda a: mapc(coin(), lambda b: a + b))
        d = exact_dist(comp)
        assert d.pr(0) == F(1, 4)
        assert d.pr(1) == F(1, 2)
        assert d.pr(2) == F(1, 4)

    def test_bind_respects_left_identity(self):
        f = lambda x: mapc(coin(), lambda b: (x, b))
        assert exact_dist(bind(Return(9), f)) == exact_dist(f(9))

    def test_bind_associativity_on_distributions(self):
        f = lambda x: mapc(coin(), lambda b: x + b)
        g = lambda x: mapc(coin(), lambda b: x * 2 + b)
        left = bind(bind(coin(), f), g)
        right = bind(coin(), lambda x: bind(f(x), g))
        assert exact_dist(left) == exact_dist(right)

    def test_sample_width_validated(self):
        with pytest.raises(ValueError):
            Sample(0, Return)


class TestExactDist:
    def test_cap_enforced(self):
        wide = sample_bits(30)
        with pytest.raises(EnumerationCapExceeded):
            exact_dist(wide, max_path_bits=24)
        # caps count cumulative path bits, not node count
        two = bind(sample_bits(13), lambda _: sample_bits(13))
        with pytest.raises(EnumerationCapExceeded):
            exact_dist(two, max_path_bits=25)

    def test_unresolved_query_rejected(self):
        with pytest.raises(TypeError):
            exact_dist(query("x"))

    def test_probabilities_sum_to_one(self):
        comp = bind(sample_bits(4), lambda a: Return(a % 3))
        d = exact_dist(comp)
        assert sum(p for _, p in d.items()) == 1


class TestOracles:
    def test_counting_oracle_threads_state(self):
        # oracle answers with its call index and counts invocations
        oracle = Oracle(lambda n, inp: Return((n, n + 1)), 0)
        comp = bind(query("a"), lambda x: mapc(query("b"), lambda y: (x, y)))
        result = exact_dist(run_with_oracle(comp, oracle))
        assert result.pr(((0, 1), 2)) == 1

    def test_randomized_oracle(self):
        # oracle flips a coin per query; state records every answer
        oracle = Oracle(
            lambda hist, inp: mapc(coin(), lambda b: (b, hist + (b,))), ()
        )
        comp = bind(query(0), lambda a: mapc(query(1), lambda b: a ^ b))
        d = exact_dist(run_with_oracle(comp, oracle))
        # xor of two fair coins is a fair coin; state holds both flips
        assert d.map(lambda rs: rs[0]).pr(1) == F(1, 2)
        assert d.pr((0, (1, 1))) == F(1, 4)

    def test_oracle_state_survives_samples(self):
        oracle = Oracle(lambda n, inp: Return((inp * 2, n + 1)), 0)
        comp = bind(coin(), lambda c: mapc(query(c), lambda a: (c, a)))
        d = exact_dist(run_with_oracle(comp, oracle))
        assert d.pr(((1, 2), 1)) == F(1, 2)


class TestDistribution:
    def test_from_dict_validates(self):
        with pytest.raises(ValueError):
            Distribution.from_dict({0: F(1, 2)})
        with pytest.raises(ValueError):
            Distribution.from_dict({0: F(3, 2), 1: F(-1, 2)})

    def test_map_merges(self):
        d = exact_dist(sample_bits(2)).map(lambda x: x % 2)
        assert d.pr(0) == d.pr(1) == F(1, 2)

    def test_statistical_distance(self):
        a = exact_dist(sample_bits(1))
        b = Distribution.from_dict({0: F(1), 1: F(0)})
        assert statistical_distance(a, b) == F(1, 2)
        assert statistical_distance(a, a) == 0
        # distance counts outcomes absent from one side
        c = Distribution.from_dict({7: F(1)})
        assert statistical_distance(a, c) == 1

    def test_pr_true(self):
        d = exact_dist(mapc(coin(), lambda b: b == 1))
        assert d.pr_true == F(1, 2)


class TestSampler:
    def test_deterministic_in_seed(self):
        comp = bind(sample_bits(8), lambda a: mapc(sample_bits(8), lambda b: (a, b)))
        assert sample(comp, 123) == sample(comp, 123)
        outs = {sample(comp, s) for s in range(64)}
        assert len(outs) > 32  # distinct seeds explore distinct paths

    def test_wide_samples(self):
        # widths beyond one 64-bit word draw from the buffered stream
        value = sample(sample_bits(200), 5)
        assert 0 <= value < (1 << 200)

    def test_query_rejected(self):
        with pytest.raises(TypeError):
            sample(query("x"), 0)

    def test_empirical_frequency_tracks_exact(self):
        comp = mapc(sample_bits(2), lambda x: x == 0)
        hits = sum(1 for s in range(4000) if sample(comp, s))
        assert abs(hits / 4000 - 0.25) < 0.03


class TestEstimate:
    def test_interval_contains_truth_here(self):
        comp = mapc(coin(), lambda b: b == 1)
        est = estimate_pr_true(comp, trials=5000, seed=11)
        assert est.trials == 5000
        assert est.ci_low < 0.5 < est.ci_high
        assert est.contains(F(1, 2))

    def test_extremes(self):
        always = estimate_pr_true(Return(True), trials=200, seed=0)
        assert always.estimate == 1.0 and always.ci_high == 1.0
        never = estimate_pr_true(Return(False), trials=200, seed=0)
        assert never.estimate == 0.0 and never.ci_low == 0.0

    def test_minimum_trials(self):
        with pytest.raises(ValueError):
            estimate_pr_true(Return(True), trials=99, seed=0)

    def test_reproducible(self):
        comp = mapc(sample_bits(3), lambda x: x < 3)
        a = estimate_pr_true(comp, trials=500, seed=42)
        b = estimate_pr_true(comp, trials=500, seed=42)
        assert a == b

    def test_interval_is_exact_binomial(self):
        # a 99% Clopper-Pearson interval is conservative: it must cover
        # the true value in a healthy majority of replications
        comp = mapc(sample_bits(4), lambda x: x < 5)
        truth = F(5, 16)
        covered = sum(
            1
            for rep in range(20)
            if estimate_pr_true(comp, trials=400, seed=1000 * rep).contains(truth)
        )
        assert covered >= 18


def test_advantage_estimate_contains():
    est = AdvantageEstimate(0.5, 0.4, 0.6, 100)
    assert est.contains(0.5) and est.contains(F(2, 5))
    assert not est.contains(0.39)
