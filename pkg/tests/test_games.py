"""The hybrid-game suite: builders, the two evaluation paths, and lemmas.

The heavyweight cross-checks (every lemma over the full parameter grid)
live in the acceptance tests; here each moving part is exercised at the
smallest sizes that still distinguish right from wrong.
"""

from fractions import Fraction

import pytest

from drbglab.bounds import birthday_exact, pr_collisions
from drbglab.games import (
    ALL_CHECKS,
    EQUALITY_LEMMAS,
    INEQUALITY_CHECKS,
    KV,
    CollisionAdversary,
    GameEvaluator,
    HybridParams,
    Iv,
    bad_event_probability,
    build_game,
    calibration_games,
    check_identical_until_bad,
    check_lemma,
    collision_detector,
    constant,
    end_to_end_distance,
    first_bit,
    gen_loop,
    generate_noV,
    generate_rb_intermediate,
    generate_spec,
    generate_v,
    gi_rb_bad,
    gi_rf_dups_bad,
    iv_absdiff,
    iv_add,
    iv_equal,
    iv_leq,
    iv_scale,
    main_theorem_check,
    naive_bits,
    oracle_map,
    run_all_lemmas,
    small_prf,
)
from drbglab.prf import Block
from drbglab.prob import Return, exact_dist, mapc

F = Fraction


def params(eta=2, nc=2, bpc=2, **kw) -> HybridParams:
    return HybridParams(eta, nc, bpc, **kw)


def pr_true_naive(p: HybridParams, game: str, i=None) -> Fraction:
    return exact_dist(build_game(p, game, i), max_path_bits=20).pr_true


class TestBuilders:
    def test_gen_loop_is_the_prf_chain(self):
        p = params(eta=4, nc=1, bpc=1)
        k, v = Block(4, 9), Block(4, 3)
        blocks, last = gen_loop(p, k, v, 3)
        cur = v
        for b in blocks:
            cur = p.prf(k, cur.bits())
            assert b == cur
        assert last == blocks[-1]

    def test_gen_loop_empty(self):
        p = params(eta=4)
        v = Block(4, 3)
        assert gen_loop(p, Block(4, 9), v, 0) == ([], v)
        with pytest.raises(ValueError):
            gen_loop(p, Block(4, 9), v, -1)

    def test_generate_spec_shape(self):
        p = params(eta=4)
        st = KV(Block(4, 9), Block(4, 3))
        comp = generate_spec(p, st, 2)
        assert isinstance(comp, Return)
        blocks, st2 = comp.value
        expect, v_last = gen_loop(p, st.k, st.v, 2)
        assert blocks == expect
        assert st2.k == p.prf(st.k, v_last.bits() + (0,) * 8)
        assert st2.v == p.prf(st2.k, v_last.bits())

    def test_nov_and_v_variants_commute_the_v_update(self):
        # running the trailing v update of call 1 at the head of call 2
        # leaves the concatenated output untouched
        p = params(eta=4)
        st = KV(Block(4, 9), Block(4, 3))
        out1, mid_spec = generate_spec(p, st, 2).value
        out2, _ = generate_spec(p, mid_spec, 2).value

        alt1, mid_nov = generate_noV(p, st, 2).value
        alt2, _ = generate_v(p, mid_nov, 2).value
        assert (out1, out2) == (alt1, alt2)

    def test_generate_v_front_update(self):
        p = params(eta=4)
        st = KV(Block(4, 9), Block(4, 3))
        blocks, st2 = generate_v(p, st, 1).value
        v1 = p.prf(st.k, st.v.bits())
        assert blocks == [p.prf(st.k, v1.bits())]
        assert st2.v == blocks[-1]

    def test_intermediate_keeps_key_and_chains_last_block(self):
        p = params(eta=2)
        st = KV(Block(2, 3), Block(2, 1))
        comp = mapc(generate_rb_intermediate(p, st, 2), lambda out: (tuple(out[0]), out[1]))
        d = exact_dist(comp)
        for (blocks, st2), pr in d.items():
            assert st2.k == st.k
            assert st2.v == blocks[-1]
            assert pr == F(1, 16)

    def test_intermediate_zero_blocks_freshens_v(self):
        p = params(eta=2)
        st = KV(Block(2, 3), Block(2, 1))
        comp = mapc(generate_rb_intermediate(p, st, 0), lambda out: (tuple(out[0]), out[1]))
        d = exact_dist(comp)
        assert len(d.support()) == 4
        for (blocks, st2), pr in d.items():
            assert blocks == () and st2.k == st.k
            assert pr == F(1, 4)

    def test_oracle_map_threads_left_to_right(self):
        step = lambda st, n: Return((st * 10 + n, st + n))
        freeze = lambda out: (tuple(out[0]), out[1])
        d = exact_dist(mapc(oracle_map(step, 0, (1, 2, 3)), freeze))
        assert d.pr(((1, 12, 33), 6)) == 1
        assert exact_dist(mapc(oracle_map(step, 7, ()), freeze)).pr(((), 7)) == 1

    def test_param_validation(self):
        for bad in ((0, 1, 1), (1, 0, 1), (1, 1, 0)):
            with pytest.raises(ValueError):
                HybridParams(*bad)

    def test_small_prf_is_keyed_and_total(self):
        f = small_prf(3)
        outs = {f(Block(3, k), (1, 0, 1)).value for k in range(8)}
        assert all(0 <= o < 8 for o in outs)
        assert len(outs) > 1
        assert f(Block(3, 2), (1, 0, 1)) == f(Block(3, 2), (1, 0, 1))


class TestAdversaries:
    def test_collision_detector(self):
        hit = exact_dist(collision_detector([[Block(2, 1)], [Block(2, 1)]]))
        miss = exact_dist(collision_detector([[Block(2, 1)], [Block(2, 2)]]))
        assert hit.pr_true == 1 and miss.pr_true == 0

    def test_collision_fold_agrees_with_call(self):
        adv = CollisionAdversary()
        outputs = [[Block(2, 1), Block(2, 3)], [Block(2, 3)]]
        st = adv.initial()
        for sub in outputs:
            for b in sub:
                st = adv.absorb(st, b.value, 2)
        assert adv.finish_pr(st) == exact_dist(adv(outputs)).pr_true == 1

    def test_first_bit_and_constant(self):
        assert exact_dist(first_bit([[Block(2, 2)]])).pr_true == 1
        assert exact_dist(first_bit([[Block(2, 1)]])).pr_true == 0
        assert exact_dist(constant(True)([])).pr_true == 1
        assert exact_dist(constant(False)([[Block(2, 0)]])).pr_true == 0


GRID = [
    (2, 1, 1),
    (2, 2, 1),
    (2, 1, 2),
    (2, 2, 2),
    (3, 2, 1),
]


class TestFastAgainstEnumeration:
    """The factored evaluator must reproduce faithful enumeration
    exactly, game by game. This is the license to trust it at sizes
    enumeration cannot reach."""

    @pytest.mark.parametrize("eta,nc,bpc", GRID)
    @pytest.mark.parametrize("adv", [collision_detector, first_bit])
    def test_win_probabilities_match(self, eta, nc, bpc, adv):
        p = HybridParams(eta, nc, bpc, adversary=adv)
        ev = GameEvaluator(p)
        assert ev._fast is not None  # the factored path must engage here
        jobs = [("g_real", None), ("g1_prg", None), ("g_ideal", None)]
        jobs += [("gi_prg", j) for j in range(nc + 1)]
        jobs += [("gi_prf", j) for j in range(nc + 1)]
        jobs += [(g, j) for g in ("gi_rf", "gi_rb") for j in range(nc)]
        for game, j in jobs:
            if naive_bits(p, game, j) > 18:
                continue
            got = ev.pr(game, j)
            assert got.exact
            assert got.mid == pr_true_naive(p, game, j), (game, j)

    @pytest.mark.parametrize("eta,nc,bpc", [(2, 2, 1), (2, 2, 2)])
    def test_joint_bad_distributions_match(self, eta, nc, bpc):
        p = HybridParams(eta, nc, bpc)
        ev = GameEvaluator(p)
        for j in range(nc):
            rb = exact_dist(gi_rb_bad(p, j), max_path_bits=20)
            rf = exact_dist(gi_rf_dups_bad(p, j), max_path_bits=20)
            assert ev.pr_bad("rb", j).mid == sum(
                (pr for (_, bad), pr in rb.items() if bad), F(0)
            )
            for answer in (True, False):
                assert ev.pr_joint_no_bad("rb", j, answer).mid == rb.pr((answer, False))
                assert ev.pr_joint_no_bad("rf", j, answer).mid == rf.pr((answer, False))


class TestBadEvent:
    @pytest.mark.parametrize("eta,nc,bpc", [(2, 2, 2), (3, 2, 2), (2, 3, 1)])
    def test_is_exactly_a_birthday_probability(self, eta, nc, bpc):
        # at i = 0 the call chains bpc fresh blocks from the initial v;
        # at i > 0 a hidden v-refresh query joins them, so one more draw
        p = HybridParams(eta, nc, bpc)
        ev = GameEvaluator(p)
        for j in range(nc):
            draws = bpc + (1 if j > 0 else 0)
            expect = birthday_exact(draws, 1 << eta)
            assert bad_event_probability(p, j, ev).mid == expect

    def test_dominated_by_closed_form(self):
        p = params(eta=3, nc=2, bpc=2)
        bound = pr_collisions(2, 3)
        for j in range(2):
            assert bad_event_probability(p, j).mid <= bound


class TestLemmas:
    def test_full_suite_small(self):
        p = params(2, 2, 2)
        checks = run_all_lemmas(p)
        assert len(checks) == 17  # 6 * num_calls + 5 at num_calls = 2
        assert all(c.passed for c in checks)
        assert all(c.mode == "exact" for c in checks)
        assert {c.lemma for c in checks} == set(EQUALITY_LEMMAS + INEQUALITY_CHECKS)

    def test_suite_other_shape(self):
        p = params(3, 2, 1, adversary=first_bit)
        checks = run_all_lemmas(p)
        assert all(c.passed for c in checks) and len(checks) == 17

    def test_lemmas_hold_for_degenerate_prf(self):
        # the equalities are program identities: they cannot depend on
        # the function the generator is instantiated with
        broken = lambda key, bits: Block(2, 0)
        p = params(2, 2, 2, prf=broken)
        for lemma in EQUALITY_LEMMAS:
            assert all(c.passed for c in check_lemma(p, lemma))

    def test_single_index_selection(self):
        p = params(2, 2, 2)
        checks = check_lemma(p, "Gi_prog_equiv_rb_oracle", i=1)
        assert len(checks) == 1 and checks[0].i == 1 and checks[0].passed

    def test_index_validation(self):
        p = params(2, 2, 2)
        with pytest.raises(ValueError):
            check_lemma(p, "Gi_prog_equiv_rb_oracle", i=2)  # admissible: 0..1
        with pytest.raises(ValueError):
            check_lemma(p, "Gi_prog_equiv_prf_oracle", i=3)  # admissible: 0..2
        with pytest.raises(ValueError):
            check_lemma(p, "no_such_lemma")

    def test_identical_until_bad_package(self):
        p = params(2, 2, 2)
        checks = check_identical_until_bad(p, 1)
        assert [c.lemma for c in checks] == [
            "Gi_rb_rf_return_bad_same",
            "Gi_rb_rf_no_bad_same",
            "fundamental_lemma",
        ]
        assert all(c.passed for c in checks)

    def test_all_checks_registry(self):
        assert len(EQUALITY_LEMMAS) == 7
        assert len(INEQUALITY_CHECKS) == 3
        assert ALL_CHECKS == EQUALITY_LEMMAS + INEQUALITY_CHECKS + ("main_theorem",)


class TestEndToEnd:
    def test_telescoping(self):
        report = end_to_end_distance(params(2, 3, 1))
        assert len(report.adjacent) == 3
        assert report.telescope_ok
        assert iv_leq(report.end_to_end, report.total)

    def test_main_theorem_report(self):
        p = params(2, 2, 2)
        report = main_theorem_check(p)
        assert report.check.passed and report.check.mode == "exact"
        assert report.collisions.mid == pr_collisions(2, 2)
        expect_rhs = 2 * (report.prf_gap.mid + F(9, 4))
        assert report.rhs.mid == expect_rhs
        assert report.lhs.mid <= report.rhs.mid

    def test_main_theorem_via_check_lemma(self):
        checks = check_lemma(params(2, 2, 2), "main_theorem")
        assert len(checks) == 1 and checks[0].passed


class TestEvaluatorModes:
    def test_factored_on_small_eta(self):
        ev = GameEvaluator(params(2, 2, 2))
        ev.pr("g_real")
        assert ev.modes_used == {"factored"}
        assert ev.mode == "exact"

    def test_enumeration_fallback_matches_factored(self):
        p = params(2, 2, 2)
        fast = GameEvaluator(p)
        slow = GameEvaluator(p, fast_ops_cap=0, naive_bits_cap=20)
        for game, j in (("g_real", None), ("gi_prg", 1), ("gi_rb", 1)):
            assert slow.pr(game, j).mid == fast.pr(game, j).mid
        assert slow.modes_used == {"enumerated"}

    def test_monte_carlo_on_wide_blocks(self):
        p = HybridParams(16, 2, 2)
        ev = GameEvaluator(p, trials=500, seed=3)
        got = ev.pr("g_real")
        assert not got.exact
        assert 0 <= got.lo <= got.mid <= got.hi <= 1
        assert ev.mode == "monte-carlo"

    def test_results_memoized(self):
        ev = GameEvaluator(params(2, 2, 2))
        assert ev.pr("g_ideal") is ev.pr("g_ideal")

    def test_joint_index_validation(self):
        ev = GameEvaluator(params(2, 2, 2))
        with pytest.raises(ValueError):
            ev.pr_bad("rb", 2)


class TestIvAlgebra:
    def test_exact_equality_and_order(self):
        a, b = Iv.of_fraction(F(1, 2)), Iv.of_fraction(F(1, 2))
        c = Iv.of_fraction(F(1, 3))
        assert iv_equal(a, b) and not iv_equal(a, c)
        assert iv_leq(c, a) and not iv_leq(a, c)

    def test_interval_equality_is_overlap(self):
        est = Iv(0.4, 0.5, 0.6, False)
        assert iv_equal(est, Iv.of_fraction(F(1, 2)))
        assert not iv_equal(est, Iv.of_fraction(F(39, 100)))
        assert iv_leq(est, Iv.of_fraction(F(45, 100)))  # plausible, not refuted

    def test_absdiff_clamps_at_zero(self):
        a = Iv(0.4, 0.5, 0.6, False)
        b = Iv(0.45, 0.5, 0.55, False)
        d = iv_absdiff(a, b)
        assert d.lo == 0 and d.hi == pytest.approx(0.15)

    def test_add_scale(self):
        a = Iv.of_fraction(F(1, 4))
        assert iv_add(a, a).mid == F(1, 2)
        s = iv_scale(3, a)
        assert (s.lo, s.mid, s.hi, s.exact) == (F(3, 4), F(3, 4), F(3, 4), True)

    def test_str_forms(self):
        assert str(Iv.of_fraction(F(1, 8))) == "1/2^3"
        assert str(Iv(0.1, 0.2, 0.3, False)) == "~0.20000 ci[0.10000, 0.30000]"


class TestReporting:
    def test_lemma_check_line(self):
        checks = check_lemma(params(2, 1, 1), "G_real_is_first_hybrid")
        line = checks[0].line()
        assert line.startswith("G_real_is_first_hybrid: pass [exact] ")
        assert " == " in line

    def test_line_carries_index_and_detail(self):
        checks = check_lemma(params(2, 2, 1), "fundamental_lemma", i=1)
        line = checks[0].line()
        assert " i=1: " in line and " <= " in line and line.endswith(")")


class TestCalibrationCorpus:
    def test_twenty_named_enumerable_games(self):
        games = calibration_games()
        assert len(games) == 20
        names = [name for name, _, _ in games]
        assert len(set(names)) == 20
        for name, comp, exact in games:
            assert 0 <= exact <= 1
            assert " eta=" in name and " adv=" in name

    def test_exact_values_are_reproducible(self):
        games = calibration_games()
        name, comp, exact = games[4]  # an ideal-game entry: cheap to redo
        assert exact_dist(comp, max_path_bits=18).pr_true == exact
