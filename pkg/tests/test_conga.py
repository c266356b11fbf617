import time

import pytest

from congames.conga import FULL_DOMAIN, BestResponseTable, CongaOptions, SolveHooks, conga
from congames.enum1 import enum1
from congames.model import is_nash

from corpus import random_corpus
from games_fixtures import backjump_showcase, matrix_3x3


class Recorder:
    """Collects hook events as an ordered log."""

    def __init__(self):
        self.log = []

    def hooks(self):
        return SolveHooks(
            on_candidate=lambda t: self.log.append(("candidate", t)),
            on_deviation=lambda i, ctx, d: self.log.append(("deviation", i, ctx, d)),
            on_table_hit=lambda i, ctx, d: self.log.append(("hit", i, ctx, d)),
            on_backjump=lambda i, pre, skip: self.log.append(("backjump", i, pre, skip)),
            on_resubmit=lambda t: self.log.append(("resubmit", t)),
        )

    def of(self, kind):
        return [e for e in self.log if e[0] == kind]


# --- best-response table -----------------------------------------------------


def test_table_insert_then_search():
    t = BestResponseTable(depth=2)
    ctx = ((1,), (2, 3))
    assert t.search(ctx) is None
    assert t.insert(ctx, ((5,),))
    assert t.search(ctx) == ((5,),)
    assert t.search(((1,), (9, 9))) is None
    assert not t.insert(ctx, ((7,),))  # same context is not re-recorded
    assert t.search(ctx) == ((5,),)


def test_table_reset_empties():
    t = BestResponseTable(depth=1)
    t.insert(((4,),), ((1,),))
    t.reset()
    assert t.search(((4,),)) is None
    assert list(t.items()) == []


def test_table_items_in_trie_order():
    t = BestResponseTable(depth=2)
    t.insert(((2,), (1,)), "a")
    t.insert(((1,), (1,)), "b")
    t.insert(((2,), (2,)), "c")
    assert [ctx for ctx, _ in t.items()] == [
        ((2,), (1,)),
        ((2,), (2,)),
        ((1,), (1,)),
    ]


def test_table_depth_zero():
    t = BestResponseTable(depth=0)
    assert t.search(()) is None
    assert t.insert((), ((1,),))
    assert t.search(()) == ((1,),)
    assert list(t.items()) == [((), ((1,),))]


def test_table_eviction_is_oldest_first_and_poisons_counter_certificate():
    t = BestResponseTable(depth=1, cap=2)
    t.insert(((1,),), "a")
    t.insert(((2,),), "b")
    assert t.evictions_since_reset == 0
    t.insert(((3,),), "c")
    assert t.evictions_since_reset == 1
    assert t.search(((1,),)) is None
    assert t.search(((2,),)) == "b"
    assert t.search(((3,),)) == "c"
    t.reset()
    assert t.evictions_since_reset == 0


# --- worked 3x3 trace ---------------------------------------------------------


def test_matrix_game_equilibria_and_saved_checks():
    rec = Recorder()
    res = conga(matrix_3x3(), CongaOptions(hooks=rec.hooks()))
    assert res.pne == ((2, 3),)
    # candidate profiles in search order: explored leaves plus re-checked
    # table tuples; strictly fewer than the nine the baseline visits
    assert [e[1] for e in rec.of("candidate")] == [
        (1, 1),
        (1, 3),
        (2, 1),
        (2, 3),
        (3, 1),
        (3, 2),
    ]
    assert res.stats.candidates == 6
    assert res.stats.deviation_calls < res.stats.candidates * 2
    assert enum1(matrix_3x3()).pne == res.pne


def test_matrix_game_second_row_served_from_table():
    # with backjumping disabled the row player's deviation against column 1 is
    # computed once at (1,1) and served from the table at (1,2) and (1,3)
    rec = Recorder()
    res = conga(matrix_3x3(), CongaOptions(use_counters=False, hooks=rec.hooks()))
    assert res.pne == ((2, 3),)
    first_dev = rec.of("deviation")[0]
    assert first_dev[1] == 1 and first_dev[2] == ((1,),) and first_dev[3] == ((3,),)
    hits = [e for e in rec.of("hit") if e[1] == 1 and e[2] == ((1,),)]
    assert len(hits) == 2
    devs_row_col1 = [e for e in rec.of("deviation") if e[1] == 1 and e[2] == ((1,),)]
    assert len(devs_row_col1) == 1


# --- counter-driven backjumping ------------------------------------------------


def test_backjump_skips_dominated_strategies():
    game = backjump_showcase()
    rec = Recorder()
    res = conga(game, CongaOptions(hooks=rec.hooks()))
    assert set(res.pne) == {(1, 1, 3), (1, 8, 2)}
    assert res.pne == enum1(game).pne

    # values 5..9 of the middle player are never branched: every candidate
    # keeps y in 1..4 except the re-checked stored tuple (1, 8, 2)
    resubmitted = [e[1] for e in rec.of("resubmit")]
    assert (1, 8, 2) in resubmitted
    explored_y = {
        t[1] for e, t in ((e[0], e[1]) for e in rec.of("candidate")) if t not in resubmitted
    }
    assert explored_y <= {1, 2, 3, 4}

    jumps = [e for e in rec.of("backjump") if e[1] == 1]
    assert len(jumps) == 1
    _, _, prefix, skipped = jumps[0]
    assert prefix == ((1,),)
    assert set(skipped) == {(5,), (6,), (7,), (9,)}  # 8 is covered by the table

    # exactly three fresh deviation computations at the middle level
    y_devs = [e for e in rec.of("deviation") if e[1] == 1]
    assert len(y_devs) == 3


def test_backjump_counter_uses_initial_domain_sizes():
    game = backjump_showcase()
    res = conga(game)
    assert res.stats.candidates < 27  # 1 * 9 * 3 profiles in the full grid


# --- solver equivalences ---------------------------------------------------------


CORPUS = random_corpus(seed=140682, count=40, max_profiles=400)


def test_equals_baseline_on_random_games():
    for game in CORPUS:
        a = conga(game)
        b = enum1(game)
        assert set(a.pne) == set(b.pne), game.title
        assert a.stats.candidates <= b.stats.candidates


def test_ablation_modes_preserve_the_equilibrium_set():
    for game in CORPUS[:25]:
        want = set(conga(game).pne)
        no_tables = conga(game, CongaOptions(use_tables=False))
        no_counters = conga(game, CongaOptions(use_counters=False))
        assert set(no_tables.pne) == want
        assert set(no_counters.pne) == want


def test_skipped_strategies_never_appear_in_equilibria():
    for game in CORPUS[:25]:
        skipped_log = []
        hooks = SolveHooks(
            on_backjump=lambda i, pre, skip, log=skipped_log: log.append((i, pre, skip))
        )
        res = conga(game, CongaOptions(hooks=hooks))
        truth = [s for s in game.profiles() if is_nash(game, s)]
        assert set(res.pne) == set(truth)
        for i, prefix, skipped in skipped_log:
            for s in truth:
                if all(game.player_strategy(s, j) == prefix[j] for j in range(i)):
                    assert game.player_strategy(s, i) not in skipped


def test_table_reset_isolates_branches():
    # deviations recorded under one first-player strategy are never consulted
    # under another: every hit's context must match the live prefix
    for game in CORPUS[:15]:
        live_prefix = {}
        mismatches = []

        def on_candidate(t, g=game, lp=live_prefix):
            lp["prefix"] = g.player_strategy(t, 0)

        def on_hit(i, ctx, d, g=game, lp=live_prefix, bad=mismatches):
            if i != 0 and ctx[0] != lp["prefix"]:
                bad.append((i, ctx))

        conga(game, CongaOptions(hooks=SolveHooks(on_candidate=on_candidate, on_table_hit=on_hit)))
        assert not mismatches


def test_deterministic_output_order():
    for game in CORPUS[:10]:
        assert conga(game).pne == conga(game).pne


def test_stats_relations():
    for game in CORPUS[:15]:
        res = conga(game)
        assert res.stats.candidates <= game.profile_count()
        assert res.stats.pne_found == len(res.pne)


def test_stop_after_first_and_deadline():
    game = CORPUS[0]
    full = conga(game)
    if full.pne:
        first = conga(game, CongaOptions(stop_after_first=True))
        assert first.pne == (full.pne[0],)
    res = conga(game, CongaOptions(deadline=time.monotonic() - 1))
    assert res.timed_out


def test_table_cap_keeps_results_correct():
    for game in CORPUS[:15]:
        capped = conga(game, CongaOptions(table_cap=1))
        assert set(capped.pne) == set(conga(game).pne)


def test_parallel_mode_matches_serial():
    for game in CORPUS[:6]:
        serial = conga(game)
        par = conga(game, CongaOptions(parallel=2))
        assert par.pne == serial.pne  # merge preserves branch order


def test_parallel_rejects_hooks():
    with pytest.raises(ValueError):
        conga(matrix_3x3(), CongaOptions(parallel=2, hooks=SolveHooks()))
