import time

from congames.enum1 import enum1
from congames.model import is_nash

from corpus import random_corpus
from games_fixtures import matrix_3x3


def test_matrix_game_unique_equilibrium():
    res = enum1(matrix_3x3())
    assert res.pne == ((2, 3),)
    assert res.stats.candidates == 9
    assert res.stats.pne_found == 1
    assert not res.timed_out


def test_candidates_always_cover_the_whole_space():
    for game in random_corpus(seed=31337, count=20, max_profiles=300):
        res = enum1(game)
        assert res.stats.candidates == game.profile_count()
        assert res.stats.pne_found == len(res.pne)
        assert res.stats.pne_found <= res.stats.candidates
        assert res.stats.deviation_calls <= res.stats.candidates * game.num_players


def test_matches_direct_equilibrium_test():
    for game in random_corpus(seed=222, count=15, max_profiles=250):
        res = enum1(game)
        expect = tuple(s for s in game.profiles() if is_nash(game, s))
        assert res.pne == expect  # includes lexicographic order


def test_unsatisfiable_hard_constraints_yield_nothing():
    from congames.constraints import Table
    from congames.model import Game

    g = matrix_3x3()
    dead = Game(
        title="dead",
        var_names=g.var_names,
        domains=g.domains,
        players=g.players,
        existential=(),
        goals=g.goals,
        opts=g.opts,
        hard=(Table((0, 1), ()),),
    )
    res = enum1(dead)
    assert res.pne == ()
    assert res.stats.candidates == 9


def test_stop_after_first():
    for game in random_corpus(seed=97, count=10, max_profiles=200):
        full = enum1(game)
        first = enum1(game, stop_after_first=True)
        if full.pne:
            assert first.pne == (full.pne[0],)
        else:
            assert first.pne == ()


def test_deadline_reports_partial():
    from congames.domains import Domain
    from congames.model import Game, PlayerSpec

    big = Game(
        title="big-free",
        var_names=("a", "b"),
        domains=(Domain.range(1, 60), Domain.range(1, 60)),
        players=(PlayerSpec("P1", (0,)), PlayerSpec("P2", (1,))),
        existential=(),
        goals=((), ()),
        opts=(None, None),
    )
    res = enum1(big, deadline=time.monotonic() - 1)
    assert res.timed_out
    assert res.stats.candidates < big.profile_count()
