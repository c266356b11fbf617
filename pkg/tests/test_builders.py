import warnings

import pytest

from congames.builders import (
    build_cg,
    build_crag,
    build_from_registry,
    build_gtta,
    build_location_gv,
    build_location_hc,
    build_matrix_demo,
    build_meg,
    build_td,
)
from congames.conga import conga
from congames.enum1 import enum1
from congames.model import check_hard
from congames.oracle import brute_force_pne, expand, nash_relations_pne


def oracle_pne(game):
    want = brute_force_pne(expand(game))
    assert nash_relations_pne(game) == want
    return set(want)


def solved(game):
    a = set(conga(game).pne)
    b = set(enum1(game).pne)
    assert a == b
    return a


# --- guess two thirds of the average ------------------------------------------


@pytest.mark.parametrize("n,m", [(2, 5), (3, 5), (2, 10), (3, 10)])
def test_gtta_unique_equilibrium_at_small_scale(n, m):
    game = build_gtta(n, m)
    pne = solved(game)
    assert pne == oracle_pne(game)
    assert pne == {tuple(1 for _ in range(n))}


def test_gtta_determinism_and_validation():
    assert build_gtta(3, 5) == build_gtta(3, 5)
    with pytest.raises(ValueError):
        build_gtta(1, 5)


# --- minimum effort -------------------------------------------------------------


@pytest.mark.parametrize("n,m", [(2, 4), (3, 4), (2, 10)])
def test_meg_equilibria_are_exactly_the_uniform_profiles(n, m):
    game = build_meg(n, m)
    pne = solved(game)
    assert pne == oracle_pne(game)
    assert pne == {tuple(k for _ in range(n)) for k in range(1, m + 1)}


def test_meg_requires_dominant_minimum_weight():
    with pytest.raises(ValueError):
        build_meg(3, 5, a=1, b=1)


# --- traveller's dilemma ---------------------------------------------------------


@pytest.mark.parametrize("n,m", [(2, 5), (3, 5), (2, 8)])
def test_td_unique_equilibrium_at_the_minimum_claim(n, m):
    game = build_td(n, m)
    pne = solved(game)
    assert pne == oracle_pne(game)
    assert pne == {tuple(2 for _ in range(n))}


def test_td_claim_values_start_at_two():
    game = build_td(2, 5)
    assert game.domains[game.controlled_vars[0]].values == (2, 3, 4, 5, 6)
    with pytest.raises(ValueError):
        build_td(2, 5, r=1)


# --- congestion ------------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_cg_matches_oracle(seed):
    game = build_cg(3, 3, seed=seed)
    assert solved(game) == oracle_pne(game)


def test_cg_deterministic_per_seed():
    assert build_cg(3, 3, seed=5) == build_cg(3, 3, seed=5)
    assert build_cg(3, 3, seed=5) != build_cg(3, 3, seed=6)


# --- location with hard constraints ----------------------------------------------


def test_location_hc_excludes_shared_positions():
    game = build_location_hc(2, 3, (1, 1))
    assert not check_hard(game, (1, 1))
    assert check_hard(game, (1, 2))


def test_location_hc_equilibria_match_oracle_and_close_under_swap():
    game = build_location_hc(2, 3, (1, 1))
    pne = solved(game)
    assert pne == oracle_pne(game)
    assert all(check_hard(game, s) for s in pne)
    assert {(b, a) for a, b in pne} == pne


def test_location_hc_three_sellers_five_spots():
    game = build_location_hc(3, 5, (1, 1, 1))
    assert solved(game) == oracle_pne(game)


def test_location_hc_warns_when_infeasible():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        game = build_location_hc(3, 2, (1, 1, 1))
    assert any("unsatisfiable" in str(w.message) for w in caught)
    assert solved(game) == set()


# --- location, price competition --------------------------------------------------


def test_location_gv_matches_oracle():
    game = build_location_gv(4)
    assert solved(game) == oracle_pne(game)


def test_location_gv_custom_positions():
    game = build_location_gv(4, positions=(2, 3))
    assert solved(game) == oracle_pne(game)


# --- cloud resource allocation ------------------------------------------------------


def test_crag_single_machine_single_profile():
    game = build_crag(caps=(5,), unit_costs=(2,), demands=((1,), (2,)))
    pne = solved(game)
    assert game.profile_count() == 1
    assert pne == {(1, 1)} == oracle_pne(game)


def test_crag_two_clients_prefer_the_cheap_machine():
    game = build_crag(caps=(9, 9), unit_costs=(1, 5), demands=((1,), (1,)))
    pne = solved(game)
    assert pne == oracle_pne(game)
    assert pne == {(1, 1)}


def test_crag_capacity_excludes_profiles_but_not_deviations():
    # the cheap machine fits one task; with a strictly cheaper machine every
    # client covets it regardless of capacity, so nothing is stable
    scarce = build_crag(caps=(2, 4), unit_costs=(1, 3), demands=((2,), (2,)))
    assert solved(scarce) == oracle_pne(scarce) == set()
    # with equal prices clients are indifferent and exactly the feasible
    # profiles are equilibria
    fair = build_crag(caps=(2, 4), unit_costs=(1, 1), demands=((2,), (2,)))
    pne = solved(fair)
    assert pne == oracle_pne(fair)
    assert pne == {(1, 2), (2, 1), (2, 2)}
    assert all(check_hard(fair, s) for s in pne)


def test_crag_multi_task_client():
    game = build_crag(caps=(4, 4), unit_costs=(2, 1), demands=((1, 2), (1,)))
    assert solved(game) == oracle_pne(game)


def test_crag_rejects_overload():
    with pytest.raises(ValueError, match="exceeds total capacity"):
        build_crag(caps=(2,), unit_costs=(1,), demands=((2,), (1,)))


# --- demo game and registry -----------------------------------------------------------


def test_matrix_demo_equilibrium():
    game = build_matrix_demo()
    assert solved(game) == {(2, 3)} == oracle_pne(game)


def test_registry_builds_each_family():
    for tag in ("gtta", "meg", "td", "cg", "lg-hc", "lg-gv", "crag", "demo3x3"):
        game = build_from_registry(tag, {"players": 2, "domain": 3})
        assert game.num_players >= 1


def test_registry_rejects_unknown_tag():
    with pytest.raises(ValueError, match="unknown game family"):
        build_from_registry("chess", {})
