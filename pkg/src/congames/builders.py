"""Builders for the benchmark game families.

Each builder returns a fully validated :class:`~congames.model.Game` whose
payoffs are encoded as existential variables functionally defined by the
constraint vocabulary (sums, offsets, minimums, channeling and lookup
tables). All builders are deterministic given their parameters and seed.

Payoff conventions worth noting:

* ``build_gtta``: the guessers closest to two thirds of the average share a
  prize of lcm(1..n), so lone winners strictly beat ties. With a 0/1
  "am I closest" payoff every uniform profile would be an equilibrium; prize
  splitting yields the classic unique all-minimum equilibrium.
* ``build_crag``: the channeling between a client's placements and her
  choice indicators is part of her goal (as well as of the hard part), so
  her cost is well defined when she evaluates a unilateral move.
* ``build_location_hc``: the customer-behavior machinery lives entirely in
  the hard constraints; goals only define the seller's income. Deviations
  are evaluated on goals alone, so this family tests hard-constraint
  exclusion rather than payoff shape.
"""
from __future__ import annotations

import math
import random
import warnings
from typing import Callable, Sequence

from .constraints import (
    AbsOffset,
    AllDifferent,
    Constraint,
    ImplyEqVars,
    Linear,
    MinOf,
    ReifEqConst,
    Table,
    WeightedBoolSum,
)
from .csp import OptGoal
from .domains import Domain
from .model import Game, PlayerSpec


class GameDraft:
    """Incremental declaration helper used by builders and the file parser."""

    def __init__(self, title: str):
        self.title = title
        self.names: list[str] = []
        self.domains: list[Domain] = []
        self.player_names: list[str] = []
        self.player_vars: dict[str, list[int]] = {}
        self.existential: list[int] = []
        self.goal_constraints: dict[str, list[Constraint]] = {}
        self.opt_goals: dict[str, OptGoal] = {}
        self.hard_constraints: list[Constraint] = []

    def player(self, name: str) -> None:
        if name in self.player_vars:
            raise ValueError(f"player {name!r} declared twice")
        self.player_names.append(name)
        self.player_vars[name] = []
        self.goal_constraints[name] = []

    def _add_var(self, name: str, domain: Domain) -> int:
        if name in self.names:
            raise ValueError(f"variable {name!r} declared twice")
        self.names.append(name)
        self.domains.append(domain)
        return len(self.names) - 1

    def controlled(self, player: str, name: str, domain: Domain) -> int:
        if player not in self.player_vars:
            raise ValueError(f"unknown player {player!r}")
        v = self._add_var(name, domain)
        self.player_vars[player].append(v)
        return v

    def shared(self, name: str, domain: Domain) -> int:
        v = self._add_var(name, domain)
        self.existential.append(v)
        return v

    def goal(self, player: str, *constraints: Constraint) -> None:
        self.goal_constraints[player].extend(constraints)

    def hard(self, *constraints: Constraint) -> None:
        self.hard_constraints.extend(constraints)

    def maximize(self, player: str, var: int) -> None:
        self.opt_goals[player] = OptGoal("max", var)

    def minimize(self, player: str, var: int) -> None:
        self.opt_goals[player] = OptGoal("min", var)

    def build(self) -> Game:
        return Game(
            title=self.title,
            var_names=tuple(self.names),
            domains=tuple(self.domains),
            players=tuple(
                PlayerSpec(p, tuple(self.player_vars[p])) for p in self.player_names
            ),
            existential=tuple(self.existential),
            goals=tuple(tuple(self.goal_constraints[p]) for p in self.player_names),
            opts=tuple(self.opt_goals.get(p) for p in self.player_names),
            hard=tuple(self.hard_constraints),
        )


def _eq_sum(terms: Sequence[tuple[int, int]], result: int) -> Linear:
    """sum(coef * var) = result as a single linear constraint."""
    vars_ = tuple(v for _, v in terms) + (result,)
    coefs = tuple(c for c, _ in terms) + (-1,)
    return Linear(vars_, coefs, "=", 0)


# ---------------------------------------------------------------------------
# Guess two thirds of the average
# ---------------------------------------------------------------------------


def build_gtta(n: int, m: int) -> Game:
    """Everyone guesses in 1..m; the guesses closest to floor(2/3 * average)
    split a prize, and distance to the target breaks ties within a sharing
    class. The prize is scaled so any winner beats any loser and smaller
    sharing classes always dominate, keeping preferences strict; the unique
    equilibrium is everyone guessing the minimum."""
    if n < 2 or m < 2:
        raise ValueError("needs at least two players and two guesses")
    d = GameDraft(f"GTTA.{n}.{m}")
    for i in range(1, n + 1):
        d.player(f"P{i}")
    guesses = [d.controlled(f"P{i}", f"g{i}", Domain.range(1, m)) for i in range(1, n + 1)]

    total = d.shared("total", Domain.range(n, n * m))
    sum_def = _eq_sum([(1, g) for g in guesses], total)
    t_max = (2 * n * m) // (3 * n)
    target = d.shared("target", Domain.range(0, t_max))
    target_def = Table(
        (total, target), tuple((s, (2 * s) // (3 * n)) for s in range(n, n * m + 1))
    )

    dist_rows = tuple(
        (g, t, abs(g - t)) for g in range(1, m + 1) for t in range(0, t_max + 1)
    )
    dists = []
    for i, g in enumerate(guesses, start=1):
        dv = d.shared(f"dist{i}", Domain.range(0, m))
        dists.append(dv)
    dist_defs = [Table((g, target, dv), dist_rows) for g, dv in zip(guesses, dists)]

    closest = d.shared("closest", Domain.range(0, m))
    closest_def = MinOf(closest, tuple(dists))

    win_rows = tuple(
        (a, b, 1 if a == b else 0) for a in range(0, m + 1) for b in range(0, m + 1)
    )
    wins = [d.shared(f"win{i}", Domain.range(0, 1)) for i in range(1, n + 1)]
    win_defs = [Table((dv, closest, w), win_rows) for dv, w in zip(dists, wins)]

    nwinners = d.shared("nwinners", Domain.range(0, n))
    nwinners_def = _eq_sum([(1, w) for w in wins], nwinners)

    prize = math.lcm(*range(1, n + 1)) * (m + n)
    share_rows = tuple(
        (0, c, dist, -dist)
        for c in range(0, n + 1)
        for dist in range(0, m + 1)
    ) + tuple(
        (1, c, dist, prize // c - dist)
        for c in range(1, n + 1)
        for dist in range(0, m + 1)
    )

    shared_defs = [sum_def, target_def, *dist_defs, closest_def, *win_defs, nwinners_def]
    for i in range(1, n + 1):
        pay = d.shared(f"pay{i}", Domain.range(-m, prize))
        pay_def = Table((wins[i - 1], nwinners, dists[i - 1], pay), share_rows)
        d.goal(f"P{i}", *shared_defs, pay_def)
        d.maximize(f"P{i}", pay)
    return d.build()


# ---------------------------------------------------------------------------
# Minimum effort game
# ---------------------------------------------------------------------------


def build_meg(n: int, m: int, a: int = 2, b: int = 1) -> Game:
    """Effort in 1..m, payoff a*min(efforts) - b*own effort."""
    if n < 2 or m < 2:
        raise ValueError("needs at least two players and two effort levels")
    if not a > b >= 1:
        raise ValueError("requires a > b >= 1")
    d = GameDraft(f"MEG.{n}.{m}")
    for i in range(1, n + 1):
        d.player(f"P{i}")
    efforts = [d.controlled(f"P{i}", f"e{i}", Domain.range(1, m)) for i in range(1, n + 1)]
    low = d.shared("low", Domain.range(1, m))
    low_def = MinOf(low, tuple(efforts))
    for i in range(1, n + 1):
        pay = d.shared(f"pay{i}", Domain.range(a - b * m, a * m - b))
        d.goal(f"P{i}", low_def, _eq_sum([(a, low), (-b, efforts[i - 1])], pay))
        d.maximize(f"P{i}", pay)
    return d.build()


# ---------------------------------------------------------------------------
# Traveller's dilemma
# ---------------------------------------------------------------------------


def build_td(n: int, m: int, r: int = 2) -> Game:
    """Claims in 2..m+1. Against the lowest other claim L: claiming below L
    pays claim+r, tying pays the claim, claiming above pays L-r."""
    if n < 2 or m < 2:
        raise ValueError("needs at least two players and two claims")
    if r < 2:
        raise ValueError("requires reward r >= 2")
    lo, hi = 2, m + 1
    d = GameDraft(f"TD.{n}.{m}")
    for i in range(1, n + 1):
        d.player(f"P{i}")
    claims = [d.controlled(f"P{i}", f"c{i}", Domain.range(lo, hi)) for i in range(1, n + 1)]

    def rule(c: int, low: int) -> int:
        if c < low:
            return c + r
        if c == low:
            return c
        return low - r

    pay_rows = tuple(
        (c, low, rule(c, low)) for c in range(lo, hi + 1) for low in range(lo, hi + 1)
    )
    for i in range(1, n + 1):
        others = tuple(cv for j, cv in enumerate(claims, start=1) if j != i)
        low = d.shared(f"low{i}", Domain.range(lo, hi))
        pay = d.shared(f"pay{i}", Domain.range(lo - r, hi + r))
        d.goal(f"P{i}", MinOf(low, others), Table((claims[i - 1], low, pay), pay_rows))
        d.maximize(f"P{i}", pay)
    return d.build()


# ---------------------------------------------------------------------------
# Singleton congestion game
# ---------------------------------------------------------------------------


def build_cg(n: int, m: int, seed: int = 0) -> Game:
    """Each player picks one of m facilities; a facility's per-user value is
    drawn from the seed and strictly decreases with its load."""
    if n < 2 or m < 2:
        raise ValueError("needs at least two players and two facilities")
    rng = random.Random(seed)
    values: list[list[int]] = []
    for _ in range(m):
        start = rng.randint(2 * n + 2, 4 * n + 6)
        col = [start]
        for _ in range(n):
            col.append(col[-1] - rng.randint(1, 3))
        values.append(col)  # col[load] for load 0..n

    d = GameDraft(f"CG.{n}.{m}")
    for i in range(1, n + 1):
        d.player(f"P{i}")
    picks = [d.controlled(f"P{i}", f"f{i}", Domain.range(1, m)) for i in range(1, n + 1)]

    uses = {}
    use_defs = []
    for i in range(1, n + 1):
        for f in range(1, m + 1):
            b = d.shared(f"use{i}_{f}", Domain.range(0, 1))
            uses[i, f] = b
            use_defs.append(ReifEqConst(b, picks[i - 1], f))

    loads = []
    load_defs = []
    utils = []
    util_defs = []
    for f in range(1, m + 1):
        load = d.shared(f"load{f}", Domain.range(0, n))
        loads.append(load)
        load_defs.append(_eq_sum([(1, uses[i, f]) for i in range(1, n + 1)], load))
        vmin, vmax = min(values[f - 1]), max(values[f - 1])
        util = d.shared(f"value{f}", Domain.range(vmin, vmax))
        utils.append(util)
        util_defs.append(
            Table((load, util), tuple((k, values[f - 1][k]) for k in range(n + 1)))
        )

    shared_defs = use_defs + load_defs + util_defs
    vmin = min(min(col) for col in values)
    vmax = max(max(col) for col in values)
    for i in range(1, n + 1):
        gains = []
        gain_defs = []
        for f in range(1, m + 1):
            gain = d.shared(f"gain{i}_{f}", Domain(sorted({0, *values[f - 1]})))
            gains.append(gain)
            rows = tuple((0, u, 0) for u in sorted(set(values[f - 1]))) + tuple(
                (1, u, u) for u in sorted(set(values[f - 1]))
            )
            gain_defs.append(Table((uses[i, f], utils[f - 1], gain), rows))
        pay = d.shared(f"pay{i}", Domain.range(min(vmin, 0), vmax))
        d.goal(f"P{i}", *shared_defs, *gain_defs, _eq_sum([(1, g) for g in gains], pay))
        d.maximize(f"P{i}", pay)
    return d.build()


# ---------------------------------------------------------------------------
# Location game with hard constraints
# ---------------------------------------------------------------------------


def build_location_hc(n: int, m: int, prices: Sequence[int]) -> Game:
    """Sellers pick distinct street positions 1..m; a customer at every
    position walks to the cheapest stand (price plus distance); income is the
    seller's price times her customer count."""
    if n < 1 or m < 1:
        raise ValueError("needs at least one seller and one position")
    prices = tuple(prices)
    if len(prices) != n:
        raise ValueError(f"need {n} prices, got {len(prices)}")
    if any(p < 0 for p in prices):
        raise ValueError("prices must be non-negative")
    if n > m:
        warnings.warn(
            "more sellers than positions: the hard constraints are unsatisfiable",
            stacklevel=2,
        )

    d = GameDraft(f"LG(HC).{n}.{m}")
    for i in range(1, n + 1):
        d.player(f"S{i}")
    spots = [d.controlled(f"S{i}", f"l{i}", Domain.range(1, m)) for i in range(1, n + 1)]
    d.hard(AllDifferent(tuple(spots)))

    costs: dict[tuple[int, int], int] = {}
    for i in range(1, n + 1):
        for c in range(1, m + 1):
            cv = d.shared(f"cost{i}_{c}", Domain.range(prices[i - 1], m - 1 + prices[i - 1]))
            costs[i, c] = cv
            d.hard(AbsOffset(cv, spots[i - 1], c, prices[i - 1]))
    buys: dict[tuple[int, int], int] = {}
    for c in range(1, m + 1):
        cheapest = d.shared(f"cheapest{c}", Domain.range(min(prices), m - 1 + max(prices)))
        column = tuple(costs[i, c] for i in range(1, n + 1))
        d.hard(MinOf(cheapest, column))
        for i in range(1, n + 1):
            b = d.shared(f"buys{i}_{c}", Domain.range(0, 1))
            buys[i, c] = b
            d.hard(ImplyEqVars(b, cheapest, costs[i, c]))
        d.hard(
            WeightedBoolSum(
                tuple(buys[i, c] for i in range(1, n + 1)), tuple(1 for _ in range(n)), "=", 1
            )
        )

    for i in range(1, n + 1):
        income = d.shared(f"income{i}", Domain.range(0, prices[i - 1] * m))
        if prices[i - 1] == 0:
            d.goal(f"S{i}", Linear((income,), (1,), "=", 0))
        else:
            terms = [(prices[i - 1], buys[i, c]) for c in range(1, m + 1)]
            d.goal(f"S{i}", _eq_sum(terms, income))
        d.maximize(f"S{i}", income)
    return d.build()


# ---------------------------------------------------------------------------
# Location game, price-competition variant
# ---------------------------------------------------------------------------


def build_location_gv(m: int, positions: tuple[int, int] | None = None, seed: int = 0) -> Game:
    """Two sellers at fixed positions set prices 1..m; each of the m
    customers buys from the seller minimizing price plus distance, ties going
    to the first seller. Income is price times customers served."""
    if m < 2:
        raise ValueError("needs at least two price levels")
    pos = positions if positions is not None else (1, m)
    if len(pos) != 2 or not all(1 <= p <= m for p in pos):
        raise ValueError("positions must be two street coordinates in 1..m")
    del seed  # accepted for interface uniformity; the model is deterministic

    d = GameDraft(f"LG(GV).2.{m}")
    d.player("S1")
    d.player("S2")
    prices = [d.controlled(f"S{i}", f"p{i}", Domain.range(1, m)) for i in (1, 2)]

    spread = (m + m - 1) + 1
    gap_rows = tuple((g, 1 if g <= 0 else 0) for g in range(-spread, spread + 1))
    buys = []
    shared_defs: list[Constraint] = []
    for c in range(1, m + 1):
        c1 = d.shared(f"cost1_{c}", Domain.range(1, m + m - 1))
        c2 = d.shared(f"cost2_{c}", Domain.range(1, m + m - 1))
        shared_defs.append(AbsOffset(c1, prices[0], 0, abs(c - pos[0])))
        shared_defs.append(AbsOffset(c2, prices[1], 0, abs(c - pos[1])))
        gap = d.shared(f"gap{c}", Domain.range(-spread, spread))
        shared_defs.append(_eq_sum([(1, c1), (-1, c2)], gap))
        b = d.shared(f"buys1_{c}", Domain.range(0, 1))
        buys.append(b)
        shared_defs.append(Table((gap, b), gap_rows))

    served1 = d.shared("served1", Domain.range(0, m))
    served2 = d.shared("served2", Domain.range(0, m))
    shared_defs.append(_eq_sum([(1, b) for b in buys], served1))
    shared_defs.append(Linear((served1, served2), (1, 1), "=", m))

    income_rows = tuple(
        (p, k, p * k) for p in range(1, m + 1) for k in range(0, m + 1)
    )
    for i, served in ((1, served1), (2, served2)):
        income = d.shared(f"income{i}", Domain.range(0, m * m))
        d.goal(f"S{i}", *shared_defs, Table((prices[i - 1], served, income), income_rows))
        d.maximize(f"S{i}", income)
    return d.build()


# ---------------------------------------------------------------------------
# Cloud resource allocation game
# ---------------------------------------------------------------------------


def build_crag(
    caps: Sequence[int], unit_costs: Sequence[int], demands: Sequence[Sequence[int]]
) -> Game:
    """Clients place tasks on machines. Machine capacities are shared hard
    constraints; each client minimizes the metered cost of her own tasks."""
    caps = tuple(caps)
    unit_costs = tuple(unit_costs)
    demands = tuple(tuple(ts) for ts in demands)
    if len(caps) != len(unit_costs):
        raise ValueError("caps and unit_costs must describe the same machines")
    if not caps or not demands:
        raise ValueError("needs at least one machine and one client")
    if any(not ts for ts in demands):
        raise ValueError("every client needs at least one task")
    if any(c <= 0 for c in caps) or any(u < 0 for u in unit_costs):
        raise ValueError("capacities must be positive and unit costs non-negative")
    total_demand = sum(sum(ts) for ts in demands)
    if total_demand > sum(caps):
        raise ValueError(
            f"total demand {total_demand} exceeds total capacity {sum(caps)}"
        )

    m = len(caps)
    n = len(demands)
    d = GameDraft(f"CRAG.{n}.{m}")
    for i in range(1, n + 1):
        d.player(f"C{i}")
    placement = {}
    for i, tasks in enumerate(demands, start=1):
        for k in range(1, len(tasks) + 1):
            placement[i, k] = d.controlled(f"C{i}", f"r{i}_{k}", Domain.range(1, m))

    chosen = {}
    channel: dict[int, list[Constraint]] = {i: [] for i in range(1, n + 1)}
    for i, tasks in enumerate(demands, start=1):
        for k in range(1, len(tasks) + 1):
            for j in range(1, m + 1):
                b = d.shared(f"choice{i}_{j}_{k}", Domain.range(0, 1))
                chosen[i, j, k] = b
                channel[i].append(ReifEqConst(b, placement[i, k], j))
    for cs in channel.values():
        d.hard(*cs)
    for j in range(1, m + 1):
        vars_ = []
        weights = []
        for i, tasks in enumerate(demands, start=1):
            for k, dem in enumerate(tasks, start=1):
                vars_.append(chosen[i, j, k])
                weights.append(dem)
        d.hard(WeightedBoolSum(tuple(vars_), tuple(weights), "<=", caps[j - 1]))

    for i, tasks in enumerate(demands, start=1):
        worst = sum(dem * max(unit_costs) for dem in tasks)
        cost = d.shared(f"cost{i}", Domain.range(0, worst))
        terms = [
            (unit_costs[j - 1] * dem, chosen[i, j, k])
            for j in range(1, m + 1)
            for k, dem in enumerate(tasks, start=1)
        ]
        d.goal(f"C{i}", *channel[i], _eq_sum(terms, cost))
        d.minimize(f"C{i}", cost)
    return d.build()


# ---------------------------------------------------------------------------
# Small worked example
# ---------------------------------------------------------------------------


def build_matrix_demo() -> Game:
    """Two-player 3x3 satisfaction game with a single equilibrium.

    The column player picks y in 1..3, the row player picks x in 1..3
    (read 1=a, 2=b, 3=c). Win cells transcribe the grid

        row a: (0,1) (1,0) (1,0)
        row b: (0,1) (0,0) (1,0)
        row c: (1,0) (1,1) (0,0)

    with cells read as (row payoff, column payoff); the lone equilibrium is
    row c, column 2.
    """
    d = GameDraft("demo-3x3")
    d.player("Column")
    d.player("Row")
    y = d.controlled("Column", "y", Domain.range(1, 3))
    x = d.controlled("Row", "x", Domain.range(1, 3))
    d.goal("Column", Table((y, x), ((1, 1), (1, 2), (2, 3))))
    d.goal("Row", Table((y, x), ((2, 1), (3, 1), (3, 2), (1, 3), (2, 3))))
    return d.build()


# ---------------------------------------------------------------------------
# Registry used by the command line
# ---------------------------------------------------------------------------


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip() != "")


def _int_lists(text: str) -> tuple[tuple[int, ...], ...]:
    return tuple(_ints(part) for part in text.split("/") if part.strip() != "")


# tag -> (builder, ((cli name, parser, default, help), ...))
REGISTRY: dict[str, tuple[Callable[..., Game], tuple]] = {
    "gtta": (
        build_gtta,
        (
            ("players", int, 3, "number of players"),
            ("domain", int, 10, "number of guess values"),
        ),
    ),
    "meg": (
        build_meg,
        (
            ("players", int, 3, "number of players"),
            ("domain", int, 10, "number of effort levels"),
            ("a", int, 2, "weight of the joint minimum"),
            ("b", int, 1, "weight of own effort"),
        ),
    ),
    "td": (
        build_td,
        (
            ("players", int, 3, "number of players"),
            ("domain", int, 10, "number of claim values"),
            ("reward", int, 2, "undercutting reward"),
        ),
    ),
    "cg": (
        build_cg,
        (
            ("players", int, 3, "number of players"),
            ("domain", int, 3, "number of facilities"),
            ("seed", int, 0, "congestion table seed"),
        ),
    ),
    "lg-hc": (
        build_location_hc,
        (
            ("players", int, 3, "number of sellers"),
            ("domain", int, 5, "number of street positions"),
            ("prices", _ints, (1, 1, 1), "comma-separated seller prices"),
        ),
    ),
    "lg-gv": (
        build_location_gv,
        (
            ("domain", int, 5, "number of price levels"),
            ("positions", _ints, None, "comma-separated seller positions"),
            ("seed", int, 0, "accepted for uniformity; the model is fixed"),
        ),
    ),
    "crag": (
        build_crag,
        (
            ("caps", _ints, (4, 4), "comma-separated machine capacities"),
            ("unit-costs", _ints, (1, 5), "comma-separated machine unit costs"),
            ("demands", _int_lists, ((1,), (1,)), "per-client task demands, clients separated by '/'"),
        ),
    ),
    "demo3x3": (build_matrix_demo, ()),
}


def build_from_registry(tag: str, params: dict) -> Game:
    """Instantiate a registered family from CLI-style parameters."""
    if tag not in REGISTRY:
        raise ValueError(f"unknown game family {tag!r}; known: {', '.join(sorted(REGISTRY))}")
    builder, spec = REGISTRY[tag]
    kwargs = {}
    rename = {
        "players": "n",
        "domain": "m",
        "reward": "r",
        "unit-costs": "unit_costs",
    }
    for name, _, default, _help in spec:
        value = params.get(name, default)
        if value is None and name == "positions":
            continue
        kwargs[rename.get(name, name)] = value
    if tag == "lg-hc" and "prices" not in params:
        kwargs["prices"] = tuple(1 for _ in range(kwargs["n"]))
    if tag == "lg-gv" and "positions" in kwargs:
        kwargs["positions"] = tuple(kwargs["positions"])
    return builder(**kwargs)
