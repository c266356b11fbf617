"""Game data model and the deviation/equilibrium predicates.

A game partitions its variables into per-player controlled blocks and a pool
of existential variables. Each player owns a goal CSP and, optionally, an
objective; a shared hard-constraint CSP restricts which profiles can be
equilibria at all.

Semantics pinned down here and relied on everywhere else:

* A profile is a tuple of values for the controlled variables, ordered by
  player declaration and, within a player, by her variable declaration.
* Goal satisfaction and objective values are computed from the player's goal
  alone, with existential variables existentially witnessed (the best witness
  counts for the objective). Hard constraints do NOT restrict deviations;
  they only exclude profiles from candidacy. This matters for models whose
  existential machinery lives in the hard part.
* A player whose goal is unsatisfiable for every own strategy has no
  preference: she never blocks an equilibrium.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .constraints import Constraint, scope
from .csp import Csp, OptGoal, is_satisfiable, optimal_value
from .domains import Domain

Profile = tuple[int, ...]
Strategy = tuple[int, ...]


@dataclass(frozen=True)
class PlayerSpec:
    name: str
    vars: tuple[int, ...]

    def __post_init__(self):
        if not self.vars:
            raise ValueError(f"player {self.name!r} controls no variables")


@dataclass
class SolveStats:
    """Counters reported by every solver.

    ``candidates`` counts full profiles submitted to the equilibrium check,
    ``deviation_calls`` counts invocations of the goal solver (table hits are
    not solver calls and are excluded).
    """

    candidates: int = 0
    deviation_calls: int = 0
    pne_found: int = 0


@dataclass(frozen=True)
class Game:
    title: str
    var_names: tuple[str, ...]
    domains: tuple[Domain, ...]
    players: tuple[PlayerSpec, ...]
    existential: tuple[int, ...]
    goals: tuple[tuple[Constraint, ...], ...]
    opts: tuple[OptGoal | None, ...]
    hard: tuple[Constraint, ...] = ()

    def __post_init__(self):
        n = len(self.domains)
        if len(self.var_names) != n:
            raise ValueError("var_names and domains must have equal length")
        if len(self.goals) != len(self.players) or len(self.opts) != len(self.players):
            raise ValueError("goals and opts must be given per player")
        seen: set[int] = set()
        for p in self.players:
            for v in p.vars:
                if not 0 <= v < n:
                    raise ValueError(f"player {p.name!r} controls unknown variable {v}")
                if v in seen:
                    raise ValueError(f"variable {self.var_names[v]} controlled twice")
                seen.add(v)
        for v in self.existential:
            if not 0 <= v < n:
                raise ValueError(f"unknown existential variable {v}")
            if v in seen:
                raise ValueError(
                    f"variable {self.var_names[v]} is both controlled and existential"
                )
            seen.add(v)
        if len(seen) != n:
            missing = [self.var_names[v] for v in range(n) if v not in seen]
            raise ValueError(f"variables not assigned to any player or pool: {missing}")
        for d in self.domains:
            if d.is_empty:
                raise ValueError("empty initial domain")
        for cs in self.goals + (self.hard,):
            for c in cs:
                for v in scope(c):
                    if not 0 <= v < n:
                        raise ValueError(f"constraint {c!r} references unknown variable {v}")
        for i, opt in enumerate(self.opts):
            if opt is not None and not 0 <= opt.var < n:
                raise ValueError(f"objective of player {self.players[i].name!r} is unknown")

    # -- structure helpers --------------------------------------------------

    @property
    def num_players(self) -> int:
        return len(self.players)

    @property
    def controlled_vars(self) -> tuple[int, ...]:
        return tuple(v for p in self.players for v in p.vars)

    @property
    def player_slices(self) -> tuple[tuple[int, int], ...]:
        """Per-player (start, end) positions inside a profile tuple."""
        out = []
        pos = 0
        for p in self.players:
            out.append((pos, pos + len(p.vars)))
            pos += len(p.vars)
        return tuple(out)

    def strategy_space(self, i: int) -> list[Strategy]:
        """All strategies of player ``i`` over initial domains, lexicographic."""
        return [
            tuple(t)
            for t in itertools.product(*(self.domains[v].values for v in self.players[i].vars))
        ]

    def strategy_count(self, i: int) -> int:
        out = 1
        for v in self.players[i].vars:
            out *= len(self.domains[v])
        return out

    def profile_count(self) -> int:
        out = 1
        for i in range(self.num_players):
            out *= self.strategy_count(i)
        return out

    def profiles(self) -> Iterator[Profile]:
        """Every strategy profile, in lexicographic order."""
        for t in itertools.product(*(self.domains[v].values for v in self.controlled_vars)):
            yield t

    def player_strategy(self, profile: Profile, i: int) -> Strategy:
        a, b = self.player_slices[i]
        return profile[a:b]

    def replace_strategy(self, profile: Profile, i: int, strategy: Strategy) -> Profile:
        a, b = self.player_slices[i]
        return profile[:a] + tuple(strategy) + profile[b:]

    def profile_items(self, profile: Profile) -> dict[str, int]:
        return {self.var_names[v]: val for v, val in zip(self.controlled_vars, profile)}

    def hard_csp(self) -> Csp:
        return Csp(self.domains, self.hard)

    def goal_csp(self, i: int) -> Csp:
        return Csp(self.domains, self.goals[i])


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def _fixed_domains(
    game: Game, profile: Profile, free_scope: set[int]
) -> list[Domain]:
    """Domains with controlled vars pinned to the profile.

    Existential variables outside ``free_scope`` are pinned to an arbitrary
    value; they cannot influence satisfiability of constraints that do not
    mention them.
    """
    doms = list(game.domains)
    for v, val in zip(game.controlled_vars, profile):
        doms[v] = Domain.singleton(val)
    for v in game.existential:
        if v not in free_scope:
            doms[v] = Domain.singleton(doms[v].min)
    return doms


def _constraint_scope(constraints: Sequence[Constraint]) -> set[int]:
    out: set[int] = set()
    for c in constraints:
        out.update(scope(c))
    return out


def check_hard(game: Game, profile: Profile) -> bool:
    """True when the hard constraints admit a witness under this profile."""
    if not game.hard:
        return True
    doms = _fixed_domains(game, profile, _constraint_scope(game.hard))
    return is_satisfiable(game.hard_csp(), doms)


def is_winning(game: Game, profile: Profile, i: int) -> bool:
    """True when player ``i``'s goal admits a witness under this profile."""
    if not game.goals[i]:
        return True
    doms = _fixed_domains(game, profile, _constraint_scope(game.goals[i]))
    return is_satisfiable(game.goal_csp(i), doms)


def goal_value(game: Game, profile: Profile, i: int) -> int | None:
    """Best objective value over goal witnesses, or None when unsatisfiable.

    Only meaningful for players with an objective; satisfaction players get
    1/0 so that both game flavors share one comparison rule.
    """
    opt = game.opts[i]
    if opt is None:
        return 1 if is_winning(game, profile, i) else None
    free = _constraint_scope(game.goals[i])
    free.add(opt.var)
    doms = _fixed_domains(game, profile, free)
    return optimal_value(game.goal_csp(i), opt, doms)


def better_than(game: Game, alt: Profile, cur: Profile, i: int) -> bool:
    """Strictly-prefers: would player ``i`` rather be at ``alt`` than ``cur``?

    Both profiles must agree outside player ``i``'s variables. Reaching a
    satisfiable goal always beats an unsatisfiable one; among satisfiable
    outcomes the objective decides (strictly).
    """
    a, b = game.player_slices[i]
    if alt[:a] != cur[:a] or alt[b:] != cur[b:]:
        raise ValueError("profiles differ outside the deviating player's variables")
    opt = game.opts[i]
    if opt is None:
        return not is_winning(game, cur, i) and is_winning(game, alt, i)
    va = goal_value(game, alt, i)
    if va is None:
        return False
    vc = goal_value(game, cur, i)
    if vc is None:
        return True
    return va < vc if opt.direction == "min" else va > vc


def best_responses(game: Game, profile: Profile, i: int) -> tuple[Strategy, ...]:
    """Player ``i``'s optimal strategies against the rest of ``profile``.

    For satisfaction players these are the winning strategies; for
    optimization players the goal-satisfying strategies attaining the best
    objective. Empty when no own strategy satisfies the goal. Hard
    constraints are deliberately not imposed here.
    """
    opt = game.opts[i]
    best_val: int | None = None
    winners: list[Strategy] = []
    for u in game.strategy_space(i):
        alt = game.replace_strategy(profile, i, u)
        if opt is None:
            if is_winning(game, alt, i):
                winners.append(u)
            continue
        v = goal_value(game, alt, i)
        if v is None:
            continue
        if best_val is None or (v < best_val if opt.direction == "min" else v > best_val):
            best_val = v
            winners = [u]
        elif v == best_val:
            winners.append(u)
    return tuple(winners)


def is_nash(game: Game, profile: Profile) -> bool:
    """Equilibrium test: hard-feasible and no player can strictly improve."""
    if not check_hard(game, profile):
        return False
    for i in range(game.num_players):
        d = best_responses(game, profile, i)
        if d and game.player_strategy(profile, i) not in d:
            return False
    return True
