"""Ground-truth machinery: dense normal-form expansion and two independent
equilibrium derivations, plus export to the Gambit payoff text format.

Every cell value here is computed by the generic finite-domain solver, never
by the solvers' compiled fast path, so oracle results and solver results only
agree when both sides are right.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .csp import optimal_value
from .domains import Domain
from .model import Game, Profile, Strategy, check_hard, is_winning
from .model import _constraint_scope, _fixed_domains  # shared internals

DEFAULT_CELL_CAP = 1_000_000
RELATION_PROFILE_CAP = 100_000


class TensorSizeError(ValueError):
    """The requested expansion exceeds the configured cell cap."""


class NfgExportError(ValueError):
    """The tensor cannot be represented in the payoff format."""


@dataclass(frozen=True)
class PayoffTensor:
    """Dense normal form of a game.

    ``payoffs`` are per player, indexed by strategy indices (player order),
    and always oriented so that larger is better. ``defined`` marks cells
    where the player's goal is satisfiable; undefined cells carry no payoff
    and never attract a deviation. ``valid`` marks cells admitted by the hard
    constraints.
    """

    title: str
    player_names: tuple[str, ...]
    strategies: tuple[tuple[Strategy, ...], ...]
    payoffs: tuple[np.ndarray, ...]
    defined: tuple[np.ndarray, ...]
    valid: np.ndarray

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strategies)

    def profile_at(self, idx: tuple[int, ...]) -> Profile:
        out: tuple[int, ...] = ()
        for i, k in enumerate(idx):
            out += self.strategies[i][k]
        return out


def expand(game: Game, cell_cap: int = DEFAULT_CELL_CAP) -> PayoffTensor:
    """Evaluate every player's goal on every profile of the full grid."""
    strategies = tuple(tuple(game.strategy_space(i)) for i in range(game.num_players))
    sizes = tuple(len(s) for s in strategies)
    cells = 1
    for s in sizes:
        cells *= s
    if cells > cell_cap:
        raise TensorSizeError(
            f"normal form needs {cells} cells per player, above the cap of {cell_cap}"
        )

    payoffs = [np.zeros(sizes, dtype=np.int64) for _ in range(game.num_players)]
    defined = [np.zeros(sizes, dtype=bool) for _ in range(game.num_players)]
    valid = np.ones(sizes, dtype=bool)

    goal_scopes = [_constraint_scope(game.goals[i]) for i in range(game.num_players)]
    for i, opt in enumerate(game.opts):
        if opt is not None:
            goal_scopes[i].add(opt.var)

    has_hard = bool(game.hard)
    for idx in itertools.product(*(range(s) for s in sizes)):
        profile: tuple[int, ...] = ()
        for i, k in enumerate(idx):
            profile += strategies[i][k]
        if has_hard and not check_hard(game, profile):
            valid[idx] = False
        for i in range(game.num_players):
            opt = game.opts[i]
            if opt is None:
                win = is_winning(game, profile, i)
                defined[i][idx] = True
                payoffs[i][idx] = 1 if win else 0
            else:
                doms = _fixed_domains(game, profile, goal_scopes[i])
                v = optimal_value(game.goal_csp(i), opt, doms)
                if v is None:
                    continue
                defined[i][idx] = True
                payoffs[i][idx] = v if opt.direction == "max" else -v

    return PayoffTensor(
        title=game.title,
        player_names=tuple(p.name for p in game.players),
        strategies=strategies,
        payoffs=tuple(payoffs),
        defined=tuple(defined),
        valid=valid,
    )


def brute_force_pne(tensor: PayoffTensor) -> tuple[Profile, ...]:
    """Scan every valid cell for a profitable unilateral index change.

    A cell where a player's goal is unsatisfiable never attracts that player;
    a player whose goal is unsatisfiable across her whole slice is
    indifferent there.
    """
    sizes = tensor.sizes
    out: list[Profile] = []
    for idx in itertools.product(*(range(s) for s in sizes)):
        if not tensor.valid[idx]:
            continue
        if _cell_is_equilibrium(tensor, idx):
            out.append(tensor.profile_at(idx))
    return tuple(out)


def _cell_is_equilibrium(tensor: PayoffTensor, idx: tuple[int, ...]) -> bool:
    for i in range(len(tensor.sizes)):
        pay = tensor.payoffs[i]
        dfn = tensor.defined[i]
        here_defined = dfn[idx]
        here = pay[idx]
        for alt in range(tensor.sizes[i]):
            if alt == idx[i]:
                continue
            jdx = idx[:i] + (alt,) + idx[i + 1:]
            if not dfn[jdx]:
                continue
            if not here_defined or pay[jdx] > here:
                return False
    return True


def nash_relations_pne(game: Game, profile_cap: int = RELATION_PROFILE_CAP) -> tuple[Profile, ...]:
    """Second derivation: per-player no-better-alternative relations.

    For each player, build the relation of profiles admitting no strictly
    preferred unilateral alternative (vectorized over her strategy axis);
    intersect the relations and filter by hard-constraint feasibility.
    """
    if game.profile_count() > profile_cap:
        raise TensorSizeError(
            f"relation construction needs {game.profile_count()} profiles, "
            f"above the cap of {profile_cap}"
        )
    tensor = expand(game, cell_cap=profile_cap)
    keep = tensor.valid.copy()
    for i in range(game.num_players):
        pay = np.moveaxis(tensor.payoffs[i], i, -1)
        dfn = np.moveaxis(tensor.defined[i], i, -1)
        masked = np.where(dfn, pay, np.iinfo(np.int64).min)
        slice_best = masked.max(axis=-1, keepdims=True)
        any_defined = dfn.any(axis=-1, keepdims=True)
        best_response = np.where(
            any_defined, dfn & (masked == slice_best), np.ones_like(dfn)
        )
        keep &= np.moveaxis(best_response, -1, i)
    return tuple(tensor.profile_at(idx) for idx in zip(*np.nonzero(keep)))


# ---------------------------------------------------------------------------
# Gambit payoff-format export
# ---------------------------------------------------------------------------


def export_nfg(tensor: PayoffTensor, title: str | None = None) -> bytes:
    """Render the tensor in the NFG payoff format.

    Games with hard-constraint-invalidated cells have no normal-form
    counterpart and are refused, as are tensors with undefined payoffs.
    Player 1's strategy index varies fastest; each cell lists every player's
    payoff in player order.
    """
    if not bool(tensor.valid.all()):
        raise NfgExportError(
            "the game has hard constraints (invalid cells); "
            "it cannot be represented in the normal-form payoff format"
        )
    for i, dfn in enumerate(tensor.defined):
        if not bool(dfn.all()):
            raise NfgExportError(
                f"player {tensor.player_names[i]!r} has undefined payoffs; "
                "the payoff format cannot express them"
            )
    name = tensor.title if title is None else title
    head_players = " ".join(f'"{_esc(p)}"' for p in tensor.player_names)
    head_sizes = " ".join(str(s) for s in tensor.sizes)
    lines = [f'NFG 1 R "{_esc(name)}" {{ {head_players} }} {{ {head_sizes} }}', ""]
    cells = []
    for idx in _first_player_fastest(tensor.sizes):
        for i in range(len(tensor.sizes)):
            cells.append(str(int(tensor.payoffs[i][idx])))
    lines.append(" ".join(cells))
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_nfg(tensor: PayoffTensor, path, title: str | None = None) -> None:
    data = export_nfg(tensor, title)
    with open(path, "wb") as fh:
        fh.write(data)


def _first_player_fastest(sizes: tuple[int, ...]):
    for rev in itertools.product(*(range(s) for s in reversed(sizes))):
        yield tuple(reversed(rev))


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')
