"""Exhaustive baseline solver: test every profile, keep the equilibria.

This is deliberately pruning-free so it can serve as the yardstick the
tree-search solver is measured against. Candidates are enumerated in
lexicographic order; deviation checks walk players in declaration order and
stop at the first player who can improve.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

from .model import Game, Profile, SolveStats, check_hard
from .responses import DEFAULT_CELL_CAP, ResponseEngine

_DEADLINE_STRIDE = 1024


@dataclass
class SolveResult:
    pne: tuple[Profile, ...]
    stats: SolveStats
    timed_out: bool = False


def enum1(
    game: Game,
    *,
    deadline: float | None = None,
    stop_after_first: bool = False,
    cell_cap: int = DEFAULT_CELL_CAP,
    engine: ResponseEngine | None = None,
    on_candidate: Callable[[Profile], None] | None = None,
) -> SolveResult:
    """Enumerate all pure Nash equilibria by generate-and-test.

    ``deadline`` is a ``time.monotonic()`` timestamp; when it passes, the
    partial result is returned with ``timed_out`` set.
    """
    eng = engine or ResponseEngine(game, cell_cap=cell_cap)
    stats = SolveStats()
    pne: list[Profile] = []
    n = game.num_players
    has_hard = bool(game.hard)
    strategies = eng.strategies
    sizes = eng.sizes

    timed_out = False
    for idx in itertools.product(*(range(s) for s in sizes)):
        stats.candidates += 1
        if deadline is not None and stats.candidates % _DEADLINE_STRIDE == 0:
            if time.monotonic() > deadline:
                timed_out = True
                break
        if on_candidate is not None:
            on_candidate(_values(strategies, idx))
        if has_hard and not check_hard(game, _values(strategies, idx)):
            continue
        stable = True
        for i in range(n):
            stats.deviation_calls += 1
            if not eng.is_best_idx(idx, i):
                stable = False
                break
        if stable:
            pne.append(_values(strategies, idx))
            stats.pne_found += 1
            if stop_after_first:
                break
    return SolveResult(pne=tuple(pne), stats=stats, timed_out=timed_out)


def _values(strategies, idx) -> Profile:
    out: tuple[int, ...] = ()
    for i, k in enumerate(idx):
        out += strategies[i][k]
    return out
