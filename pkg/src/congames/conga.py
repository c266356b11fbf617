"""Tree-search enumeration of pure Nash equilibria.

The search assigns players in declaration order, propagating hard constraints
at every node. Full profiles are checked for stability player by player in
reverse order; every computed best-response set is recorded in a per-player
trie keyed by the other players' strategies, so later candidates that share a
context are decided without another solver call.

A per-level countdown, initialized to the size of the deeper strategy space,
detects when every deeper context of the current branch has had its
best-response set computed. From that point on, any strategy of the current
player that appears in no recorded set can never be a best response in this
branch; the recorded tuples that fall in the unexplored zone are re-checked
and the rest of the level is skipped.

Tables of deeper players are reset whenever the search re-enters their level:
best responses recorded under one prefix can never serve another branch, so
nothing useful is lost.
"""
from __future__ import annotations

import itertools
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Sequence

from .csp import propagate
from .domains import Domain
from .enum1 import SolveResult
from .model import Game, Profile, SolveStats, Strategy, check_hard
from .responses import DEFAULT_CELL_CAP, ResponseEngine


class _FullDomain:
    """Marker leaf: the player has no preference, any strategy is acceptable."""

    def __repr__(self):
        return "FULL_DOMAIN"


FULL_DOMAIN = _FullDomain()


@dataclass
class SolveHooks:
    """Optional instrumentation callbacks; all receive value-space data."""

    on_candidate: Callable[[Profile], None] | None = None
    on_deviation: Callable[[int, tuple, tuple], None] | None = None
    on_table_hit: Callable[[int, tuple, tuple], None] | None = None
    on_backjump: Callable[[int, tuple, tuple], None] | None = None
    on_resubmit: Callable[[Profile], None] | None = None


@dataclass
class CongaOptions:
    use_tables: bool = True  # serve checks from recorded best responses
    use_counters: bool = True  # allow never-best-response backjumping
    table_cap: int | None = None  # max entries in the first player's table
    cell_cap: int = DEFAULT_CELL_CAP
    parallel: int = 1
    deadline: float | None = None
    stop_after_first: bool = False
    hooks: SolveHooks | None = None


class BestResponseTable:
    """Trie holding best-response sets, keyed per other player.

    Lookup and insertion walk exactly one level per non-owning player. With a
    capacity, the oldest entry is evicted on overflow; evictions poison the
    never-best-response certificate until the next reset, which the search
    honors by not backjumping at this level while poisoned.
    """

    def __init__(self, depth: int, cap: int | None = None):
        self.depth = depth
        self.cap = cap
        self.root: dict = {}
        self._root_leaf = None
        self.entries = 0
        self.evictions_since_reset = 0
        self._order: deque = deque()

    def reset(self) -> None:
        self.root = {}
        self._root_leaf = None
        self.entries = 0
        self.evictions_since_reset = 0
        self._order.clear()

    def search(self, context: tuple[Strategy, ...]):
        """The recorded set for this context, or None when absent."""
        if not context:
            return self._root_leaf
        node = self.root
        for key in context[:-1]:
            node = node.get(key)
            if node is None:
                return None
        return node.get(context[-1])

    def insert(self, context: tuple[Strategy, ...], responses) -> bool:
        """Record a set; returns False when the context was already present."""
        if not context:
            if self._root_leaf is not None:
                return False
            self._root_leaf = responses
            self.entries = 1
            return True
        node = self.root
        for key in context[:-1]:
            node = node.setdefault(key, {})
        if context[-1] in node:
            return False
        node[context[-1]] = responses
        self.entries += 1
        if self.cap is not None:
            self._order.append(context)
            if self.entries > self.cap:
                self._evict_oldest()
        return True

    def _evict_oldest(self) -> None:
        victim = self._order.popleft()
        path = []
        node = self.root
        for key in victim[:-1]:
            path.append((node, key))
            node = node[key]
        del node[victim[-1]]
        for parent, key in reversed(path):
            if parent[key]:
                break
            del parent[key]
        self.entries -= 1
        self.evictions_since_reset += 1

    def items(self) -> Iterator[tuple[tuple[Strategy, ...], object]]:
        """All (context, responses) pairs in trie order."""
        if self.depth == 0:
            if self._root_leaf is not None:
                yield (), self._root_leaf
            return

        def walk(prefix: tuple, node: dict, level: int):
            if level == self.depth - 1:
                for key, leaf in node.items():
                    yield prefix + (key,), leaf
                return
            for key, child in node.items():
                yield from walk(prefix + (key,), child, level + 1)

        yield from walk((), self.root, 0)


class _Timeout(Exception):
    pass


class _StopSearch(Exception):
    pass


def conga(game: Game, options: CongaOptions | None = None) -> SolveResult:
    """Enumerate all pure Nash equilibria with table-backed pruning search."""
    opts = options or CongaOptions()
    if opts.parallel > 1:
        return _conga_parallel(game, opts)
    run = _Run(game, opts)
    return run.solve()


class _Run:
    def __init__(self, game: Game, opts: CongaOptions, engine: ResponseEngine | None = None):
        self.game = game
        self.opts = opts
        self.hooks = opts.hooks or SolveHooks()
        self.engine = engine or ResponseEngine(game, cell_cap=opts.cell_cap)
        self.n = game.num_players
        self.has_hard = bool(game.hard)
        self.hard_csp = game.hard_csp() if self.has_hard else None
        self.stats = SolveStats()
        self.pne: list[Profile] = []
        self.tables = [
            BestResponseTable(self.n - 1, cap=opts.table_cap if i == 0 else None)
            for i in range(self.n)
        ]
        self.counters = [0] * self.n
        self.deep_space = []
        for i in range(self.n):
            prod = 1
            for j in range(i + 1, self.n):
                prod *= game.strategy_count(j)
            self.deep_space.append(prod)
        self.prefix: list[Strategy | None] = [None] * self.n

    def solve(self, level0_subset: Sequence[Strategy] | None = None) -> SolveResult:
        timed_out = False
        try:
            self._enum(list(self.game.domains), 0, level0_subset)
        except _Timeout:
            timed_out = True
        except _StopSearch:
            pass
        self.stats.pne_found = len(self.pne)
        return SolveResult(pne=tuple(self.pne), stats=self.stats, timed_out=timed_out)

    # -- search ---------------------------------------------------------------

    def _enum(self, doms, i: int, level0_subset=None) -> None:
        if self.has_hard:
            doms = propagate(self.hard_csp, doms)
            if doms is None:
                return
        if i == self.n:
            self._submit(tuple(itertools.chain.from_iterable(self.prefix)))
            return
        if self.has_hard:
            vars_i = self.game.players[i].vars
            strategies: Sequence[Strategy] = [
                tuple(t) for t in itertools.product(*(doms[v].values for v in vars_i))
            ]
        else:
            strategies = self.engine.strategies[i]
        if level0_subset is not None:
            chosen = set(level0_subset)
            strategies = [s for s in strategies if s in chosen]
        table = self.tables[i]
        table.reset()
        self.counters[i] = self.deep_space[i]
        deadline = self.opts.deadline
        for k, strat in enumerate(strategies):
            self.prefix[i] = strat
            if self.has_hard:
                child = list(doms)
                for v, val in zip(self.game.players[i].vars, strat):
                    child[v] = Domain.singleton(val)
            else:
                child = doms
            self._enum(child, i + 1)
            if deadline is not None and time.monotonic() > deadline:
                raise _Timeout
            if (
                self.opts.use_counters
                and self.counters[i] <= 0
                and table.evictions_since_reset == 0
            ):
                self._check_end_of_table(i, strategies[k + 1:])
                break
        self.prefix[i] = None

    def _submit(self, profile: Profile) -> None:
        self.stats.candidates += 1
        if self.hooks.on_candidate is not None:
            self.hooks.on_candidate(profile)
        if self.has_hard and not check_hard(self.game, profile):
            return
        self._check_nash(profile, self.n - 1)

    def _check_nash(self, profile: Profile, i: int) -> None:
        if i < 0:
            self.pne.append(profile)
            if self.opts.stop_after_first:
                raise _StopSearch
            return
        ctx = self._context(profile, i)
        d = self.tables[i].search(ctx) if self.opts.use_tables else None
        if d is None:
            responses = self.engine.best_responses(profile, i)
            self.stats.deviation_calls += 1
            if self.hooks.on_deviation is not None:
                self.hooks.on_deviation(i, ctx, responses)
            d = responses if responses else FULL_DOMAIN
            if self.tables[i].insert(ctx, d):
                self.counters[i] -= 1
        elif self.hooks.on_table_hit is not None:
            self.hooks.on_table_hit(i, ctx, d)
        own = self.game.player_strategy(profile, i)
        if d is FULL_DOMAIN or own in d:
            self._check_nash(profile, i - 1)

    def _check_end_of_table(self, i: int, remaining: Sequence[Strategy]) -> None:
        remaining_set = set(remaining)
        covered: set[Strategy] = set()
        submitted: set[Profile] = set()
        if remaining_set:
            for ctx, leaf in self.tables[i].items():
                values = remaining if leaf is FULL_DOMAIN else leaf
                for strat in values:
                    if strat not in remaining_set:
                        continue
                    profile = self._merge(ctx, i, strat)
                    if profile in submitted:
                        continue
                    submitted.add(profile)
                    covered.add(strat)
                    if self.hooks.on_resubmit is not None:
                        self.hooks.on_resubmit(profile)
                    self._submit(profile)
        if self.hooks.on_backjump is not None:
            skipped = tuple(sorted(remaining_set - covered))
            self.hooks.on_backjump(i, tuple(self.prefix[:i]), skipped)

    # -- tuple plumbing ---------------------------------------------------------

    def _context(self, profile: Profile, i: int) -> tuple[Strategy, ...]:
        g = self.game
        return tuple(g.player_strategy(profile, j) for j in range(self.n) if j != i)

    def _merge(self, ctx: tuple[Strategy, ...], i: int, strat: Strategy) -> Profile:
        parts = ctx[:i] + (strat,) + ctx[i:]
        return tuple(itertools.chain.from_iterable(parts))


# ---------------------------------------------------------------------------
# Parallel mode: branches under distinct first-player strategies are
# independent, so they may be solved by separate processes and their
# equilibrium sets concatenated in branch order.
# ---------------------------------------------------------------------------


def _solve_chunk(args) -> SolveResult:
    game, chunk, opts = args
    run = _Run(game, opts)
    return run.solve(level0_subset=chunk)


def _conga_parallel(game: Game, opts: CongaOptions) -> SolveResult:
    if opts.hooks is not None:
        raise ValueError("hooks are not supported in parallel mode")
    workers = opts.parallel
    first = game.strategy_space(0)
    chunk_size = max(1, (len(first) + workers - 1) // workers)
    chunks = [first[k: k + chunk_size] for k in range(0, len(first), chunk_size)]
    serial_opts = replace(opts, parallel=1)
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        results = list(pool.map(_solve_chunk, [(game, c, serial_opts) for c in chunks]))
    pne: list[Profile] = []
    stats = SolveStats()
    timed_out = False
    for r in results:
        pne.extend(r.pne)
        stats.candidates += r.stats.candidates
        stats.deviation_calls += r.stats.deviation_calls
        timed_out = timed_out or r.timed_out
    stats.pne_found = len(pne)
    return SolveResult(pne=tuple(pne), stats=stats, timed_out=timed_out)
