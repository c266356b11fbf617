"""Best-response computation shared by the solvers.

Two routes live here behind one interface:

* a generic route that answers each query with a fresh finite-domain solve
  (``model.best_responses``), always available;
* a precompiled route that evaluates a player's goal over the whole profile
  grid with numpy, when the goal's existential variables are functionally
  determined by its constraints and the grid fits in a configurable cell cap.

Both routes implement the same semantics; the test suite cross-checks them.
The normal-form oracle intentionally does not use this module, so solver
results and oracle results never share a payoff computation path.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import model
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
    scope,
)
from .domains import Domain
from .model import Game, Profile, Strategy

DEFAULT_CELL_CAP = 4_000_000
_LUT_SPAN_CAP = 4_000_000
_INT_MIN = np.iinfo(np.int64).min


@dataclass
class _CompiledPayoffs:
    """Per-player dense payoff view with own-strategy axis last."""

    payoff: np.ndarray  # int64, shape (other sizes..., own size), max-oriented
    sat: np.ndarray  # bool, same shape
    ctx_best: np.ndarray  # int64 over context axes, INT_MIN where nothing sat
    ctx_any: np.ndarray  # bool over context axes
    best_mask: np.ndarray  # bool, original axis order: own strategy is a best response


class ResponseEngine:
    """Answers best-response queries for one game.

    ``compile_tensors=False`` forces the generic route everywhere; it is the
    default for one-off queries and for tests that pit the two routes against
    each other.
    """

    def __init__(self, game: Game, compile_tensors: bool = True, cell_cap: int = DEFAULT_CELL_CAP):
        self.game = game
        self.strategies: list[list[Strategy]] = [
            game.strategy_space(i) for i in range(game.num_players)
        ]
        self.sizes = tuple(len(s) for s in self.strategies)
        self.index_of: list[dict[Strategy, int]] = [
            {s: k for k, s in enumerate(strats)} for strats in self.strategies
        ]
        self.compiled: list[_CompiledPayoffs | None] = [None] * game.num_players
        total = 1
        for s in self.sizes:
            total *= s
        if compile_tensors and 0 < total <= cell_cap:
            for i in range(game.num_players):
                self.compiled[i] = _compile_player(game, i, self.strategies, self.sizes)

    # -- index-space API (hot paths) -----------------------------------------

    def profile_indices(self, profile: Profile) -> tuple[int, ...]:
        g = self.game
        return tuple(
            self.index_of[i][g.player_strategy(profile, i)] for i in range(g.num_players)
        )

    def is_best_idx(self, idx: tuple[int, ...], i: int) -> bool:
        cp = self.compiled[i]
        if cp is None:
            return self._generic_is_best(idx, i)
        return bool(cp.best_mask[idx])

    def responses_idx(self, idx: tuple[int, ...], i: int) -> tuple[int, ...]:
        """Indices of player i's best responses against idx's context."""
        cp = self.compiled[i]
        if cp is None:
            resp = self._generic_responses(idx, i)
            return tuple(self.index_of[i][s] for s in resp)
        ctx = idx[:i] + idx[i + 1:]
        if not cp.ctx_any[ctx]:
            return ()
        pay = cp.payoff[ctx]
        sat = cp.sat[ctx]
        best = cp.ctx_best[ctx]
        return tuple(int(k) for k in np.flatnonzero(sat & (pay == best)))

    # -- value-space API ------------------------------------------------------

    def is_best(self, profile: Profile, i: int) -> bool:
        return self.is_best_idx(self.profile_indices(profile), i)

    def best_responses(self, profile: Profile, i: int) -> tuple[Strategy, ...]:
        ks = self.responses_idx(self.profile_indices(profile), i)
        strats = self.strategies[i]
        return tuple(strats[k] for k in ks)

    # -- generic route ---------------------------------------------------------

    def _profile_from_idx(self, idx: tuple[int, ...]) -> Profile:
        out: tuple[int, ...] = ()
        for i, k in enumerate(idx):
            out += self.strategies[i][k]
        return out

    def _generic_responses(self, idx: tuple[int, ...], i: int) -> tuple[Strategy, ...]:
        return model.best_responses(self.game, self._profile_from_idx(idx), i)

    def _generic_is_best(self, idx: tuple[int, ...], i: int) -> bool:
        d = self._generic_responses(idx, i)
        if not d:
            return True
        own = self.strategies[i][idx[i]]
        return own in d


# ---------------------------------------------------------------------------
# Goal compilation: functional elimination of existential variables, then
# vectorized evaluation over the full profile grid.
# ---------------------------------------------------------------------------


def _compile_player(
    game: Game, i: int, strategies: list[list[Strategy]], sizes: tuple[int, ...]
) -> _CompiledPayoffs | None:
    total = 1
    for s in sizes:
        total *= s
    columns = _controlled_columns(game, strategies, sizes, total)
    sat = np.ones(total, dtype=bool)

    pending = list(game.goals[i])
    progressed = True
    while pending and progressed:
        progressed = False
        for c in list(pending):
            unknown = [v for v in scope(c) if v not in columns]
            if not unknown:
                if not _apply_check(c, columns, sat, game):
                    return None
                pending.remove(c)
                progressed = True
            elif len(unknown) == 1:
                if _apply_define(c, unknown[0], columns, sat, game):
                    pending.remove(c)
                    progressed = True
    if pending:
        return None  # some existential stays undetermined: generic route only

    opt = game.opts[i]
    if opt is None:
        payoff = sat.astype(np.int64)
    else:
        col = columns.get(opt.var)
        if col is None:
            # objective untouched by the goal: the best witness is a domain bound
            d = game.domains[opt.var]
            v = d.min if opt.direction == "min" else d.max
            col = np.full(total, v, dtype=np.int64)
        payoff = col if opt.direction == "max" else -col
        payoff = np.ascontiguousarray(payoff, dtype=np.int64)

    payoff_nd = payoff.reshape(sizes)
    sat_nd = sat.reshape(sizes)
    pay_i = np.ascontiguousarray(np.moveaxis(payoff_nd, i, -1))
    sat_i = np.ascontiguousarray(np.moveaxis(sat_nd, i, -1))
    masked = np.where(sat_i, pay_i, _INT_MIN)
    ctx_best = masked.max(axis=-1)
    ctx_any = sat_i.any(axis=-1)
    best_mask_i = (masked == ctx_best[..., None]) | ~ctx_any[..., None]
    best_mask = np.ascontiguousarray(np.moveaxis(best_mask_i, -1, i))
    return _CompiledPayoffs(pay_i, sat_i, ctx_best, ctx_any, best_mask)


def _controlled_columns(
    game: Game, strategies: list[list[Strategy]], sizes: tuple[int, ...], total: int
) -> dict[int, np.ndarray]:
    columns: dict[int, np.ndarray] = {}
    outer = 1
    for p, player in enumerate(game.players):
        inner = total // (outer * sizes[p])
        for k, v in enumerate(player.vars):
            vals = np.fromiter((s[k] for s in strategies[p]), dtype=np.int64, count=sizes[p])
            columns[v] = np.tile(np.repeat(vals, inner), outer)
        outer *= sizes[p]
    return columns


def _domain_mask(col: np.ndarray, d: Domain) -> np.ndarray:
    lo, hi = d.min, d.max
    ok = (col >= lo) & (col <= hi)
    if len(d) != hi - lo + 1:
        member = np.zeros(hi - lo + 1, dtype=bool)
        member[np.fromiter(d.values, dtype=np.int64) - lo] = True
        ok &= member[np.clip(col - lo, 0, hi - lo)]
    return ok


def _apply_define(c: Constraint, var: int, columns, sat, game: Game) -> bool:
    """Try to compute ``var``'s column from ``c``; True on success."""
    col: np.ndarray | None = None
    if isinstance(c, (Linear, WeightedBoolSum)):
        coefs = c.coefs if isinstance(c, Linear) else c.weights
        if c.rel != "=":
            return False
        a = None
        rest = None
        for coef, v in zip(coefs, c.vars):
            if v == var:
                a = coef
                continue
            term = coef * columns[v]
            rest = term if rest is None else rest + term
        total = c.const - rest if rest is not None else np.full(sat.shape, c.const, dtype=np.int64)
        if a is None:
            return False
        if a in (1, -1):
            col = total * a
        else:
            quot, rem = np.divmod(total, a)
            sat &= rem == 0
            col = quot
    elif isinstance(c, AbsOffset) and var == c.result:
        col = np.abs(columns[c.arg] - c.center) + c.offset
    elif isinstance(c, MinOf) and var == c.result:
        col = columns[c.args[0]]
        for v in c.args[1:]:
            col = np.minimum(col, columns[v])
    elif isinstance(c, ReifEqConst) and var == c.flag:
        col = (columns[c.var] == c.value).astype(np.int64)
    elif isinstance(c, Table):
        pos = c.vars.index(var)
        mapped = _table_lookup(c, pos, columns, game)
        if mapped is None:
            return False
        col, valid = mapped
        sat &= valid
    if col is None:
        return False
    col = col.astype(np.int64, copy=False)
    sat &= _domain_mask(col, game.domains[var])
    columns[var] = col
    return True


def _table_lookup(c: Table, out_pos: int, columns, game: Game):
    """LUT for a functional table column; None when not compilable."""
    in_vars = [v for k, v in enumerate(c.vars) if k != out_pos]
    spans = []
    mins = []
    for v in in_vars:
        d = game.domains[v]
        spans.append(d.max - d.min + 1)
        mins.append(d.min)
    size = 1
    for s in spans:
        size *= s
        if size > _LUT_SPAN_CAP:
            return None
    out_dom = game.domains[c.vars[out_pos]]
    lut_val = np.zeros(size, dtype=np.int64)
    lut_ok = np.zeros(size, dtype=bool)
    seen: dict[int, int] = {}
    for t in c.tuples:
        ins = [t[k] for k in range(len(t)) if k != out_pos]
        out = t[out_pos]
        key = 0
        in_range = True
        for val, lo, span in zip(ins, mins, spans):
            off = val - lo
            if not 0 <= off < span:
                in_range = False
                break
            key = key * span + off
        if not in_range or out not in out_dom:
            continue
        if key in seen:
            if seen[key] != out:
                return None  # not a function of the inputs
            continue
        seen[key] = out
        lut_val[key] = out
        lut_ok[key] = True
    key_col, oob = _key_column(in_vars, mins, spans, columns)
    return lut_val[key_col], lut_ok[key_col] & ~oob


def _key_column(in_vars, mins, spans, columns):
    key = None
    oob = None
    for v, lo, span in zip(in_vars, mins, spans):
        off = columns[v] - lo
        bad = (off < 0) | (off >= span)
        off = np.clip(off, 0, span - 1)
        key = off if key is None else key * span + off
        oob = bad if oob is None else oob | bad
    return key, oob


def _apply_check(c: Constraint, columns, sat, game: Game) -> bool:
    """AND the truth of ``c`` into ``sat``; False when not vectorizable."""
    if isinstance(c, (Linear, WeightedBoolSum)):
        coefs = c.coefs if isinstance(c, Linear) else c.weights
        total = None
        for coef, v in zip(coefs, c.vars):
            term = coef * columns[v]
            total = term if total is None else total + term
        if c.rel == "=":
            sat &= total == c.const
        elif c.rel == "<=":
            sat &= total <= c.const
        else:
            sat &= total >= c.const
        return True
    if isinstance(c, AllDifferent):
        for a, b in itertools.combinations(c.vars, 2):
            sat &= columns[a] != columns[b]
        return True
    if isinstance(c, AbsOffset):
        sat &= columns[c.result] == np.abs(columns[c.arg] - c.center) + c.offset
        return True
    if isinstance(c, MinOf):
        m = columns[c.args[0]]
        for v in c.args[1:]:
            m = np.minimum(m, columns[v])
        sat &= columns[c.result] == m
        return True
    if isinstance(c, ReifEqConst):
        sat &= (columns[c.flag] == 1) == (columns[c.var] == c.value)
        return True
    if isinstance(c, ImplyEqVars):
        sat &= (columns[c.flag] != 1) | (columns[c.left] == columns[c.right])
        return True
    if isinstance(c, Table):
        in_vars = list(c.vars)
        spans = []
        mins = []
        size = 1
        for v in in_vars:
            d = game.domains[v]
            spans.append(d.max - d.min + 1)
            mins.append(d.min)
            size *= spans[-1]
            if size > _LUT_SPAN_CAP:
                return False
        lut_ok = np.zeros(size, dtype=bool)
        for t in c.tuples:
            key = 0
            in_range = True
            for val, lo, span in zip(t, mins, spans):
                off = val - lo
                if not 0 <= off < span:
                    in_range = False
                    break
                key = key * span + off
            if in_range:
                lut_ok[key] = True
        key_col, oob = _key_column(in_vars, mins, spans, columns)
        sat &= lut_ok[key_col] & ~oob
        return True
    return False
