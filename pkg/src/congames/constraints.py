"""Constraint vocabulary: data types, direct evaluation, and domain filtering.

The filtering strength is deliberately modest and fixed per kind:

* ``Linear`` / ``WeightedBoolSum`` / ``AbsOffset`` / ``MinOf``: bounds
  consistency.
* ``AllDifferent``: arc consistency on the pairwise decomposition (a value is
  removed only once some other variable in the scope is fixed to it).
* ``Table`` / ``ReifEqConst`` / ``ImplyEqVars``: generalized arc consistency.

Every rule is sound (never removes a value that appears in a solution) and
rejects any fully assigned scope that violates the constraint, which is all
the search layer needs for completeness.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .domains import Domain

EQ = "="
LE = "<="
GE = ">="
RELATIONS = (EQ, LE, GE)


@dataclass(frozen=True)
class Linear:
    """sum(coefs[k] * vars[k]) <relation> const."""

    vars: tuple[int, ...]
    coefs: tuple[int, ...]
    rel: str
    const: int

    def __post_init__(self):
        if len(self.vars) != len(self.coefs):
            raise ValueError("Linear: vars and coefs must have equal length")
        if self.rel not in RELATIONS:
            raise ValueError(f"Linear: unknown relation {self.rel!r}")
        if any(c == 0 for c in self.coefs):
            raise ValueError("Linear: zero coefficients are not allowed")


@dataclass(frozen=True)
class WeightedBoolSum:
    """sum(weights[k] * vars[k]) <relation> const over 0/1 variables."""

    vars: tuple[int, ...]
    weights: tuple[int, ...]
    rel: str
    const: int

    def __post_init__(self):
        if len(self.vars) != len(self.weights):
            raise ValueError("WeightedBoolSum: vars and weights must match")
        if self.rel not in RELATIONS:
            raise ValueError(f"WeightedBoolSum: unknown relation {self.rel!r}")


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("AllDifferent: repeated variable in scope")


@dataclass(frozen=True)
class AbsOffset:
    """result = |arg - center| + offset, with constant center and offset."""

    result: int
    arg: int
    center: int
    offset: int

    def __post_init__(self):
        if self.result == self.arg:
            raise ValueError("AbsOffset: result and arg must differ")


@dataclass(frozen=True)
class MinOf:
    """result = min(args)."""

    result: int
    args: tuple[int, ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("MinOf: needs at least one argument")
        if self.result in self.args:
            raise ValueError("MinOf: result cannot be one of the arguments")


@dataclass(frozen=True)
class ReifEqConst:
    """flag = 1 <-> var = value, flag being a 0/1 variable."""

    flag: int
    var: int
    value: int

    def __post_init__(self):
        if self.flag == self.var:
            raise ValueError("ReifEqConst: flag and var must differ")


@dataclass(frozen=True)
class ImplyEqVars:
    """flag = 1 -> left = right (one-sided implication)."""

    flag: int
    left: int
    right: int

    def __post_init__(self):
        if self.flag in (self.left, self.right):
            raise ValueError("ImplyEqVars: flag must differ from operands")


@dataclass(frozen=True)
class Table:
    """Explicit list of allowed tuples over the scope."""

    vars: tuple[int, ...]
    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("Table: repeated variable in scope")
        for t in self.tuples:
            if len(t) != len(self.vars):
                raise ValueError("Table: tuple arity does not match scope")


Constraint = Union[
    Linear,
    WeightedBoolSum,
    AllDifferent,
    AbsOffset,
    MinOf,
    ReifEqConst,
    ImplyEqVars,
    Table,
]


def scope(c: Constraint) -> tuple[int, ...]:
    if isinstance(c, (Linear, WeightedBoolSum, AllDifferent, Table)):
        return c.vars
    if isinstance(c, AbsOffset):
        return (c.result, c.arg)
    if isinstance(c, MinOf):
        return (c.result,) + c.args
    if isinstance(c, ReifEqConst):
        return (c.flag, c.var)
    if isinstance(c, ImplyEqVars):
        return (c.flag, c.left, c.right)
    raise TypeError(f"not a constraint: {c!r}")


def evaluate(c: Constraint, values: Sequence[int]) -> bool:
    """Truth of ``c`` under a full assignment (``values[var_id]``).

    Used by brute-force oracles and validators; the solver itself relies on
    the filtering rules below.
    """
    if isinstance(c, Linear):
        total = sum(a * values[v] for a, v in zip(c.coefs, c.vars))
        return _rel_holds(total, c.rel, c.const)
    if isinstance(c, WeightedBoolSum):
        total = sum(w * values[v] for w, v in zip(c.weights, c.vars))
        return _rel_holds(total, c.rel, c.const)
    if isinstance(c, AllDifferent):
        seen = [values[v] for v in c.vars]
        return len(set(seen)) == len(seen)
    if isinstance(c, AbsOffset):
        return values[c.result] == abs(values[c.arg] - c.center) + c.offset
    if isinstance(c, MinOf):
        return values[c.result] == min(values[v] for v in c.args)
    if isinstance(c, ReifEqConst):
        return (values[c.flag] == 1) == (values[c.var] == c.value)
    if isinstance(c, ImplyEqVars):
        return values[c.flag] != 1 or values[c.left] == values[c.right]
    if isinstance(c, Table):
        return tuple(values[v] for v in c.vars) in set(c.tuples)
    raise TypeError(f"not a constraint: {c!r}")


def _rel_holds(lhs: int, rel: str, rhs: int) -> bool:
    if rel == EQ:
        return lhs == rhs
    if rel == LE:
        return lhs <= rhs
    return lhs >= rhs


# ---------------------------------------------------------------------------
# Filtering rules. Each revise function narrows ``doms`` in place and returns
# the list of changed variable ids, or None on wipeout.
# ---------------------------------------------------------------------------


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _revise_linear_terms(vars_, coefs, rel, const, doms):
    changed = []
    if rel in (EQ, LE):
        if _linear_le_pass(vars_, coefs, const, doms, changed) is None:
            return None
    if rel in (EQ, GE):
        neg = [-a for a in coefs]
        if _linear_le_pass(vars_, neg, -const, doms, changed) is None:
            return None
    return changed


def _linear_le_pass(vars_, coefs, const, doms, changed):
    # enforce sum(a_k x_k) <= const by trimming each variable against the
    # minimal contribution of the others
    lows = []
    total_low = 0
    for a, v in zip(coefs, vars_):
        d = doms[v]
        low = a * d.min if a > 0 else a * d.max
        lows.append(low)
        total_low += low
    for a, v, low in zip(coefs, vars_, lows):
        budget = const - (total_low - low)
        d = doms[v]
        if a > 0:
            nd = d.keep_le(budget // a)
        else:
            nd = d.keep_ge(_ceil_div(budget, a))
        if nd is not d:
            if nd.is_empty:
                return None
            doms[v] = nd
            changed.append(v)
            new_low = a * nd.min if a > 0 else a * nd.max
            total_low += new_low - low
    return changed


def _revise_linear(c: Linear, doms):
    return _revise_linear_terms(c.vars, c.coefs, c.rel, c.const, doms)


def _revise_boolsum(c: WeightedBoolSum, doms):
    return _revise_linear_terms(c.vars, c.weights, c.rel, c.const, doms)


def _revise_alldiff(c: AllDifferent, doms):
    changed = []
    fixed = [(v, doms[v].values[0]) for v in c.vars if len(doms[v]) == 1]
    seen = set()
    for _, val in fixed:
        if val in seen:
            return None
        seen.add(val)
    for v in c.vars:
        d = doms[v]
        if len(d) == 1:
            continue
        for _, val in fixed:
            nd = d.without(val)
            if nd is not d:
                if nd.is_empty:
                    return None
                d = nd
        if d is not doms[v]:
            doms[v] = d
            changed.append(v)
    return changed


def _revise_absoffset(c: AbsOffset, doms):
    changed = []
    dr, da = doms[c.result], doms[c.arg]
    # bounds of |arg - center| from the interval view of arg
    if da.min <= c.center <= da.max:
        lo_abs = 0
    else:
        lo_abs = min(abs(da.min - c.center), abs(da.max - c.center))
    hi_abs = max(abs(da.min - c.center), abs(da.max - c.center))
    nr = dr.keep_between(lo_abs + c.offset, hi_abs + c.offset)
    if nr is not dr:
        if nr.is_empty:
            return None
        doms[c.result] = nr
        changed.append(c.result)
        dr = nr
    reach = dr.max - c.offset
    if reach < 0:
        return None
    na = da.keep_between(c.center - reach, c.center + reach)
    if na is not da:
        if na.is_empty:
            return None
        doms[c.arg] = na
        changed.append(c.arg)
    return changed


def _revise_minof(c: MinOf, doms):
    changed = []
    dr = doms[c.result]
    lo = min(doms[v].min for v in c.args)
    hi = min(doms[v].max for v in c.args)
    nr = dr.keep_between(lo, hi)
    if nr is not dr:
        if nr.is_empty:
            return None
        doms[c.result] = nr
        changed.append(c.result)
        dr = nr
    # every argument is >= the minimum
    for v in c.args:
        d = doms[v]
        nd = d.keep_ge(dr.min)
        if nd is not d:
            if nd.is_empty:
                return None
            doms[v] = nd
            changed.append(v)
    # some argument must realize a value <= result's upper bound
    witnesses = [v for v in c.args if doms[v].min <= dr.max]
    if not witnesses:
        return None
    if len(witnesses) == 1:
        v = witnesses[0]
        d = doms[v]
        nd = d.keep_le(dr.max)
        if nd is not d:
            if nd.is_empty:
                return None
            doms[v] = nd
            changed.append(v)
    return changed


def _revise_reif(c: ReifEqConst, doms):
    changed = []
    df, dv = doms[c.flag], doms[c.var]
    can_eq = c.value in dv
    can_ne = not (len(dv) == 1 and can_eq)
    nf = df
    if not can_eq:
        nf = nf.without(1)
    if not can_ne:
        nf = nf.without(0)
    if nf is not df:
        if nf.is_empty:
            return None
        doms[c.flag] = nf
        changed.append(c.flag)
        df = nf
    if df.fixed_value == 1:
        nv = dv.keep_between(c.value, c.value)
        if nv is not dv:
            if nv.is_empty:
                return None
            doms[c.var] = nv
            changed.append(c.var)
    elif df.fixed_value == 0:
        nv = dv.without(c.value)
        if nv is not dv:
            if nv.is_empty:
                return None
            doms[c.var] = nv
            changed.append(c.var)
    return changed


def _revise_imply(c: ImplyEqVars, doms):
    changed = []
    df = doms[c.flag]
    if 1 not in df:
        return changed
    dl, dr = doms[c.left], doms[c.right]
    if df.fixed_value == 1:
        common = set(dl.values) & set(dr.values)
        if not common:
            return None
        nl = dl.intersect(common)
        if nl is not dl:
            doms[c.left] = nl
            changed.append(c.left)
        nr = dr.intersect(common)
        if nr is not dr:
            doms[c.right] = nr
            changed.append(c.right)
        return changed
    if dl.max < dr.min or dr.max < dl.min or not (set(dl.values) & set(dr.values)):
        nf = df.without(1)
        if nf.is_empty:
            return None
        doms[c.flag] = nf
        changed.append(c.flag)
    return changed


def _revise_table(c: Table, doms):
    changed = []
    supported: list[set[int]] = [set() for _ in c.vars]
    any_tuple = False
    for t in c.tuples:
        ok = True
        for val, v in zip(t, c.vars):
            if val not in doms[v]:
                ok = False
                break
        if ok:
            any_tuple = True
            for k, val in enumerate(t):
                supported[k].add(val)
    if not any_tuple:
        return None
    for k, v in enumerate(c.vars):
        d = doms[v]
        nd = d.intersect(supported[k])
        if nd is not d:
            if nd.is_empty:
                return None
            doms[v] = nd
            changed.append(v)
    return changed


_REVISORS = {
    Linear: _revise_linear,
    WeightedBoolSum: _revise_boolsum,
    AllDifferent: _revise_alldiff,
    AbsOffset: _revise_absoffset,
    MinOf: _revise_minof,
    ReifEqConst: _revise_reif,
    ImplyEqVars: _revise_imply,
    Table: _revise_table,
}


def revise(c: Constraint, doms: list[Domain]):
    """Narrow ``doms`` in place; return changed var ids or None on wipeout."""
    return _REVISORS[type(c)](c, doms)
