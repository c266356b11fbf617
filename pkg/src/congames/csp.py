"""Finite-domain satisfaction and optimization engine.

Search is depth-first with static variable order (declaration order) and
ascending value order, so every enumeration is deterministic and solutions
come out in lexicographic order. Optimization finds the optimum by
branch-and-bound, then re-enumerates every solution that attains it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .constraints import Constraint, ImplyEqVars, ReifEqConst, WeightedBoolSum, revise, scope
from .domains import Domain


@dataclass(frozen=True)
class OptGoal:
    """Optimization condition: minimize or maximize a single variable."""

    direction: str  # "min" | "max"
    var: int

    def __post_init__(self):
        if self.direction not in ("min", "max"):
            raise ValueError(f"OptGoal: unknown direction {self.direction!r}")


@dataclass(frozen=True)
class Csp:
    """A set of constraints over variables 0..len(domains)-1."""

    domains: tuple[Domain, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        n = len(self.domains)
        for c in self.constraints:
            for v in scope(c):
                if not 0 <= v < n:
                    raise ValueError(f"constraint {c!r} references unknown variable {v}")
        for c in self.constraints:
            flags: tuple[int, ...] = ()
            if isinstance(c, ReifEqConst):
                flags = (c.flag,)
            elif isinstance(c, ImplyEqVars):
                flags = (c.flag,)
            elif isinstance(c, WeightedBoolSum):
                flags = c.vars
            for f in flags:
                d = self.domains[f]
                if any(v not in (0, 1) for v in d.values):
                    raise ValueError(f"variable {f} is used as a boolean but has domain {d}")

    @property
    def num_vars(self) -> int:
        return len(self.domains)


def propagate(csp: Csp, doms: Sequence[Domain] | None = None) -> list[Domain] | None:
    """Run all filtering rules to a fixpoint.

    Returns the narrowed domains, or None if some domain wiped out. The
    input domains are never mutated.
    """
    work = list(doms if doms is not None else csp.domains)
    for d in work:
        if d.is_empty:
            return None
    if not csp.constraints:
        return work

    watchers: dict[int, list[int]] = {}
    for ci, c in enumerate(csp.constraints):
        for v in scope(c):
            watchers.setdefault(v, []).append(ci)

    queue = deque(range(len(csp.constraints)))
    queued = [True] * len(csp.constraints)
    while queue:
        ci = queue.popleft()
        queued[ci] = False
        changed = revise(csp.constraints[ci], work)
        if changed is None:
            return None
        for v in changed:
            for cj in watchers.get(v, ()):
                if not queued[cj]:
                    queued[cj] = True
                    queue.append(cj)
    return work


def solve_all(csp: Csp, doms: Sequence[Domain] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every total assignment satisfying the CSP, in lexicographic order.

    Variables not mentioned by any constraint range freely over their
    domains, so the stream is the full relational join extended cylindrically.
    """
    start = list(doms if doms is not None else csp.domains)
    yield from _dfs(csp, start)


def _dfs(csp: Csp, doms: list[Domain]) -> Iterator[tuple[int, ...]]:
    narrowed = propagate(csp, doms)
    if narrowed is None:
        return
    branch_var = -1
    for v, d in enumerate(narrowed):
        if len(d) > 1:
            branch_var = v
            break
    if branch_var < 0:
        yield tuple(d.values[0] for d in narrowed)
        return
    for value in narrowed[branch_var].values:
        child = list(narrowed)
        child[branch_var] = Domain.singleton(value)
        yield from _dfs(csp, child)


def is_satisfiable(csp: Csp, doms: Sequence[Domain] | None = None) -> bool:
    return next(solve_all(csp, doms), None) is not None


def optimal_value(csp: Csp, goal: OptGoal, doms: Sequence[Domain] | None = None) -> int | None:
    """Best attainable value of the objective, or None if unsatisfiable."""
    start = list(doms if doms is not None else csp.domains)
    minimize = goal.direction == "min"
    best: int | None = None

    def bound(ds: list[Domain]) -> list[Domain] | None:
        if best is None:
            return ds
        d = ds[goal.var]
        nd = d.keep_le(best - 1) if minimize else d.keep_ge(best + 1)
        if nd.is_empty:
            return None
        ds = list(ds)
        ds[goal.var] = nd
        return ds

    def search(ds: list[Domain]) -> None:
        nonlocal best
        ds2 = bound(ds)
        if ds2 is None:
            return
        narrowed = propagate(csp, ds2)
        if narrowed is None:
            return
        branch_var = -1
        for v, d in enumerate(narrowed):
            if len(d) > 1:
                branch_var = v
                break
        if branch_var < 0:
            best = narrowed[goal.var].values[0]
            return
        values = narrowed[branch_var].values
        if branch_var == goal.var and not minimize:
            values = tuple(reversed(values))
        for value in values:
            child = list(narrowed)
            child[branch_var] = Domain.singleton(value)
            search(child)

    search(start)
    return best


def solve_optimal_all(
    csp: Csp, goal: OptGoal, doms: Sequence[Domain] | None = None
) -> Iterator[tuple[int, ...]]:
    """Yield every solution whose objective attains the optimum."""
    start = list(doms if doms is not None else csp.domains)
    best = optimal_value(csp, goal, start)
    if best is None:
        return
    fixed = list(start)
    fixed[goal.var] = Domain.singleton(best)
    yield from solve_all(csp, fixed)
