"""Brute-force reference implementations shared by the test suite.

These deliberately avoid the library's propagation and search code paths:
solutions are found by filtering the full cross product through direct
constraint evaluation.
"""
from __future__ import annotations

from itertools import product

from congames.constraints import evaluate
from congames.csp import Csp, OptGoal


def brute_solutions(csp: Csp, doms=None) -> list[tuple[int, ...]]:
    doms = list(doms if doms is not None else csp.domains)
    out = []
    for assignment in product(*(d.values for d in doms)):
        if all(evaluate(c, assignment) for c in csp.constraints):
            out.append(assignment)
    return out


def brute_optimal(csp: Csp, goal: OptGoal, doms=None) -> list[tuple[int, ...]]:
    sols = brute_solutions(csp, doms)
    if not sols:
        return []
    values = [s[goal.var] for s in sols]
    best = min(values) if goal.direction == "min" else max(values)
    return [s for s in sols if s[goal.var] == best]


def brute_supported_values(csp: Csp, doms=None) -> list[set[int]]:
    """Per-variable sets of values appearing in at least one solution."""
    doms = list(doms if doms is not None else csp.domains)
    supported: list[set[int]] = [set() for _ in doms]
    for s in brute_solutions(csp, doms):
        for v, val in enumerate(s):
            supported[v].add(val)
    return supported
