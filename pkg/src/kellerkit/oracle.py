"""Exhaustive backtracking search over solutions of small systems.

This is deliberately naive and shares nothing with :mod:`kellerkit.solver`
beyond the data types, so it can serve as ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import SetSystem, SolutionMatrix, validate_system

__all__ = [
    "SearchBudget",
    "BudgetExceeded",
    "SearchResult",
    "enumerate_solutions",
    "exists_solution",
    "extendable",
]


class BudgetExceeded(Exception):
    """The node budget ran out before the search could decide."""


@dataclass(frozen=True)
class SearchBudget:
    max_solutions: int = 10**6
    max_nodes: int = 10**7

    def __post_init__(self):
        if self.max_solutions <= 0 or self.max_nodes <= 0:
            raise ValueError("search budget limits must be positive")


@dataclass(frozen=True)
class SearchResult:
    solutions: tuple[SolutionMatrix, ...]
    exhausted: bool
    nodes: int
    # "complete", "solutions" or "nodes"
    stopped_by: str = "complete"


def _precheck(system: SetSystem) -> None:
    report = validate_system(system)
    if not report.ok:
        raise ValueError(f"precondition failed: undersized cells {list(report.violations)}")


def _search(system: SetSystem, budget: SearchBudget, fixed: Optional[Sequence[int]] = None):
    """Depth-first over cells in column-major order.

    Yields solutions as tuples of rows; raises BudgetExceeded when the
    node budget is spent.  Returns the node count via StopIteration value.
    """
    n, k = system.n, system.k
    cells = [(j, i) for j in range(k) for i in range(n)]
    grid = [[None] * k for _ in range(n)]
    used = [set() for _ in range(n)]
    # prefix[i][j]: frozenset of row i values up to column j
    prefix = [[None] * k for _ in range(n)]
    nodes = 0

    def rec(c):
        nonlocal nodes
        if c == len(cells):
            yield tuple(tuple(r) for r in grid)
            return
        j, i = cells[c]
        s = system.rows[i][j]
        if j == 0 and fixed is not None:
            candidates = [fixed[i]] if fixed[i] in s else []
        else:
            candidates = sorted(s)
        fresh = len(s - used[i])
        for x in candidates:
            nodes += 1
            if nodes > budget.max_nodes:
                raise BudgetExceeded(f"node budget {budget.max_nodes} exceeded")
            repeat = x in used[i]
            if repeat and fresh >= 2:
                continue
            here = (prefix[i][j - 1] if j else frozenset()) | {x}
            if any(prefix[i2][j] == here for i2 in range(i)):
                continue
            grid[i][j] = x
            prefix[i][j] = here
            if not repeat:
                used[i].add(x)
            yield from rec(c + 1)
            if not repeat:
                used[i].discard(x)
            grid[i][j] = None
            prefix[i][j] = None

    yield from rec(0)
    return nodes


def _run(system, budget, fixed=None, stop_after=None) -> SearchResult:
    found = []
    limit = budget.max_solutions if stop_after is None else min(stop_after, budget.max_solutions)
    gen = _search(system, budget, fixed)
    nodes = 0
    while True:
        try:
            rows = next(gen)
        except StopIteration as done:
            nodes = done.value or 0
            return SearchResult(tuple(found), True, nodes)
        except BudgetExceeded:
            return SearchResult(tuple(found), False, budget.max_nodes, "nodes")
        found.append(SolutionMatrix(rows, "oracle"))
        if len(found) >= limit:
            # a cap hit counts as exhausted only if nothing is left
            try:
                next(gen)
            except StopIteration:
                return SearchResult(tuple(found), True, nodes)
            except BudgetExceeded:
                pass
            return SearchResult(tuple(found), False, nodes, "solutions")


def enumerate_solutions(system: SetSystem, budget: SearchBudget = SearchBudget()) -> SearchResult:
    """All solutions (up to the budget), in lexicographic column-major order."""
    _precheck(system)
    return _run(system, budget)


def exists_solution(system: SetSystem, budget: SearchBudget = SearchBudget()) -> bool:
    _precheck(system)
    res = _run(system, budget, stop_after=1)
    if res.solutions:
        return True
    if res.stopped_by == "nodes":
        raise BudgetExceeded("indeterminate: node budget exceeded")
    return False


def extendable(system: SetSystem, p: Sequence[int], budget: SearchBudget = SearchBudget()) -> bool:
    """Whether some solution has first column exactly ``p``."""
    _precheck(system)
    p = tuple(p)
    if len(p) != system.n or len(set(p)) != len(p):
        raise ValueError("first column must list one distinct value per row")
    if system.k == 0 or any(x not in row[0] for x, row in zip(p, system.rows)):
        raise ValueError("first column is not a representative of column 1")
    res = _run(system, budget, fixed=p, stop_after=1)
    if res.solutions:
        return True
    if res.stopped_by == "nodes":
        raise BudgetExceeded("indeterminate: node budget exceeded")
    return False
