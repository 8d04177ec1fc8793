"""Constructive solver for (n, k)-systems.

The algorithm works by induction on the number of rows.  For an
(N, k)-system with a distinct first column ``p``:

1. normalise, so every row's columns 2..k together cover the alphabet;
2. pick the pivot pair of rows: the first-column value ``a`` that can be
   repeated earliest in another row, and order the remaining rows by the
   column ``d_i`` where ``a`` first becomes available to them;
3. strip the last row, remove ``a`` on/after each row's diagonal and ``b``
   (the last row's first value) before it, drop the diagonal cells, and
   solve the resulting (N-1, k-1)-system recursively;
4. put ``a`` back on the diagonal;
5. build the last row so it starts with ``b``, never uses ``a``, and
   avoids one carefully chosen value until its own diagonal.

Column numbers in :class:`PivotPlan` and :class:`LastRowPlan` are 1-based
(``d[0] == 1`` for the pivot row), matching how the construction is usually
written down.  Everything else uses 0-based Python indexing.

All free choices resolve to the smallest element id and all ties between
rows are broken lexicographically, so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .core import (
    SetSystem,
    SolutionMatrix,
    is_regular,
    is_representative,
    validate_system,
    verify_solution,
)

__all__ = [
    "SolverError",
    "CertificationError",
    "PivotPlan",
    "LastRowPlan",
    "normalize",
    "greedy_first_column",
    "check_first_column",
    "choose_pivot",
    "reduce",
    "build_first_column",
    "insert_diagonal",
    "ordering_last",
    "choose_zt",
    "regular_extend",
    "fill_last_row",
    "solve",
]


class SolverError(RuntimeError):
    """An internal step of the construction failed its own bookkeeping."""


class CertificationError(SolverError):
    """The final verification rejected the solver's output."""

    def __init__(self, message, report=None, trace=None):
        super().__init__(message)
        self.report = report
        self.trace = trace or []


@dataclass(frozen=True)
class PivotPlan:
    # order[r] = row of the input system placed at position r
    order: tuple[int, ...]
    a: int
    b: int
    # q[i][j] (input row indices, None on the diagonal), 1-based column
    q: tuple[tuple[Optional[int], ...], ...]
    # d[r] for the reordered rows, 1-based column; d[0] == 1
    d: tuple[int, ...]

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.order)
        for r, i in enumerate(self.order):
            inv[i] = r
        return tuple(inv)


@dataclass(frozen=True)
class LastRowPlan:
    case: str  # "A" or "B"
    z: tuple[int, ...] = ()
    t: Optional[int] = None  # 1-based index into z
    z_prime: Optional[int] = None


def normalize(system: SetSystem) -> tuple[SetSystem, bool]:
    """Append a column equal to the whole alphabet when some row's columns
    after the first fail to cover it."""
    if system.n == 0 or system.k == 0:
        return system, False
    alphabet = system.alphabet
    for row in system.rows:
        covered = frozenset().union(*row[1:])
        if covered != alphabet:
            rows = tuple(row + (alphabet,) for row in system.rows)
            return SetSystem(rows, system.labels), True
    return system, False


def check_first_column(system: SetSystem, p: Sequence[int]) -> None:
    if len(p) != system.n:
        raise ValueError(f"first column has {len(p)} entries, system has {system.n} rows")
    if len(set(p)) != len(p):
        raise ValueError("first-column entries must be pairwise distinct")
    for i, x in enumerate(p):
        if x not in system.rows[i][0]:
            raise ValueError(f"first-column entry {x} is not in row {i}'s first set")


def greedy_first_column(system: SetSystem) -> tuple[int, ...]:
    """Row by row, the smallest first-set element not used above."""
    used: set[int] = set()
    out = []
    for row in system.rows:
        x = min(row[0] - used)
        used.add(x)
        out.append(x)
    return tuple(out)


def _earliest(x: int, row: Sequence[frozenset[int]]) -> Optional[int]:
    """Least 1-based column t >= 2 whose set contains x."""
    for t in range(1, len(row)):
        if x in row[t]:
            return t + 1
    return None


def choose_pivot(system: SetSystem, p: Sequence[int]) -> PivotPlan:
    """Select the pivot rows and the diagonal.

    ``system`` must already be normalised, otherwise some earliest-repeat
    column may be undefined and ``SolverError`` is raised.
    """
    m = system.n
    q = [[None] * m for _ in range(m)]
    best = None
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            t = _earliest(p[i], system.rows[j])
            if t is None:
                raise SolverError(
                    f"q[{i}][{j}] undefined: {p[i]} never appears after column 1 "
                    f"of row {j} (system not normalised?)")
            q[i][j] = t
            if best is None or t < best[0]:
                best = (t, i, j)
    _, i0, j0 = best
    a = p[i0]
    rest = [i0, j0] + [i for i in range(m) if i not in (i0, j0)]
    d_of = {i: _earliest(a, system.rows[i]) for i in rest[1:]}
    # stable: j0 stays first among ties since d[j0] is the global minimum
    tail = sorted(rest[1:], key=lambda i: d_of[i])
    order = (i0, *tail)
    d = (1, *(d_of[i] for i in tail))
    b = p[order[-1]]
    return PivotPlan(order, a, b, tuple(tuple(r) for r in q), d)


def reduce(system: SetSystem, plan: PivotPlan) -> SetSystem:
    """Build the (N-1, k-1)-system from the reordered (N, k)-system.

    ``system`` is the system with rows already in ``plan.order``.
    """
    m = system.n
    n = m - 1
    a, b = plan.a, plan.b
    rows = []
    for i in range(n):
        di = plan.d[i]
        new_row = []
        for t, s in enumerate(system.rows[i], start=1):
            if t == di:
                continue
            if t >= di:
                s = s - {a}
            if t <= min(di, n - 1):
                s = s - {b}
            if len(s) < n:
                raise SolverError(
                    f"reduced cell ({i}, column {t}) has {len(s)} < {n} elements")
            new_row.append(s)
        rows.append(tuple(new_row))
    return SetSystem(tuple(rows), system.labels)


def build_first_column(reduced: SetSystem, p: Sequence[int], plan: PivotPlan) -> tuple[int, ...]:
    """First column for the reduced system.

    ``p`` is the first column in the reordered row order.  Rows 2..N-1 keep
    their values; the pivot row takes the smallest element of its new first
    set avoiding ``a`` and the others.
    """
    n = reduced.n
    rest = tuple(p[1:n])
    choices = reduced.rows[0][0] - {plan.a} - set(rest)
    if not choices:
        raise SolverError("no admissible first-column value for the pivot row")
    return (min(choices), *rest)


def insert_diagonal(y: SolutionMatrix, plan: PivotPlan) -> SolutionMatrix:
    rows = []
    for i, row in enumerate(y.rows):
        pos = plan.d[i] - 1
        rows.append(row[:pos] + (plan.a,) + row[pos:])
    return SolutionMatrix(tuple(rows), y.provenance)


def ordering_last(xrow: Sequence[int], zs: Sequence[int]) -> int:
    """The last of ``zs`` by first occurrence in ``xrow``.

    Values missing from ``xrow`` count as later than every present one and
    are ordered among themselves by id.
    """
    first = {}
    for pos, x in enumerate(xrow):
        first.setdefault(x, pos)
    inf = len(xrow)
    return max(zs, key=lambda z: (first.get(z, inf), z))


def choose_zt(rows: Sequence[Sequence[int]], zs: Sequence[int]) -> int:
    """Smallest 1-based index t (into z_1..z_n, so t >= 2) such that z_t is
    not the last of ``zs`` in any of ``rows``.  ``zs`` is z_2..z_n."""
    lasts = {ordering_last(r, zs) for r in rows}
    for offset, z in enumerate(zs):
        if z not in lasts:
            return offset + 2
    raise SolverError("every candidate is last in some ordering")


def regular_extend(
    row: Sequence[frozenset[int]],
    prefix: Sequence[int],
    forbid: Optional[Mapping[int, int]] = None,
) -> tuple[int, ...]:
    """Extend ``prefix`` to a regular representative of ``row``.

    ``forbid`` maps 0-based positions to a single element that must not be
    chosen there.  At each position with unused-set ``N``: two or more
    unused elements -> smallest allowed unused one; exactly one -> take it
    unless forbidden, else repeat the smallest allowed used element; none ->
    smallest allowed element.
    """
    forbid = forbid or {}
    prefix = tuple(prefix)
    if len(prefix) > len(row):
        raise ValueError("prefix longer than the row")
    if not is_representative(prefix, row[: len(prefix)]) or not is_regular(prefix, row[: len(prefix)]):
        raise ValueError("prefix is not a regular representative")
    out = list(prefix)
    used = set(prefix)
    for j in range(len(prefix), len(row)):
        s = row[j]
        f = forbid.get(j)
        new = s - used
        if len(new) >= 2:
            x = min(new - {f})
        elif len(new) == 1 and f not in new:
            x = next(iter(new))
        else:
            allowed = (s & used) - {f} if new else s - {f}
            if not allowed:
                raise SolverError(f"position {j}: set {sorted(s)} leaves no element besides {f}")
            x = min(allowed)
        out.append(x)
        used.add(x)
    return tuple(out)


def fill_last_row(system: SetSystem, x: SolutionMatrix, plan: PivotPlan) -> tuple[tuple[int, ...], LastRowPlan]:
    """Construct the last row of the reordered system.

    ``x`` holds the first N-1 rows (already solved).  Returns the row and
    the plan describing which case applied.
    """
    m = system.n
    n = m - 1
    a, b = plan.a, plan.b
    last = system.rows[-1]
    k = len(last)
    dl = plan.d[-1]
    for j in range(1, min(dl - 1, k)):
        if a in last[j]:
            raise SolverError(f"a={a} available in the last row before its diagonal")

    if dl <= n:
        forbid = {j: a for j in range(1, k)}
        return regular_extend(last, (b,), forbid), LastRowPlan("A")

    # Case B: d_last > n, so columns 2..n of the last row cannot hold a
    z = [b]
    for j in range(1, n):
        z.append(min(last[j] - set(z)))
    if n < 2:
        forbid = {j: a for j in range(dl - 1, k)}
        return regular_extend(last, tuple(z), forbid), LastRowPlan("B", tuple(z))
    zs = z[1:]
    t = choose_zt(x.rows[2:n], zs)
    zt = z[t - 1]
    # z' must also avoid z_1 = b, otherwise column t repeats b with >= 2
    # unused elements still available
    z_prime = min(last[t - 1] - set(z))
    prefix = list(z)
    prefix[t - 1] = z_prime
    forbid = {}
    for j in range(n, k):  # 0-based j is column j+1
        forbid[j] = zt if j + 1 < dl else a
    row = regular_extend(last, tuple(prefix), forbid)
    return row, LastRowPlan("B", tuple(z), t, z_prime)


def _solve(system: SetSystem, p: tuple[int, ...], trace: Optional[list]) -> tuple[tuple[int, ...], ...]:
    m = system.n
    if system.k == 0:
        return tuple(() for _ in range(m))
    if m == 1:
        return (regular_extend(system.rows[0], p),)

    work, appended = normalize(system)
    plan = choose_pivot(work, p)
    permuted = work.permuted(plan.order)
    pp = tuple(p[i] for i in plan.order)
    reduced = reduce(permuted, plan)
    y1 = build_first_column(reduced, pp, plan)
    y = SolutionMatrix(_solve(reduced, y1, trace))
    x = insert_diagonal(y, plan)
    last, last_plan = fill_last_row(permuted, x, plan)
    if trace is not None:
        trace.append({"rows": m, "k": work.k, "appended": appended,
                      "plan": plan, "last_row": last_plan})
    rows = x.rows + (last,)
    if appended:
        rows = tuple(r[:-1] for r in rows)
    out = [None] * m
    for r, i in enumerate(plan.order):
        out[i] = rows[r]
    return tuple(out)


def solve(system: SetSystem, p: Optional[Sequence[int]] = None, trace: Optional[list] = None) -> SolutionMatrix:
    """Solve an (n, k)-system, extending the first column ``p`` if given.

    The result is always passed through :func:`verify_solution`; a
    rejection raises :class:`CertificationError` carrying the recursion
    trace.
    """
    report = validate_system(system)
    if not report.ok:
        raise ValueError(f"not a valid ({system.n},{system.k})-system: "
                         f"undersized cells {list(report.violations)}")
    if system.n == 0 or system.k == 0:
        return SolutionMatrix(tuple(() for _ in range(system.n)), "solver")
    if p is None:
        p = greedy_first_column(system)
    else:
        p = tuple(p)
        check_first_column(system, p)
    steps = [] if trace is None else trace
    sol = SolutionMatrix(_solve(system, p, steps), "solver")
    check = verify_solution(system, sol)
    if not check.ok:
        raise CertificationError(
            "solver output failed verification: " + "; ".join(map(str, check.violations)),
            check, steps)
    return sol
