"""Set systems, representative sequences and the solution verifier.

Elements are plain non-negative integers (dense ids).  Optional display
labels live in a side table on :class:`SetSystem`; every algorithm in the
package works on the ids only, and every "pick any element" choice
resolves to the smallest id.

Rows and columns are indexed from 0 in Python data; reports use the same
0-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

__all__ = [
    "ShapeError",
    "SetSystem",
    "SolutionMatrix",
    "ValidationReport",
    "Violation",
    "VerificationReport",
    "validate_system",
    "is_representative",
    "is_regular",
    "are_equivalent",
    "are_compatible",
    "prefix_sets",
    "verify_solution",
]


class ShapeError(ValueError):
    """Raised when sequences, rows or matrices have incompatible shapes."""


@dataclass(frozen=True)
class SetSystem:
    """An n x k matrix of finite element sets.

    ``rows[i][j]`` is the set in row ``i``, column ``j``.  The cardinality
    condition of an (n, k)-system is *not* enforced here; use
    :func:`validate_system` to check it.
    """

    rows: tuple[tuple[frozenset[int], ...], ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        rows = tuple(tuple(frozenset(s) for s in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ShapeError("all rows of a set system must have the same length")
        for row in rows:
            for s in row:
                if any((not isinstance(x, int)) or x < 0 for x in s):
                    raise ShapeError("elements must be non-negative integer ids")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(set(labels)) != len(labels):
                raise ShapeError("alphabet labels must be unique")
            if self.alphabet and max(self.alphabet) >= len(labels):
                raise ShapeError("element id outside the label table")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_lists(cls, sets: Iterable[Iterable[Iterable[int]]], labels=None) -> "SetSystem":
        return cls(tuple(tuple(frozenset(s) for s in row) for row in sets), labels)

    @classmethod
    def uniform(cls, n: int, k: int, elements: Iterable[int]) -> "SetSystem":
        s = frozenset(elements)
        return cls(tuple(tuple(s for _ in range(k)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def alphabet(self) -> frozenset[int]:
        """The union of every set in the system."""
        out: set[int] = set()
        for row in self.rows:
            for s in row:
                out |= s
        return frozenset(out)

    def column(self, j: int) -> tuple[frozenset[int], ...]:
        return tuple(row[j] for row in self.rows)

    def permuted(self, order: Sequence[int]) -> "SetSystem":
        """Rows rearranged so that new row ``r`` is old row ``order[r]``."""
        return SetSystem(tuple(self.rows[i] for i in order), self.labels)

    def relabeled(self, mapping) -> "SetSystem":
        """Apply an element bijection (dict or callable) to every set."""
        f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        return SetSystem(tuple(tuple(frozenset(f(x) for x in s) for s in row)
                               for row in self.rows))


@dataclass(frozen=True)
class SolutionMatrix:
    rows: tuple[tuple[int, ...], ...]
    provenance: Optional[str] = None

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ShapeError("all solution rows must have the same length")

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def first_column(self) -> tuple[int, ...]:
        return tuple(r[0] for r in self.rows) if self.k else ()

    def relabeled(self, mapping) -> "SolutionMatrix":
        f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        return SolutionMatrix(tuple(tuple(f(x) for x in r) for r in self.rows),
                              self.provenance)

    def __eq__(self, other):
        # provenance is a note, not part of the value
        if not isinstance(other, SolutionMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    n: int
    # (row, column, cardinality) of every undersized cell
    violations: tuple[tuple[int, int, int], ...] = ()
    problems: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def validate_system(system: SetSystem, n: Optional[int] = None) -> ValidationReport:
    """Check the (n, k)-system cardinality condition on every cell."""
    if n is None:
        n = system.n
    problems = []
    if system.n != n:
        problems.append(f"row count {system.n} does not match n={n}")
    violations = tuple(
        (i, j, len(s))
        for i, row in enumerate(system.rows)
        for j, s in enumerate(row)
        if len(s) < n
    )
    ok = not problems and not violations
    return ValidationReport(ok, n, violations, tuple(problems))


def _check_lengths(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ShapeError(f"length mismatch: {len(a)} != {len(b)}")


def is_representative(seq: Sequence[int], row: Sequence[Iterable[int]]) -> bool:
    _check_lengths(seq, row)
    return all(x in s for x, s in zip(seq, row))


def irregular_positions(seq: Sequence[int], row: Sequence[Iterable[int]]) -> list[int]:
    """Positions where ``seq`` repeats a value although two or more unused
    elements were available."""
    out = []
    used: set[int] = set()
    for j, (x, s) in enumerate(zip(seq, row)):
        if x in used and len(set(s) - used) >= 2:
            out.append(j)
        used.add(x)
    return out


def is_regular(seq: Sequence[int], row: Sequence[Iterable[int]]) -> bool:
    """True iff a value is only repeated when fewer than two unused
    elements are available in the current set.

    Raises ``ValueError`` if ``seq`` is not a representative of ``row``.
    """
    if not is_representative(seq, row):
        raise ValueError("sequence is not a representative of the row")
    return not irregular_positions(seq, row)


def prefix_sets(seq: Sequence[int]) -> list[frozenset[int]]:
    """The chain of prefix value-sets {x_1..x_t} for t = 1..len(seq)."""
    out = []
    acc: set[int] = set()
    for x in seq:
        acc.add(x)
        out.append(frozenset(acc))
    return out


def are_equivalent(a: Sequence[int], b: Sequence[int]) -> bool:
    _check_lengths(a, b)
    return all(x == y for x, y in zip(prefix_sets(a), prefix_sets(b)))


def are_compatible(a: Sequence[int], b: Sequence[int]) -> bool:
    _check_lengths(a, b)
    return all(x != y for x, y in zip(prefix_sets(a), prefix_sets(b)))


def first_collision(a: Sequence[int], b: Sequence[int]) -> Optional[int]:
    """First position t (0-based) at which the prefix sets coincide."""
    _check_lengths(a, b)
    for t, (x, y) in enumerate(zip(prefix_sets(a), prefix_sets(b))):
        if x == y:
            return t
    return None


@dataclass(frozen=True)
class Violation:
    predicate: str  # "representative" | "regular" | "compatible"
    rows: tuple[int, ...]
    position: int

    def __str__(self):
        rows = ",".join(map(str, self.rows))
        return f"{self.predicate} violated: row(s) {rows} at column {self.position}"


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    def __bool__(self):
        return self.ok


def verify_solution(system: SetSystem, solution: SolutionMatrix) -> VerificationReport:
    """Check every row is a regular representative and every pair of rows
    is compatible.  All violations are collected, not only the first.
    """
    if solution.n != system.n or (system.n and solution.k != system.k):
        raise ShapeError(
            f"solution shape {solution.n}x{solution.k} does not match "
            f"system shape {system.n}x{system.k}")
    violations: list[Violation] = []
    for i, (seq, row) in enumerate(zip(solution.rows, system.rows)):
        bad = [j for j, (x, s) in enumerate(zip(seq, row)) if x not in s]
        violations.extend(Violation("representative", (i,), j) for j in bad)
        violations.extend(Violation("regular", (i,), j)
                          for j in irregular_positions(seq, row))
    chains = [prefix_sets(r) for r in solution.rows]
    for i in range(solution.n):
        for i2 in range(i + 1, solution.n):
            for t, (x, y) in enumerate(zip(chains[i], chains[i2])):
                if x == y:
                    violations.append(Violation("compatible", (i, i2), t))
    return VerificationReport(not violations, tuple(violations))
