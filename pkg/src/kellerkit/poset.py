"""Subposets of the Boolean lattice B_n.

A member is a bitmask over the ground set ``{1..n}`` (element ``e`` is bit
``e - 1``).  Order is inclusion; ``B`` covers ``A`` when ``A`` is ``B``
minus one element.

Heights come in two conventions.  :func:`height` is the largest
cardinality of a member reachable from the empty set by cover steps;
:func:`height_levels` counts levels, so ``{∅}`` alone has one level.  The
leaf bound is checked against the level count.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from .flow import vertex_disjoint_paths

__all__ = [
    "SubPoset",
    "PathResult",
    "LemmaReport",
    "PropositionReport",
    "NodeCapExceeded",
    "boolean_lattice",
    "covers",
    "is_rooted",
    "is_wide",
    "is_branching",
    "leaves",
    "height",
    "height_levels",
    "subposet_above",
    "leaf_charge",
    "check_lemma",
    "check_proposition",
    "row_to_poset",
    "disjoint_full_paths",
    "check_paths",
    "gen_branching",
    "enumerate_branching",
]


popcount = int.bit_count


def to_elements(m: int) -> list[int]:
    return [b + 1 for b in range(m.bit_length()) if m >> b & 1]


def from_elements(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


@dataclass(frozen=True)
class SubPoset:
    n: int
    members: frozenset[int]

    def __post_init__(self):
        members = frozenset(self.members)
        full = (1 << self.n) - 1
        if any(m < 0 or m & ~full for m in members):
            raise ValueError(f"members must be subsets of [1..{self.n}]")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SubPoset":
        sets = [tuple(s) for s in sets]
        masks = [from_elements(s) for s in sets]
        if any(e < 1 or e > n for s in sets for e in s):
            raise ValueError(f"elements must lie in 1..{n}")
        if len(set(masks)) != len(masks):
            raise ValueError("duplicate members")
        return cls(n, frozenset(masks))

    def sorted_members(self) -> list[int]:
        return sorted(self.members, key=lambda m: (popcount(m), to_elements(m)))

    def as_lists(self) -> list[list[int]]:
        return [to_elements(m) for m in self.sorted_members()]

    def __len__(self):
        return len(self.members)

    def __contains__(self, m):
        return m in self.members


def boolean_lattice(n: int, include_top: bool = True) -> SubPoset:
    full = (1 << n) - 1
    return SubPoset(n, frozenset(m for m in range(1 << n) if include_top or m != full))


def covers(P: SubPoset, A: int) -> list[int]:
    """Members one element larger than ``A`` and containing it."""
    return [A | 1 << b for b in range(P.n) if not A >> b & 1 and (A | 1 << b) in P.members]


def _has_strict_superset(P: SubPoset) -> dict[int, bool]:
    """member -> whether some other member strictly contains it."""
    up = [False] * (1 << P.n)
    for X in range((1 << P.n) - 1, -1, -1):
        if X in P.members:
            up[X] = True
            continue
        up[X] = any(up[X | 1 << b] for b in range(P.n) if not X >> b & 1)
    return {A: any(up[A | 1 << b] for b in range(P.n) if not A >> b & 1) for A in P.members}


def is_rooted(P: SubPoset) -> bool:
    return 0 in P.members


def is_wide(P: SubPoset) -> bool:
    return all(1 << b in P.members for b in range(P.n))


def branching_failures(P: SubPoset) -> list[int]:
    """Non-maximal members covered by fewer than two members."""
    above = _has_strict_superset(P)
    return sorted((A for A in P.members if above[A] and len(covers(P, A)) < 2),
                  key=lambda m: (popcount(m), m))


def is_branching(P: SubPoset) -> bool:
    return not branching_failures(P)


def leaves(P: SubPoset) -> frozenset[int]:
    """Maximal members."""
    above = _has_strict_superset(P)
    return frozenset(A for A in P.members if not above[A])


def _reachable(P: SubPoset, start: int = 0) -> set[int]:
    if start not in P.members:
        return set()
    seen = {start}
    queue = deque([start])
    while queue:
        A = queue.popleft()
        for B in covers(P, A):
            if B not in seen:
                seen.add(B)
                queue.append(B)
    return seen


def height(P: SubPoset) -> Optional[int]:
    """Largest cardinality reachable from ∅ by cover steps (None if not rooted)."""
    reach = _reachable(P)
    return max(map(popcount, reach)) if reach else None


def height_levels(P: SubPoset) -> int:
    h = height(P)
    return 0 if h is None else h + 1


def subposet_above(P: SubPoset, x: int) -> SubPoset:
    bit = 1 << (x - 1)
    if bit not in P.members:
        raise ValueError(f"singleton {{{x}}} is not a member")
    return SubPoset(P.n, frozenset(m for m in P.members if m & bit))


def leaf_charge(P: SubPoset, s: int, _leaves=None) -> Fraction:
    """Sum of 1/|l| over leaves l containing element ``s``."""
    bit = 1 << (s - 1)
    if bit not in P.members:
        raise ValueError(f"singleton {{{s}}} is not a member")
    ls = leaves(P) if _leaves is None else _leaves
    return sum((Fraction(1, popcount(l)) for l in ls if l & bit), Fraction(0))


@dataclass
class LemmaReport:
    holds: Optional[bool]
    leaves: int
    height_levels: int
    problems: list[str] = field(default_factory=list)


def check_lemma(P: SubPoset) -> LemmaReport:
    """Rooted branching posets have at least as many leaves as levels."""
    problems = []
    if not is_rooted(P):
        problems.append("not rooted")
    if not is_branching(P):
        problems.append("not branching")
    nl, h = len(leaves(P)), height_levels(P)
    return LemmaReport(None if problems else nl >= h, nl, h, problems)


@dataclass
class PropositionReport:
    holds: Optional[bool]
    leaves: int
    n: int
    charges: dict[int, Fraction] = field(default_factory=dict)
    charges_ok: Optional[bool] = None
    problems: list[str] = field(default_factory=list)


def check_proposition(P: SubPoset) -> PropositionReport:
    """Wide rooted branching posets have at least n leaves, and every
    singleton collects leaf charge at least 1."""
    problems = []
    if not is_wide(P):
        problems.append("not wide")
    if not is_rooted(P):
        problems.append("not rooted")
    if not is_branching(P):
        problems.append("not branching")
    ls = leaves(P)
    if problems:
        return PropositionReport(None, len(ls), P.n, problems=problems)
    charges = {s: leaf_charge(P, s, ls) for s in range(1, P.n + 1)}
    charges_ok = all(c >= 1 for c in charges.values())
    return PropositionReport(len(ls) >= P.n and charges_ok, len(ls), P.n, charges, charges_ok)


class NodeCapExceeded(RuntimeError):
    pass


def row_to_poset(row: Sequence[Iterable[int]], alphabet: Union[int, Sequence[int]],
                 node_cap: int = 200_000) -> SubPoset:
    """Prefix-set family of all regular representatives of ``row``.

    ``alphabet`` is either n (elements already in 1..n) or an ordered list
    of element ids mapped to 1..len(alphabet).
    """
    if isinstance(alphabet, int):
        n = alphabet
        index = {e: e - 1 for e in range(1, n + 1)}
    else:
        n = len(alphabet)
        index = {e: i for i, e in enumerate(alphabet)}
    try:
        sets = [sum(1 << index[e] for e in set(s)) for s in row]
    except KeyError as exc:
        raise ValueError(f"element {exc.args[0]} outside the alphabet") from None
    k = len(sets)
    start = (0, 0)
    seen = {start}
    queue = deque([start])
    members = {0}
    while queue:
        j, A = queue.popleft()
        if j == k:
            continue
        s = sets[j]
        new = s & ~A
        if popcount(new) >= 2:
            nexts = [A | 1 << b for b in range(n) if new >> b & 1]
        else:
            nexts = [A | 1 << b for b in range(n) if s >> b & 1]
        for B in nexts:
            state = (j + 1, B)
            if state not in seen:
                if len(seen) >= node_cap:
                    raise NodeCapExceeded(f"more than {node_cap} search states")
                seen.add(state)
                queue.append(state)
                members.add(B)
    return SubPoset(n, frozenset(members))


def row_single_choice_states(row: Sequence[Iterable[int]], n: int) -> list[tuple[int, int]]:
    """Reachable (position, prefix-set) states where exactly one unused
    element is available next.  Only these can make a row poset fail to
    branch (the row may then step up through a single cover)."""
    sets = [from_elements(s) for s in row]
    out = []
    seen = {(0, 0)}
    queue = deque([(0, 0)])
    while queue:
        j, A = queue.popleft()
        if j == len(sets):
            continue
        new = sets[j] & ~A
        if popcount(new) == 1:
            out.append((j, A))
        choices = new if popcount(new) >= 2 else sets[j]
        for b in range(n):
            if choices >> b & 1 and (j + 1, A | 1 << b) not in seen:
                seen.add((j + 1, A | 1 << b))
                queue.append((j + 1, A | 1 << b))
    return out


# -- disjoint paths --------------------------------------------------------------

@dataclass
class PathResult:
    # "paths": n disjoint paths; "cut": a separator of size < n;
    # "no-targets": full mode without (n-1)-sets (``fallback`` holds leaf mode)
    status: str
    mode: str
    flow: int
    paths: list[list[int]] = field(default_factory=list)
    cut: list[int] = field(default_factory=list)
    fallback: Optional["PathResult"] = None


def _require_wrb(P: SubPoset) -> None:
    for name, pred in (("wide", is_wide), ("rooted", is_rooted), ("branching", is_branching)):
        if not pred(P):
            raise ValueError(f"not {name}")


def disjoint_full_paths(P: SubPoset, mode: str = "full") -> PathResult:
    """Vertex-disjoint cover paths from the n singletons to co-singletons
    (``mode="full"``) or to leaves (``mode="leaf"``)."""
    if mode not in ("full", "leaf"):
        raise ValueError("mode must be 'full' or 'leaf'")
    _require_wrb(P)
    order = P.sorted_members()
    if mode == "full":
        sinks = [m for m in order if popcount(m) == P.n - 1]
        if not sinks:
            return PathResult("no-targets", mode, 0, fallback=disjoint_full_paths(P, "leaf"))
    else:
        lv = leaves(P)
        sinks = [m for m in order if m in lv]
    adjacency = {m: covers(P, m) for m in order}
    sources = [1 << b for b in range(P.n)]
    res = vertex_disjoint_paths(adjacency, sources, sinks)
    if res.flow >= P.n:
        return PathResult("paths", mode, res.flow, res.paths)
    return PathResult("cut", mode, res.flow, res.paths, sorted(res.cut, key=lambda m: (popcount(m), m)))


def check_paths(P: SubPoset, paths: Sequence[Sequence[int]], mode: str = "leaf") -> list[str]:
    """Independent audit of a path bundle; returns a list of problems."""
    problems = []
    seen: dict[int, int] = {}
    starts = set()
    lv = leaves(P)
    for idx, path in enumerate(paths):
        if not path:
            problems.append(f"path {idx} is empty")
            continue
        if popcount(path[0]) != 1:
            problems.append(f"path {idx} does not start at a singleton")
        starts.add(path[0])
        end = path[-1]
        if mode == "full" and popcount(end) != P.n - 1:
            problems.append(f"path {idx} does not end at a co-singleton")
        if mode == "leaf" and end not in lv:
            problems.append(f"path {idx} does not end at a leaf")
        for v in path:
            if v not in P.members:
                problems.append(f"path {idx} leaves the poset")
            if v in seen:
                problems.append(f"paths {seen[v]} and {idx} share {to_elements(v)}")
            seen[v] = idx
        for u, v in zip(path, path[1:]):
            if u & v != u or popcount(v) != popcount(u) + 1:
                problems.append(f"path {idx} has a non-cover step")
    if len(starts) != len(paths):
        problems.append("two paths start at the same singleton")
    return problems


# -- instance supply ----------------------------------------------------------------

def gen_branching(n: int, seed: int = 0, density: float = 0.5, max_rejections: int = 100) -> SubPoset:
    """Random wide rooted branching subposet of B_n.

    Starts from every subset of size < n and deletes random members of
    size >= 2.  When a deletion leaves a non-maximal member with fewer than
    two covers, the repair either deletes that member as well or deletes
    everything strictly above it (turning it into a leaf), chosen at
    random; singletons are only ever cut above.  Repairs cascade until the
    family branches again.  ``density`` in [0, 1] scales the number of
    deletions, from none up to ``2n`` (cascades make each one count).
    """
    if n < 2:
        raise ValueError("need n >= 2 for a wide poset without the top element")
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    rng = random.Random(f"kellerkit-poset:{n}:{seed}:{density!r}")
    full = (1 << n) - 1
    for _ in range(max_rejections):
        members = set(range(full))
        pool = [m for m in range(full) if popcount(m) >= 2]
        for _ in range(round(density * 2 * n)):
            if not pool:
                break
            victim = pool[rng.randrange(len(pool))]
            members.discard(victim)
            size = len(members)
            _repair(members, n, [victim ^ (1 << b) for b in range(n) if victim >> b & 1], rng)
            if len(members) == size:
                pool.remove(victim)
            else:
                pool = [m for m in pool if m in members]
        P = SubPoset(n, frozenset(members))
        if is_wide(P) and is_rooted(P):
            return P
    raise RuntimeError(f"gave up after {max_rejections} rejected candidates")


def _repair(members: set[int], n: int, work: list[int], rng: random.Random) -> None:
    while work:
        A = work.pop()
        if A not in members:
            continue
        ncov = sum(1 for b in range(n) if not A >> b & 1 and (A | 1 << b) in members)
        if ncov >= 2:
            continue
        above = [B for B in members if B != A and B & A == A]
        if not above:
            continue
        if popcount(A) >= 2 and rng.random() < 0.5:
            doomed = [A]
        else:
            doomed = above
        for B in doomed:
            members.discard(B)
        for B in doomed:
            work.extend(B ^ (1 << b) for b in range(n) if B >> b & 1)


def enumerate_branching(n: int, wide: bool = False, rooted: bool = True) -> Iterator[SubPoset]:
    """Every branching family of subsets of [n] (rooted by default).

    Subsets are decided from the largest down; a subset may join only if it
    is maximal so far or already has two covers, which is final because all
    its supersets have been decided.
    """
    if n > 4:
        raise ValueError("exhaustive enumeration is limited to n <= 4")
    order = sorted(range(1, 1 << n), key=lambda m: (-popcount(m), m))
    chosen: set[int] = set()

    def ok_to_add(A):
        if not any(B & A == A for B in chosen):
            return True
        return sum(1 for b in range(n) if not A >> b & 1 and (A | 1 << b) in chosen) >= 2

    def rec(idx):
        if idx == len(order):
            if not rooted:
                yield SubPoset(n, frozenset(chosen))
            if ok_to_add(0):
                yield SubPoset(n, frozenset(chosen | {0}))
            return
        A = order[idx]
        if not (wide and popcount(A) == 1):
            yield from rec(idx + 1)
        if ok_to_add(A):
            chosen.add(A)
            yield from rec(idx + 1)
            chosen.discard(A)

    yield from rec(0)
