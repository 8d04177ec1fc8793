"""Instance builders: the uniform and disjoint families, the cyclic
solution matrix, random and exhaustive system generators, and the
fixture files shipped with the package."""

from __future__ import annotations

import itertools
import random
from importlib import resources
from typing import Iterator, Optional

from .core import SetSystem, SolutionMatrix


def uniform_system(n: int, k: int) -> SetSystem:
    """Every set equal to {1..n}."""
    return SetSystem.uniform(n, k, range(1, n + 1))


def cyclic_solution(n: int, k: int) -> SolutionMatrix:
    """Row i reads i, i+1, ..., i+n-2 (mod n, values 1..n) and then repeats
    its last value.  Solves :func:`uniform_system`."""
    rows = []
    for i in range(n):
        head = [(i + t) % n + 1 for t in range(min(k, n - 1))]
        rows.append(tuple(head + [head[-1]] * (k - len(head))))
    return SolutionMatrix(tuple(rows), "fixture")


def disjoint_system(n: int, k: int) -> SetSystem:
    """n x k system of pairwise disjoint n-element sets."""
    rows = []
    for i in range(n):
        base = (i * k) * n + 1
        rows.append(tuple(frozenset(range(base + j * n, base + (j + 1) * n)) for j in range(k)))
    return SetSystem(tuple(rows))


def random_system(rng: random.Random, n: int, k: int, alphabet: int) -> SetSystem:
    """Each cell a uniformly sized random subset of {0..alphabet-1} with at
    least n elements."""
    if alphabet < n:
        raise ValueError("alphabet smaller than n")
    pool = range(alphabet)
    return SetSystem(tuple(
        tuple(frozenset(rng.sample(pool, rng.randint(n, alphabet))) for _ in range(k))
        for _ in range(n)))


def all_systems(n: int, k: int, elements) -> Iterator[SetSystem]:
    """Every (n, k)-system whose sets are drawn from ``elements``."""
    elements = sorted(elements)
    cells = [frozenset(c) for size in range(n, len(elements) + 1)
             for c in itertools.combinations(elements, size)]
    for combo in itertools.product(cells, repeat=n * k):
        yield SetSystem(tuple(tuple(combo[i * k:(i + 1) * k]) for i in range(n)))


def first_columns(system: SetSystem) -> Iterator[tuple[int, ...]]:
    """Every pairwise-distinct representative of column 1."""
    for p in itertools.product(*(sorted(s) for s in system.column(0))):
        if len(set(p)) == len(p):
            yield p


def random_first_column(rng: random.Random, system: SetSystem, tries: int = 50) -> Optional[tuple[int, ...]]:
    for _ in range(tries):
        p: list[int] = []
        for s in system.column(0):
            options = sorted(s - set(p))
            if not options:
                break
            p.append(rng.choice(options))
        else:
            return tuple(p)
    return None


FIXTURE_NAMES = (
    [f"cyclic-n{n}" for n in range(3, 8)] + [f"disjoint-n{n}" for n in (2, 3, 4)]
)


def build_fixture(name: str) -> tuple[SetSystem, Optional[SolutionMatrix]]:
    kind, _, size = name.partition("-n")
    n = int(size)
    if kind == "cyclic":
        return uniform_system(n, n + 2), cyclic_solution(n, n + 2)
    if kind == "disjoint":
        return disjoint_system(n, 3), None
    raise KeyError(name)


def fixture_path(name: str, what: str = "instance"):
    """Path of a shipped fixture file (``what`` is instance or solution)."""
    return resources.files("kellerkit") / "fixtures" / f"{name}.{what}.json"
