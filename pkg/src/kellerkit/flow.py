"""Unit vertex-capacity max-flow (Menger) on small DAGs.

Each vertex ``v`` is split into ``(v, 0) -> (v, 1)`` with capacity one, so
an integral flow is a set of vertex-disjoint paths.  Augmenting paths are
found by BFS (Edmonds-Karp); neighbour lists are kept in insertion order so
the result is deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence


@dataclass
class DisjointPaths:
    flow: int
    paths: list[list[Hashable]]
    # vertices separating sources from sinks; len(cut) == flow
    cut: list[Hashable]


def vertex_disjoint_paths(
    adjacency: Mapping[Hashable, Sequence[Hashable]],
    sources: Iterable[Hashable],
    sinks: Iterable[Hashable],
) -> DisjointPaths:
    """Maximum set of vertex-disjoint source->sink paths and a minimum
    vertex cut.  A vertex that is both source and sink forms a one-vertex
    path."""
    sources = list(sources)
    sinks = list(sinks)
    S, T = ("__source__",), ("__sink__",)
    # only the split edges are bounded, so every minimum cut is a vertex cut
    big = len(adjacency) + 1
    cap: dict = {}
    nbrs: dict = {}

    def add(u, v, c):
        if (u, v) not in cap:
            nbrs.setdefault(u, []).append(v)
            nbrs.setdefault(v, []).append(u)
            cap[(v, u)] = cap.get((v, u), 0)
        cap[(u, v)] = cap.get((u, v), 0) + c

    for v in adjacency:
        add((v, 0), (v, 1), 1)
    for v, outs in adjacency.items():
        for w in outs:
            add((v, 1), (w, 0), big)
    for s in sources:
        add(S, (s, 0), big)
    for t in sinks:
        add((t, 1), T, big)

    flow = 0
    while True:
        parent = {S: None}
        queue = deque([S])
        while queue and T not in parent:
            u = queue.popleft()
            for v in nbrs.get(u, ()):
                if v not in parent and cap[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if T not in parent:
            break
        v = T
        while parent[v] is not None:
            u = parent[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        flow += 1

    # vertices whose in-half is reachable in the residual graph but whose
    # out-half is not form a minimum cut
    reach = set(parent)
    cut = [v for v in adjacency if (v, 0) in reach and (v, 1) not in reach]

    succ = {}
    for v, outs in adjacency.items():
        for w in outs:
            if cap[((v, 1), (w, 0))] < big:
                succ[v] = w
    ends = {t for t in sinks if cap[((t, 1), T)] < big}
    paths = []
    for s in sources:
        if cap[(S, (s, 0))] == big:
            continue
        path = [s]
        while path[-1] not in ends:
            path.append(succ[path[-1]])
        paths.append(path)
    return DisjointPaths(flow, paths, cut)
