import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from kellerkit.flow import vertex_disjoint_paths
from kellerkit.poset import (
    NodeCapExceeded,
    SubPoset,
    boolean_lattice,
    check_lemma,
    check_paths,
    check_proposition,
    disjoint_full_paths,
    enumerate_branching,
    from_elements,
    gen_branching,
    height,
    height_levels,
    is_branching,
    is_rooted,
    is_wide,
    leaf_charge,
    leaves,
    row_single_choice_states,
    row_to_poset,
    subposet_above,
)

from conftest import regular_representatives


def P(n, *sets):
    return SubPoset.from_sets(n, sets)


def B_minus_top(n):
    return boolean_lattice(n, include_top=False)


def as_sets(members):
    return {frozenset(i + 1 for i in range(8) if m >> i & 1) for m in members}


def naive_branching(n, members):
    """Direct reading of the definition: every member with a strict
    superset in the family has at least two covers in it."""
    fam = set(members)
    for A in fam:
        if any(B != A and B & A == A for B in fam):
            if sum(1 for b in range(n) if not A >> b & 1 and A | 1 << b in fam) < 2:
                return False
    return True


# predicates

def test_predicate_examples():
    Q = B_minus_top(3)
    assert is_rooted(Q) and is_wide(Q) and is_branching(Q)
    assert not is_branching(boolean_lattice(3))
    small = P(3, [], [1], [2])
    assert is_rooted(small) and is_branching(small) and not is_wide(small)
    assert is_wide(P(2, [], [1], [2]))


def test_duplicate_members_rejected():
    with pytest.raises(ValueError):
        P(3, [1, 2], [2, 1])


def test_leaves_and_height_examples():
    small = P(2, [], [1], [2])
    assert as_sets(leaves(small)) == {frozenset({1}), frozenset({2})}
    assert height_levels(small) == 2 and height(small) == 1
    Q = B_minus_top(3)
    assert len(leaves(Q)) == 3 and height_levels(Q) == 3
    root = P(3, [])
    assert leaves(root) == {0} and height_levels(root) == 1


def test_subposet_above():
    Q = B_minus_top(3)
    assert as_sets(subposet_above(Q, 1).members) == {frozenset({1}), frozenset({1, 2}), frozenset({1, 3})}
    assert as_sets(subposet_above(P(2, [], [1], [2]), 1).members) == {frozenset({1})}
    with pytest.raises(ValueError):
        subposet_above(P(3, [], [1]), 2)


def test_leaf_charge_examples():
    assert leaf_charge(B_minus_top(3), 1) == Fraction(1)
    assert leaf_charge(P(2, [], [1], [2]), 1) == Fraction(1)
    assert leaf_charge(B_minus_top(4), 1) == Fraction(1)  # three leaves of size 3


def test_check_reports():
    rep = check_lemma(P(2, [], [1], [2]))
    assert rep.holds and rep.leaves == 2 and rep.height_levels == 2
    rep = check_lemma(B_minus_top(3))
    assert rep.holds and (rep.leaves, rep.height_levels) == (3, 3)
    rep = check_proposition(B_minus_top(3))
    assert rep.holds and set(rep.charges.values()) == {Fraction(1)}
    rep = check_proposition(P(4, [], [1], [2], [3], [4]))
    assert rep.holds and rep.leaves == 4
    rep = check_lemma(P(3, [1], [1, 2], [1, 3]))
    assert rep.holds is None and rep.problems == ["not rooted"]
    rep = check_proposition(boolean_lattice(3))
    assert rep.holds is None and rep.problems == ["not branching"]


# exhaustive families

def brute_rooted_branching(n):
    others = list(range(1, 1 << n))
    out = set()
    for bits in range(1 << len(others)):
        fam = {0} | {others[i] for i in range(len(others)) if bits >> i & 1}
        if naive_branching(n, fam):
            out.add(frozenset(fam))
    return out


@pytest.mark.parametrize("n,count", [(2, 2), (3, 9)])
def test_enumeration_matches_brute_force(n, count):
    got = {P_.members for P_ in enumerate_branching(n)}
    assert got == brute_rooted_branching(n)
    assert len(got) == count


def test_enumeration_b4_count_and_content():
    fams = [P_.members for P_ in enumerate_branching(4)]
    assert len(fams) == len(set(fams)) == 430
    assert all(0 in f and naive_branching(4, f) for f in fams)
    wide = [P_.members for P_ in enumerate_branching(4, wide=True)]
    assert len(wide) == 25
    assert set(wide) == {f for f in fams if all(1 << b in f for b in range(4))}


def test_enumeration_limited():
    with pytest.raises(ValueError):
        next(enumerate_branching(5))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lemma_and_proposition_exhaustive(n):
    for Q in enumerate_branching(n):
        assert check_lemma(Q).holds
        if is_wide(Q):
            rep = check_proposition(Q)
            assert rep.holds and rep.charges_ok
        assert sum((leaf_charge(Q, s) for s in range(1, n + 1) if 1 << (s - 1) in Q.members),
                   Fraction(0)) <= len(leaves(Q))


# generator

def test_density_zero_is_b_minus_top():
    for n in range(2, 7):
        assert gen_branching(n, seed=3, density=0.0) == B_minus_top(n)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_generated_posets_are_wide_rooted_branching(n):
    for seed in range(25):
        Q = gen_branching(n, seed, 0.6)
        assert is_wide(Q) and is_rooted(Q) and naive_branching(n, Q.members)
        assert Q == gen_branching(n, seed, 0.6)


def test_generator_argument_checks():
    with pytest.raises(ValueError):
        gen_branching(1)
    with pytest.raises(ValueError):
        gen_branching(4, density=1.5)


# row posets

def prefix_family(row):
    out = {frozenset()}
    for seq in regular_representatives(row):
        for t in range(1, len(seq) + 1):
            out.add(frozenset(seq[:t]))
    return out


def test_row_uniform_three_gives_full_b3():
    row = [{1, 2, 3}] * 3
    Q = row_to_poset(row, 3)
    assert Q == boolean_lattice(3)
    assert not is_branching(Q)
    assert row_single_choice_states(row, 3)


def test_row_disjoint_pairs():
    Q = row_to_poset([{1, 2}, {3, 4}], 4)
    assert as_sets(Q.members) == {frozenset(), frozenset({1}), frozenset({2}),
                                  frozenset({1, 3}), frozenset({1, 4}), frozenset({2, 3}), frozenset({2, 4})}
    assert is_branching(Q)


def test_row_labels_and_cap():
    Q = row_to_poset([{10, 20}, {10, 30}], [10, 20, 30])
    assert Q.n == 3 and from_elements([1, 3]) in Q.members
    with pytest.raises(ValueError):
        row_to_poset([{1, 9}], 3)
    with pytest.raises(NodeCapExceeded):
        row_to_poset([set(range(1, 7))] * 6, 6, node_cap=10)


rows = st.integers(2, 5).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.sets(st.integers(1, n), min_size=2, max_size=n), min_size=1, max_size=5)))


@settings(max_examples=150, deadline=None)
@given(rows)
def test_row_poset_equals_prefix_family(data):
    n, row = data
    Q = row_to_poset(row, n)
    assert as_sets(Q.members) == prefix_family([frozenset(s) for s in row])
    if not row_single_choice_states(row, n):
        assert is_branching(Q)


# paths

def nx_flow(adjacency, sources, sinks):
    G = nx.DiGraph()
    for v, outs in adjacency.items():
        G.add_edge((v, 0), (v, 1), capacity=1)
        for w in outs:
            G.add_edge((v, 1), (w, 0), capacity=1)
    for s in sources:
        G.add_edge("S", (s, 0), capacity=1)
    for t in sinks:
        G.add_edge((t, 1), "T", capacity=1)
    if "S" not in G or "T" not in G:
        return 0
    return nx.maximum_flow_value(G, "S", "T")


def test_full_paths_b3():
    res = disjoint_full_paths(B_minus_top(3), "full")
    assert res.status == "paths" and res.flow == 3 and len(res.paths) == 3
    assert not check_paths(B_minus_top(3), res.paths, "full")
    assert all(len(p) == 2 for p in res.paths)


def test_leaf_paths_trivial():
    Q = P(4, [], [1], [2], [3], [4])
    res = disjoint_full_paths(Q, "leaf")
    assert res.status == "paths" and res.paths == [[1], [2], [4], [8]]
    full = disjoint_full_paths(Q, "full")
    assert full.status == "no-targets" and full.fallback.status == "paths"


def test_paths_preconditions():
    with pytest.raises(ValueError, match="not branching"):
        disjoint_full_paths(boolean_lattice(3))
    with pytest.raises(ValueError, match="not wide"):
        disjoint_full_paths(P(3, [], [1], [2]))
    with pytest.raises(ValueError):
        disjoint_full_paths(B_minus_top(3), "sideways")


@pytest.mark.parametrize("n", range(3, 9))
def test_full_paths_b_minus_top(n):
    Q = B_minus_top(n)
    res = disjoint_full_paths(Q, "full")
    assert res.status == "paths" and len(res.paths) == n
    assert not check_paths(Q, res.paths, "full")


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_flow_value_matches_networkx(n):
    for seed in range(15):
        Q = gen_branching(n, seed, 0.7)
        order = Q.sorted_members()
        adjacency = {m: [m | 1 << b for b in range(n) if not m >> b & 1 and m | 1 << b in Q.members]
                     for m in order}
        sources = [1 << b for b in range(n)]
        for sinks in ([m for m in order if m in leaves(Q)], [m for m in order if bin(m).count("1") == n - 1]):
            got = vertex_disjoint_paths(adjacency, sources, sinks)
            assert got.flow == nx_flow(adjacency, sources, sinks)
            assert len(got.paths) == got.flow == len(got.cut)


def test_cut_certificate_separates():
    rng = random.Random("cut")
    for _ in range(200):
        nodes = list(range(12))
        adjacency = {v: sorted(rng.sample(nodes[v + 1:], min(len(nodes) - v - 1, rng.randint(0, 2))))
                     for v in nodes}
        sources = rng.sample(nodes[:6], 3)
        sinks = rng.sample(nodes[6:], 3)
        res = vertex_disjoint_paths(adjacency, sources, sinks)
        assert res.flow == nx_flow(adjacency, sources, sinks) == len(res.cut)
        # no source-sink path avoids the cut
        blocked = set(res.cut)
        seen = {s for s in sources if s not in blocked}
        stack = list(seen)
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if w not in blocked and w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert not seen & set(sinks)
        used = [v for p in res.paths for v in p]
        assert len(used) == len(set(used))


def test_check_paths_detects_overlap():
    Q = B_minus_top(3)
    bad = [[1, 3], [2, 3]]
    assert any("share" in p for p in check_paths(Q, bad, "full"))
