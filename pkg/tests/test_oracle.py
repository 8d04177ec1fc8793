import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kellerkit.core import SetSystem, SolutionMatrix, verify_solution
from kellerkit.instances import all_systems, cyclic_solution, first_columns, uniform_system
from kellerkit.oracle import (
    BudgetExceeded,
    SearchBudget,
    enumerate_solutions,
    exists_solution,
    extendable,
)

from conftest import set_systems


def brute_force(system):
    """Every matrix passing the verifier, by full product enumeration."""
    per_row = [list(itertools.product(*(sorted(s) for s in row))) for row in system.rows]
    out = []
    for rows in itertools.product(*per_row):
        if verify_solution(system, SolutionMatrix(rows)).ok:
            out.append(rows)
    return set(out)


def test_single_row_regularity():
    s = SetSystem.from_lists([[{1, 2}, {1, 2}]])
    res = enumerate_solutions(s)
    assert res.exhausted
    # position 2 has a single new element, so repeating is allowed
    assert [sol.rows for sol in res.solutions] == [((1, 1),), ((1, 2),), ((2, 1),), ((2, 2),)]
    three = SetSystem.from_lists([[{1, 2, 3}, {1, 2, 3}]])
    assert all(len(set(sol.rows[0])) == 2 for sol in enumerate_solutions(three).solutions)


def test_two_rows_one_column():
    s = SetSystem.from_lists([[{1, 2}], [{1, 2}]])
    res = enumerate_solutions(s)
    assert {sol.rows for sol in res.solutions} == {((1,), (2,)), ((2,), (1,))}


def test_uniform_3x5_contains_cyclic():
    s = uniform_system(3, 5)
    res = enumerate_solutions(s)
    assert res.exhausted and res.solutions
    assert cyclic_solution(3, 5).rows == ((1, 2, 2, 2, 2), (2, 3, 3, 3, 3), (3, 1, 1, 1, 1))
    assert cyclic_solution(3, 5) in res.solutions


def test_exists_examples():
    assert exists_solution(uniform_system(3, 4))
    bad = SetSystem.from_lists([[{1}, {1, 2}], [{1, 2}, {1, 2}]])
    with pytest.raises(ValueError):
        exists_solution(bad)


def test_extendable_examples():
    assert extendable(uniform_system(3, 3), (1, 2, 3))
    with pytest.raises(ValueError):
        extendable(uniform_system(3, 3), (1, 1, 2))
    with pytest.raises(ValueError):
        extendable(uniform_system(2, 2), (1, 5))


def test_exhaustive_2x2_all_extendable():
    count = 0
    for s in all_systems(2, 2, {1, 2, 3}):
        assert exists_solution(s)
        for p in first_columns(s):
            assert extendable(s, p)
        count += 1
    assert count == 4 ** 4


def test_budget_is_indeterminate_not_false():
    s = uniform_system(3, 5)
    with pytest.raises(BudgetExceeded):
        exists_solution(s, SearchBudget(max_nodes=2))
    res = enumerate_solutions(s, SearchBudget(max_nodes=5))
    assert not res.exhausted and res.stopped_by == "nodes"


def test_solution_cap_flags_truncation():
    s = uniform_system(2, 2)
    full = enumerate_solutions(s)
    capped = enumerate_solutions(s, SearchBudget(max_solutions=1))
    assert len(full.solutions) > 1
    assert capped.solutions == full.solutions[:1]
    assert not capped.exhausted and capped.stopped_by == "solutions"
    exact = enumerate_solutions(s, SearchBudget(max_solutions=len(full.solutions)))
    assert exact.exhausted


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_nodes=0)
    with pytest.raises(ValueError):
        SearchBudget(max_solutions=-1)


@settings(max_examples=60, deadline=None)
@given(set_systems(n=st.integers(1, 2), k=st.integers(1, 3), extra=st.integers(0, 2)))
def test_enumeration_matches_brute_force(system):
    res = enumerate_solutions(system)
    rows = [sol.rows for sol in res.solutions]
    assert len(rows) == len(set(rows))
    assert set(rows) == brute_force(system)
    assert rows == [sol.rows for sol in enumerate_solutions(system).solutions]
