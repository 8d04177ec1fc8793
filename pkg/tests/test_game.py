import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from kellerkit.game import (
    GameSolver,
    GameState,
    IllegalMove,
    SearchBoundExceeded,
    Violation,
    apply_move,
    canonical_state,
    chooser_wins,
    initial_state,
    legal_offers,
    play,
    replay_certificate,
    simulate,
)


def brute_wins(n, per_round=True):
    """Memo-free, symmetry-free game tree walk on plain frozensets."""
    def rec(sets, rnd):
        if rnd == n - 2:
            return len(set(sets)) == n
        per_row = []
        for s in sets:
            free = [e for e in range(1, n + 1) if e not in s]
            per_row.append(list(itertools.combinations(free, 2)))
        for offer in itertools.product(*per_row):
            ok = False
            for pick in itertools.product(*offer):
                child = tuple(s | {x} for s, x in zip(sets, pick))
                if per_round and len(set(child)) != n:
                    continue
                if rec(child, rnd + 1):
                    ok = True
                    break
            if not ok:
                return False
        return True

    return rec(tuple(frozenset({i}) for i in range(1, n + 1)), 0)


def test_offer_counts():
    s3 = initial_state(3)
    assert list(legal_offers(s3)) == [((2, 3), (1, 3), (1, 2))]
    assert len(list(legal_offers(initial_state(4)))) == 81
    mid = GameState.from_sets([[1, 2], [2, 3], [3, 4], [1, 4]])
    assert len(list(legal_offers(mid))) == 1


def test_apply_move_examples():
    s3 = initial_state(3)
    offer = ((2, 3), (1, 3), (1, 2))
    good = apply_move(s3, offer, (2, 3, 1))
    assert isinstance(good, GameState)
    assert good.as_lists() == [[1, 2], [2, 3], [1, 3]]
    assert good.terminal
    bad = apply_move(s3, offer, (2, 1, 1))
    assert isinstance(bad, Violation) and bad.rows == (1, 2)


def test_two_rows_zero_rounds():
    s = initial_state(2)
    assert s.terminal
    with pytest.raises(IllegalMove):
        list(legal_offers(s))
    sol = chooser_wins(2)
    assert sol.wins and sol.certificate == {}


def test_illegal_moves():
    s = initial_state(3)
    with pytest.raises(IllegalMove):
        apply_move(s, ((1, 3), (1, 3), (1, 2)), (3, 3, 1))  # 1 already in row 1
    with pytest.raises(IllegalMove):
        apply_move(s, ((2, 3), (1, 3), (1, 2)), (1, 3, 1))  # pick not offered
    with pytest.raises(ValueError):
        initial_state(1)


def test_end_only_defers_clash():
    s = GameState.from_sets([[1], [2], [3], [4]])
    offer = ((2, 3), (1, 3), (1, 4), (1, 2))
    pick = (2, 1, 1, 1)  # {1,2} twice, {1,3}, {1,4}
    assert isinstance(apply_move(s, offer, pick), Violation)
    nxt = apply_move(s, offer, pick, per_round=False)
    assert isinstance(nxt, GameState) and nxt.round == 1


def test_canonical_examples():
    for n in (3, 4, 5):
        s = initial_state(n)
        assert canonical_state(s) == s.sets
    a = GameState.from_sets([[1, 2], [2, 3], [1, 3]])
    b = GameState.from_sets([[1, 3], [1, 2], [2, 3]])
    assert canonical_state(a) == canonical_state(b)


def _permute(state, perm):
    """perm maps element e -> perm[e-1]; rows move with their element."""
    out = [None] * state.n
    for i, row in enumerate(state.as_lists(), start=1):
        out[perm[i - 1] - 1] = [perm[e - 1] for e in row]
    return GameState.from_sets(out, state.round)


@st.composite
def reachable_states(draw):
    n = draw(st.integers(3, 5))
    state = initial_state(n)
    steps = draw(st.integers(0, n - 2))
    for _ in range(steps):
        offers = [draw(st.sampled_from(list(itertools.combinations(
            [e for e in range(1, n + 1) if e not in row], 2)))) for row in state.as_lists()]
        pick = tuple(draw(st.sampled_from(pair)) for pair in offers)
        nxt = apply_move(state, tuple(offers), pick)
        if isinstance(nxt, Violation):
            break
        state = nxt
    return state


@settings(max_examples=150, deadline=None)
@given(reachable_states(), st.randoms(use_true_random=False))
def test_canonical_invariance(state, rnd):
    state.check()
    perm = list(range(1, state.n + 1))
    rnd.shuffle(perm)
    moved = _permute(state, perm)
    moved.check()
    c = canonical_state(state)
    assert canonical_state(moved) == c
    assert canonical_state(GameState(state.n, c, state.round)) == c
    assert sorted(bin(m).count("1") for m in c) == sorted(bin(m).count("1") for m in state.sets)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("per_round", [True, False])
def test_solver_matches_brute_force(n, per_round):
    assert chooser_wins(n, per_round=per_round).wins == brute_wins(n, per_round)


def test_known_verdicts():
    assert chooser_wins(3).wins
    sol = chooser_wins(4)
    assert sol.wins
    assert sol.states == 4 and len(sol.certificate) == 83


@pytest.mark.parametrize("n", [2, 3, 4])
def test_certificate_replay(n):
    sol = chooser_wins(n)
    lines, failures = replay_certificate(n, sol.certificate)
    assert failures == 0
    assert lines == {2: 1, 3: 1, 4: 81}[n]


def test_corrupted_certificate_fails_replay():
    sol = chooser_wins(4)
    cert = dict(sol.certificate)
    cert.pop(next(iter(cert)))
    assert replay_certificate(4, cert)[1] > 0


def test_bound():
    with pytest.raises(SearchBoundExceeded):
        chooser_wins(6)
    with pytest.raises(SearchBoundExceeded):
        play(6, "optimal", "random")


def test_every_state_memo_consistent():
    solver = GameSolver(4)
    root = initial_state(4).sets
    assert solver.wins(root)
    for key, verdict in solver.memo.items():
        fresh = GameSolver(4)
        assert fresh.wins(key) == verdict


def test_play_optimal_n3_always_wins():
    for adversary in ("random", "greedy", "optimal"):
        for seed in range(5):
            assert play(3, "optimal", adversary, seed).outcome == "win"


def test_play_optimal_n4():
    sol = chooser_wins(4)
    for seed in range(10):
        tr = play(4, "optimal", "random", seed, solution=sol)
        assert tr.outcome == "win"


def test_play_deterministic():
    a = play(5, "random", "random", 7).to_json()
    b = play(5, "random", "random", 7).to_json()
    assert a == b
    assert any(play(5, "random", "random", s).to_json() != a for s in range(8, 12))


def test_greedy_on_forced_n3_offer():
    tr = play(3, "greedy", "random", 0)
    assert tr.outcome == "win"
    final = tr.rounds[-1]["sets"]
    assert len({tuple(s) for s in final}) == 3


def test_human_chooser_from_injected_input():
    answers = iter(["1:2", "nonsense", "3", "9", "1"])
    prompts = []
    tr = play(3, "human", "random", 0, input=lambda: next(answers, None), output=prompts.append)
    assert prompts[0] == "row 1: pick 2 or 3"
    assert tr.rounds[0]["pick"] == [2, 3, 1]
    assert tr.outcome == "win"


def test_human_needs_input():
    with pytest.raises(RuntimeError):
        play(3, "human", "random", 0)


def test_simulate_shape():
    rows = simulate(4, 5, seed=3, choosers=("greedy", "optimal"), adversaries=("random",))
    assert [(r["chooser"], r["adversary"], r["trials"]) for r in rows] == [
        ("greedy", "random", 5), ("optimal", "random", 5)]
    assert rows[1]["wins"] == 5
    assert rows == simulate(4, 5, seed=3, choosers=("greedy", "optimal"), adversaries=("random",))


def test_random_play_keeps_invariants():
    rng = random.Random("invariants")
    for _ in range(200):
        n = rng.randint(3, 6)
        state = initial_state(n)
        while not state.terminal:
            offer = tuple(rng.choice(list(itertools.combinations(
                [e for e in range(1, n + 1) if e not in row], 2))) for row in state.as_lists())
            nxt = apply_move(state, offer, tuple(rng.choice(p) for p in offer))
            if isinstance(nxt, Violation):
                a, b = nxt.rows
                assert nxt.state.sets[a - 1] == nxt.state.sets[b - 1]
                break
            nxt.check()
            state = nxt
