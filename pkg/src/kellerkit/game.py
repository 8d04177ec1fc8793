"""The set-picking game: rules, exact solver, strategies and simulation.

Rows start as ``S_i = {i}`` (elements 1..n).  Each round the adversary
offers every row two elements it does not yet contain; the chooser keeps
one per row.  The chooser wins by surviving ``n - 2`` rounds with the sets
pairwise distinct (checked after every round by default, or only at the
end with ``per_round=False``).

Sets are stored as bitmasks: element ``e`` is bit ``e - 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence, Union

from .parallel import pmap

__all__ = [
    "IllegalMove",
    "SearchBoundExceeded",
    "GameState",
    "Violation",
    "GameSolution",
    "GameSolver",
    "initial_state",
    "legal_offers",
    "apply_move",
    "canonical_state",
    "chooser_wins",
    "replay_certificate",
    "play",
    "simulate",
    "CHOOSERS",
    "ADVERSARIES",
]

DEFAULT_MAX_N = 5

Offer = tuple[tuple[int, int], ...]
Pick = tuple[int, ...]


class IllegalMove(ValueError):
    pass


class SearchBoundExceeded(ValueError):
    pass


def _mask(elements) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def _elements(mask: int) -> list[int]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


@dataclass(frozen=True)
class GameState:
    n: int
    sets: tuple[int, ...]
    round: int = 0

    @classmethod
    def from_sets(cls, sets: Sequence[Sequence[int]], round: Optional[int] = None) -> "GameState":
        masks = tuple(_mask(s) for s in sets)
        if round is None:
            round = len(sets[0]) - 1 if sets else 0
        return cls(len(sets), masks, round)

    def as_lists(self) -> list[list[int]]:
        return [_elements(m) for m in self.sets]

    @property
    def terminal(self) -> bool:
        return self.round >= self.n - 2

    def check(self, per_round: bool = True) -> None:
        """Raise ValueError if the state violates the game invariants."""
        for i, m in enumerate(self.sets, start=1):
            if not m >> (i - 1) & 1:
                raise ValueError(f"row {i} does not contain {i}")
            if bin(m).count("1") != self.round + 1:
                raise ValueError(f"row {i} has the wrong size for round {self.round}")
            if m >> self.n:
                raise ValueError(f"row {i} has elements outside 1..{self.n}")
        if per_round and len(set(self.sets)) != self.n:
            raise ValueError("sets are not pairwise distinct")


def initial_state(n: int) -> GameState:
    if n < 2:
        raise ValueError("the game needs n >= 2")
    return GameState(n, tuple(1 << i for i in range(n)), 0)


@dataclass(frozen=True)
class Violation:
    rows: tuple[int, int]  # 1-based row numbers of the first colliding pair
    state: GameState


def _row_pairs(n: int, mask: int) -> list[tuple[int, int]]:
    free = [e for e in range(1, n + 1) if not mask >> (e - 1) & 1]
    return list(itertools.combinations(free, 2))


def legal_offers(state: GameState) -> Iterator[Offer]:
    """Every simultaneous offer, lexicographically ordered."""
    if state.terminal:
        raise IllegalMove("no offers in a terminal state")
    return itertools.product(*(_row_pairs(state.n, m) for m in state.sets))


def _first_collision(sets: Sequence[int]) -> Optional[tuple[int, int]]:
    seen = {}
    for i, m in enumerate(sets, start=1):
        if m in seen:
            return (seen[m], i)
        seen[m] = i
    return None


def apply_move(state: GameState, offer: Offer, pick: Pick, per_round: bool = True) -> Union[GameState, Violation]:
    if state.terminal:
        raise IllegalMove("game is over")
    if len(offer) != state.n or len(pick) != state.n:
        raise IllegalMove("offer and pick need one entry per row")
    new = []
    for i, (m, pair, x) in enumerate(zip(state.sets, offer, pick), start=1):
        u, v = pair
        if u == v or not (1 <= u <= state.n and 1 <= v <= state.n):
            raise IllegalMove(f"row {i}: bad pair {pair}")
        if m >> (u - 1) & 1 or m >> (v - 1) & 1:
            raise IllegalMove(f"row {i}: offered element already in the set")
        if x not in pair:
            raise IllegalMove(f"row {i}: pick {x} not offered")
        new.append(m | 1 << (x - 1))
    nxt = GameState(state.n, tuple(new), state.round + 1)
    if per_round or nxt.terminal:
        clash = _first_collision(nxt.sets)
        if clash is not None:
            return Violation(clash, nxt)
    return nxt


# -- symmetry ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _perm_tables(n: int):
    """For every permutation, (perm, mask image table)."""
    out = []
    for perm in itertools.permutations(range(n)):
        table = [0] * (1 << n)
        for m in range(1 << n):
            img = 0
            for b in range(n):
                if m >> b & 1:
                    img |= 1 << perm[b]
            table[m] = img
        out.append((perm, table))
    return out


def _apply_perm(sets: Sequence[int], perm, table) -> tuple[int, ...]:
    out = [0] * len(sets)
    for i, m in enumerate(sets):
        out[perm[i]] = table[m]
    return tuple(out)


def canonical_form(sets: Sequence[int], n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(canonical masks, a permutation taking ``sets`` to them)."""
    best = None
    for perm, table in _perm_tables(n):
        img = _apply_perm(sets, perm, table)
        if best is None or img < best[0]:
            best = (img, perm)
    return best


def canonical_state(state: GameState) -> tuple[int, ...]:
    """Smallest encoding over all relabelings of [n] (acting on rows and
    elements together)."""
    return canonical_form(state.sets, state.n)[0]


# -- exact solver -----------------------------------------------------------

@dataclass
class GameSolution:
    n: int
    wins: bool
    per_round: bool
    # (canonical sets, offer) -> pick, for winning states reachable under it
    certificate: dict = field(default_factory=dict)
    # first root offer the chooser cannot answer, when losing
    refutation: Optional[Offer] = None
    states: int = 0
    # canonical state -> verdict; lets strategies reuse the search
    memo: dict = field(default_factory=dict, repr=False)


class GameSolver:
    """Memoised minimax over canonical states."""

    def __init__(self, n: int, per_round: bool = True):
        self.n = n
        self.per_round = per_round
        self.memo: dict[tuple[int, ...], bool] = {}
        self._canon: dict[tuple[int, ...], tuple] = {}
        self._depth = n - 2

    def canon(self, sets: tuple[int, ...]):
        hit = self._canon.get(sets)
        if hit is None:
            hit = canonical_form(sets, self.n)
            self._canon[sets] = hit
        return hit

    def _round(self, sets) -> int:
        return bin(sets[0]).count("1") - 1

    def _children(self, sets, offer):
        """Legal child positions, as (pick, child sets), in pick order."""
        for pick in itertools.product(*offer):
            child = tuple(m | 1 << (x - 1) for m, x in zip(sets, pick))
            if self.per_round and len(set(child)) != self.n:
                continue
            yield pick, child

    def wins(self, sets: tuple[int, ...]) -> bool:
        """Whether the chooser wins from ``sets`` (any frame)."""
        key = self.canon(sets)[0]
        got = self.memo.get(key)
        if got is None:
            got = self._evaluate(key)
            self.memo[key] = got
        return got

    def _evaluate(self, sets) -> bool:
        if self._round(sets) >= self._depth:
            return len(set(sets)) == self.n
        for offer in itertools.product(*(_row_pairs(self.n, m) for m in sets)):
            if self.winning_pick(sets, offer) is None:
                return False
        return True

    def winning_pick(self, sets, offer) -> Optional[Pick]:
        """First pick (lexicographic) reaching a winning position."""
        for pick, child in self._children(sets, offer):
            if self.wins(child):
                return pick
        return None

    def losing_offer(self, sets) -> Optional[Offer]:
        if self.wins(sets):
            return None
        for offer in itertools.product(*(_row_pairs(self.n, m) for m in sets)):
            if self.winning_pick(sets, offer) is None:
                return offer
        return None

    def certificate(self) -> dict:
        """Picks for every offer at every winning canonical state reachable
        from the start under the chosen picks."""
        root = self.canon(initial_state(self.n).sets)[0]
        cert = {}
        if not self.wins(root):
            return cert
        stack = [root]
        seen = {root}
        while stack:
            sets = stack.pop()
            if self._round(sets) >= self._depth:
                continue
            for offer in itertools.product(*(_row_pairs(self.n, m) for m in sets)):
                pick = self.winning_pick(sets, offer)
                cert[(sets, offer)] = pick
                child = tuple(m | 1 << (x - 1) for m, x in zip(sets, pick))
                c = self.canon(child)[0]
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return cert

    def pick_from_certificate(self, cert: dict, sets, offer) -> Optional[Pick]:
        canon, perm = self.canon(sets)
        moved = [None] * self.n
        for i, (u, v) in enumerate(offer):
            pu, pv = perm[u - 1] + 1, perm[v - 1] + 1
            moved[perm[i]] = (min(pu, pv), max(pu, pv))
        pick = cert.get((canon, tuple(moved)))
        if pick is None:
            return None
        inv = [0] * self.n
        for b, pb in enumerate(perm):
            inv[pb] = b
        return tuple(inv[pick[perm[i]] - 1] + 1 for i in range(self.n))


def _root_chunk(args):
    n, per_round, offers = args
    solver = GameSolver(n, per_round)
    root = initial_state(n).sets
    verdicts = [solver.winning_pick(root, o) is not None for o in offers]
    return verdicts, solver.memo


def chooser_wins(n: int, max_n: int = DEFAULT_MAX_N, per_round: bool = True,
                 solver: Optional[GameSolver] = None) -> GameSolution:
    """Decide the game exactly and return a replayable certificate."""
    if n < 2:
        raise ValueError("the game needs n >= 2")
    if n > max_n:
        raise SearchBoundExceeded(f"n={n} exceeds configured search bound {max_n}")
    solver = solver or GameSolver(n, per_round)
    root = initial_state(n).sets
    if n >= 5 and not solver.memo:
        # shard the root offers; memo entries are pure so merging is exact
        offers = list(legal_offers(initial_state(n)))
        chunks = [offers[i::8] for i in range(8)]
        for _, memo in pmap(_root_chunk, [(n, per_round, c) for c in chunks]):
            solver.memo.update(memo)
    wins = solver.wins(root)
    sol = GameSolution(n, wins, per_round, states=len(solver.memo), memo=solver.memo)
    if wins:
        sol.certificate = solver.certificate()
    else:
        sol.refutation = solver.losing_offer(root)
    return sol


def replay_certificate(n: int, certificate: dict, per_round: bool = True) -> tuple[int, int]:
    """Play the certificate against every adversary line.

    Returns ``(lines, failures)``; a failure is a missing entry or a
    violation of the distinctness rule.
    """
    helper = GameSolver(n, per_round)
    lines = failures = 0

    def walk(state: GameState):
        nonlocal lines, failures
        if state.terminal:
            lines += 1
            if len(set(state.sets)) != n:
                failures += 1
            return
        for offer in legal_offers(state):
            pick = helper.pick_from_certificate(certificate, state.sets, offer)
            if pick is None:
                lines += 1
                failures += 1
                continue
            nxt = apply_move(state, offer, pick, per_round)
            if isinstance(nxt, Violation):
                lines += 1
                failures += 1
                continue
            walk(nxt)

    walk(initial_state(n))
    return lines, failures


# -- strategies ---------------------------------------------------------------

def _random_chooser(state, offer, ctx):
    return tuple(ctx.rng.choice(pair) for pair in offer)


def _greedy_chooser(state, offer, ctx):
    """Row by row, the element whose tentative set clashes with the fewest
    other rows.  Clashes with rows already decided count first; rows still
    undecided clash if either of their options would."""
    picks: list[int] = []
    for i, (m, pair) in enumerate(zip(state.sets, offer)):
        def score(x):
            tentative = m | 1 << (x - 1)
            sure = maybe = 0
            for r, (mr, pr) in enumerate(zip(state.sets, offer)):
                if r < i:
                    sure += (mr | 1 << (picks[r] - 1)) == tentative
                elif r > i:
                    maybe += any((mr | 1 << (y - 1)) == tentative for y in pr)
            return sure, maybe, x
        picks.append(min(pair, key=score))
    return tuple(picks)


def _optimal_chooser(state, offer, ctx):
    solver = ctx.solver()
    pick = solver.pick_from_certificate(ctx.certificate(), state.sets, offer)
    if pick is None:
        pick = solver.winning_pick(state.sets, offer)
    return pick if pick is not None else _greedy_chooser(state, offer, ctx)


def _random_adversary(state, ctx):
    return tuple(ctx.rng.choice(_row_pairs(state.n, m)) for m in state.sets)


def _greedy_adversary(state, ctx):
    """Per row, the two elements whose addition lands closest to other
    rows: an element scores one point per row that could reach the same
    set by adding a single element."""
    offer = []
    for i, m in enumerate(state.sets):
        free = [e for e in range(1, state.n + 1) if not m >> (e - 1) & 1]

        def threat(x):
            target = m | 1 << (x - 1)
            return sum(1 for r, mr in enumerate(state.sets)
                       if r != i and mr & target == mr and bin(target ^ mr).count("1") == 1)
        ranked = sorted(free, key=lambda x: (-threat(x), x))
        offer.append(tuple(sorted(ranked[:2])))
    return tuple(offer)


def _optimal_adversary(state, ctx):
    solver = ctx.solver()
    bad = solver.losing_offer(state.sets)
    if bad is not None:
        return bad
    return _greedy_adversary(state, ctx)


def _human_chooser(state, offer, ctx):
    picks = []
    for i, (u, v) in enumerate(offer, start=1):
        while True:
            ctx.output(f"row {i}: pick {u} or {v}")
            line = ctx.input()
            if line is None:
                raise EOFError("no more input")
            text = line.strip()
            if ":" in text:
                row, _, text = text.partition(":")
                if row.strip() != str(i):
                    ctx.output(f"expected row {i}")
                    continue
            try:
                x = int(text)
            except ValueError:
                ctx.output("enter an element number")
                continue
            if x in (u, v):
                picks.append(x)
                break
            ctx.output(f"{x} was not offered")
    return tuple(picks)


CHOOSERS: dict[str, Callable] = {
    "random": _random_chooser,
    "greedy": _greedy_chooser,
    "optimal": _optimal_chooser,
    "human": _human_chooser,
}
ADVERSARIES: dict[str, Callable] = {
    "random": _random_adversary,
    "greedy": _greedy_adversary,
    "optimal": _optimal_adversary,
}


class _Context:
    def __init__(self, n, seed, per_round, max_n, solution=None, input=None, output=None):
        self.n = n
        self.rng = random.Random(f"kellerkit-game-{seed}")
        self.per_round = per_round
        self.max_n = max_n
        self._solution = solution
        self._solver = None
        self.input = input
        self.output = output or (lambda s: None)

    def solver(self) -> GameSolver:
        if self._solver is None:
            self._solver = GameSolver(self.n, self.per_round)
            if self._solution is not None:
                self._solver.memo.update(self._solution.memo)
            else:
                self._solution = chooser_wins(self.n, self.max_n, self.per_round, self._solver)
        return self._solver

    def certificate(self) -> dict:
        self.solver()
        return self._solution.certificate


@dataclass
class Transcript:
    n: int
    seed: int
    chooser: str
    adversary: str
    per_round: bool
    rounds: list = field(default_factory=list)
    outcome: str = "win"
    violation: Optional[tuple[int, int]] = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "chooser": self.chooser,
            "adversary": self.adversary,
            "per_round": self.per_round,
            "rounds": self.rounds,
            "outcome": self.outcome,
            "violation": list(self.violation) if self.violation else None,
        }


def play(n: int, chooser: str = "greedy", adversary: str = "random", seed: int = 0,
         per_round: bool = True, max_n: int = DEFAULT_MAX_N, solution: Optional[GameSolution] = None,
         input: Optional[Callable[[], Optional[str]]] = None,
         output: Optional[Callable[[str], None]] = None,
         on_round: Optional[Callable[[dict], None]] = None) -> Transcript:
    """Play one game.  The chooser and adversary draw from one seeded RNG,
    adversary first each round, so runs are reproducible."""
    if chooser not in CHOOSERS:
        raise ValueError(f"unknown chooser strategy {chooser!r}")
    if adversary not in ADVERSARIES:
        raise ValueError(f"unknown adversary strategy {adversary!r}")
    if chooser == "human" and input is None:
        raise RuntimeError("human chooser needs an interactive input source")
    if "optimal" in (chooser, adversary) and n > max_n:
        raise SearchBoundExceeded(f"n={n} exceeds configured search bound {max_n}")
    ctx = _Context(n, seed, per_round, max_n, solution, input, output)
    state = initial_state(n)
    tr = Transcript(n, seed, chooser, adversary, per_round)
    while not state.terminal:
        offer = ADVERSARIES[adversary](state, ctx)
        pick = CHOOSERS[chooser](state, offer, ctx)
        nxt = apply_move(state, offer, pick, per_round)
        rec = {"round": state.round + 1,
               "offer": [list(p) for p in offer],
               "pick": list(pick)}
        if isinstance(nxt, Violation):
            rec["sets"] = nxt.state.as_lists()
            tr.rounds.append(rec)
            tr.outcome = "violation"
            tr.violation = nxt.rows
            if on_round:
                on_round(rec)
            return tr
        rec["sets"] = nxt.as_lists()
        tr.rounds.append(rec)
        if on_round:
            on_round(rec)
        state = nxt
    return tr


def _sim_pair(args):
    n, chooser, adversary, seeds, per_round, max_n, solution = args
    return sum(play(n, chooser, adversary, s, per_round, max_n, solution).outcome == "win"
               for s in seeds)


def simulate(n: int, trials: int, seed: int = 0, choosers=("random", "greedy", "optimal"),
             adversaries=("random", "greedy", "optimal"), per_round: bool = True,
             max_n: int = DEFAULT_MAX_N) -> list[dict]:
    """Win counts for every strategy pair over seeds seed..seed+trials-1."""
    needs_opt = "optimal" in choosers or "optimal" in adversaries
    if needs_opt and n > max_n:
        raise SearchBoundExceeded(f"n={n} exceeds configured search bound {max_n}")
    solution = chooser_wins(n, max_n, per_round) if needs_opt else None
    pairs = [(c, a) for c in choosers for a in adversaries]
    seeds = [seed + t for t in range(trials)]
    jobs = [(n, c, a, seeds, per_round, max_n, solution) for c, a in pairs]
    wins = pmap(_sim_pair, jobs)
    return [{"chooser": c, "adversary": a, "trials": trials, "wins": w}
            for (c, a), w in zip(pairs, wins)]
