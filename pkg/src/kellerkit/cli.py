"""Command-line front end.

Exit codes: 0 success, 1 invalid input / failed check / search bound,
2 usage error (including shape mismatches and human play without a
terminal), 3 solver certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import random
import sys

from . import game, oracle, poset
from .core import ShapeError, verify_solution, validate_system
from .io import (
    FormatError,
    certificate_to_json,
    dumps,
    instance_to_json,
    load_instance,
    load_poset,
    load_solution,
    parse_elements,
    path_result_to_json,
    poset_to_json,
    solution_to_json,
    write_atomic,
)
from .solver import CertificationError, solve

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CERT = 0, 1, 2, 3


class CommandError(Exception):
    def __init__(self, message, code=EXIT_FAIL):
        super().__init__(message)
        self.code = code


def _emit(text: str, path=None):
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _load_valid_instance(path):
    system = load_instance(path)
    report = validate_system(system)
    if not report.ok:
        lines = [f"invalid instance: not a ({system.n},{system.k})-system"]
        lines += [f"  cell ({i},{j}) has {size} < {report.n} elements"
                  for i, j, size in report.violations]
        lines += [f"  {p}" for p in report.problems]
        raise CommandError("\n".join(lines))
    return system


# -- set systems ------------------------------------------------------------------

def cmd_solve(args):
    system = _load_valid_instance(args.instance)
    p = parse_elements(args.first_column, system) if args.first_column else None
    try:
        sol = solve(system, p)
    except CertificationError as exc:
        raise CommandError(f"certification failure: {exc}", EXIT_CERT)
    except ValueError as exc:
        raise CommandError(str(exc))
    text = dumps(solution_to_json(sol))
    if args.emit:
        write_atomic(args.emit, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args):
    system = load_instance(args.instance)
    sol = load_solution(args.solution, system)
    try:
        report = verify_solution(system, sol)
    except ShapeError as exc:
        raise CommandError(f"shape mismatch: {exc}", EXIT_USAGE)
    if report.ok:
        print("pass")
        return EXIT_OK
    print("fail")
    for v in report.violations:
        print(f"  {v}")
    return EXIT_FAIL


def cmd_oracle(args):
    system = load_instance(args.instance)
    budget = oracle.SearchBudget(max_solutions=args.max_solutions, max_nodes=args.max_nodes)
    try:
        if args.enumerate is not None:
            budget = oracle.SearchBudget(max_solutions=args.enumerate, max_nodes=args.max_nodes)
            res = oracle.enumerate_solutions(system, budget)
            if res.stopped_by == "nodes":
                raise CommandError("indeterminate: budget (node limit reached)")
            sys.stdout.write(dumps({
                "count": len(res.solutions),
                "exhausted": res.exhausted,
                "solutions": [[list(r) for r in s.rows] for s in res.solutions],
            }))
            return EXIT_OK
        if args.extendable is not None:
            p = parse_elements(args.extendable, system)
            print("true" if oracle.extendable(system, p, budget) else "false")
            return EXIT_OK
        print("true" if oracle.exists_solution(system, budget) else "false")
        return EXIT_OK
    except oracle.BudgetExceeded:
        raise CommandError("indeterminate: budget")
    except ValueError as exc:
        raise CommandError(str(exc))


# -- game ---------------------------------------------------------------------------

def _per_round(args):
    return not args.end_only


def cmd_game_solve(args):
    try:
        sol = game.chooser_wins(args.n, args.max_n, _per_round(args))
    except game.SearchBoundExceeded as exc:
        raise CommandError(str(exc))
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_USAGE)
    print(f"chooser wins: {'true' if sol.wins else 'false'}")
    print(f"canonical states: {sol.states}")
    print(f"certificate entries: {len(sol.certificate)}")
    if sol.refutation is not None:
        print("refutation: " + " ".join(f"{u}/{v}" for u, v in sol.refutation))
    if args.certificate:
        write_atomic(args.certificate, dumps(certificate_to_json(sol)))
    return EXIT_OK


def _format_round(rec):
    offer = " ".join(f"{u}/{v}" for u, v in rec["offer"])
    pick = " ".join(map(str, rec["pick"]))
    sets = " ".join("{" + ",".join(map(str, s)) + "}" for s in rec["sets"])
    return f"round {rec['round']}: offer {offer} | pick {pick} | sets {sets}"


def cmd_game_play(args):
    kwargs = {}
    if args.chooser == "human":
        if not sys.stdin.isatty():
            raise CommandError("human chooser needs an interactive terminal", EXIT_USAGE)

        def read():
            line = sys.stdin.readline()
            return line if line else None
        kwargs = {"input": read, "output": lambda s: print(s, flush=True)}
    try:
        tr = game.play(args.n, args.chooser, args.adversary, args.seed, _per_round(args),
                       args.max_n, on_round=lambda rec: print(_format_round(rec)), **kwargs)
    except game.SearchBoundExceeded as exc:
        raise CommandError(str(exc))
    except EOFError:
        raise CommandError("input ended before the game finished", EXIT_USAGE)
    if tr.outcome == "win":
        print("result: win")
    else:
        print(f"result: violation (rows {tr.violation[0]} and {tr.violation[1]})")
    if args.transcript:
        write_atomic(args.transcript, dumps(tr.to_json()))
    return EXIT_OK


def cmd_game_sim(args):
    try:
        rows = game.simulate(args.n, args.trials, args.seed, args.choosers, args.adversaries,
                             _per_round(args), args.max_n)
    except game.SearchBoundExceeded as exc:
        raise CommandError(str(exc))
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "chooser", "adversary", "trials", "wins", "win_rate"])
    for r in rows:
        rate = r["wins"] / r["trials"] if r["trials"] else 0.0
        w.writerow([args.n, r["chooser"], r["adversary"], r["trials"], r["wins"], f"{rate:.4f}"])
    _emit(buf.getvalue(), args.csv)
    if args.figure:
        from .plotting import plot_win_rates
        plot_win_rates(rows, args.figure, args.n)
    return EXIT_OK


# -- posets ------------------------------------------------------------------------------

def _poset_from_args(args):
    if args.poset_file:
        return load_poset(args.poset_file)
    if args.generate is not None:
        return poset.gen_branching(args.generate, args.seed, args.density)
    raise CommandError("give a poset file or --generate N", EXIT_USAGE)


def _frac(x):
    return {"num": x.numerator, "den": x.denominator}


def cmd_poset_check_lemma(args):
    P = _poset_from_args(args)
    rep = poset.check_lemma(P)
    if rep.problems:
        raise CommandError(", ".join(rep.problems))
    sys.stdout.write(dumps({"check": "lemma", "holds": rep.holds, "leaves": rep.leaves,
                            "height_levels": rep.height_levels}))
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_poset_check_prop(args):
    P = _poset_from_args(args)
    rep = poset.check_proposition(P)
    if rep.problems:
        raise CommandError(", ".join(rep.problems))
    sys.stdout.write(dumps({
        "check": "proposition", "holds": rep.holds, "leaves": rep.leaves, "n": rep.n,
        "charges": {str(s): _frac(c) for s, c in rep.charges.items()},
        "charges_ok": rep.charges_ok,
    }))
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_poset_paths(args):
    P = _poset_from_args(args)
    try:
        res = poset.disjoint_full_paths(P, args.mode)
    except ValueError as exc:
        raise CommandError(str(exc))
    _emit(dumps(path_result_to_json(res)), args.emit)
    return EXIT_OK


def cmd_poset_from_row(args):
    system = load_instance(args.instance)
    if not 0 <= args.row < system.n:
        raise CommandError(f"row {args.row} out of range", EXIT_USAGE)
    alphabet = sorted(system.alphabet)
    try:
        P = poset.row_to_poset(system.rows[args.row], alphabet, args.node_cap)
    except poset.NodeCapExceeded as exc:
        raise CommandError(str(exc))
    _emit(dumps(poset_to_json(P)), args.emit)
    return EXIT_OK


def cmd_poset_enumerate(args):
    try:
        fams = list(poset.enumerate_branching(args.n, wide=args.wide))
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_USAGE)
    lemma_bad = sum(1 for P in fams if not poset.check_lemma(P).holds)
    wide = [P for P in fams if poset.is_wide(P)]
    prop_bad = sum(1 for P in wide if not poset.check_proposition(P).holds)
    sys.stdout.write(dumps({
        "n": args.n, "wide_only": args.wide, "count": len(fams), "wide": len(wide),
        "lemma_counterexamples": lemma_bad, "proposition_counterexamples": prop_bad,
    }))
    if args.emit:
        write_atomic(args.emit, dumps([poset_to_json(P) for P in fams]))
    return EXIT_OK if lemma_bad == prop_bad == 0 else EXIT_FAIL


def cmd_poset_generate(args):
    P = poset.gen_branching(args.n, args.seed, args.density)
    _emit(dumps(poset_to_json(P)), args.emit)
    return EXIT_OK


def cmd_poset_survey(args):
    from .parallel import pmap
    from .survey import survey_one
    rng = random.Random(f"kellerkit-survey:{args.seed}")
    jobs = [(n, rng.randrange(2**31), rng.randrange(11) / 10) for n in args.n for _ in range(args.count)]
    records = pmap(survey_one, jobs)
    buf = _io.StringIO()
    fields = ["n", "seed", "density", "members", "leaves", "height_levels",
              "min_charge", "lemma", "proposition", "leaf_flow"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r)
    _emit(buf.getvalue(), args.csv)
    if args.figure:
        from .plotting import plot_leaf_survey
        plot_leaf_survey(records, args.figure)
    ok = all(r["lemma"] and r["proposition"] and r["leaf_flow"] >= r["n"] for r in records)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kellerkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an (n,k)-system")
    p.add_argument("instance")
    p.add_argument("--first-column", nargs="+", metavar="X", help="first column to extend")
    p.add_argument("--emit", metavar="FILE", help="also write the solution here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive search on small instances")
    p.add_argument("instance")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--enumerate", type=int, metavar="N", help="list up to N solutions")
    g.add_argument("--exists", action="store_true", help="decide existence (default)")
    g.add_argument("--extendable", nargs="+", metavar="X", help="first column to test")
    p.add_argument("--max-nodes", type=int, default=10**7)
    p.add_argument("--max-solutions", type=int, default=10**6)
    p.set_defaults(func=cmd_oracle)

    gp = sub.add_parser("game", help="the set-picking game").add_subparsers(dest="game_cmd", required=True)

    def game_common(q):
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--max-n", type=int, default=game.DEFAULT_MAX_N, help="exact-search bound")
        q.add_argument("--end-only", action="store_true", help="check distinctness only at the end")

    q = gp.add_parser("solve", help="decide the game exactly")
    game_common(q)
    q.add_argument("--certificate", metavar="FILE", help="write the winning certificate")
    q.set_defaults(func=cmd_game_solve)

    q = gp.add_parser("play", help="play one game")
    game_common(q)
    q.add_argument("--chooser", choices=sorted(game.CHOOSERS), default="greedy")
    q.add_argument("--adversary", choices=sorted(game.ADVERSARIES), default="random")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--transcript", metavar="FILE")
    q.set_defaults(func=cmd_game_play)

    q = gp.add_parser("sim", help="win rates for strategy pairs")
    game_common(q)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--choosers", nargs="+", default=["random", "greedy", "optimal"],
                   choices=[c for c in game.CHOOSERS if c != "human"])
    q.add_argument("--adversaries", nargs="+", default=["random", "greedy", "optimal"],
                   choices=list(game.ADVERSARIES))
    q.add_argument("--csv", metavar="FILE", help="write the table here instead of stdout")
    q.add_argument("--figure", metavar="FILE", help="render a bar chart (png/pdf/svg)")
    q.set_defaults(func=cmd_game_sim)

    pp = sub.add_parser("poset", help="Boolean-lattice subposets").add_subparsers(dest="poset_cmd", required=True)

    def poset_input(q):
        q.add_argument("poset_file", nargs="?")
        q.add_argument("--generate", type=int, metavar="N", help="use a generated poset in B_N")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--density", type=float, default=0.5)

    for name, func, helptext in (("check-lemma", cmd_poset_check_lemma, "leaves >= levels"),
                                 ("check-prop", cmd_poset_check_prop, "leaves >= n and charges")):
        q = pp.add_parser(name, help=helptext)
        poset_input(q)
        q.set_defaults(func=func)

    q = pp.add_parser("paths", help="vertex-disjoint paths from the singletons")
    poset_input(q)
    q.add_argument("--mode", choices=["full", "leaf"], default="full")
    q.add_argument("--emit", metavar="FILE")
    q.set_defaults(func=cmd_poset_paths)

    q = pp.add_parser("from-row", help="prefix-set poset of one instance row")
    q.add_argument("instance")
    q.add_argument("--row", type=int, default=0)
    q.add_argument("--node-cap", type=int, default=200_000)
    q.add_argument("--emit", metavar="FILE")
    q.set_defaults(func=cmd_poset_from_row)

    q = pp.add_parser("enumerate", help="all rooted branching families in B_n (n <= 4)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--wide", action="store_true")
    q.add_argument("--emit", metavar="FILE")
    q.set_defaults(func=cmd_poset_enumerate)

    q = pp.add_parser("generate", help="random wide rooted branching poset")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--density", type=float, default=0.5)
    q.add_argument("--emit", metavar="FILE")
    q.set_defaults(func=cmd_poset_generate)

    q = pp.add_parser("survey", help="leaf-count report over generated posets")
    q.add_argument("--n", type=int, nargs="+", default=[5, 6, 7])
    q.add_argument("--count", type=int, default=200)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--csv", metavar="FILE")
    q.add_argument("--figure", metavar="FILE")
    q.set_defaults(func=cmd_poset_survey)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FormatError as exc:
        print("error: invalid input file", file=sys.stderr)
        for p in exc.problems:
            print(f"  {p}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
