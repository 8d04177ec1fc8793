"""JSON formats for instances, solutions, posets, transcripts and
certificates.

Every file is written in one canonical form (sorted keys, two-space
indent, integers only; fractions as ``{"num": .., "den": ..}``) so equal
values produce byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from .core import SetSystem, SolutionMatrix
from .poset import SubPoset


class FormatError(ValueError):
    """A file does not match its schema; ``problems`` lists every issue."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def dumps(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _plain(obj):
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in output files")
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    return obj


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None


# -- instances ---------------------------------------------------------------

def _element(x, index: Optional[dict], where: str, problems: list):
    if isinstance(x, bool):
        problems.append(f"{where}: booleans are not elements")
    elif isinstance(x, int):
        if x < 0:
            problems.append(f"{where}: negative element id {x}")
        elif index is not None and x >= len(index):
            problems.append(f"{where}: id {x} outside the alphabet")
        return x
    elif isinstance(x, str):
        if index is None:
            problems.append(f"{where}: label {x!r} given but no alphabet")
        elif x not in index:
            problems.append(f"{where}: unknown label {x!r}")
        else:
            return index[x]
    else:
        problems.append(f"{where}: element must be an id or a label")
    return None


def parse_instance(doc: Any) -> SetSystem:
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise FormatError("instance must be a JSON object")
    labels = doc.get("alphabet")
    index = None
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise FormatError("alphabet must be a list of strings")
        if len(set(labels)) != len(labels):
            raise FormatError("alphabet labels must be unique")
        index = {s: i for i, s in enumerate(labels)}
    sets = doc.get("sets")
    if not isinstance(sets, list) or not all(isinstance(r, list) for r in sets):
        raise FormatError("'sets' must be an n x k array of element arrays")
    n, k = doc.get("n"), doc.get("k")
    if not isinstance(n, int) or not isinstance(k, int):
        raise FormatError("'n' and 'k' must be integers")
    if len(sets) != n:
        problems.append(f"'n' is {n} but 'sets' has {len(sets)} rows")
    rows = []
    for i, row in enumerate(sets):
        if len(row) != k:
            problems.append(f"row {i} has {len(row)} columns, expected k={k}")
        cells = []
        for j, cell in enumerate(row):
            if not isinstance(cell, list):
                problems.append(f"cell ({i},{j}) is not an array")
                continue
            ids = [_element(x, index, f"cell ({i},{j})", problems) for x in cell]
            if len(set(ids)) != len(ids):
                problems.append(f"cell ({i},{j}) lists an element twice")
            cells.append(frozenset(x for x in ids if x is not None))
        rows.append(tuple(cells))
    if problems:
        raise FormatError(problems)
    return SetSystem(tuple(rows), tuple(labels) if labels is not None else None)


def load_instance(path) -> SetSystem:
    return parse_instance(read_json(path))


def instance_to_json(system: SetSystem) -> dict:
    doc = {
        "n": system.n,
        "k": system.k,
        "sets": [[sorted(s) for s in row] for row in system.rows],
    }
    if system.labels is not None:
        doc["alphabet"] = list(system.labels)
    return doc


def parse_elements(values: Sequence[str], system: SetSystem) -> tuple[int, ...]:
    """Command-line element tokens (ids or labels) -> ids."""
    index = {s: i for i, s in enumerate(system.labels or ())}
    out = []
    for v in values:
        if v in index:
            out.append(index[v])
        else:
            try:
                out.append(int(v))
            except ValueError:
                raise FormatError(f"unknown element {v!r}") from None
    return tuple(out)


# -- solutions -----------------------------------------------------------------

def solution_to_json(sol: SolutionMatrix) -> dict:
    doc = {"n": sol.n, "k": sol.k, "rows": [list(r) for r in sol.rows]}
    if sol.provenance:
        doc["provenance"] = sol.provenance
    return doc


def parse_solution(doc: Any, system: Optional[SetSystem] = None) -> SolutionMatrix:
    if not isinstance(doc, dict) or not isinstance(doc.get("rows"), list):
        raise FormatError("solution must be an object with a 'rows' array")
    index = {s: i for i, s in enumerate(system.labels)} if system and system.labels else None
    problems: list[str] = []
    rows = []
    for i, row in enumerate(doc["rows"]):
        if not isinstance(row, list):
            problems.append(f"row {i} is not an array")
            continue
        rows.append(tuple(_element(x, index, f"row {i}", problems) for x in row))
    if problems:
        raise FormatError(problems)
    n, k = doc.get("n"), doc.get("k")
    if n is not None and n != len(rows):
        raise FormatError(f"'n' is {n} but there are {len(rows)} rows")
    if rows and len({len(r) for r in rows}) != 1:
        raise FormatError("solution rows have different lengths")
    if k is not None and rows and k != len(rows[0]):
        raise FormatError(f"'k' is {k} but rows have length {len(rows[0])}")
    return SolutionMatrix(tuple(rows), doc.get("provenance"))


def load_solution(path, system: Optional[SetSystem] = None) -> SolutionMatrix:
    return parse_solution(read_json(path), system)


# -- posets -------------------------------------------------------------------------

def poset_to_json(P: SubPoset) -> dict:
    return {"n": P.n, "members": P.as_lists()}


def parse_poset(doc: Any) -> SubPoset:
    if not isinstance(doc, dict):
        raise FormatError("poset must be a JSON object")
    n, members = doc.get("n"), doc.get("members")
    if not isinstance(n, int) or n < 0:
        raise FormatError("'n' must be a non-negative integer")
    if not isinstance(members, list) or not all(isinstance(m, list) for m in members):
        raise FormatError("'members' must be a list of element lists")
    problems = []
    for m in members:
        if not all(isinstance(e, int) and not isinstance(e, bool) and 1 <= e <= n for e in m):
            problems.append(f"member {m} has elements outside 1..{n}")
        elif len(set(m)) != len(m):
            problems.append(f"member {m} repeats an element")
    if problems:
        raise FormatError(problems)
    keys = [frozenset(m) for m in members]
    if len(set(keys)) != len(keys):
        raise FormatError("duplicate members")
    return SubPoset.from_sets(n, members)


def load_poset(path) -> SubPoset:
    return parse_poset(read_json(path))


def path_result_to_json(res) -> dict:
    from .poset import to_elements
    doc = {
        "status": res.status,
        "mode": res.mode,
        "flow": res.flow,
        "paths": [[to_elements(v) for v in p] for p in res.paths],
        "cut": [to_elements(v) for v in res.cut],
    }
    if res.fallback is not None:
        doc["fallback"] = path_result_to_json(res.fallback)
    return doc


# -- game ------------------------------------------------------------------------------

def certificate_to_json(solution) -> dict:
    from .game import _elements
    entries = []
    for (sets, offer), pick in sorted(solution.certificate.items()):
        entries.append({
            "state": [_elements(m) for m in sets],
            "offer": [list(p) for p in offer],
            "pick": list(pick),
        })
    doc = {
        "n": solution.n,
        "chooser_wins": solution.wins,
        "per_round": solution.per_round,
        "canonical_states": solution.states,
        "certificate": entries,
    }
    if solution.refutation is not None:
        doc["refutation"] = [list(p) for p in solution.refutation]
    return doc


def parse_certificate(doc: Any) -> tuple[int, dict]:
    from .game import _mask
    try:
        n = doc["n"]
        cert = {}
        for e in doc["certificate"]:
            key = (tuple(_mask(s) for s in e["state"]), tuple(tuple(p) for p in e["offer"]))
            cert[key] = tuple(e["pick"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed certificate: {exc}") from None
    return n, cert
