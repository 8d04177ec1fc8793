"""One row of the poset survey report (kept top-level so worker
processes can import it)."""

from __future__ import annotations

from .poset import (
    check_lemma,
    check_paths,
    check_proposition,
    disjoint_full_paths,
    gen_branching,
)


def survey_one(job) -> dict:
    n, seed, density = job
    P = gen_branching(n, seed, density)
    lemma = check_lemma(P)
    prop = check_proposition(P)
    paths = disjoint_full_paths(P, "leaf")
    flow_ok = paths.status == "paths" and not check_paths(P, paths.paths, "leaf")
    low = min(prop.charges.values())
    return {
        "n": n,
        "seed": seed,
        "density": f"{density:.1f}",
        "members": len(P),
        "leaves": prop.leaves,
        "height_levels": lemma.height_levels,
        "min_charge": f"{low.numerator}/{low.denominator}",
        "lemma": bool(lemma.holds),
        "proposition": bool(prop.holds),
        "leaf_flow": paths.flow if flow_ok else -1,
    }
