import itertools

from hypothesis import strategies as st

from kellerkit.core import SetSystem, is_regular


@st.composite
def set_systems(draw, n=st.integers(1, 4), k=st.integers(0, 5), extra=st.integers(0, 3)):
    """Valid (n, k)-systems over a small alphabet {0..n+extra-1}."""
    n = draw(n)
    k = draw(k)
    size = n + draw(extra)
    cell = st.sets(st.integers(0, size - 1), min_size=n, max_size=size).map(frozenset)
    rows = draw(st.lists(st.lists(cell, min_size=k, max_size=k), min_size=n, max_size=n))
    return SetSystem.from_lists(rows)


def regular_representatives(row):
    """All regular representatives of a row, by brute force."""
    for seq in itertools.product(*(sorted(s) for s in row)):
        if is_regular(seq, row):
            yield seq
