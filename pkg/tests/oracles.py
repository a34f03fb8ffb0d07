"""Reference implementations shared by the unit and acceptance tests.
Written separately from the package code they check."""

from fractions import Fraction
from itertools import combinations


def second_enumerator(graph):
    """Plain min over itertools.combinations with set-based boundaries.
    Ties go to the lexicographically smallest sorted vertex tuple."""
    vs = sorted(graph.vertices)
    best = None
    for k in range(1, len(vs) // 2 + 1):
        for s in combinations(vs, k):
            inside = set(s)
            out = set()
            for u in s:
                out.update(v for v in graph.neighbors(u) if v not in inside)
            value = Fraction(len(out), k)
            if best is None or (value, s) < best:
                best = (value, s)
    return best[0], frozenset(best[1])
