"""Independent reference computations used as test oracles."""

import itertools
import math

import numpy as np

from qcfix.classify import comparison_max
from qcfix.metric import SelfMap, set_dist_inf, set_dist_sup


def example_table():
    """Five points, distance 2 on {1,4} and {1,5}, 1 elsewhere (labels are 1-based)."""
    d = np.ones((5, 5))
    np.fill_diagonal(d, 0)
    for a, b in [(0, 3), (0, 4)]:
        d[a, b] = d[b, a] = 2
    return d


def shortest_paths_by_enumeration(weights):
    """All-pairs shortest paths by trying every simple path (tiny graphs only)."""
    w = np.asarray(weights, dtype=float)
    n = len(w)
    out = np.full((n, n), math.inf)
    for i in range(n):
        out[i, i] = 0.0
        for j in range(n):
            if i == j:
                continue
            others = [k for k in range(n) if k not in (i, j)]
            for r in range(len(others) + 1):
                for mid in itertools.permutations(others, r):
                    path = (i, *mid, j)
                    out[i, j] = min(out[i, j], sum(w[a, b] for a, b in zip(path, path[1:])))
    return out


def brute_minimal_q(s, T, terms, power=1):
    """Pure-python max ratio over ordered pairs, via comparison_max."""
    S = SelfMap.identity(len(T))
    for _ in range(power):
        S = SelfMap(T(v) for v in S.images)
    best = 0.0
    for x in s.points():
        for y in s.points():
            if x == y:
                continue
            num = s.d(S(x), S(y))
            if num == 0:
                continue
            den = comparison_max(s, S, terms, x, y)
            best = max(best, math.inf if den == 0 else num / den)
    return best


def brute_mv_minimal_q(s, F, five_terms=False):
    """Pure-python multi-valued modulus from the set functionals."""
    pts = list(s.points())
    F2 = [set().union(*(F(u) for u in F(x))) for x in pts]
    best = 0.0
    for x in pts:
        for y in pts:
            if x == y:
                continue
            num = set_dist_sup(s, F(x), F(y))
            if num == 0:
                continue
            terms = [
                s.d(x, y),
                set_dist_sup(s, [x], F(x)),
                set_dist_sup(s, [y], F(y)),
                set_dist_inf(s, [x], F(y)),
                set_dist_inf(s, [y], F(x)),
            ]
            if not five_terms:
                terms += [
                    set_dist_inf(s, F2[x], [x]),
                    set_dist_inf(s, F2[x], F(x)),
                    set_dist_inf(s, F2[x], [y]),
                    set_dist_inf(s, F2[x], F(y)),
                ]
            best = max(best, num / max(terms))
    return best
