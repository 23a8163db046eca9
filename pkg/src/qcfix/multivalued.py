"""Multi-valued generalized quasi-contractions and their selection maps.

A point argument inside a set functional is read as the singleton, so
``rho(x, Fx)`` is ``set_dist_sup({x}, Fx)``.  ``F²`` is union composition.
The condition for an ordered pair ``x != y``::

    rho(Fx, Fy) <= q * max{d(x,y), rho(x,Fx), rho(y,Fy), D(x,Fy), D(y,Fx),
                           D(F²x,x), D(F²x,Fx), D(F²x,y), D(F²x,Fy)}

where ``D`` is the infimum and ``rho`` the supremum distance between sets.
Disabling the four ``F²`` terms gives example's five-term multi-valued condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from qcfix.classify import GENERALIZED, TERM_ORDER, Term, _check_terms, argmax_pair, ratio_table
from qcfix.metric import FiniteMetricSpace, MultiMap, SelfMap, _check_compatible
from qcfix.picard import DEFAULT_TOL, BoundCertificate, IterationTrace, iterate

DEFAULT_A = 0.5

MvOrbitTrace = IterationTrace


def compose_multimap(s: FiniteMetricSpace, F: MultiMap) -> MultiMap:
    """``F²(x)`` as the union of ``F(u)`` over ``u`` in ``F(x)``."""
    _check_compatible(s, F)
    return MultiMap(frozenset().union(*(F(u) for u in F(x))) for x in s.points())


@dataclass(frozen=True)
class MvContractionReport:
    terms: Term
    minimal_q: float
    witness: tuple[int, int] | None

    @property
    def contractive(self) -> bool:
        return self.minimal_q < 1


def _sub(D: np.ndarray, A, B) -> np.ndarray:
    return D[np.ix_(sorted(A), sorted(B))]


def mv_minimal_q(s: FiniteMetricSpace, F: MultiMap, terms: Term = GENERALIZED) -> MvContractionReport:
    """Smallest q satisfying the multi-valued condition, with row-major witness.

    Ratio conventions match :func:`qcfix.classify.minimal_q`.
    """
    _check_compatible(s, F)
    _check_terms(terms)
    D = s.dist
    n = len(s)
    F2 = compose_multimap(s, F)
    pts = list(s.points())

    numer = np.array([[_sub(D, F(x), F(y)).max() for y in pts] for x in pts])
    rho_self = np.array([_sub(D, [x], F(x)).max() for x in pts])
    inf_pt_img = np.array([[_sub(D, [x], F(y)).min() for y in pts] for x in pts])
    inf_f2_pt = np.array([[_sub(D, F2(x), [y]).min() for y in pts] for x in pts])
    inf_f2_img = np.array([[_sub(D, F2(x), F(y)).min() for y in pts] for x in pts])

    full = lambda a: np.broadcast_to(a, (n, n))
    builders = {
        Term.D_XY: lambda: D,
        Term.D_X_TX: lambda: full(rho_self[:, None]),
        Term.D_Y_TY: lambda: full(rho_self[None, :]),
        Term.D_X_TY: lambda: inf_pt_img,
        Term.D_Y_TX: lambda: inf_pt_img.T,
        Term.D_T2X_X: lambda: full(np.diag(inf_f2_pt)[:, None]),
        Term.D_T2X_TX: lambda: full(np.diag(inf_f2_img)[:, None]),
        Term.D_T2X_Y: lambda: inf_f2_pt,
        Term.D_T2X_TY: lambda: inf_f2_img,
    }
    denom = np.maximum.reduce([builders[t]() for t in TERM_ORDER if t in terms])
    q, witness = argmax_pair(ratio_table(numer, np.array(denom)))
    return MvContractionReport(terms=terms, minimal_q=q, witness=witness)


def _check_unit(name: str, value: float) -> None:
    if not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class SelectionMap:
    underlying: SelfMap
    exponent_a: float
    q: float
    source: MultiMap

    def invariant_violations(self, s: FiniteMetricSpace) -> list[int]:
        """Points where ``d(x, Tx) >= q**a * rho(x, Fx)`` fails."""
        factor = self.q**self.exponent_a
        bad = []
        for x in s.points():
            rho = max(s.d(x, u) for u in self.source(x))
            if s.d(x, self.underlying(x)) < factor * rho:
                bad.append(x)
        return bad


def build_selection(s: FiniteMetricSpace, F: MultiMap, q: float, a: float = DEFAULT_A) -> SelectionMap:
    """Pick the farthest member of each ``F(x)`` (smallest index on ties).

    The farthest point attains ``rho(x, Fx)``, so the selection inequality
    holds for every ``q`` and ``a`` in (0, 1) at once.
    """
    _check_compatible(s, F)
    _check_unit("q", q)
    _check_unit("a", a)
    images = []
    for x in s.points():
        members = sorted(F(x))
        images.append(max(members, key=lambda u: (s.d(x, u), -u)))
    return SelectionMap(SelfMap(images), a, q, F)


def mv_iterate(
    s: FiniteMetricSpace, F: MultiMap, start: int, q: float, a: float = DEFAULT_A, max_iters: int | None = None
) -> MvOrbitTrace:
    """Iterate the selection map of ``F``; the trace is an orbit of ``F``."""
    sel = build_selection(s, F, q, a)
    if max_iters is None:
        max_iters = 10 * len(s)
    trace = iterate(s, sel.underlying, start, max_iters)
    d01 = trace.residuals[0]
    return IterationTrace(trace.start, trace.steps, trace.residuals, trace.outcome, (q ** (1 - a), d01))


def mv_bound(q: float, a: float, n: int, d01: float) -> float:
    """``r**n / (1 - r) * d01`` with ``r = q**(1 - a)``."""
    _check_unit("q", q)
    _check_unit("a", a)
    if d01 < 0:
        raise ValueError("d01 must be nonnegative")
    r = q ** (1 - a)
    return r**n * d01 / (1 - r)


class MvFixedPoints(NamedTuple):
    strict: list[int]
    weak: list[int]


def mv_fixed_points(s: FiniteMetricSpace, F: MultiMap) -> MvFixedPoints:
    """Strict fixed points (``F(x) == {x}``) and weak ones (``x in F(x)``)."""
    _check_compatible(s, F)
    strict = [x for x in s.points() if F(x) == {x}]
    weak = [x for x in s.points() if x in F(x)]
    return MvFixedPoints(strict, weak)


def mv_rate_certificates(s, trace: MvOrbitTrace, x_star: int, q: float, a: float, tol: float = DEFAULT_TOL):
    d01 = s.d(trace.steps[0], trace.steps[1])
    return [
        BoundCertificate(n, mv_bound(q, a, n, d01), s.d(p, x_star), tol)
        for n, p in enumerate(trace.steps)
    ]
