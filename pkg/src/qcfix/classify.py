"""Exact minimal contraction modulus for max-type contraction conditions.

A condition is selected by a set of comparison terms.  For a map ``S`` and an
ordered pair ``(x, y)`` the terms are::

    D_XY      d(x, y)          D_T2X_X   d(S²x, x)
    D_X_TX    d(x, Sx)         D_T2X_TX  d(S²x, Sx)
    D_Y_TY    d(y, Sy)         D_T2X_Y   d(S²x, y)
    D_X_TY    d(x, Sy)         D_T2X_TY  d(S²x, Sy)
    D_Y_TX    d(y, Sx)

and the condition reads ``d(Sx, Sy) <= q * max(enabled terms)`` for every
ordered pair.  The four ``S²x`` terms only involve ``x``, so the pair order
matters.  Coefficient-sum conditions (Reich, Chatterjea) are not modeled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from qcfix.metric import FiniteMetricSpace, SelfMap, _check_compatible


class Term(enum.Flag):
    D_XY = enum.auto()
    D_X_TX = enum.auto()
    D_Y_TY = enum.auto()
    D_X_TY = enum.auto()
    D_Y_TX = enum.auto()
    D_T2X_X = enum.auto()
    D_T2X_TX = enum.auto()
    D_T2X_Y = enum.auto()
    D_T2X_TY = enum.auto()


TERM_ORDER = tuple(Term)
BANACH = Term.D_XY
KANNAN = Term.D_X_TX | Term.D_Y_TY
QUASI = Term.D_XY | Term.D_X_TX | Term.D_Y_TY | Term.D_X_TY | Term.D_Y_TX
GENERALIZED = QUASI | Term.D_T2X_X | Term.D_T2X_TX | Term.D_T2X_Y | Term.D_T2X_TY

PRESETS = {
    "banach": BANACH,
    "kannan": KANNAN,
    "quasi": QUASI,
    "generalized": GENERALIZED,
}


def terms_name(terms: Term) -> str:
    for name, preset in PRESETS.items():
        if preset == terms:
            return name
    return "custom:" + terms_mask(terms)


def terms_mask(terms: Term) -> str:
    """Nine-character 0/1 string in term order (first character is ``D_XY``)."""
    return "".join("1" if t in terms else "0" for t in TERM_ORDER)


def parse_terms(text: str) -> Term:
    """Parse a preset name or ``custom:<mask>`` with a nine-character 0/1 mask."""
    key = text.strip().lower()
    if key in PRESETS:
        return PRESETS[key]
    if key.startswith("custom:"):
        mask = key[len("custom:"):]
        if len(mask) != 9 or set(mask) - {"0", "1"}:
            raise ValueError(f"custom term mask must be nine 0/1 characters, got {mask!r}")
        terms = Term(0)
        for bit, term in zip(mask, TERM_ORDER):
            if bit == "1":
                terms |= term
        if not terms:
            raise ValueError("custom term mask enables no terms")
        return terms
    raise ValueError(
        f"unknown term set {text!r}; expected one of {sorted(PRESETS)} or custom:<mask>"
    )


def _check_terms(terms: Term) -> None:
    if not terms:
        raise ValueError("term set must be nonempty")


def _term_values(s: FiniteMetricSpace, S: SelfMap, terms: Term, x: int, y: int):
    d = s.d
    sx, sy = S(x), S(y)
    s2x = S(sx)
    values = {
        Term.D_XY: lambda: d(x, y),
        Term.D_X_TX: lambda: d(x, sx),
        Term.D_Y_TY: lambda: d(y, sy),
        Term.D_X_TY: lambda: d(x, sy),
        Term.D_Y_TX: lambda: d(y, sx),
        Term.D_T2X_X: lambda: d(s2x, x),
        Term.D_T2X_TX: lambda: d(s2x, sx),
        Term.D_T2X_Y: lambda: d(s2x, y),
        Term.D_T2X_TY: lambda: d(s2x, sy),
    }
    return [values[t]() for t in TERM_ORDER if t in terms]


def comparison_max(s: FiniteMetricSpace, T: SelfMap, terms: Term, x: int, y: int) -> float:
    """Largest enabled comparison term at the ordered pair ``(x, y)``."""
    _check_compatible(s, T)
    _check_terms(terms)
    return max(_term_values(s, T, terms, x, y))


@dataclass(frozen=True)
class ContractionReport:
    terms: Term
    power: int
    minimal_q: float
    witness: tuple[int, int] | None

    @property
    def contractive(self) -> bool:
        return self.minimal_q < 1

    @property
    def name(self) -> str:
        return terms_name(self.terms)


def _term_matrices(s: FiniteMetricSpace, S: SelfMap, terms: Term) -> list[np.ndarray]:
    """Each enabled term as an n×n array indexed by ``[x, y]``."""
    D = s.dist
    img = np.asarray(S.images)
    img2 = img[img]
    idx = np.arange(len(s))
    col = lambda v: v[:, None]  # depends on x only
    row = lambda v: v[None, :]  # depends on y only
    n = len(s)
    full = lambda a: np.broadcast_to(a, (n, n))
    builders = {
        Term.D_XY: lambda: D,
        Term.D_X_TX: lambda: full(col(D[idx, img])),
        Term.D_Y_TY: lambda: full(row(D[idx, img])),
        Term.D_X_TY: lambda: D[:, img],
        Term.D_Y_TX: lambda: D[:, img].T,
        Term.D_T2X_X: lambda: full(col(D[img2, idx])),
        Term.D_T2X_TX: lambda: full(col(D[img2, img])),
        Term.D_T2X_Y: lambda: D[img2, :],
        Term.D_T2X_TY: lambda: D[img2][:, img],
    }
    return [builders[t]() for t in TERM_ORDER if t in terms]


def ratio_table(numer: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """Elementwise ``numer / denom`` with 0/0 -> 0, x/0 -> inf and the diagonal zeroed."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = numer / denom
    ratios[numer == 0] = 0.0
    np.fill_diagonal(ratios, 0.0)
    return ratios


def argmax_pair(ratios: np.ndarray) -> tuple[float, tuple[int, int] | None]:
    """Maximum over off-diagonal entries with row-major tie-break."""
    n = ratios.shape[0]
    if n < 2:
        return 0.0, None
    masked = ratios.copy()
    np.fill_diagonal(masked, -1.0)
    flat = int(np.argmax(masked))  # first occurrence = row-major smallest
    x, y = divmod(flat, n)
    return float(masked[x, y]), (x, y)


def minimal_q(s: FiniteMetricSpace, T: SelfMap, terms: Term = GENERALIZED, power: int = 1) -> ContractionReport:
    """Smallest q for which ``T^power`` satisfies the condition selected by ``terms``.

    Every ordered pair ``x != y`` contributes ``d(Sx, Sy) / max(terms)`` with
    ``S = T^power``; pairs with zero numerator contribute 0.  A zero
    denominator under a nonzero numerator (only possible without ``D_XY``)
    gives ``inf``.
    """
    _check_compatible(s, T)
    _check_terms(terms)
    if power < 1:
        raise ValueError("power must be at least 1")
    S = T.power(power)
    img = np.asarray(S.images)
    numer = s.dist[img][:, img]
    denom = np.maximum.reduce(_term_matrices(s, S, terms))
    q, witness = argmax_pair(ratio_table(numer, np.array(denom)))
    return ContractionReport(terms=terms, power=power, minimal_q=q, witness=witness)


def classify_all(s: FiniteMetricSpace, T: SelfMap, power: int = 1) -> list[ContractionReport]:
    """Reports for BANACH, KANNAN, QUASI and GENERALIZED, in that order."""
    return [minimal_q(s, T, preset, power) for preset in PRESETS.values()]


def feasibility_check(s: FiniteMetricSpace, T: SelfMap, terms: Term, power: int, q: float):
    """Scan every ordered pair for ``d(Sx, Sy) <= q * max(terms)``.

    Returns ``(True, None)`` or ``(False, (x, y))`` with the first violating
    pair in row-major order.  Written as a plain loop on purpose: it serves as
    the independent check of :func:`minimal_q`.
    """
    _check_compatible(s, T)
    _check_terms(terms)
    S = T
    for _ in range(power - 1):
        S = T.compose(S)
    for x in s.points():
        for y in s.points():
            lhs = s.d(S(x), S(y))
            if lhs > q * max(_term_values(s, S, terms, x, y)):
                return False, (x, y)
    return True, None


def search_minimal_q(s, T, terms: Term = GENERALIZED, power: int = 1, tol: float = 1e-13) -> float:
    """Bisect on :func:`feasibility_check` for the smallest feasible q."""
    lo, hi = 0.0, 1.0
    if feasibility_check(s, T, terms, power, 0.0)[0]:
        return 0.0
    while not feasibility_check(s, T, terms, power, hi)[0]:
        lo, hi = hi, hi * 2
        if hi > 1e12:
            return math.inf
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if feasibility_check(s, T, terms, power, mid)[0]:
            hi = mid
        else:
            lo = mid
    return hi
