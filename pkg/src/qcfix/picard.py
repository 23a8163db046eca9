"""Picard iteration on finite spaces and the rate guarantees that go with it.

Every bound here is checked against the actual iterates, so each helper
returns :class:`BoundCertificate` objects rather than bare booleans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from qcfix.metric import FiniteMetricSpace, SelfMap, _check_compatible, diameter, orbit

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FixedPointFound:
    point: int
    steps: int


@dataclass(frozen=True)
class CycleDetected:
    cycle: tuple[int, ...]


@dataclass(frozen=True)
class MaxItersExceeded:
    pass


@dataclass(frozen=True)
class IterationTrace:
    start: int
    steps: tuple[int, ...]
    residuals: tuple[float, ...]
    outcome: FixedPointFound | CycleDetected | MaxItersExceeded
    bound_params: tuple[float, float] | None = None

    @property
    def converged(self) -> bool:
        return isinstance(self.outcome, FixedPointFound)


@dataclass(frozen=True)
class BoundCertificate:
    n: int
    bound_value: float
    actual_distance: float
    tolerance: float = 0.0
    m: int | None = None
    holds: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "holds", self.actual_distance <= self.bound_value + self.tolerance)


def iterate(s: FiniteMetricSpace, T: SelfMap, start: int, max_iters: int, q: float | None = None) -> IterationTrace:
    """Apply ``T`` from ``start`` until a fixed point, a cycle, or ``max_iters`` applications.

    ``steps`` ends with the point that triggered termination, so a fixed point
    shows up twice (``[4, 2, 1, 1]``) and a cycle ends on its first revisited
    point.  With ``max_iters >= len(s)`` the outcome is never MaxItersExceeded.
    """
    _check_compatible(s, T)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    steps = [start]
    residuals = []
    seen = {start: 0}
    outcome = MaxItersExceeded()
    for _ in range(max_iters):
        cur = steps[-1]
        nxt = T(cur)
        steps.append(nxt)
        residuals.append(s.d(cur, nxt))
        if nxt == cur:
            outcome = FixedPointFound(cur, len(steps) - 2)
            break
        if nxt in seen:
            outcome = CycleDetected(tuple(steps[seen[nxt]:-1]))
            break
        seen[nxt] = len(steps) - 1
    params = None if q is None else (q, s.d(start, T(start)))
    return IterationTrace(start, tuple(steps), tuple(residuals), outcome, params)


def find_fixed_points(s: FiniteMetricSpace, T: SelfMap) -> list[int]:
    _check_compatible(s, T)
    return [x for x in s.points() if T(x) == x]


def _check_q(q: float) -> None:
    if not 0 <= q < 1:
        raise ValueError(f"q must lie in [0, 1), got {q}")


def a_priori_bound(q: float, n: int, d0: float) -> float:
    """``q**n / (1 - q) * d0``: distance of the n-th iterate from the fixed point."""
    _check_q(q)
    if d0 < 0:
        raise ValueError("d0 must be nonnegative")
    return q**n * d0 / (1 - q)


def power_bound(q: float, k: int, n: int, base_gaps) -> float:
    """Rate bound when only ``T^k`` is contractive.

    ``base_gaps[i]`` is ``d(T^i x, T^(i+k) x)`` for ``i < k``; the bound is
    ``q**(n // k) / (1 - q) * max(base_gaps)``.
    """
    _check_q(q)
    base_gaps = list(base_gaps)
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(base_gaps) != k:
        raise ValueError(f"expected {k} base gaps, got {len(base_gaps)}")
    return q ** (n // k) * max(base_gaps) / (1 - q)


def base_gaps(s: FiniteMetricSpace, T: SelfMap, x: int, k: int) -> list[float]:
    pts = orbit(s, T, x, 2 * k - 1).points
    return [s.d(pts[i], pts[i + k]) for i in range(k)]


def rate_certificates(
    s: FiniteMetricSpace,
    T: SelfMap,
    x: int,
    x_star: int,
    q: float,
    horizon: int,
    power: int = 1,
    tol: float = DEFAULT_TOL,
) -> list[BoundCertificate]:
    """Check ``d(T^n x, x*)`` against the a-priori (``power == 1``) or power bound for ``n <= horizon``."""
    _check_compatible(s, T)
    pts = orbit(s, T, x, horizon).points
    if power == 1:
        d0 = s.d(x, T(x))
        bound = lambda n: a_priori_bound(q, n, d0)
    else:
        gaps = base_gaps(s, T, x, power)
        bound = lambda n: power_bound(q, power, n, gaps)
    return [
        BoundCertificate(n, bound(n), s.d(pts[n], x_star), tol)
        for n in range(horizon + 1)
    ]


def orbit_diameter_bound_check(
    s: FiniteMetricSpace, T: SelfMap, x: int, n: int, q: float, tol: float = DEFAULT_TOL
) -> BoundCertificate:
    """Orbit diameter of ``x, ..., T^n x`` against ``d(x, Tx) / (1 - q)``."""
    _check_q(q)
    delta = diameter(s, orbit(s, T, x, n).points)
    return BoundCertificate(n, s.d(x, T(x)) / (1 - q), delta, tol)


def diameter_witness(s: FiniteMetricSpace, T: SelfMap, x: int, n: int) -> int | None:
    """Smallest ``k <= n`` with ``d(x, T^k x)`` equal to the orbit diameter, or None.

    For a contractive map the orbit diameter is always attained at the base
    point; otherwise there may be no such ``k``.
    """
    pts = orbit(s, T, x, n).points
    delta = diameter(s, pts)
    for k, p in enumerate(pts):
        if s.d(x, p) == delta:
            return k
    return None


def cauchy_estimate_check(
    s: FiniteMetricSpace, T: SelfMap, x: int, q: float, horizon: int, tol: float = DEFAULT_TOL
) -> list[BoundCertificate]:
    """``d(T^n x, T^m x) <= q**n / (1 - q) * d(x, Tx)`` for all ``1 <= n < m <= horizon``."""
    pts = orbit(s, T, x, horizon).points
    d0 = s.d(x, T(x))
    certs = []
    for n in range(1, horizon + 1):
        bound = a_priori_bound(q, n, d0)
        for m in range(n + 1, horizon + 1):
            certs.append(BoundCertificate(n, bound, s.d(pts[n], pts[m]), tol, m=m))
    return certs
