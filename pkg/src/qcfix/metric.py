"""Finite metric spaces, maps on them, and the set-distance functionals.

Points are identified by index; labels are only used for display.  All
distances are float64 and every axiom check is an exact comparison, so inputs
that are "almost" metrics must be repaired with :func:`metric_closure` first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

IDENTITY = "identity of indiscernibles"
SYMMETRY = "symmetry"
TRIANGLE = "triangle inequality"

#: Weights drawn by :func:`generate_space`.
GENERATOR_WEIGHTS = tuple(range(1, 11))


class MetricError(ValueError):
    """Raised when a distance table is malformed or breaks a metric axiom."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class GenerationError(ValueError):
    """Raised when a weighted graph cannot be closed into a metric."""


@dataclass(frozen=True)
class MetricVerdict:
    valid: bool
    axiom: str | None = None
    witness: tuple[int, ...] | None = None

    def describe(self) -> str:
        if self.valid:
            return "valid"
        return f"{self.axiom} violated at {self.witness}"


def _as_table(dist_table) -> np.ndarray:
    table = np.array(dist_table, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise MetricError(f"distance table must be square, got shape {table.shape}")
    if table.shape[0] == 0:
        raise MetricError("distance table must have at least one point")
    return table


def validate_metric(dist_table) -> MetricVerdict:
    """Check the metric axioms exactly.

    Axioms are checked in the order identity, symmetry, triangle; each scan is
    row-major and the first offending pair ``(i, j)`` or triple ``(i, j, k)``
    is returned as the witness.  A triangle witness means
    ``d[i][k] > d[i][j] + d[j][k]``.
    """
    table = _as_table(dist_table)
    if not np.all(np.isfinite(table)):
        i, j = map(int, np.argwhere(~np.isfinite(table))[0])
        raise MetricError(f"non-finite distance at ({i}, {j})")
    if np.any(table < 0):
        i, j = map(int, np.argwhere(table < 0)[0])
        raise MetricError(f"negative distance at ({i}, {j})")

    n = table.shape[0]
    off_diag = ~np.eye(n, dtype=bool)
    bad = (np.diag(np.diag(table)) != 0) | (off_diag & (table == 0))
    if bad.any():
        return MetricVerdict(False, IDENTITY, tuple(map(int, np.argwhere(bad)[0])))

    bad = table != table.T
    if bad.any():
        return MetricVerdict(False, SYMMETRY, tuple(map(int, np.argwhere(bad)[0])))

    # through[i, j, k] = d[i][j] + d[j][k], compared against d[i][k]
    through = table[:, :, None] + table[None, :, :]
    bad = table[:, None, :] > through
    if bad.any():
        return MetricVerdict(False, TRIANGLE, tuple(map(int, np.argwhere(bad)[0])))
    return MetricVerdict(True)


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A labeled point set with a validated pairwise distance table."""

    labels: tuple[str, ...]
    dist: np.ndarray = field(repr=False)

    def __init__(self, dist, labels: Sequence[str] | None = None):
        table = _as_table(dist)
        verdict = validate_metric(table)
        if not verdict.valid:
            raise MetricError(f"not a metric: {verdict.describe()}", verdict)
        if labels is None:
            labels = [str(i + 1) for i in range(table.shape[0])]
        labels = tuple(str(lab) for lab in labels)
        if len(labels) != table.shape[0]:
            raise MetricError(
                f"{len(labels)} labels given for a {table.shape[0]}-point table"
            )
        table.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", table)
        # plain nested lists are much faster than numpy for scalar lookups
        object.__setattr__(self, "_rows", table.tolist())

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __hash__(self) -> int:
        return hash((self.labels, self.dist.tobytes()))

    def d(self, i: int, j: int) -> float:
        return self._rows[i][j]

    def points(self) -> range:
        return range(len(self.labels))

    def point_set(self, members: Iterable[int]) -> frozenset[int]:
        """Validate ``members`` as a nonempty set of in-range point indices."""
        members = frozenset(int(m) for m in members)
        if not members:
            raise ValueError("point set must be nonempty")
        bad = [m for m in members if not 0 <= m < len(self)]
        if bad:
            raise ValueError(f"point indices out of range: {sorted(bad)}")
        return members


@dataclass(frozen=True)
class SelfMap:
    """A total map on ``range(n)``; ``images[i]`` is the image of point ``i``."""

    images: tuple[int, ...]

    def __init__(self, images: Iterable[int]):
        images = tuple(int(v) for v in images)
        n = len(images)
        for i, v in enumerate(images):
            if not 0 <= v < n:
                raise ValueError(f"image of point {i} is {v}, outside [0, {n})")
        object.__setattr__(self, "images", images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    @classmethod
    def identity(cls, n: int) -> SelfMap:
        return cls(range(n))

    @classmethod
    def constant(cls, n: int, c: int) -> SelfMap:
        return cls([c] * n)

    def compose(self, other: SelfMap) -> SelfMap:
        """Return ``self ∘ other``."""
        return SelfMap(self.images[j] for j in other.images)

    def power(self, k: int) -> SelfMap:
        if k < 0:
            raise ValueError("power must be nonnegative")
        result = SelfMap.identity(len(self))
        for _ in range(k):
            result = self.compose(result)
        return result

    def iterate_from(self, x: int, n: int) -> int:
        for _ in range(n):
            x = self.images[x]
        return x


@dataclass(frozen=True)
class MultiMap:
    """A map from each point to a nonempty set of points."""

    images: tuple[frozenset[int], ...]

    def __init__(self, images: Iterable[Iterable[int]]):
        images = tuple(frozenset(int(v) for v in img) for img in images)
        n = len(images)
        for i, img in enumerate(images):
            if not img:
                raise ValueError(f"image of point {i} is empty")
            bad = sorted(v for v in img if not 0 <= v < n)
            if bad:
                raise ValueError(f"image of point {i} has indices outside [0, {n}): {bad}")
        object.__setattr__(self, "images", images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> frozenset[int]:
        return self.images[i]

    @classmethod
    def from_self_map(cls, T: SelfMap) -> MultiMap:
        return cls([v] for v in T.images)


@dataclass(frozen=True)
class Orbit:
    base: int
    points: tuple[int, ...]
    n: int


def _check_compatible(s: FiniteMetricSpace, T) -> None:
    if len(T) != len(s):
        raise ValueError(f"map is defined on {len(T)} points, space has {len(s)}")


def set_dist_inf(s: FiniteMetricSpace, A: Iterable[int], B: Iterable[int]) -> float:
    """Smallest distance between a point of ``A`` and a point of ``B``."""
    A, B = s.point_set(A), s.point_set(B)
    return min(s.d(a, b) for a in A for b in B)


def set_dist_sup(s: FiniteMetricSpace, A: Iterable[int], B: Iterable[int]) -> float:
    """Largest distance between a point of ``A`` and a point of ``B``."""
    A, B = s.point_set(A), s.point_set(B)
    return max(s.d(a, b) for a in A for b in B)


def diameter(s: FiniteMetricSpace, A: Iterable[int]) -> float:
    A = s.point_set(A)
    return max(s.d(a, b) for a in A for b in A)


def orbit(s: FiniteMetricSpace, T: SelfMap, x: int, n: int) -> Orbit:
    """The first ``n + 1`` iterates ``x, Tx, ..., T^n x``."""
    _check_compatible(s, T)
    if n < 0:
        raise ValueError("orbit length must be nonnegative")
    pts = [x]
    for _ in range(n):
        pts.append(T(pts[-1]))
    return Orbit(base=x, points=tuple(pts), n=n)


def _floyd_warshall(table: np.ndarray) -> np.ndarray:
    out = table.copy()
    for k in range(out.shape[0]):
        np.minimum(out, out[:, k, None] + out[None, k, :], out=out)
    return out


def metric_closure(weights, labels: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Shortest-path closure of a weighted graph.

    ``weights`` is a symmetric table with zero diagonal and positive
    off-diagonal entries; ``math.inf`` marks an absent edge.  The result is a
    valid metric as long as the graph is connected and the weights are exact
    (small integers, say).
    """
    table = np.array(weights, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise ValueError(f"weight table must be square and nonempty, got shape {table.shape}")
    if np.isnan(table).any():
        raise ValueError("weight table contains NaN")
    if np.any(np.diag(table) != 0):
        raise ValueError("weight table must have a zero diagonal")
    off = ~np.eye(table.shape[0], dtype=bool)
    if np.any(table[off] <= 0):
        raise ValueError("off-diagonal weights must be positive (use inf for absent edges)")
    if np.any(table != table.T):
        raise ValueError("weight table must be symmetric")

    closed = _floyd_warshall(table)
    if not np.all(np.isfinite(closed)):
        i, j = map(int, np.argwhere(~np.isfinite(closed))[0])
        raise GenerationError(f"graph is disconnected: no path between {i} and {j}")
    return FiniteMetricSpace(closed, labels)


def random_weight_graph(n: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """A connected weighted graph: random spanning tree plus extra edges with prob ``density``."""
    table = np.full((n, n), math.inf)
    np.fill_diagonal(table, 0.0)
    order = rng.permutation(n)
    for pos in range(1, n):
        a, b = int(order[pos]), int(order[rng.integers(pos)])
        w = float(rng.choice(GENERATOR_WEIGHTS))
        table[a, b] = table[b, a] = w
    for i in range(n):
        for j in range(i + 1, n):
            if math.isinf(table[i, j]) and rng.random() < density:
                w = float(rng.choice(GENERATOR_WEIGHTS))
                table[i, j] = table[j, i] = w
    return table


def generate_space(n: int, density: float = 0.5, seed: int = 0) -> FiniteMetricSpace:
    """Seeded random metric space on ``n`` points (deterministic in all arguments)."""
    if n < 1:
        raise ValueError("number of points must be at least 1")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    return metric_closure(random_weight_graph(n, density, rng))
