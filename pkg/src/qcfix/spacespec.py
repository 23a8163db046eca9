"""The SpaceSpec JSON file format.

A file describes a finite metric space and optionally a map on it::

    {
      "version": "1",
      "points": ["1", "2", "3"],
      "metric": {"kind": "matrix", "rows": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
      "map": {"kind": "single", "images": [0, 0, 1]}
    }

``metric`` may instead be ``{"kind": "graph", "edges": [[i, j, w], ...],
"close": true}``, which is closed into a metric by shortest paths.  A multi-valued
map is ``{"kind": "multi", "images": [[...], ...]}``.  Point references are
0-based indices.  Unknown fields are rejected.  See docs/spacespec.md.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from qcfix.metric import FiniteMetricSpace, MultiMap, SelfMap, metric_closure, validate_metric

FORMAT_VERSION = "1"
SUPPORTED_VERSIONS = {FORMAT_VERSION}


class SpecError(ValueError):
    """A SpaceSpec problem, tagged with the JSON path of the offending element."""

    def __init__(self, path: str, reason: str, verdict=None):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
        self.verdict = verdict


@dataclass(frozen=True)
class MatrixMetric:
    rows: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class GraphMetric:
    edges: tuple[tuple[int, int, float], ...]
    close: bool = True


@dataclass(frozen=True)
class SingleMapSpec:
    images: tuple[int, ...]


@dataclass(frozen=True)
class MultiMapSpec:
    images: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SpaceSpec:
    version: str
    points: tuple[str, ...]
    metric: MatrixMetric | GraphMetric
    map: SingleMapSpec | MultiMapSpec | None = None

    def space(self) -> FiniteMetricSpace:
        return _build_space(self.points, self.metric)

    def self_map(self) -> SelfMap | None:
        if isinstance(self.map, SingleMapSpec):
            return SelfMap(self.map.images)
        return None

    def multi_map(self) -> MultiMap | None:
        """The multi-valued map, wrapping a single-valued one as singletons."""
        if isinstance(self.map, MultiMapSpec):
            return MultiMap(self.map.images)
        if isinstance(self.map, SingleMapSpec):
            return MultiMap.from_self_map(SelfMap(self.map.images))
        return None

    @classmethod
    def from_objects(cls, space: FiniteMetricSpace, T: SelfMap | MultiMap | None = None) -> SpaceSpec:
        rows = tuple(tuple(float(v) for v in row) for row in space.dist.tolist())
        if isinstance(T, SelfMap):
            mapping = SingleMapSpec(T.images)
        elif isinstance(T, MultiMap):
            mapping = MultiMapSpec(tuple(tuple(sorted(img)) for img in T.images))
        else:
            mapping = None
        return cls(FORMAT_VERSION, space.labels, MatrixMetric(rows), mapping)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_index(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _expect_keys(obj, path: str, required: set[str], optional: set[str] = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise SpecError(path, "must be an object")
    for key in sorted(obj):
        if key not in required | optional:
            raise SpecError(f"{path}.{key}" if path else key, "unknown field")
    for key in sorted(required):
        if key not in obj:
            raise SpecError(f"{path}.{key}" if path else key, "missing required field")


def _expect_list(obj, path: str, nonempty: bool = False) -> list:
    if not isinstance(obj, list):
        raise SpecError(path, "must be a list")
    if nonempty and not obj:
        raise SpecError(path, "must be nonempty")
    return obj


def _parse_metric(obj, n: int) -> MatrixMetric | GraphMetric:
    if not isinstance(obj, dict):
        raise SpecError("metric", "must be an object")
    kind = obj.get("kind")
    if kind == "matrix":
        _expect_keys(obj, "metric", {"kind", "rows"})
        rows = _expect_list(obj["rows"], "metric.rows")
        if len(rows) != n:
            raise SpecError("metric.rows", f"has {len(rows)} rows, expected {n} (one per point)")
        parsed = []
        for i, row in enumerate(rows):
            row = _expect_list(row, f"metric.rows[{i}]")
            if len(row) != n:
                raise SpecError(f"metric.rows[{i}]", f"has {len(row)} entries, expected {n}")
            for j, v in enumerate(row):
                if not _is_number(v) or not math.isfinite(v):
                    raise SpecError(f"metric.rows[{i}][{j}]", "must be a finite number")
                if v < 0:
                    raise SpecError(f"metric.rows[{i}][{j}]", "must be nonnegative")
            parsed.append(tuple(float(v) for v in row))
        return MatrixMetric(tuple(parsed))
    if kind == "graph":
        _expect_keys(obj, "metric", {"kind", "edges", "close"})
        if not isinstance(obj["close"], bool):
            raise SpecError("metric.close", "must be true or false")
        edges = []
        seen = {}
        for e, edge in enumerate(_expect_list(obj["edges"], "metric.edges")):
            path = f"metric.edges[{e}]"
            if not isinstance(edge, list) or len(edge) != 3:
                raise SpecError(path, "must be a list [i, j, weight]")
            i, j, w = edge
            for name, v in (("i", i), ("j", j)):
                if not _is_index(v) or not 0 <= v < n:
                    raise SpecError(path, f"endpoint {name}={v!r} is not a point index in [0, {n})")
            if i == j:
                raise SpecError(path, "self-loops are not allowed")
            if not _is_number(w) or not math.isfinite(w) or w <= 0:
                raise SpecError(path, "weight must be a positive finite number")
            key = (min(i, j), max(i, j))
            if key in seen and seen[key] != float(w):
                raise SpecError(path, f"conflicting weight for edge {key}")
            seen[key] = float(w)
            edges.append((i, j, float(w)))
        return GraphMetric(tuple(edges), obj["close"])
    raise SpecError("metric.kind", f"must be 'matrix' or 'graph', got {kind!r}")


def _parse_map(obj, n: int) -> SingleMapSpec | MultiMapSpec:
    if not isinstance(obj, dict):
        raise SpecError("map", "must be an object")
    kind = obj.get("kind")
    if kind not in ("single", "multi"):
        raise SpecError("map.kind", f"must be 'single' or 'multi', got {kind!r}")
    _expect_keys(obj, "map", {"kind", "images"})
    images = _expect_list(obj["images"], "map.images")
    if len(images) != n:
        raise SpecError("map.images", f"has {len(images)} entries, expected {n} (one per point)")
    if kind == "single":
        for i, v in enumerate(images):
            if not _is_index(v) or not 0 <= v < n:
                raise SpecError(f"map.images[{i}]", f"{v!r} is not a point index in [0, {n})")
        return SingleMapSpec(tuple(images))
    parsed = []
    for i, img in enumerate(images):
        img = _expect_list(img, f"map.images[{i}]", nonempty=True)
        for v in img:
            if not _is_index(v) or not 0 <= v < n:
                raise SpecError(f"map.images[{i}]", f"{v!r} is not a point index in [0, {n})")
        if len(set(img)) != len(img):
            raise SpecError(f"map.images[{i}]", "contains duplicate indices")
        parsed.append(tuple(sorted(img)))
    return MultiMapSpec(tuple(parsed))


def _graph_table(n: int, metric: GraphMetric) -> np.ndarray:
    table = np.full((n, n), math.inf)
    np.fill_diagonal(table, 0.0)
    for i, j, w in metric.edges:
        table[i, j] = table[j, i] = w
    return table


def _build_space(points, metric) -> FiniteMetricSpace:
    n = len(points)
    if isinstance(metric, MatrixMetric):
        verdict = validate_metric(metric.rows)
        if not verdict.valid:
            raise SpecError("metric.rows", f"not a metric: {verdict.describe()}", verdict)
        return FiniteMetricSpace(metric.rows, points)
    table = _graph_table(n, metric)
    if metric.close:
        try:
            return metric_closure(table, points)
        except ValueError as exc:
            raise SpecError("metric.edges", str(exc)) from exc
    if not np.all(np.isfinite(table)):
        i, j = map(int, np.argwhere(~np.isfinite(table))[0])
        raise SpecError("metric.edges", f"no edge between {i} and {j} and close is false")
    verdict = validate_metric(table)
    if not verdict.valid:
        raise SpecError("metric.edges", f"not a metric: {verdict.describe()}", verdict)
    return FiniteMetricSpace(table, points)


def parse_space_spec(text: str) -> SpaceSpec:
    """Parse and fully validate SpaceSpec text; raise :class:`SpecError` on any problem."""
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SpecError("<document>", f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    _expect_keys(obj, "", {"version", "points", "metric"}, {"map"})
    version = obj["version"]
    if not isinstance(version, str):
        raise SpecError("version", "must be a string")
    if version not in SUPPORTED_VERSIONS:
        raise SpecError("version", f"unsupported version {version!r}; supported: {sorted(SUPPORTED_VERSIONS)}")
    points = _expect_list(obj["points"], "points", nonempty=True)
    for i, label in enumerate(points):
        if not isinstance(label, str):
            raise SpecError(f"points[{i}]", "label must be a string")
    n = len(points)
    metric = _parse_metric(obj["metric"], n)
    mapping = _parse_map(obj["map"], n) if "map" in obj else None
    spec = SpaceSpec(version, tuple(points), metric, mapping)
    spec.space()  # full metric validation (and closure for graphs)
    return spec


def _reject_constant(name):
    raise SpecError("<document>", f"non-finite number {name} is not allowed")


def spec_to_obj(spec: SpaceSpec) -> dict:
    obj = {"version": spec.version, "points": list(spec.points)}
    if isinstance(spec.metric, MatrixMetric):
        obj["metric"] = {"kind": "matrix", "rows": [list(r) for r in spec.metric.rows]}
    else:
        obj["metric"] = {
            "kind": "graph",
            "edges": [list(e) for e in spec.metric.edges],
            "close": spec.metric.close,
        }
    if isinstance(spec.map, SingleMapSpec):
        obj["map"] = {"kind": "single", "images": list(spec.map.images)}
    elif isinstance(spec.map, MultiMapSpec):
        obj["map"] = {"kind": "multi", "images": [list(img) for img in spec.map.images]}
    return obj


def emit_space_spec(spec: SpaceSpec) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(spec_to_obj(spec), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def bundled_fixture(name: str) -> str:
    """Text of a fixture shipped in ``qcfix/data``."""
    return resources.files("qcfix").joinpath("data", name).read_text(encoding="utf-8")


def load_space_spec(path) -> SpaceSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_space_spec(fh.read())
