"""Marked multi-type point patterns: data model, loading and preprocessing."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from .errors import PatternError


class MarkedPoint(NamedTuple):
    x: float
    y: float
    type_id: int
    mark: float


class TypeInfo(NamedTuple):
    name: str
    count: int
    mark_mean: float


@dataclass(frozen=True)
class Window:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x_min, self.x_max, self.y_min, self.y_max)):
            raise PatternError("window bounds must be finite")
        if self.lx <= 0 or self.ly <= 0:
            raise PatternError(
                f"window has zero or negative area: [{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"
            )

    @property
    def lx(self) -> float:
        return self.x_max - self.x_min

    @property
    def ly(self) -> float:
        return self.y_max - self.y_min

    @classmethod
    def unit(cls) -> "Window":
        return cls(0.0, 1.0, 0.0, 1.0)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MarkedPointPattern:
    """Typed, marked locations observed in a rectangular window.

    Point data are held column-wise. ``type_ids`` index into ``type_names``;
    ``mark_means`` holds the per-type mean of the marks as first loaded, and
    survives demeaning so the original level stays recoverable.
    """

    x: np.ndarray
    y: np.ndarray
    type_ids: np.ndarray
    marks: np.ndarray
    window: Window
    type_names: tuple[str, ...]
    mark_means: tuple[float, ...] = field(default=())
    rescaled: bool = False
    demeaned: bool = False

    def __post_init__(self):
        x = _frozen(self.x, float)
        y = _frozen(self.y, float)
        t = _frozen(self.type_ids, np.int64)
        m = _frozen(self.marks, float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "type_ids", t)
        object.__setattr__(self, "marks", m)
        object.__setattr__(self, "type_names", tuple(str(n) for n in self.type_names))

        if not (x.ndim == y.ndim == t.ndim == m.ndim == 1) or not (len(x) == len(y) == len(t) == len(m)):
            raise PatternError("x, y, type_ids and marks must be 1-D arrays of equal length")
        if len(x) == 0:
            raise PatternError("pattern has no points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(m))):
            raise PatternError("coordinates and marks must be finite")
        d = len(self.type_names)
        if d == 0 or t.min() < 0 or t.max() >= d:
            raise PatternError("type_ids must index into type_names")
        if len(set(self.type_names)) != d:
            raise PatternError("type names must be unique")
        outside = ~self.window.contains(x, y)
        if outside.any():
            k = int(np.flatnonzero(outside)[0])
            raise PatternError(f"point {k} at ({x[k]}, {y[k]}) lies outside the window")
        if np.any(self.counts == 0):
            empty = [self.type_names[i] for i in np.flatnonzero(self.counts == 0)]
            raise PatternError(f"registered types without points: {empty}")
        if not self.mark_means:
            object.__setattr__(self, "mark_means", tuple(float(v) for v in self._type_means()))
        elif len(self.mark_means) != d:
            raise PatternError("mark_means must have one entry per type")

    @property
    def d(self) -> int:
        return len(self.type_names)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.type_ids, minlength=len(self.type_names))

    @property
    def types(self) -> list[TypeInfo]:
        return [TypeInfo(name, int(c), mu) for name, c, mu in zip(self.type_names, self.counts, self.mark_means)]

    @property
    def points(self) -> list[MarkedPoint]:
        return [
            MarkedPoint(float(a), float(b), int(c), float(e))
            for a, b, c, e in zip(self.x, self.y, self.type_ids, self.marks)
        ]

    def _type_means(self) -> np.ndarray:
        sums = np.bincount(self.type_ids, weights=self.marks, minlength=self.d)
        return sums / self.counts

    def select(self, type_id: int) -> np.ndarray:
        """Boolean mask of the points carrying ``type_id``."""
        return self.type_ids == type_id

    def with_marks(self, marks: np.ndarray) -> "MarkedPointPattern":
        return replace(self, marks=marks)


def from_arrays(
    x: Sequence[float],
    y: Sequence[float],
    types: Sequence[str],
    marks: Sequence[float],
    window: Window | None = None,
) -> MarkedPointPattern:
    """Build a pattern from parallel columns; type ids follow first appearance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    names: dict[str, int] = {}
    ids = np.array([names.setdefault(str(t), len(names)) for t in types], dtype=np.int64)
    if window is None:
        if len(x) == 0:
            raise PatternError("pattern has no points")
        window = Window(float(x.min()), float(x.max()), float(y.min()), float(y.max()))
    pattern = MarkedPointPattern(x, y, ids, marks, window, tuple(names))
    _warn_duplicates(pattern)
    return pattern


def _warn_duplicates(pattern: MarkedPointPattern) -> None:
    xy = np.stack([pattern.x, pattern.y], axis=1)
    n_unique = len(np.unique(xy, axis=0))
    if n_unique < pattern.n:
        warnings.warn(f"{pattern.n - n_unique} duplicate point locations", stacklevel=3)


@dataclass(frozen=True)
class ColumnSchema:
    x: str = "x"
    y: str = "y"
    type: str = "type"
    mark: str = "mark"
    delimiter: str = ","


def load_pattern(
    source: TextIO | str,
    schema: ColumnSchema = ColumnSchema(),
    window: Window | None = None,
) -> MarkedPointPattern:
    """Read a delimited table with a header row into a pattern.

    ``source`` is an open text stream or a path. Without ``window`` the tight
    bounding box of the data is used.
    """
    if isinstance(source, str):
        with open(source, newline="", encoding="utf-8") as fh:
            return load_pattern(fh, schema, window)

    reader = csv.DictReader(source, delimiter=schema.delimiter)
    if reader.fieldnames is None:
        raise PatternError("input is empty")
    wanted = {"x": schema.x, "y": schema.y, "type": schema.type, "mark": schema.mark}
    missing = [col for col in wanted.values() if col not in reader.fieldnames]
    if missing:
        raise PatternError(f"missing columns {missing}; header has {reader.fieldnames}")

    xs, ys, ts, ms = [], [], [], []
    # line 1 is the header
    for line, row in enumerate(reader, start=2):
        vals = []
        for key in ("x", "y", "mark"):
            raw = row[wanted[key]]
            try:
                v = float(raw)
            except (TypeError, ValueError):
                raise PatternError(f"row {line}: non-numeric {key} value {raw!r}") from None
            if not math.isfinite(v):
                raise PatternError(f"row {line}: non-finite {key} value {raw!r}")
            vals.append(v)
        label = row[wanted["type"]]
        if label is None or label == "":
            raise PatternError(f"row {line}: missing type label")
        xs.append(vals[0])
        ys.append(vals[1])
        ms.append(vals[2])
        ts.append(label)
    if not xs:
        raise PatternError("input has a header but no data rows")
    return from_arrays(xs, ys, ts, ms, window=window)


def write_pattern(pattern: MarkedPointPattern, sink: TextIO, schema: ColumnSchema = ColumnSchema()) -> None:
    """Write ``pattern`` in the format ``load_pattern`` reads."""
    w = csv.writer(sink, delimiter=schema.delimiter, lineterminator="\n")
    w.writerow([schema.x, schema.y, schema.type, schema.mark])
    names = pattern.type_names
    for a, b, t, m in zip(pattern.x.tolist(), pattern.y.tolist(), pattern.type_ids.tolist(), pattern.marks.tolist()):
        w.writerow([repr(a), repr(b), names[t], repr(m)])


def dumps_pattern(pattern: MarkedPointPattern, schema: ColumnSchema = ColumnSchema()) -> str:
    buf = io.StringIO()
    write_pattern(pattern, buf, schema)
    return buf.getvalue()


def rescale_to_unit_square(pattern: MarkedPointPattern) -> MarkedPointPattern:
    """Map the shared window affinely onto [0, 1]^2."""
    w = pattern.window
    if (w.x_min, w.x_max, w.y_min, w.y_max) == (0.0, 1.0, 0.0, 1.0):
        return replace(pattern, rescaled=True)
    x = (pattern.x - w.x_min) / w.lx
    y = (pattern.y - w.y_min) / w.ly
    # guard against 1 + ulp after division
    x = np.clip(x, 0.0, 1.0)
    y = np.clip(y, 0.0, 1.0)
    return replace(pattern, x=x, y=y, window=Window.unit(), rescaled=True)


def demean_marks(pattern: MarkedPointPattern) -> MarkedPointPattern:
    """Subtract each type's mean mark. The original means stay in ``mark_means``."""
    if pattern.demeaned:
        return pattern
    means = pattern._type_means()
    return replace(pattern, marks=pattern.marks - means[pattern.type_ids], demeaned=True)


def filter_min_count(pattern: MarkedPointPattern, min_n: int) -> tuple[MarkedPointPattern, list[str]]:
    """Drop types with fewer than ``min_n`` points and reindex the survivors densely."""
    if min_n < 1:
        raise PatternError("min_n must be at least 1")
    counts = pattern.counts
    keep = np.flatnonzero(counts >= min_n)
    dropped = [pattern.type_names[i] for i in np.flatnonzero(counts < min_n)]
    if len(keep) == 0:
        raise PatternError(f"no type has at least {min_n} points")
    if not dropped:
        return pattern, []
    remap = np.full(pattern.d, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    mask = remap[pattern.type_ids] >= 0
    out = replace(
        pattern,
        x=pattern.x[mask],
        y=pattern.y[mask],
        type_ids=remap[pattern.type_ids[mask]],
        marks=pattern.marks[mask],
        type_names=tuple(pattern.type_names[i] for i in keep),
        mark_means=tuple(pattern.mark_means[i] for i in keep),
    )
    return out, dropped


def permute_types(pattern: MarkedPointPattern, order: Iterable[int]) -> MarkedPointPattern:
    """Relabel types so that new type ``k`` is old type ``order[k]``."""
    order = list(order)
    if sorted(order) != list(range(pattern.d)):
        raise PatternError("order must be a permutation of the type ids")
    inverse = np.empty(pattern.d, dtype=np.int64)
    inverse[order] = np.arange(pattern.d)
    return replace(
        pattern,
        type_ids=inverse[pattern.type_ids],
        type_names=tuple(pattern.type_names[i] for i in order),
        mark_means=tuple(pattern.mark_means[i] for i in order),
    )
