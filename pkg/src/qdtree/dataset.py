"""Tabular training data with categorical and real-valued attributes.

Schema file grammar (one directive per line, ``#`` starts a comment)::

    dataset <name>                          optional, defaults to the file stem
    attribute <name> categorical <label>+   categories in domain order
    attribute <name> real
    class <name> <label>+                   class column, at its position in the row

Directives appear in data-column order, so the position of the ``class`` line
among the ``attribute`` lines is the position of the class column in each
record. Names and labels are whitespace-free tokens without commas.

Data files are comma-separated, one record per line, no header.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

CATEGORICAL = "categorical"
REAL = "real"


class SchemaError(ValueError):
    """Raised for malformed schema files."""


class DataError(ValueError):
    """Raised for data rows that do not match their schema."""


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: str
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, REAL):
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == REAL and self.categories:
            raise SchemaError(f"real attribute {self.name!r} cannot list categories")
        if self.kind == CATEGORICAL:
            if not self.categories:
                raise SchemaError(f"categorical attribute {self.name!r} has no categories")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"attribute {self.name!r}: duplicate category labels")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    @property
    def size(self) -> int:
        """Domain size T for categorical attributes, 0 for real ones."""
        return len(self.categories)


@dataclass(frozen=True)
class Schema:
    """Attribute schemas plus the class column, in data-file column order."""

    attributes: tuple[AttributeSchema, ...]
    class_name: str
    class_labels: tuple[str, ...]
    class_position: int
    name: str = "dataset"

    def __post_init__(self):
        names = [a.name for a in self.attributes] + [self.class_name]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate attribute names")
        if not self.class_labels:
            raise SchemaError("class column has no labels")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise SchemaError("duplicate class labels")
        if not 0 <= self.class_position <= len(self.attributes):
            raise SchemaError("class position out of range")

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"dataset {self.name}"]
        class_line = "class " + " ".join((self.class_name,) + self.class_labels)
        for i, a in enumerate(self.attributes):
            if i == self.class_position:
                lines.append(class_line)
            if a.is_categorical:
                lines.append(" ".join(("attribute", a.name, a.kind) + a.categories))
            else:
                lines.append(f"attribute {a.name} {a.kind}")
        if self.class_position == len(self.attributes):
            lines.append(class_line)
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        """Hash of everything except the dataset name; equal iff trees are comparable."""
        body = self.to_text().split("\n", 1)[1]
        return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]


def parse_schema(text: str, default_name: str = "dataset") -> Schema:
    name = default_name
    attributes: list[AttributeSchema] = []
    class_decl = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if tokens[0] == "dataset" and len(tokens) == 2:
                name = tokens[1]
            elif tokens[0] == "attribute" and len(tokens) >= 3:
                attributes.append(AttributeSchema(tokens[1], tokens[2], tuple(tokens[3:])))
            elif tokens[0] == "class" and len(tokens) >= 2:
                if class_decl is not None:
                    raise SchemaError("more than one class declaration")
                class_decl = (tokens[1], tuple(tokens[2:]), len(attributes))
            else:
                raise SchemaError(f"unrecognised directive {raw.strip()!r}")
        except SchemaError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None
    if class_decl is None:
        raise SchemaError("no class declaration")
    cname, labels, pos = class_decl
    return Schema(tuple(attributes), cname, labels, pos, name)


def load_schema(path: str | Path) -> Schema:
    path = Path(path)
    return parse_schema(path.read_text(encoding="utf-8"), default_name=path.stem)


def _parse_real(token: str) -> float:
    value = float(token)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {token!r}")
    return value


def parse_records(lines: Sequence[str], schema: Schema, with_class: bool = True):
    """Parse data lines into per-attribute columns and (optionally) class indices.

    Returns ``(columns, classes)``; ``classes`` is None when ``with_class`` is False.
    When ``with_class`` is False, lines may carry either d cells or d + 1 cells
    (in which case the class cell is ignored).
    """
    d = len(schema.attributes)
    lookups = [
        {label: i for i, label in enumerate(a.categories)} if a.is_categorical else None
        for a in schema.attributes
    ]
    class_lookup = {label: i for i, label in enumerate(schema.class_labels)}
    cols: list[list] = [[] for _ in range(d)]
    classes: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) == d + 1:
            cls_cell = cells.pop(schema.class_position)
        elif len(cells) == d and not with_class:
            cls_cell = None
        else:
            raise DataError(f"row {lineno}: expected {d + 1} cells, got {len(cells)}")
        if with_class:
            if cls_cell not in class_lookup:
                raise DataError(f"row {lineno}: unknown class label {cls_cell!r}")
            classes.append(class_lookup[cls_cell])
        for j, cell in enumerate(cells):
            lookup = lookups[j]
            if lookup is not None:
                if cell not in lookup:
                    raise DataError(
                        f"row {lineno}: unknown category {cell!r} "
                        f"for attribute {schema.attributes[j].name!r}"
                    )
                cols[j].append(lookup[cell])
            else:
                try:
                    cols[j].append(_parse_real(cell))
                except ValueError as exc:
                    raise DataError(f"row {lineno}: attribute {schema.attributes[j].name!r}: {exc}") from None
    columns = []
    for a, col in zip(schema.attributes, cols):
        dtype = np.int32 if a.is_categorical else np.float64
        arr = np.asarray(col, dtype=dtype)
        arr.flags.writeable = False
        columns.append(arr)
    if not with_class:
        return columns, None
    y = np.asarray(classes, dtype=np.int32)
    y.flags.writeable = False
    return columns, y


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable training data: one numpy column per attribute plus class indices."""

    schema: Schema
    columns: tuple[np.ndarray, ...]
    y: np.ndarray

    def __post_init__(self):
        if len(self.columns) != len(self.schema.attributes):
            raise DataError("column count does not match schema")
        n = len(self.y)
        if n < 1:
            raise DataError("dataset has no rows")
        for a, col in zip(self.schema.attributes, self.columns):
            if len(col) != n:
                raise DataError(f"column {a.name!r} has wrong length")
            if a.is_categorical and (col.min() < 0 or col.max() >= a.size):
                raise DataError(f"column {a.name!r} has out-of-range category index")
        if self.y.min() < 0 or self.y.max() >= self.schema.n_classes:
            raise DataError("class index out of range")

    @property
    def attributes(self) -> tuple[AttributeSchema, ...]:
        return self.schema.attributes

    @property
    def n_rows(self) -> int:
        return len(self.y)

    @property
    def n_classes(self) -> int:
        return self.schema.n_classes

    def row(self, i: int) -> list:
        return [col[i].item() for col in self.columns]

    def to_csv(self) -> str:
        out = []
        for i in range(self.n_rows):
            cells = [
                a.categories[col[i]] if a.is_categorical else repr(float(col[i]))
                for a, col in zip(self.attributes, self.columns)
            ]
            cells.insert(self.schema.class_position, self.schema.class_labels[self.y[i]])
            out.append(",".join(cells))
        return "\n".join(out) + "\n"


def parse_csv(text: str, schema: Schema) -> Dataset:
    columns, y = parse_records(text.splitlines(), schema)
    return Dataset(schema, tuple(columns), y)


def load_csv(path: str | Path, schema: Schema) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        columns, y = parse_records(fh.readlines(), schema)
    return Dataset(schema, tuple(columns), y)


@dataclass(frozen=True, eq=False)
class SubsetView:
    """A subset of a dataset's rows, held as sorted row indices."""

    dataset: Dataset
    indices: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def y(self) -> np.ndarray:
        return self.dataset.y[self.indices]

    def column(self, attr: int) -> np.ndarray:
        return self.dataset.columns[attr][self.indices]


def full_view(dataset: Dataset) -> SubsetView:
    return SubsetView(dataset, np.arange(dataset.n_rows, dtype=np.int64))


def _require_kind(view: SubsetView, attr: int, categorical: bool) -> AttributeSchema:
    a = view.dataset.attributes[attr]
    if a.is_categorical != categorical:
        raise TypeError(f"attribute {a.name!r} is {a.kind}")
    return a


def subset_by_category(view: SubsetView, attr: int, value: int) -> SubsetView:
    a = _require_kind(view, attr, categorical=True)
    if not 0 <= value < a.size:
        raise ValueError(f"category index {value} out of range for {a.name!r}")
    return SubsetView(view.dataset, view.indices[view.column(attr) == value])


def split_by_category(view: SubsetView, attr: int) -> list[SubsetView]:
    """One subview per domain value, in domain order (empty subviews included)."""
    a = _require_kind(view, attr, categorical=True)
    col = view.column(attr)
    order = np.argsort(col, kind="stable")
    bounds = np.searchsorted(col[order], np.arange(a.size + 1))
    return [
        SubsetView(view.dataset, np.sort(view.indices[order[bounds[v]:bounds[v + 1]]]))
        for v in range(a.size)
    ]


def subset_by_mask(view: SubsetView, attr: int, mask: int) -> tuple[SubsetView, SubsetView]:
    """Split on a category bitmask: rows whose value has its bit set go first."""
    _require_kind(view, attr, categorical=True)
    inside = ((mask >> view.column(attr).astype(np.int64)) & 1).astype(bool)
    return (
        SubsetView(view.dataset, view.indices[inside]),
        SubsetView(view.dataset, view.indices[~inside]),
    )


def subset_by_threshold(view: SubsetView, attr: int, threshold: float) -> tuple[SubsetView, SubsetView]:
    _require_kind(view, attr, categorical=False)
    below = view.column(attr) < threshold
    return (
        SubsetView(view.dataset, view.indices[below]),
        SubsetView(view.dataset, view.indices[~below]),
    )


def class_histogram(view: SubsetView) -> np.ndarray:
    return np.bincount(view.y, minlength=view.dataset.n_classes).astype(np.int64)


def majority_class(view: SubsetView) -> int:
    if len(view) == 0:
        raise ValueError("majority of an empty view is undefined")
    # argmax returns the first maximum, i.e. the lowest class index on ties
    return int(np.argmax(class_histogram(view)))


def contingency(view: SubsetView, attr: int):
    """Value-by-class count table of a categorical attribute over ``view``."""
    from .criterion import ContingencyTable

    a = _require_kind(view, attr, categorical=True)
    m = view.dataset.n_classes
    flat = view.column(attr).astype(np.int64) * m + view.y
    counts = np.bincount(flat, minlength=a.size * m).reshape(a.size, m)
    return ContingencyTable(counts, attr=attr)
