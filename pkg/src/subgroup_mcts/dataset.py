"""Dataset representation and CSV loading.

A dataset is an immutable table of objects over typed (nominal or numerical)
attributes, with exactly one class label per object. Object extents are
represented throughout the package as int bitmasks (bit i set = object i is
covered), which keeps intersection and Jaccard computations exact and fast.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


NOMINAL = "nominal"
NUMERICAL = "numerical"


class LoadError(ValueError):
    """Base class for dataset ingestion errors."""


class EmptyDatasetError(LoadError):
    pass


class MissingColumnError(LoadError):
    pass


class DuplicateColumnError(LoadError):
    pass


class ValueParseError(LoadError):
    pass


@dataclass(frozen=True)
class AttributeMeta:
    """Name, kind and ordered distinct value domain of one attribute."""

    name: str
    kind: str  # NOMINAL or NUMERICAL
    domain: tuple

    def __post_init__(self):
        if self.kind not in (NOMINAL, NUMERICAL):
            raise ValueError(f"unknown attribute kind: {self.kind!r}")
        if not self.domain:
            raise ValueError(f"attribute {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ValueError(f"attribute {self.name!r} has duplicate domain values")
        if self.kind == NUMERICAL and list(self.domain) != sorted(self.domain):
            raise ValueError(f"numerical attribute {self.name!r} domain not ascending")


class Dataset:
    """Immutable labeled table with precomputed per-value extent bitmasks."""

    def __init__(self, name: str, attributes: Sequence[AttributeMeta],
                 columns: Sequence[Sequence], labels: Sequence):
        if not labels:
            raise EmptyDatasetError("empty dataset")
        if not attributes:
            raise ValueError("dataset needs at least one attribute")
        if len(columns) != len(attributes):
            raise ValueError("column count does not match attribute count")
        n = len(labels)
        for meta, col in zip(attributes, columns):
            if len(col) != n:
                raise ValueError(f"column {meta.name!r} has {len(col)} values, expected {n}")
        self.name = name
        self.attributes = tuple(attributes)
        self.columns = tuple(tuple(col) for col in columns)
        self.labels = tuple(labels)
        self.n_objects = n
        self.full_mask = (1 << n) - 1
        # class labels in first-appearance order
        seen = []
        for lab in self.labels:
            if lab not in seen:
                seen.append(lab)
        self.classes = tuple(seen)
        self._label_masks = {}
        for i, lab in enumerate(self.labels):
            self._label_masks[lab] = self._label_masks.get(lab, 0) | (1 << i)
        # per-attribute value masks; numerical attrs also get prefix masks
        # (prefix[k] = objects with value <= domain[k]) for O(1) interval masks
        self._value_masks = []
        self._prefix_masks = []
        for ai, meta in enumerate(self.attributes):
            vm = {v: 0 for v in meta.domain}
            for oi, v in enumerate(self.columns[ai]):
                vm[v] |= 1 << oi
            self._value_masks.append(vm)
            if meta.kind == NUMERICAL:
                prefixes = []
                acc = 0
                for v in meta.domain:
                    acc |= vm[v]
                    prefixes.append(acc)
                self._prefix_masks.append(prefixes)
            else:
                self._prefix_masks.append(None)

    @classmethod
    def from_columns(cls, name: str, attr_specs: Sequence[tuple], labels: Sequence,
                     columns: Sequence[Sequence]) -> "Dataset":
        """Construct from (name, kind) attribute specs, inferring domains."""
        metas = []
        for (aname, kind), col in zip(attr_specs, columns):
            vals = sorted(set(col)) if kind == NUMERICAL else _stable_unique(col)
            metas.append(AttributeMeta(aname, kind, tuple(vals)))
        return cls(name, metas, columns, labels)

    def value_mask(self, attr: int, value) -> int:
        return self._value_masks[attr][value]

    def interval_mask(self, attr: int, lo_idx: int, hi_idx: int) -> int:
        """Extent of domain-index interval [lo_idx, hi_idx] on a numerical attribute."""
        prefixes = self._prefix_masks[attr]
        m = prefixes[hi_idx]
        if lo_idx > 0:
            m &= self.full_mask ^ prefixes[lo_idx - 1]
        return m

    def label_mask(self, label) -> int:
        try:
            return self._label_masks[label]
        except KeyError:
            raise KeyError(f"unknown class label: {label!r}") from None

    def domain_index(self, attr: int, value) -> int:
        return self.attributes[attr].domain.index(value)

    def attribute_index(self, name: str) -> int:
        for i, meta in enumerate(self.attributes):
            if meta.name == name:
                return i
        raise KeyError(f"unknown attribute: {name!r}")

    def __repr__(self):
        return (f"Dataset({self.name!r}, {self.n_objects} objects, "
                f"{len(self.attributes)} attributes, {len(self.classes)} classes)")


def _stable_unique(values):
    out = []
    for v in values:
        if v not in out:
            out.append(v)
    return out


def bit_indices(mask: int) -> tuple:
    """Object indices covered by a bitmask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_from_indices(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def load_schema(path) -> dict:
    """Read a schema sidecar: one `column=nominal|numerical|label` line per column."""
    schema = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LoadError(f"{path}:{lineno}: expected 'column=kind', got {line!r}")
        col, kind = (part.strip() for part in line.split("=", 1))
        if kind not in (NOMINAL, NUMERICAL, "label"):
            raise LoadError(f"{path}:{lineno}: unknown kind {kind!r}")
        if col in schema:
            raise DuplicateColumnError(f"{path}:{lineno}: column {col!r} declared twice")
        schema[col] = kind
    if "label" not in schema.values():
        raise MissingColumnError(f"{path}: no column declared as label")
    return schema


def load_csv(path, schema: dict, name: str | None = None) -> Dataset:
    """Load a comma-separated, headered, UTF-8 file into a Dataset.

    `schema` maps column name to "nominal"/"numerical"/"label"; exactly one
    column must be the label. Row order is preserved and value domains are
    computed from the data.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: empty file") from None
        rows = list(reader)
    if len(set(header)) != len(header):
        raise DuplicateColumnError(f"{path}: duplicate column in header")
    for col in schema:
        if col not in header:
            raise MissingColumnError(f"{path}: schema column {col!r} not in header")
    label_cols = [c for c, kind in schema.items() if kind == "label"]
    if len(label_cols) != 1:
        raise MissingColumnError(f"{path}: schema must name exactly one label column")
    if not rows:
        raise EmptyDatasetError(f"{path}: empty dataset (header only)")

    label_col = label_cols[0]
    attr_cols = [c for c in header if c in schema and c != label_col]
    if not attr_cols:
        raise MissingColumnError(f"{path}: schema declares no attribute columns")
    pos = {c: header.index(c) for c in header}

    labels = []
    raw_columns = [[] for _ in attr_cols]
    for rno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ValueParseError(f"{path}:{rno}: expected {len(header)} fields, got {len(row)}")
        labels.append(row[pos[label_col]])
        for ci, col in enumerate(attr_cols):
            token = row[pos[col]]
            if schema[col] == NUMERICAL:
                try:
                    raw_columns[ci].append(float(token))
                except ValueError:
                    raise ValueParseError(
                        f"{path}:{rno}: non-numeric value {token!r} in column {col!r}") from None
            else:
                raw_columns[ci].append(token)

    specs = [(c, schema[c]) for c in attr_cols]
    return Dataset.from_columns(name or path.stem, specs, labels, raw_columns)
