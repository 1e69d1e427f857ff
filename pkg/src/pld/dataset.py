"""Tabular ingestion and conversion to a Boolean object-feature dataset.

Columns are typed as Boolean, Categorical or Numeric. Binarization turns each
column into named predicates: Boolean columns map to themselves, Categorical
columns are one-hot encoded, and Numeric columns are quantized by recursive
median splitting into one-sided ``col<=t`` predicates (or, for designated
target columns, into disjoint value ranges).

The resulting :class:`Dataset` stores one packed bit-vector per predicate.
"""
from __future__ import annotations

import bisect
import csv
import enum
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataError, SchemaError

TRUE_TOKENS = frozenset({"1", "true"})
FALSE_TOKENS = frozenset({"0", "false"})


class Kind(str, enum.Enum):
    BOOLEAN = "boolean"
    CATEGORICAL = "categorical"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Column:
    name: str
    kind: Kind
    values: tuple  # parsed cells; None marks a missing cell

    @property
    def has_missing(self) -> bool:
        return any(v is None for v in self.values)


@dataclass(frozen=True)
class RawTable:
    columns: tuple[Column, ...]
    n_objects: int

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate column names in {names}")
        for c in self.columns:
            if len(c.values) != self.n_objects:
                raise DataError(
                    f"column {c.name!r} has {len(c.values)} cells, expected {self.n_objects}")

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]


# ---------------------------------------------------------------- CSV input

def _parse_bool(cell: str):
    low = cell.lower()
    if low in TRUE_TOKENS:
        return True
    if low in FALSE_TOKENS:
        return False
    raise ValueError(cell)


def _parse_float(cell: str) -> float:
    v = float(cell)
    if not math.isfinite(v):
        raise ValueError(cell)
    return v


_PARSERS = {Kind.BOOLEAN: _parse_bool, Kind.NUMERIC: _parse_float, Kind.CATEGORICAL: str}


def infer_kind(cells: Iterable[str]) -> Kind:
    """Infer a column kind from its non-missing cells."""
    present = [c for c in cells if c != ""]
    if not present:
        return Kind.CATEGORICAL
    if all(c.lower() in TRUE_TOKENS or c.lower() in FALSE_TOKENS for c in present):
        return Kind.BOOLEAN
    try:
        for c in present:
            _parse_float(c)
    except ValueError:
        return Kind.CATEGORICAL
    return Kind.NUMERIC


def table_from_rows(header: Sequence[str], rows: Sequence[Sequence[str]],
                    type_hints: Mapping[str, Kind | str] | None = None,
                    first_line: int = 2) -> RawTable:
    """Type string cells column-wise. Empty cells are missing."""
    hints = {k: Kind(v) for k, v in (type_hints or {}).items()}
    unknown = set(hints) - set(header)
    if unknown:
        raise DataError(f"type hints for unknown columns: {sorted(unknown)}")
    columns = []
    for j, name in enumerate(header):
        cells = [row[j].strip() for row in rows]
        kind = hints.get(name) or infer_kind(cells)
        parse = _PARSERS[kind]
        values = []
        for i, cell in enumerate(cells):
            if cell == "":
                values.append(None)
                continue
            try:
                values.append(parse(cell))
            except ValueError:
                raise DataError(f"cannot parse {cell!r} as {kind.value}",
                                row=first_line + i, column=name) from None
        columns.append(Column(name, kind, tuple(values)))
    return RawTable(tuple(columns), len(rows))


def load_csv(path, type_hints: Mapping[str, Kind | str] | None = None) -> RawTable:
    """Read a comma-separated file with a header row into a typed table.

    Row numbers in errors are 1-based file line numbers.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: ragged row with {len(row)} cells, header has {len(header)}",
                    row=reader.line_num, column=None)
            rows.append(row)
    return table_from_rows(header, rows, type_hints)


def write_manifest(path, table: RawTable, q: int, range_columns: Iterable[str] = ()) -> None:
    """Record column kinds and quantization depth as ``key = value`` lines."""
    lines = [f"q = {q}"]
    lines += [f"column.{c.name} = {c.kind.value}" for c in table.columns]
    lines += [f"range.{name} = 1" for name in range_columns]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> tuple[dict[str, Kind], int | None, list[str]]:
    hints: dict[str, Kind] = {}
    ranges: list[str] = []
    q = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise DataError(f"manifest line {lineno}: expected key = value")
        if key == "q":
            q = int(value)
        elif key.startswith("column."):
            hints[key[len("column."):]] = Kind(value)
        elif key.startswith("range."):
            ranges.append(key[len("range."):])
        else:
            raise DataError(f"manifest line {lineno}: unknown key {key!r}")
    return hints, q, ranges


# ------------------------------------------------------------ quantization

def _median(sorted_vals: Sequence[float]) -> float:
    n = len(sorted_vals)
    mid = n // 2
    if n % 2:
        return float(sorted_vals[mid])
    return (sorted_vals[mid - 1] + sorted_vals[mid]) / 2.0


def _split_tree(values: Iterable[float], depth: int) -> list[tuple[float, int, float, float]]:
    if depth < 1:
        raise ConfigError(f"quantization depth must be >= 1, got {depth}")
    out = []
    ranges = [sorted(values)]
    for level in range(1, depth + 1):
        nxt = []
        for r in ranges:
            if not r or r[0] == r[-1]:
                continue
            t = _median(r)
            if t >= r[-1]:
                # more than half the range sits at its maximum; no split exists
                continue
            out.append((t, level, float(r[0]), float(r[-1])))
            cut = bisect.bisect_right(r, t)
            nxt += [r[:cut], r[cut:]]
        ranges = nxt
    return out


def median_thresholds(values: Iterable[float], depth: int) -> list[tuple[float, int]]:
    """Recursive median split points as ``(threshold, split_level)`` pairs.

    >>> median_thresholds(range(1, 9), 2)
    [(4.5, 1), (2.5, 2), (6.5, 2)]
    """
    return [(t, level) for t, level, _, _ in _split_tree(values, depth)]


# ---------------------------------------------------------------- language

@dataclass(frozen=True)
class PredicateDef:
    """A named Boolean predicate and how it was derived from a source column.

    ``transform`` is one of ``identity``, ``one-hot``, ``threshold`` or
    ``range``. Threshold predicates hold when ``value <= threshold``; range
    predicates hold when ``lower < value <= upper`` (a ``None`` bound is
    unbounded) and carry the observed ``interval`` used for averaging.
    """
    id: int
    name: str
    column: str
    column_kind: Kind
    transform: str
    category: str | None = None
    threshold: float | None = None
    level: int | None = None
    parent_range: tuple[float, float] | None = None
    lower: float | None = None
    upper: float | None = None
    interval: tuple[float, float] | None = None
    has_missing: bool = False

    def evaluate(self, value) -> bool:
        if value is None:
            return False
        if self.transform == "identity":
            return bool(value)
        if self.transform == "one-hot":
            return value == self.category
        if self.transform == "threshold":
            return value <= self.threshold
        if self.transform == "range":
            return ((self.lower is None or value > self.lower)
                    and (self.upper is None or value <= self.upper))
        raise ValueError(f"unknown transform {self.transform!r}")


class PredicateLanguage:
    """Ordered, immutable list of predicate definitions with dense ids."""

    def __init__(self, predicates: Iterable[PredicateDef]):
        self._preds = tuple(predicates)
        self._by_name = {}
        for i, p in enumerate(self._preds):
            if p.id != i:
                raise ValueError(f"predicate ids must be dense: {p.name!r} has id {p.id}, expected {i}")
            if p.name in self._by_name:
                raise ValueError(f"duplicate predicate name {p.name!r}")
            self._by_name[p.name] = i
        kinds: dict[str, Kind] = {}
        for p in self._preds:
            kinds.setdefault(p.column, p.column_kind)
        self._columns = kinds

    def __len__(self):
        return len(self._preds)

    def __iter__(self):
        return iter(self._preds)

    def __getitem__(self, pid: int) -> PredicateDef:
        return self._preds[pid]

    def __eq__(self, other):
        return isinstance(other, PredicateLanguage) and self._preds == other._preds

    def __hash__(self):
        return hash(self._preds)

    def __repr__(self):
        return f"PredicateLanguage({[p.name for p in self._preds]})"

    @property
    def names(self) -> list[str]:
        return [p.name for p in self._preds]

    def id_of(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown predicate {name!r}") from None

    def column_kinds(self) -> dict[str, Kind]:
        return dict(self._columns)

    def predicates_of_column(self, column: str) -> list[int]:
        return [p.id for p in self._preds if p.column == column]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for p in self._preds:
            h.update(repr((p.name, p.column, p.column_kind.value, p.transform, p.category,
                           p.threshold, p.lower, p.upper)).encode())
        return h.hexdigest()[:16]

    @classmethod
    def boolean(cls, names: Sequence[str]) -> "PredicateLanguage":
        """Language of plain Boolean columns, one predicate each."""
        return cls(PredicateDef(i, n, n, Kind.BOOLEAN, "identity") for i, n in enumerate(names))


def _fmt(x: float) -> str:
    return format(x, ".10g")


def build_language(table: RawTable, q: int, range_columns: Iterable[str] = ()) -> PredicateLanguage:
    range_columns = set(range_columns)
    unknown = range_columns - set(table.names)
    if unknown:
        raise DataError(f"range columns not in table: {sorted(unknown)}")
    defs: list[dict] = []
    for col in table.columns:
        present = [v for v in col.values if v is not None]
        if not present:
            raise DataError(f"column {col.name!r} has no values")
        base = dict(column=col.name, column_kind=col.kind, has_missing=col.has_missing)
        if col.name in range_columns and col.kind is not Kind.NUMERIC:
            raise DataError(f"range column {col.name!r} is not numeric")
        if col.kind is Kind.BOOLEAN:
            defs.append(dict(base, name=col.name, transform="identity"))
        elif col.kind is Kind.CATEGORICAL:
            for cat in sorted(set(present)):
                defs.append(dict(base, name=f"{col.name}={cat}", transform="one-hot", category=cat))
        elif col.name in range_columns:
            lo, hi = float(min(present)), float(max(present))
            cuts = sorted(t for t, _ in median_thresholds(present, q))
            edges = [None, *cuts, None]
            for a, b in zip(edges, edges[1:]):
                name = f"{col.name}:({'-inf' if a is None else _fmt(a)},{'inf' if b is None else _fmt(b)}]"
                interval = (lo if a is None else a, hi if b is None else b)
                defs.append(dict(base, name=name, transform="range", lower=a, upper=b,
                                 interval=interval))
        else:
            for t, level, lo, hi in _split_tree(present, q):
                defs.append(dict(base, name=f"{col.name}<={_fmt(t)}", transform="threshold",
                                 threshold=t, level=level, parent_range=(lo, hi)))
    return PredicateLanguage(PredicateDef(id=i, **d) for i, d in enumerate(defs))


# ----------------------------------------------------------------- dataset

def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a Boolean vector into little-endian ``uint64`` words."""
    bits = np.asarray(bits, dtype=bool)
    n_words = max(1, (len(bits) + 63) // 64)
    buf = np.zeros(n_words * 8, dtype=np.uint8)
    packed = np.packbits(bits, bitorder="little")
    buf[:len(packed)] = packed
    return buf.view("<u8").astype(np.uint64)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Boolean object x predicate matrix stored as one bit-vector per predicate."""
    language: PredicateLanguage
    columns: np.ndarray  # shape (n_predicates, n_words), uint64
    n_objects: int
    object_ids: tuple = field(default=())

    def __post_init__(self):
        n_words = max(1, (self.n_objects + 63) // 64)
        if self.columns.shape != (len(self.language), n_words):
            raise ValueError(f"matrix shape {self.columns.shape} does not match "
                             f"{len(self.language)} predicates x {self.n_objects} objects")
        self.columns.setflags(write=False)

    @classmethod
    def from_dense(cls, language: PredicateLanguage, matrix) -> "Dataset":
        """Build from an ``objects x predicates`` Boolean matrix."""
        m = np.asarray(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[1] != len(language):
            raise ValueError(f"matrix shape {m.shape} does not match language of size {len(language)}")
        n = m.shape[0]
        n_words = max(1, (n + 63) // 64)
        cols = np.zeros((len(language), n_words), dtype=np.uint64)
        for j in range(len(language)):
            cols[j] = pack_bits(m[:, j])
        return cls(language, cols, n)

    @property
    def n_predicates(self) -> int:
        return len(self.language)

    def column(self, pid: int) -> np.ndarray:
        return self.columns[pid]

    def to_dense(self) -> np.ndarray:
        """Unpack to an ``objects x predicates`` Boolean matrix."""
        if self.n_objects == 0:
            return np.zeros((0, self.n_predicates), dtype=bool)
        raw = np.ascontiguousarray(self.columns).view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")[:, :self.n_objects]
        return bits.T.astype(bool)

    def holds(self, pid: int, obj: int) -> bool:
        return holds(self, pid, obj)

    def object_predicates(self, obj: int) -> frozenset[int]:
        return frozenset(p for p in range(self.n_predicates) if holds(self, p, obj))


def holds(ds: Dataset, pid: int, obj: int) -> bool:
    """Whether predicate ``pid`` is true on object ``obj``."""
    if not 0 <= pid < ds.n_predicates:
        raise IndexError(f"predicate id {pid} out of range 0..{ds.n_predicates - 1}")
    if not 0 <= obj < ds.n_objects:
        raise IndexError(f"object index {obj} out of range for {ds.n_objects} objects")
    return bool((int(ds.columns[pid, obj >> 6]) >> (obj & 63)) & 1)


def apply_language(table: RawTable, language: PredicateLanguage) -> Dataset:
    """Evaluate an existing predicate language on a table.

    The table must have exactly the language's source columns. Unseen
    categories and missing cells evaluate to false.
    """
    expected = list(language.column_kinds())
    for name in expected:
        if name not in table.names:
            raise SchemaError(f"missing column {name!r}")
    for name in table.names:
        if name not in expected:
            raise SchemaError(f"unexpected column {name!r}")
    kinds = language.column_kinds()
    for col in table.columns:
        if col.kind is not kinds[col.name]:
            raise SchemaError(f"column {col.name!r} is {col.kind.value}, "
                              f"model expects {kinds[col.name].value}")
    n = table.n_objects
    n_words = max(1, (n + 63) // 64)
    cols = np.zeros((len(language), n_words), dtype=np.uint64)
    for p in language:
        values = table.column(p.column).values
        cols[p.id] = pack_bits(np.fromiter((p.evaluate(v) for v in values), dtype=bool, count=n))
    return Dataset(language, cols, n)


def binarize(table: RawTable, q: int, range_columns: Iterable[str] = ()) -> Dataset:
    """Convert a typed table to a Boolean dataset with a fresh predicate language.

    ``range_columns`` names Numeric columns to encode as disjoint value
    ranges instead of one-sided thresholds (regression targets).
    """
    return apply_language(table, build_language(table, q, range_columns))
