"""PIMA-format clinical table: CSV I/O, group summaries and zero imputation."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    BadNumeral,
    DegenerateGroup,
    EmptyGroup,
    MissingColumn,
    NonBinary,
    RaggedRow,
    UnknownColumn,
)

PREDICTORS = (
    "Pregnancies",
    "Glucose",
    "BloodPressure",
    "SkinThickness",
    "Insulin",
    "BMI",
    "DiabetesPedigreeFunction",
    "Age",
)
OUTCOME = "Outcome"
CANONICAL = PREDICTORS + (OUTCOME,)

# zero is a missing-value sentinel only where the measurement cannot be zero
IMPUTABLE = ("Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI")

_NUMERAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class Dataset:
    """Immutable columnar table.

    Canonical columns come first in PIMA order; any extra numeric columns
    follow in the order they appeared in the source.
    """

    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        cols = {}
        n = None
        for name, values in self.columns.items():
            arr = np.array(values, dtype=np.float64)
            if arr.ndim != 1:
                raise ValueError(f"column {name!r} is not one-dimensional")
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise ValueError("all columns must have equal length")
            arr.setflags(write=False)
            cols[name] = arr
        object.__setattr__(self, "columns", MappingProxyType(cols))

    @property
    def names(self):
        return list(self.columns)

    @property
    def n_rows(self):
        for arr in self.columns.values():
            return int(arr.shape[0])
        return 0

    def __getitem__(self, name):
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownColumn(name) from None

    def __eq__(self, other):
        if not isinstance(other, Dataset) or self.names != other.names:
            return False
        return all(np.array_equal(self[c], other[c]) for c in self.names)

    __hash__ = None

    def replace(self, **updates):
        """Return a copy with some columns swapped out (order preserved)."""
        cols = dict(self.columns)
        for name, values in updates.items():
            if name not in cols:
                raise UnknownColumn(name)
            cols[name] = values
        return Dataset(cols)

    def take(self, rows):
        """Row subset, in the order given by ``rows``."""
        idx = np.asarray(rows, dtype=np.intp)
        return Dataset({c: a[idx] for c, a in self.columns.items()})

    def matrix(self, names=PREDICTORS):
        return np.column_stack([self[c] for c in names]) if names else np.empty((self.n_rows, 0))

    def outcome(self):
        y = self[OUTCOME]
        if not np.all((y == 0) | (y == 1)):
            raise NonBinary("Outcome column must contain only 0 and 1")
        return y.astype(np.int64)


def parse_csv(text):
    """Parse PIMA CSV text (``str`` or UTF-8 ``bytes``) into a :class:`Dataset`."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    if text.startswith("﻿"):
        text = text[1:]
    # leading "#" lines carry run metadata in files written by the CLI
    lines = text.splitlines(keepends=True)
    while lines and lines[0].startswith("#"):
        lines.pop(0)
    reader = csv.reader(io.StringIO("".join(lines), newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MissingColumn(CANONICAL[0]) from None
    for name in CANONICAL:
        if name not in header:
            raise MissingColumn(name)

    width = len(header)
    raw = [[] for _ in header]
    row_no = 0
    for row_no, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise RaggedRow(row_no, width, len(row))
        for j, cell in enumerate(row):
            cell = cell.strip()
            if not _NUMERAL.match(cell):
                raise BadNumeral(row_no, header[j], cell)
            raw[j].append(float(cell))

    by_name = dict(zip(header, raw))
    ordered = {c: by_name[c] for c in CANONICAL}
    for name in header:
        if name not in ordered:
            ordered[name] = by_name[name]
    return Dataset(ordered)


def read_csv(path):
    with open(path, "rb") as fh:
        return parse_csv(fh.read())


def format_number(value):
    """Shortest decimal that round-trips to the same double."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def serialize_csv(d):
    lines = [",".join(d.names)]
    cols = [d[c] for c in d.names]
    for i in range(d.n_rows):
        lines.append(",".join(format_number(col[i]) for col in cols))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ColumnImputation:
    count_replaced_group0: int
    count_replaced_group1: int
    median_group0: float
    median_group1: float


@dataclass(frozen=True)
class ImputationReport:
    columns: dict = field(default_factory=dict)

    def to_rows(self):
        return [
            {
                "column": name,
                "count_replaced_group0": c.count_replaced_group0,
                "count_replaced_group1": c.count_replaced_group1,
                "median_group0": c.median_group0,
                "median_group1": c.median_group1,
            }
            for name, c in self.columns.items()
        ]


def group_medians(d, columns=IMPUTABLE):
    """Median of the non-zero cells of each column, per outcome group.

    A group without non-zero cells gets NaN; that only becomes an error in
    :func:`impute_zeros` if the group also has zeros to fill.
    """
    y = d.outcome()
    medians = {}
    for name in columns:
        col = d[name]
        per_group = []
        for g in (0, 1):
            cells = col[(y == g) & (col != 0)]
            per_group.append(float(np.median(cells)) if cells.size else math.nan)
        medians[name] = tuple(per_group)
    return medians


def impute_zeros(d, medians=None):
    """Replace zero cells of the imputable columns by same-outcome medians.

    ``medians`` may be supplied (e.g. computed on a training fold); by default
    they come from ``d`` itself via :func:`group_medians`.
    """
    if medians is None:
        medians = group_medians(d)
    y = d.outcome()
    updates = {}
    report = {}
    for name in IMPUTABLE:
        col = d[name].copy()
        counts = []
        for g in (0, 1):
            mask = (y == g) & (col == 0)
            if mask.any() and math.isnan(medians[name][g]):
                raise DegenerateGroup(name, g)
            counts.append(int(mask.sum()))
            col[mask] = medians[name][g]
        updates[name] = col
        report[name] = ColumnImputation(counts[0], counts[1], *medians[name])
    return d.replace(**updates), ImputationReport(report)


@dataclass(frozen=True)
class GroupStats:
    mean: float
    sd: float
    count: int


def group_summary(d, column):
    """Mean, sample standard deviation and count of ``column`` per outcome."""
    col = d[column]
    y = d.outcome()
    out = {}
    for g in (0, 1):
        cells = col[y == g]
        if cells.size == 0:
            raise EmptyGroup(f"outcome group {g} is empty")
        sd = float(np.std(cells, ddof=1)) if cells.size > 1 else math.nan
        out[g] = GroupStats(float(np.mean(cells)), sd, int(cells.size))
    return out
