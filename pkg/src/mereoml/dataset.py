"""Discrete information and decision tables.

An information system is a total table of discrete value tokens over a finite
universe of objects (0-based row indices) and a finite list of named features.
A decision system additionally singles out one column as the decision.  The
two discernibility primitives ``dis`` and ``ind_fraction`` defined here are
the raw material for every table-based graded containment in the package.

Numeric columns can be quantized with :func:`discretize` (equal-frequency,
ties to the lower bin) so that equality tests on tokens are meaningful.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import MereomlError

#: Distinguished token substituted for a declared missing-value sentinel.
NA_VALUE = "NA"


class IngestionError(MereomlError):
    """A CSV file could not be turned into a total discrete table."""


class DuplicateFeature(IngestionError):
    pass


class RaggedRow(IngestionError):
    pass


class MissingDecisionColumn(IngestionError):
    pass


class MissingValue(IngestionError):
    pass


class UnknownObject(MereomlError):
    pass


class UnknownFeature(MereomlError):
    pass


@dataclass(frozen=True)
class InformationSystem:
    """A total object x feature table of discrete value tokens.

    ``rows[i][j]`` is the value of feature ``features[j]`` on object ``i``.
    Objects are identified by their 0-based row index.
    """

    features: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(set(self.features)) != len(self.features):
            raise DuplicateFeature(f"duplicate feature names in {self.features}")
        width = len(self.features)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise RaggedRow(f"row {i} has {len(row)} cells, expected {width}")

    @property
    def objects(self) -> range:
        return range(len(self.rows))

    def feature_index(self, feature: str) -> int:
        try:
            return self.features.index(feature)
        except ValueError:
            raise UnknownFeature(feature) from None

    def value(self, obj: int, feature: str) -> str:
        self._check_object(obj)
        return self.rows[obj][self.feature_index(feature)]

    def column(self, feature: str) -> tuple[str, ...]:
        j = self.feature_index(feature)
        return tuple(row[j] for row in self.rows)

    def value_set(self, feature: str) -> frozenset[str]:
        return frozenset(self.column(feature))

    def _check_object(self, obj: int) -> None:
        if not 0 <= obj < len(self.rows):
            raise UnknownObject(obj)


@dataclass(frozen=True)
class DecisionSystem:
    """An information system plus a distinguished decision column.

    The conditional table ``system`` never contains the decision feature;
    ``decisions[i]`` is object ``i``'s decision value.
    """

    system: InformationSystem
    decision: str
    decisions: tuple[str, ...]

    def __post_init__(self):
        if self.decision in self.system.features:
            raise DuplicateFeature(
                f"decision {self.decision!r} also appears among conditional features"
            )
        if len(self.decisions) != len(self.system.rows):
            raise RaggedRow(
                f"{len(self.decisions)} decision values for {len(self.system.rows)} objects"
            )

    @property
    def objects(self) -> range:
        return self.system.objects

    @property
    def features(self) -> tuple[str, ...]:
        return self.system.features

    @property
    def decision_values(self) -> frozenset[str]:
        return frozenset(self.decisions)

    def value(self, obj: int, feature: str) -> str:
        if feature == self.decision:
            self.system._check_object(obj)
            return self.decisions[obj]
        return self.system.value(obj, feature)

    def subset(self, objects: Sequence[int]) -> "DecisionSystem":
        """A new decision system over the given objects (reindexed from 0)."""
        rows = tuple(self.system.rows[i] for i in objects)
        decisions = tuple(self.decisions[i] for i in objects)
        return DecisionSystem(
            InformationSystem(self.system.features, rows), self.decision, decisions
        )


def load_csv(
    path: str | Path,
    decision: str | None = None,
    na_token: str | None = None,
) -> InformationSystem | DecisionSystem:
    """Load a header-first CSV file as an information or decision system.

    When ``decision`` names a column it is separated out and a
    :class:`DecisionSystem` is returned.  Empty cells are rejected (tables
    must be total); if ``na_token`` is given, cells equal to it are mapped to
    the distinguished token ``"NA"`` instead of being ordinary values.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        seen = set()
        for col, name in enumerate(header):
            if name in seen:
                raise DuplicateFeature(f"{path}: duplicate header {name!r} at column {col}")
            seen.add(name)
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(header):
                raise RaggedRow(
                    f"{path}: row at line {lineno} has {len(raw)} cells, expected {len(header)}"
                )
            cells = []
            for col, cell in enumerate(raw):
                cell = cell.strip()
                if na_token is not None and cell == na_token:
                    cell = NA_VALUE
                if cell == "":
                    raise MissingValue(
                        f"{path}: missing value at line {lineno}, column {header[col]!r}"
                    )
                cells.append(cell)
            rows.append(tuple(cells))

    if decision is None:
        return InformationSystem(tuple(header), tuple(rows))
    if decision not in header:
        raise MissingDecisionColumn(f"{path}: no column named {decision!r}")
    d = header.index(decision)
    features = tuple(h for i, h in enumerate(header) if i != d)
    body = tuple(tuple(c for i, c in enumerate(row) if i != d) for row in rows)
    decisions = tuple(row[d] for row in rows)
    return DecisionSystem(InformationSystem(features, body), decision, decisions)


def _bin_labels(values: Sequence[str], bins: int, feature: str) -> list[str]:
    numeric = []
    for i, token in enumerate(values):
        try:
            numeric.append(float(token))
        except ValueError:
            raise IngestionError(
                f"non-numeric cell {token!r} at row {i}, column {feature!r}"
            ) from None
    n = len(numeric)
    order = sorted(range(n), key=lambda i: numeric[i])
    # rank of the first occurrence of each value; equal values share it, which
    # sends boundary ties to the lower bin
    first_rank: dict[float, int] = {}
    for rank, i in enumerate(order):
        first_rank.setdefault(numeric[i], rank)
    return [f"B{first_rank[v] * bins // n}" for v in numeric]


def discretize(
    system: InformationSystem | DecisionSystem,
    columns: Iterable[str],
    bins: int,
) -> InformationSystem | DecisionSystem:
    """Replace numeric columns by equal-frequency bin labels ``B0..B{bins-1}``.

    Columns not named are untouched.  Ties sit in the lower bin, so equal
    values always land in the same bin.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if isinstance(system, DecisionSystem):
        return DecisionSystem(
            discretize(system.system, columns, bins), system.decision, system.decisions
        )
    columns = list(columns)
    for name in columns:
        system.feature_index(name)
    new_cols = {name: _bin_labels(system.column(name), bins, name) for name in columns}
    rows = tuple(
        tuple(
            new_cols[f][i] if f in new_cols else row[j]
            for j, f in enumerate(system.features)
        )
        for i, row in enumerate(system.rows)
    )
    return InformationSystem(system.features, rows)


def _conditional(system: InformationSystem | DecisionSystem) -> InformationSystem:
    return system.system if isinstance(system, DecisionSystem) else system


def dis(x: int, y: int, system: InformationSystem | DecisionSystem) -> frozenset[str]:
    """The set of conditional features on which objects ``x`` and ``y`` differ."""
    table = _conditional(system)
    table._check_object(x)
    table._check_object(y)
    rx, ry = table.rows[x], table.rows[y]
    return frozenset(f for f, a, b in zip(table.features, rx, ry) if a != b)


def ind_fraction(x: int, y: int, system: InformationSystem | DecisionSystem) -> Fraction:
    """The exact fraction of conditional features on which ``x`` and ``y`` agree."""
    table = _conditional(system)
    table._check_object(x)
    table._check_object(y)
    rx, ry = table.rows[x], table.rows[y]
    agree = sum(1 for a, b in zip(rx, ry) if a == b)
    return Fraction(agree, len(table.features))


def row_dis_count(row_a: Sequence[str], row_b: Sequence[str]) -> int:
    """Number of positions on which two equal-length value rows differ."""
    if len(row_a) != len(row_b):
        raise ValueError(f"row lengths differ: {len(row_a)} vs {len(row_b)}")
    return sum(1 for a, b in zip(row_a, row_b) if a != b)
