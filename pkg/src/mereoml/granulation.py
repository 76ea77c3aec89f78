"""Granular compression of decision tables.

A granule collects every object within a given containment degree of its
center.  A covering by granules, made irreducible, is compressed into a
"mirror" table whose rows are granules with majority-voted values; test
objects are then classified against the mirror by nearest row.  The whole
pipeline, swept over a radius grid under cross-validation, is
:func:`run_decider`.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from statistics import fmean
from typing import Sequence

import numpy as np

from .dataset import DecisionSystem
from .errors import FoldError, MereomlError
from .inclusion import (
    Degree,
    ExponentialInclusion,
    LukasiewiczInclusion,
    RoughInclusion,
)

INCLUSION_KINDS = {
    "lukasiewicz": LukasiewiczInclusion,
    "exp": ExponentialInclusion,
}


def make_inclusion(kind: str, system) -> RoughInclusion:
    try:
        return INCLUSION_KINDS[kind](system)
    except KeyError:
        raise MereomlError(
            f"unknown inclusion kind {kind!r}; choose from {sorted(INCLUSION_KINDS)}"
        ) from None


@dataclass(frozen=True)
class Granule:
    """All objects whose degree of containment in the center reaches ``radius``."""

    center: int
    radius: Degree
    members: frozenset[int]


@dataclass(frozen=True)
class Covering:
    """A family of granules whose members jointly exhaust the universe."""

    granules: tuple[Granule, ...]
    universe: frozenset[int]

    def __post_init__(self):
        covered = frozenset().union(*(g.members for g in self.granules)) if self.granules else frozenset()
        if covered != self.universe:
            raise MereomlError("granules do not cover the universe exactly")


@dataclass(frozen=True)
class GranularReflection:
    """The mirror table: one row per covering granule, values by vote.

    ``rows[i]`` holds the voted conditional values of granule i over
    ``features``; ``decisions[i]`` the voted decision.
    """

    covering: Covering
    features: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    decisions: tuple[str, ...]
    strategy: str = "MV"


@dataclass(frozen=True)
class RadiusResult:
    radius: Degree
    accuracy: float
    coverage: float
    granules: float
    reduction: float


@dataclass(frozen=True)
class DeciderReport:
    """Cross-validated pipeline results, one row per radius.

    ``granules`` and ``reduction`` are averaged over folds; ``best_radius``
    maximizes accuracy, with ties going to the smaller radius.
    """

    per_radius: tuple[RadiusResult, ...]
    best_radius: Degree


def radius_grid(feature_count: int) -> tuple[Fraction, ...]:
    """The grid {1/m, 2/m, ..., 1} of meaningful agreement thresholds."""
    if feature_count < 1:
        raise ValueError("need at least one feature")
    return tuple(Fraction(k, feature_count) for k in range(1, feature_count + 1))


def granule(center: int, r: Degree, inclusion: RoughInclusion) -> Granule:
    """The neighborhood {y : degree(y, center) >= r}.

    Requires a symmetric inclusion; otherwise the neighborhood reading and
    the class-based reading of a granule part ways.
    """
    if not inclusion.symmetric:
        raise MereomlError("granules need a symmetric inclusion")
    if not 0 <= r <= 1:
        raise MereomlError(f"radius {r} outside [0, 1]")
    if hasattr(inclusion, "membership_mask"):
        mask = inclusion.membership_mask(center, r)
        members = frozenset(int(i) for i in np.nonzero(mask)[0])
    else:
        universe = inclusion.system.objects
        members = frozenset(y for y in universe if inclusion.degree(y, center) >= r)
    return Granule(center, r, members)


def all_granules(r: Degree, inclusion: RoughInclusion, system=None) -> tuple[Granule, ...]:
    """One granule per object, in object order."""
    universe = (system or inclusion.system).objects
    return tuple(granule(x, r, inclusion) for x in universe)


def irreducible_covering(granules: Sequence[Granule], universe: frozenset[int]) -> Covering:
    """Select a covering from which no granule can be dropped.

    Greedy pass by descending member count (ties to the lower center id),
    then a reverse elimination pass: a granule added early can be made
    redundant by later picks, so each is dropped again if the rest still
    cover.  Deterministic.
    """
    order = sorted(granules, key=lambda g: (-len(g.members), g.center))
    chosen: list[Granule] = []
    uncovered = set(universe)
    for g in order:
        if not uncovered:
            break
        if g.members & uncovered:
            chosen.append(g)
            uncovered -= g.members
    if uncovered:
        raise MereomlError(f"granules cannot cover objects {sorted(uncovered)}")
    for g in reversed(chosen.copy()):
        rest = [h for h in chosen if h is not g]
        if rest and frozenset().union(*(h.members for h in rest)) == universe:
            chosen.remove(g)
    chosen.sort(key=lambda g: g.center)
    return Covering(tuple(chosen), universe)


def majority_value(values: Sequence[str]) -> str:
    """Most frequent token; ties resolved toward the smallest token."""
    if not values:
        raise MereomlError("cannot vote over no values")
    counts = Counter(values)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def granular_mirror(
    covering: Covering, system: DecisionSystem, strategy: str = "MV"
) -> GranularReflection:
    """Vote each granule into a single mirror row (conditional and decision)."""
    if strategy != "MV":
        raise MereomlError(f"unknown voting strategy {strategy!r}")
    table = system.system
    rows = []
    decisions = []
    for g in covering.granules:
        members = sorted(g.members)
        rows.append(
            tuple(
                majority_value([table.rows[x][j] for x in members])
                for j in range(len(table.features))
            )
        )
        decisions.append(majority_value([system.decisions[x] for x in members]))
    return GranularReflection(
        covering, table.features, tuple(rows), tuple(decisions), strategy
    )


def _vote_nearest(tied: Sequence[int], decisions: Sequence[str]) -> str:
    """Decision for a set of equally-near mirror rows.

    Majority among the tied rows' decisions; if the vote itself ties, the
    lowest-index tied row whose decision is among the leaders wins.
    """
    if len(tied) == 1:
        return decisions[tied[0]]
    counts = Counter(decisions[i] for i in tied)
    top = max(counts.values())
    leaders = {v for v, c in counts.items() if c == top}
    for i in tied:
        if decisions[i] in leaders:
            return decisions[i]
    raise AssertionError("unreachable: some tied row carries a leading decision")


def classify(reflection: GranularReflection, test_row: Sequence[str]) -> str:
    """Decision of the mirror row agreeing with ``test_row`` on most features."""
    if len(test_row) != len(reflection.features):
        raise MereomlError(
            f"test row has {len(test_row)} values, expected {len(reflection.features)}"
        )
    agreements = [
        sum(a == b for a, b in zip(test_row, row)) for row in reflection.rows
    ]
    best = max(agreements)
    tied = [i for i, a in enumerate(agreements) if a == best]
    return _vote_nearest(tied, reflection.decisions)


def classify_many(
    reflection: GranularReflection, test_rows: Sequence[Sequence[str]]
) -> list[str]:
    """Batch version of :func:`classify` with the same tie handling."""
    if not test_rows:
        return []
    m = len(reflection.features)
    for row in test_rows:
        if len(row) != m:
            raise MereomlError(f"test row has {len(row)} values, expected {m}")
    # code tokens per column over mirror and test rows jointly
    mirror = np.empty((len(reflection.rows), m), dtype=np.int32)
    tests = np.empty((len(test_rows), m), dtype=np.int32)
    for j in range(m):
        vocab: dict[str, int] = {}
        for target, rows in ((mirror, reflection.rows), (tests, test_rows)):
            for i, row in enumerate(rows):
                target[i, j] = vocab.setdefault(row[j], len(vocab))
    agreements = (tests[:, None, :] == mirror[None, :, :]).sum(axis=2)
    out = []
    for i in range(len(test_rows)):
        best = agreements[i].max()
        tied = np.nonzero(agreements[i] == best)[0].tolist()
        out.append(_vote_nearest(tied, reflection.decisions))
    return out


def stratified_folds(
    decisions: Sequence[str], k: int, seed: int
) -> list[list[int]]:
    """Split object ids into k folds, balanced per decision value, seeded."""
    if k < 2:
        raise MereomlError(f"need at least 2 folds, got {k}")
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    by_value: dict[str, list[int]] = {}
    for i, d in enumerate(decisions):
        by_value.setdefault(d, []).append(i)
    offset = 0
    for value in sorted(by_value):
        ids = by_value[value]
        rng.shuffle(ids)
        for j, obj in enumerate(ids):
            folds[(offset + j) % k].append(obj)
        offset += len(ids)
    return folds


def run_decider(
    system: DecisionSystem,
    folds: int = 5,
    seed: int = 0,
    radii: Sequence[Degree] | None = None,
    inclusion: str = "lukasiewicz",
) -> DeciderReport:
    """Cross-validated granular classification over a radius sweep.

    Per fold, granules and the mirror come from the training part only; the
    report pools accuracy over all test parts.  Coverage is 1.0 by
    construction of the nearest-row protocol.
    """
    m = len(system.features)
    grid = tuple(radii) if radii is not None else radius_grid(m)
    fold_ids = stratified_folds(system.decisions, folds, seed)
    contexts = []
    for f in range(folds):
        train_ids = sorted(
            i for g in range(folds) if g != f for i in fold_ids[g]
        )
        if not train_ids:
            raise FoldError(f"fold {f} leaves no training objects")
        train = system.subset(train_ids)
        contexts.append((train, make_inclusion(inclusion, train), fold_ids[f]))

    per_radius = []
    for r in grid:
        correct = total = 0
        counts = []
        reductions = []
        for train, incl, test_ids in contexts:
            covering = irreducible_covering(
                all_granules(r, incl), frozenset(train.objects)
            )
            mirror = granular_mirror(covering, train)
            predicted = classify_many(
                mirror, [system.system.rows[i] for i in test_ids]
            )
            correct += sum(
                p == system.decisions[i] for p, i in zip(predicted, test_ids)
            )
            total += len(test_ids)
            counts.append(len(covering.granules))
            reductions.append(len(covering.granules) / len(train.system.rows))
        per_radius.append(
            RadiusResult(
                radius=r,
                accuracy=correct / total,
                coverage=1.0,
                granules=fmean(counts),
                reduction=fmean(reductions),
            )
        )
    best = max(per_radius, key=lambda rr: (rr.accuracy, -rr.radius))
    return DeciderReport(tuple(per_radius), best.radius)
