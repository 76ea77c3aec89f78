"""Granules, irreducible coverings, mirror tables, the CV decider."""

from fractions import Fraction

import hypothesis
import hypothesis.strategies as strat
import pytest

from mereoml import (
    Covering,
    DecisionSystem,
    FoldError,
    Granule,
    InformationSystem,
    LukasiewiczInclusion,
    MereomlError,
    ResidualInclusion,
    RoughInclusion,
    all_granules,
    classify,
    classify_many,
    granular_mirror,
    granule,
    ind_fraction,
    irreducible_covering,
    majority_value,
    make_inclusion,
    radius_grid,
    run_decider,
    stratified_folds,
)
from strategies import decision_tables, tables


def test_radius_grid():
    assert radius_grid(4) == (
        Fraction(1, 4),
        Fraction(1, 2),
        Fraction(3, 4),
        Fraction(1),
    )
    assert radius_grid(1) == (Fraction(1),)
    with pytest.raises(ValueError):
        radius_grid(0)


def test_make_inclusion():
    table = InformationSystem(("a",), (("1",),))
    assert isinstance(make_inclusion("lukasiewicz", table), LukasiewiczInclusion)
    with pytest.raises(MereomlError):
        make_inclusion("cosine", table)


T = InformationSystem(("f", "g"), (("1", "0"), ("1", "1"), ("0", "1")))


def test_granule_example():
    inc = LukasiewiczInclusion(T)
    g = granule(0, Fraction(1, 2), inc)
    assert g.members == frozenset({0, 1})
    assert g.center == 0
    assert g.radius == Fraction(1, 2)
    assert granule(0, 1, inc).members == frozenset({0})
    assert granule(0, 0, inc).members == frozenset({0, 1, 2})


def test_granule_requires_symmetric_inclusion():
    with pytest.raises(MereomlError):
        granule(0.5, 0.5, ResidualInclusion())


def test_granule_radius_bounds():
    inc = LukasiewiczInclusion(T)
    with pytest.raises(MereomlError):
        granule(0, Fraction(3, 2), inc)
    with pytest.raises(MereomlError):
        granule(0, -0.1, inc)


class _PlainInclusion(RoughInclusion):
    """Symmetric inclusion without a mask method, to exercise the slow path."""

    symmetric = True

    def __init__(self, system):
        self.system = system

    def degree(self, x, y):
        return ind_fraction(x, y, self.system)


def test_granule_without_mask_support():
    slow = _PlainInclusion(T)
    fast = LukasiewiczInclusion(T)
    for r in (0, Fraction(1, 2), 1):
        for x in T.objects:
            assert granule(x, r, slow).members == granule(x, r, fast).members


def test_all_granules_in_object_order():
    inc = LukasiewiczInclusion(T)
    gs = all_granules(Fraction(1, 2), inc)
    assert [g.center for g in gs] == [0, 1, 2]
    assert gs[1].members == frozenset({0, 1, 2})


@hypothesis.given(tables(max_objects=10), strat.data())
def test_granule_shrinks_as_radius_grows(table, data):
    inc = LukasiewiczInclusion(table)
    m = len(table.features)
    x = data.draw(strat.sampled_from(range(len(table.rows))))
    grid = (Fraction(0),) + radius_grid(m)
    members = [granule(x, r, inc).members for r in grid]
    for smaller, larger in zip(members[1:], members):
        assert smaller <= larger
        assert x in smaller


@hypothesis.given(tables(max_objects=8), strat.data())
def test_granule_membership_is_mutual(table, data):
    inc = LukasiewiczInclusion(table)
    objs = range(len(table.rows))
    x = data.draw(strat.sampled_from(objs))
    y = data.draw(strat.sampled_from(objs))
    r = data.draw(strat.sampled_from(radius_grid(len(table.features))))
    assert (y in granule(x, r, inc).members) == (x in granule(y, r, inc).members)


@hypothesis.given(tables(max_objects=8), strat.data())
def test_neighbor_granules_stay_within_relaxed_radius(table, data):
    """y near x forces g(y, s) inside g(x, max(0, r+s-1))."""
    inc = LukasiewiczInclusion(table)
    m = len(table.features)
    x = data.draw(strat.sampled_from(range(len(table.rows))))
    r = data.draw(strat.sampled_from(radius_grid(m)))
    s = data.draw(strat.sampled_from(radius_grid(m)))
    relaxed = max(Fraction(0), r + s - 1)
    outer = granule(x, relaxed, inc).members
    for y in granule(x, r, inc).members:
        assert granule(y, s, inc).members <= outer


def g(center, members, r=Fraction(1, 2)):
    return Granule(center, r, frozenset(members))


def test_irreducible_covering_example():
    universe = frozenset({1, 2, 3})
    cov = irreducible_covering([g(1, {1, 2}), g(2, {2, 3}), g(3, {1, 2, 3})], universe)
    assert [gr.members for gr in cov.granules] == [frozenset({1, 2, 3})]


def test_irreducible_covering_drops_absorbed_early_picks():
    # the two large granules absorb {2}, which the greedy pass took first
    universe = frozenset({1, 2, 3, 4, 5})
    picked = irreducible_covering(
        [g(2, {2}), g(1, {1, 2, 3}), g(4, {2, 4, 5})], universe
    )
    assert [gr.center for gr in picked.granules] == [1, 4]


def test_irreducible_covering_sorted_and_deterministic():
    universe = frozenset({0, 1, 2, 3})
    fam = [g(3, {2, 3}), g(0, {0, 1}), g(1, {1, 2})]
    cov = irreducible_covering(fam, universe)
    assert [gr.center for gr in cov.granules] == [0, 3]
    assert irreducible_covering(list(reversed(fam)), universe) == cov


def test_irreducible_covering_failure():
    with pytest.raises(MereomlError, match=r"\[4\]"):
        irreducible_covering([g(0, {0, 1})], frozenset({0, 1, 4}))


def test_covering_validates_exact_cover():
    with pytest.raises(MereomlError):
        Covering((g(0, {0}),), frozenset({0, 1}))
    with pytest.raises(MereomlError):
        Covering((g(0, {0, 9}),), frozenset({0}))


@hypothesis.given(tables(max_objects=12), strat.data())
def test_irreducible_covering_properties(table, data):
    inc = LukasiewiczInclusion(table)
    r = data.draw(strat.sampled_from(radius_grid(len(table.features))))
    universe = frozenset(table.objects)
    cov = irreducible_covering(all_granules(r, inc), universe)
    union = frozenset().union(*(gr.members for gr in cov.granules))
    assert union == universe
    centers = [gr.center for gr in cov.granules]
    assert centers == sorted(centers)
    # no granule is redundant
    if len(cov.granules) > 1:
        for i in range(len(cov.granules)):
            rest = cov.granules[:i] + cov.granules[i + 1 :]
            assert frozenset().union(*(gr.members for gr in rest)) != universe


def test_majority_value():
    assert majority_value(["a", "b", "a"]) == "a"
    assert majority_value(["b", "a"]) == "a"
    assert majority_value(["z"]) == "z"
    with pytest.raises(MereomlError):
        majority_value([])


MIRROR_SYSTEM = DecisionSystem(
    InformationSystem(
        ("a", "b"),
        (("1", "0"), ("1", "1"), ("0", "1"), ("0", "0")),
    ),
    "d",
    ("y", "y", "n", "y"),
)


def _mirror():
    universe = frozenset({0, 1, 2, 3})
    cov = Covering(
        (g(0, {0, 1, 3}), g(2, {1, 2})),
        universe,
    )
    return granular_mirror(cov, MIRROR_SYSTEM)


def test_granular_mirror_votes():
    mirror = _mirror()
    assert mirror.rows == (("1", "0"), ("0", "1"))
    assert mirror.decisions == ("y", "n")
    assert mirror.features == ("a", "b")
    assert mirror.strategy == "MV"


def test_granular_mirror_rejects_unknown_strategy():
    cov = Covering((g(0, {0, 1, 2, 3}),), frozenset({0, 1, 2, 3}))
    with pytest.raises(MereomlError):
        granular_mirror(cov, MIRROR_SYSTEM, strategy="WV")


def test_classify_nearest_row():
    mirror = _mirror()
    assert classify(mirror, ("1", "0")) == "y"
    assert classify(mirror, ("0", "1")) == "n"
    with pytest.raises(MereomlError):
        classify(mirror, ("1",))


def test_classify_tie_falls_back_to_row_order():
    # ("1","1") agrees once with each mirror row; the decision vote ties
    # too, so the earlier row wins
    mirror = _mirror()
    assert classify(mirror, ("1", "1")) == "y"


def test_classify_tie_majority_vote():
    universe = frozenset({0, 1, 2, 3})
    system = DecisionSystem(
        InformationSystem(
            ("a", "b"),
            (("1", "0"), ("0", "1"), ("1", "0"), ("0", "1")),
        ),
        "d",
        ("n", "y", "y", "y"),
    )
    cov = Covering(
        (g(0, {0}), g(1, {1}), g(2, {2}), g(3, {3})),
        universe,
    )
    mirror = granular_mirror(cov, system)
    # ("1","1") ties across all four rows; majority of decisions is y even
    # though the lowest-index row says n
    assert classify(mirror, ("1", "1")) == "y"


@hypothesis.given(decision_tables(max_objects=10), strat.data())
def test_classify_many_matches_classify(system, data):
    inc = LukasiewiczInclusion(system)
    r = data.draw(strat.sampled_from(radius_grid(len(system.features))))
    cov = irreducible_covering(all_granules(r, inc), frozenset(system.objects))
    mirror = granular_mirror(cov, system)
    rows = list(system.system.rows)
    assert classify_many(mirror, rows) == [classify(mirror, row) for row in rows]
    assert classify_many(mirror, []) == []


def test_stratified_folds_partition_and_balance():
    decisions = ["y"] * 7 + ["n"] * 5
    folds = stratified_folds(decisions, 3, seed=11)
    ids = sorted(i for fold in folds for i in fold)
    assert ids == list(range(12))
    for value, count in (("y", 7), ("n", 5)):
        per_fold = [sum(decisions[i] == value for i in fold) for fold in folds]
        assert sum(per_fold) == count
        assert max(per_fold) - min(per_fold) <= 1
    assert stratified_folds(decisions, 3, seed=11) == folds


def test_stratified_folds_validation():
    with pytest.raises(MereomlError):
        stratified_folds(["y", "n"], 1, seed=0)


def test_run_decider_constant_table():
    """All rows identical: the pooled accuracy is the majority share."""
    base = InformationSystem(("c",), tuple(("x",) for _ in range(10)))
    system = DecisionSystem(base, "d", ("yes",) * 7 + ("no",) * 3)
    report = run_decider(system, folds=2, seed=3)
    assert len(report.per_radius) == 1
    rr = report.per_radius[0]
    assert rr.radius == 1
    assert rr.accuracy == pytest.approx(0.7)
    assert rr.coverage == 1.0
    assert rr.granules == 1.0
    assert rr.reduction == pytest.approx(0.2)
    assert report.best_radius == 1


def test_run_decider_tie_prefers_smaller_radius():
    base = InformationSystem(("c", "e"), tuple(("x", "z") for _ in range(8)))
    system = DecisionSystem(base, "d", ("yes",) * 6 + ("no",) * 2)
    report = run_decider(system, folds=2, seed=0)
    accs = [rr.accuracy for rr in report.per_radius]
    assert accs[0] == accs[1]
    assert report.best_radius == Fraction(1, 2)


def test_run_decider_explicit_radii_and_exp():
    base = InformationSystem(
        ("f", "g"),
        (("1", "0"), ("1", "1"), ("0", "1"), ("0", "0"), ("1", "0"), ("0", "1")),
    )
    system = DecisionSystem(base, "d", ("y", "y", "n", "n", "y", "n"))
    report = run_decider(system, folds=2, seed=1, radii=[0.3, 0.9], inclusion="exp")
    assert [rr.radius for rr in report.per_radius] == [0.3, 0.9]
    for rr in report.per_radius:
        assert 0 <= rr.accuracy <= 1
        assert rr.coverage == 1.0
        assert 0 < rr.reduction <= 1


def test_run_decider_empty_training_fold():
    base = InformationSystem(("c",), (("x",),))
    system = DecisionSystem(base, "d", ("y",))
    with pytest.raises(FoldError):
        run_decider(system, folds=2, seed=0)


def test_run_decider_deterministic():
    base = InformationSystem(
        ("f", "g"),
        tuple((str(i % 2), str(i % 3)) for i in range(9)),
    )
    system = DecisionSystem(base, "d", tuple("ynyynynyy"))
    a = run_decider(system, folds=3, seed=42)
    b = run_decider(system, folds=3, seed=42)
    assert a == b
