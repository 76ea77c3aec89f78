"""Graded containment relations.

Every relation here answers the same question, "to what degree is x a part
of y", on a different domain: entities of a weighted carrier (mass ratio),
unit-interval scalars (residua and Archimedean forms), or objects of a
discrete table (agreeing-feature fraction and the exponential discount of
differing-feature weight).  All of them expose the maximal degree rs*; the
graded relation itself is ``holds(x, y, r)``, true exactly when rs* >= r.

The exponential form admits a multiplicative transitivity bound
``exp_compose``; its exponent carries a negative correction term, which is
what makes the bound sound (see the function docstring).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .dataset import DecisionSystem, InformationSystem, dis, ind_fraction
from .errors import DegreeUnderflow, MereomlError
from .mereo import Entity, EntityLike, WeightFn, entity_product

Degree = Union[Fraction, float]


# --- scalar building blocks -------------------------------------------------

def t_lukasiewicz(a: float, b: float) -> float:
    """Lukasiewicz t-norm max(0, a+b-1)."""
    return max(0, a + b - 1)


def residuum_lukasiewicz(a: float, b: float) -> float:
    """Residual implication of the Lukasiewicz t-norm: min(1, 1-a+b)."""
    return min(1, 1 - a + b)


def lukasiewicz_h(t: float) -> float:
    """Decreasing generator companion with h(0)=1; here simply 1-t."""
    return 1 - t


#: Additive generator of the Lukasiewicz t-norm; coincidentally equals h.
lukasiewicz_g = lukasiewicz_h


# --- maximal-degree functions -----------------------------------------------

def rs_star_weight(x: EntityLike, y: EntityLike, w: WeightFn) -> Fraction:
    """Mass ratio w(x*y)/w(x); the graded part-of on a weighted carrier."""
    wx = w(x)
    if wx == 0:
        raise DegreeUnderflow("first argument has weight 0; degree undefined")
    return w(entity_product(x, y)) / wx


def rs_star_residual(a: float, b: float, tnorm: str = "lukasiewicz") -> float:
    """Unit-interval containment via the t-norm residuum; 1 exactly when a <= b."""
    if tnorm != "lukasiewicz":
        raise MereomlError(f"no residuum registered for t-norm {tnorm!r}")
    return residuum_lukasiewicz(a, b)


def rs_star_archimedean(
    a: float,
    b: float,
    h: Callable[[float], float] = lukasiewicz_h,
    g: Callable[[float], float] = lukasiewicz_g,
) -> float:
    """Symmetric containment h(|a-b|) for an Archimedean decomposition (h, g).

    Only h enters the value; g is accepted so a decomposition pair can be
    passed around as one unit.
    """
    del g
    return h(abs(a - b))


def rs_star_is(x: int, y: int, system: InformationSystem | DecisionSystem) -> Fraction:
    """Fraction of conditional features on which two objects agree."""
    return ind_fraction(x, y, system)


@dataclass(frozen=True)
class FeatureWeights:
    """Positive per-feature weights for the exponential containment."""

    features: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.features) != len(self.values):
            raise MereomlError(
                f"{len(self.values)} weights for {len(self.features)} features"
            )
        if any(v <= 0 for v in self.values):
            raise MereomlError("feature weights must be positive")

    @classmethod
    def uniform(cls, features: Sequence[str]) -> "FeatureWeights":
        """1/|F| each, so any sum over differing features stays within [0,1]."""
        n = len(features)
        return cls(tuple(features), tuple(1 / n for _ in features))

    def __call__(self, feature: str) -> float:
        try:
            return self.values[self.features.index(feature)]
        except ValueError:
            raise MereomlError(f"no weight for feature {feature!r}") from None

    def total(self, features: Iterable[str]) -> float:
        return sum(self(f) for f in features)


def rs_star_exp(
    x: int,
    y: int,
    system: InformationSystem | DecisionSystem,
    fw: FeatureWeights | None = None,
) -> float:
    """exp(-(sum of weights of differing features)^2); 1 iff the rows agree."""
    if fw is None:
        fw = FeatureWeights.uniform(system.features)
    s = fw.total(dis(x, y, system))
    return math.exp(-(s * s))


def lukasiewicz_row_degree(row_a: Sequence[str], row_b: Sequence[str]) -> Fraction:
    """Agreeing-position fraction of two aligned value rows."""
    if len(row_a) != len(row_b):
        raise MereomlError(f"row lengths differ: {len(row_a)} vs {len(row_b)}")
    agree = sum(1 for a, b in zip(row_a, row_b) if a == b)
    return Fraction(agree, len(row_a))


def exp_row_degree(
    row_a: Sequence[str], row_b: Sequence[str], fw: FeatureWeights
) -> float:
    """Exponential degree of two aligned value rows under per-position weights."""
    if not (len(row_a) == len(row_b) == len(fw.values)):
        raise MereomlError(
            f"row/weight lengths differ: {len(row_a)}, {len(row_b)}, {len(fw.values)}"
        )
    s = sum(w for a, b, w in zip(row_a, row_b, fw.values) if a != b)
    return math.exp(-(s * s))


def exp_compose(r: float, s: float) -> float:
    """Transitivity bound for the exponential containment.

    alpha(r, s) = r * s * exp(-2 * sqrt(ln r * ln s)).  Writing A = -ln r and
    B = -ln s, the exponent of alpha is -(sqrt(A) + sqrt(B))^2; since the
    weight sums behind the degrees satisfy the triangle inequality, the
    composed degree exp(-(sqrt(A')+sqrt(B'))^2) can never drop below alpha.
    The correction term is a penalty: alpha(r, s) <= r * s <= min(r, s),
    with equality alpha(1, s) = s.
    """
    for v in (r, s):
        if v <= 0:
            raise DegreeUnderflow(f"degree {v} has no finite log; bound undefined")
        if v > 1:
            raise MereomlError(f"degree {v} outside (0, 1]")
    return r * s * math.exp(-2 * math.sqrt(math.log(r) * math.log(s)))


def fuzzy_similarity(x, y, inclusion: "RoughInclusion") -> Degree:
    """Symmetrized degree min(rs*(x,y), rs*(y,x)); reflexive and symmetric."""
    return min(inclusion.degree(x, y), inclusion.degree(y, x))


# --- packaged inclusion kinds -----------------------------------------------

class RoughInclusion:
    """A maximal-degree graded containment over some fixed context.

    Subclasses implement :meth:`degree`; ``holds(x, y, r)`` is always the
    comparison rs*(x, y) >= r.  ``symmetric`` advertises whether the degree
    function is symmetric in its arguments, which neighborhood construction
    requires.
    """

    symmetric: bool = False

    def degree(self, x, y) -> Degree:
        raise NotImplementedError

    def holds(self, x, y, r) -> bool:
        return self.degree(x, y) >= r


@dataclass(frozen=True)
class WeightRatioInclusion(RoughInclusion):
    """Entity containment by mass ratio; asymmetric."""

    w: WeightFn
    symmetric = False

    def degree(self, x: Entity, y: Entity) -> Fraction:
        return rs_star_weight(x, y, self.w)


@dataclass(frozen=True)
class ResidualInclusion(RoughInclusion):
    """Scalar containment a => b under a t-norm residuum; asymmetric."""

    tnorm: str = "lukasiewicz"
    symmetric = False

    def degree(self, a: float, b: float) -> float:
        return rs_star_residual(a, b, self.tnorm)


@dataclass(frozen=True)
class ArchimedeanInclusion(RoughInclusion):
    """Scalar similarity h(|a-b|); symmetric."""

    symmetric = True

    def degree(self, a: float, b: float) -> float:
        return rs_star_archimedean(a, b)


def _encode_columns(table: InformationSystem) -> np.ndarray:
    """Rows as an objects x features array of small integer value codes."""
    n, m = len(table.rows), len(table.features)
    codes = np.empty((n, m), dtype=np.int32)
    for j in range(m):
        col = [row[j] for row in table.rows]
        _, inverse = np.unique(col, return_inverse=True)
        codes[:, j] = inverse
    return codes


@dataclass(frozen=True)
class LukasiewiczInclusion(RoughInclusion):
    """Object containment on a discrete table: agreeing-feature fraction.

    Degrees are exact rationals with denominator |F|.  The pairwise count of
    differing features is cached as a matrix, so neighborhoods over all
    objects cost one integer comparison per pair.
    """

    system: InformationSystem | DecisionSystem
    symmetric = True

    @property
    def _table(self) -> InformationSystem:
        s = self.system
        return s.system if isinstance(s, DecisionSystem) else s

    @cached_property
    def dis_counts(self) -> np.ndarray:
        codes = _encode_columns(self._table)
        # pairwise count of differing features, one boolean layer per feature
        return (codes[:, None, :] != codes[None, :, :]).sum(axis=2, dtype=np.int16)

    def degree(self, x: int, y: int) -> Fraction:
        m = len(self._table.features)
        return Fraction(m - int(self.dis_counts[x, y]), m)

    def membership_mask(self, center: int, r) -> np.ndarray:
        """Boolean row over all objects: degree(y, center) >= r."""
        m = len(self._table.features)
        # degree >= r  iff  dis <= m*(1-r); exact via rational floor
        limit = math.floor(m * (1 - Fraction(r)))
        return self.dis_counts[center] <= limit


@dataclass(frozen=True)
class ExponentialInclusion(RoughInclusion):
    """Object containment exp(-(weighted differing-feature sum)^2); symmetric."""

    system: InformationSystem | DecisionSystem
    weights: FeatureWeights | None = None

    symmetric = True

    @property
    def _table(self) -> InformationSystem:
        s = self.system
        return s.system if isinstance(s, DecisionSystem) else s

    def _weights(self) -> FeatureWeights:
        return self.weights or FeatureWeights.uniform(self._table.features)

    @cached_property
    def dis_weight_sums(self) -> np.ndarray:
        codes = _encode_columns(self._table)
        fw = self._weights()
        per_feature = np.array([fw(f) for f in self._table.features])
        differs = codes[:, None, :] != codes[None, :, :]
        return (differs * per_feature).sum(axis=2)

    def degree(self, x: int, y: int) -> float:
        s = float(self.dis_weight_sums[x, y])
        return math.exp(-(s * s))

    def membership_mask(self, center: int, r: float) -> np.ndarray:
        if r <= 0:
            return np.ones(len(self.dis_weight_sums), dtype=bool)
        # exp(-S^2) >= r  iff  S <= sqrt(-ln r); small slack absorbs fp noise
        return self.dis_weight_sums[center] <= math.sqrt(-math.log(r)) + 1e-12
