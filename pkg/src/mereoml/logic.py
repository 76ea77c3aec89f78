"""Descriptor formulas over a table, evaluated on granules.

A formula is built from atoms ``feature = value`` with ``!``, ``&``, ``|``
and ``->``.  Its meaning is the set of objects satisfying it classically.
On a granule g the formula acquires a degree: how far g sits inside the
meaning, measured three-valuedly (in, out, or astride) or proportionally
(the fraction of g covered).  Truth at g is degree 1, which for the
proportional measure is exactly containment of g in the meaning.

``collapse_value`` forgets the object variable instead: it values every
atom by its proportional degree on g and folds the connectives many-valuedly
(not: 1-v, implies: min(1, 1-v+w), and: min, or: max).  All degrees are
exact rationals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .dataset import DecisionSystem, InformationSystem
from .errors import MereomlError


class ParseError(MereomlError):
    """Formula text rejected; the message carries a 1-based column."""


class UnknownValue(MereomlError):
    """An atom names a value never observed for its feature."""


# --- syntax -----------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    feature: str
    value: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Implies]

_WORD_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.")


class _Tokens:
    """Scanner producing (kind, text, column) triples, columns 1-based."""

    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        i = 0
        while i < len(text):
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c in "!&|()=":
                self.items.append((c, c, i + 1))
                i += 1
            elif text.startswith("->", i):
                self.items.append(("->", "->", i + 1))
                i += 2
            elif c in _WORD_CHARS:
                j = i
                while j < len(text) and text[j] in _WORD_CHARS:
                    j += 1
                self.items.append(("word", text[i:j], i + 1))
                i = j
            else:
                raise ParseError(f"unexpected character {c!r} at column {i + 1}")
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        if self.pos < len(self.items):
            return self.items[self.pos]
        return ("end", "", len(self.text) + 1)

    def take(self, kind: str) -> tuple[str, str, int]:
        item = self.peek()
        if item[0] != kind:
            got = repr(item[1]) if item[0] != "end" else "end of input"
            raise ParseError(f"expected {kind!r}, found {got} at column {item[2]}")
        self.pos += 1
        return item


def parse_formula(
    text: str,
    system: InformationSystem | DecisionSystem | None = None,
    allow_unseen: bool = False,
) -> Formula:
    """Parse formula text; when a system is given, check atoms against it.

    Features must exist in the system (the decision feature counts); values
    must have been observed for their feature unless ``allow_unseen``.
    """
    tokens = _Tokens(text)
    formula = _parse_imp(tokens)
    trailing = tokens.peek()
    if trailing[0] != "end":
        raise ParseError(
            f"unexpected {trailing[1]!r} at column {trailing[2]}"
        )
    if system is not None:
        _check_atoms(formula, system, allow_unseen)
    return formula


def _parse_imp(tokens: _Tokens) -> Formula:
    left = _parse_or(tokens)
    if tokens.peek()[0] == "->":
        tokens.take("->")
        return Implies(left, _parse_imp(tokens))
    return left


def _parse_or(tokens: _Tokens) -> Formula:
    node = _parse_and(tokens)
    while tokens.peek()[0] == "|":
        tokens.take("|")
        node = Or(node, _parse_and(tokens))
    return node


def _parse_and(tokens: _Tokens) -> Formula:
    node = _parse_not(tokens)
    while tokens.peek()[0] == "&":
        tokens.take("&")
        node = And(node, _parse_not(tokens))
    return node


def _parse_not(tokens: _Tokens) -> Formula:
    kind, _, _ = tokens.peek()
    if kind == "!":
        tokens.take("!")
        return Not(_parse_not(tokens))
    if kind == "(":
        tokens.take("(")
        inner = _parse_imp(tokens)
        tokens.take(")")
        return inner
    feature = tokens.take("word")[1]
    tokens.take("=")
    value = tokens.take("word")[1]
    return Atom(feature, value)


def _check_atoms(formula: Formula, system, allow_unseen: bool) -> None:
    for atom in iter_atoms(formula):
        observed = _observed_values(atom.feature, system)
        if not allow_unseen and atom.value not in observed:
            raise UnknownValue(
                f"value {atom.value!r} never observed for feature {atom.feature!r}"
            )


def _observed_values(feature: str, system) -> frozenset[str]:
    if isinstance(system, DecisionSystem):
        if feature == system.decision:
            return system.decision_values
        return system.system.value_set(feature)
    return system.value_set(feature)


def iter_atoms(formula: Formula) -> Iterable[Atom]:
    if isinstance(formula, Atom):
        yield formula
    elif isinstance(formula, Not):
        yield from iter_atoms(formula.sub)
    else:
        yield from iter_atoms(formula.left)
        yield from iter_atoms(formula.right)


_LEVEL = {Implies: 1, Or: 2, And: 3, Not: 4, Atom: 5}


def print_formula(formula: Formula) -> str:
    """Concrete syntax with minimal parentheses; parse round-trips it."""
    return _print(formula, 1)


def _print(node: Formula, context: int) -> str:
    if isinstance(node, Atom):
        return f"{node.feature}={node.value}"
    if isinstance(node, Not):
        body = "!" + _print(node.sub, 4)
    elif isinstance(node, And):
        body = f"{_print(node.left, 3)} & {_print(node.right, 4)}"
    elif isinstance(node, Or):
        body = f"{_print(node.left, 2)} | {_print(node.right, 3)}"
    else:
        body = f"{_print(node.left, 2)} -> {_print(node.right, 1)}"
    return f"({body})" if _LEVEL[type(node)] < context else body


# --- semantics --------------------------------------------------------------

def satisfies(obj: int, formula: Formula, system) -> bool:
    if isinstance(formula, Atom):
        return system.value(obj, formula.feature) == formula.value
    if isinstance(formula, Not):
        return not satisfies(obj, formula.sub, system)
    if isinstance(formula, And):
        return satisfies(obj, formula.left, system) and satisfies(obj, formula.right, system)
    if isinstance(formula, Or):
        return satisfies(obj, formula.left, system) or satisfies(obj, formula.right, system)
    return not satisfies(obj, formula.left, system) or satisfies(obj, formula.right, system)


def meaning(formula: Formula, system) -> frozenset[int]:
    """The set of objects classically satisfying the formula."""
    for atom in iter_atoms(formula):
        if isinstance(system, DecisionSystem):
            if atom.feature != system.decision:
                system.system.feature_index(atom.feature)
        else:
            system.feature_index(atom.feature)
    return frozenset(x for x in system.objects if satisfies(x, formula, system))


class NuMode(enum.Enum):
    """How far a set X sits inside a set Y."""

    NU3 = "nu3"
    NUL = "nul"


def nu(mode: NuMode, x: frozenset[int], y: frozenset[int]) -> Fraction:
    """Containment degree of x in y: three-valued or proportional.

    The proportional mode returns |x intersect y| / |x|, with the empty x
    vacuously contained (degree 1).
    """
    if mode is NuMode.NU3:
        if x <= y:
            return Fraction(1)
        if not x & y:
            return Fraction(0)
        return Fraction(1, 2)
    if not x:
        return Fraction(1)
    return Fraction(len(x & y), len(x))


def extension(
    g: frozenset[int],
    formula: Formula,
    system,
    mode: NuMode = NuMode.NUL,
) -> Fraction:
    """Degree to which the formula's meaning covers the granule."""
    return nu(mode, frozenset(g), meaning(formula, system))


def is_true_at(g: frozenset[int], formula: Formula, system) -> bool:
    """Truth at a granule: the granule lies inside the meaning.

    For a rule a -> b this is equivalent to (g intersect [a]) being inside
    [b], since the meaning of the rule is the material implication set.
    """
    return frozenset(g) <= meaning(formula, system)


@dataclass(frozen=True)
class GranuleSet:
    """A family of nonempty granules carrying one logic."""

    granules: tuple[frozenset[int], ...]

    def __post_init__(self):
        if any(not g for g in self.granules):
            raise MereomlError("empty granules carry no logic; drop them first")

    def __iter__(self):
        return iter(self.granules)


def is_valid(granules: GranuleSet | Iterable[frozenset[int]], formula: Formula, system) -> bool:
    """Validity: truth at the union of all granules."""
    union: set[int] = set()
    for g in granules:
        union |= g
    return frozenset(union) <= meaning(formula, system)


def graded_truth(
    g: frozenset[int],
    formula: Formula,
    system,
    r,
    mode: NuMode = NuMode.NUL,
) -> bool:
    """Truth to degree at least r."""
    return extension(g, formula, system, mode) >= r


def collapse_value(g: frozenset[int], formula: Formula, system) -> Fraction:
    """Many-valued worth of the propositional skeleton on a granule.

    Atoms take their proportional degree on g; connectives fold by the
    many-valued truth functions (not: 1-v, implies: min(1, 1-v+w), and:
    min, or: max).  Exact rational throughout.
    """
    g = frozenset(g)
    if isinstance(formula, Atom):
        return nu(NuMode.NUL, g, meaning(formula, system))
    if isinstance(formula, Not):
        return 1 - collapse_value(g, formula.sub, system)
    if isinstance(formula, And):
        return min(
            collapse_value(g, formula.left, system),
            collapse_value(g, formula.right, system),
        )
    if isinstance(formula, Or):
        return max(
            collapse_value(g, formula.left, system),
            collapse_value(g, formula.right, system),
        )
    v = collapse_value(g, formula.left, system)
    w = collapse_value(g, formula.right, system)
    return min(Fraction(1), 1 - v + w)


@dataclass(frozen=True)
class RuleAudit:
    """All truth readings of one rule on one granule, side by side."""

    true_at_g: bool
    extension_of_rule: Fraction
    collapse_alpha: Fraction
    collapse_beta: Fraction
    collapse_rule: Fraction


def rule_audit(
    g: frozenset[int],
    alpha: Formula,
    beta: Formula,
    system,
    mode: NuMode = NuMode.NUL,
) -> RuleAudit:
    g = frozenset(g)
    rule = Implies(alpha, beta)
    return RuleAudit(
        true_at_g=is_true_at(g, rule, system),
        extension_of_rule=extension(g, rule, system, mode),
        collapse_alpha=collapse_value(g, alpha, system),
        collapse_beta=collapse_value(g, beta, system),
        collapse_rule=collapse_value(g, rule, system),
    )
