"""Rectangle mereogeometry and formation navigation.

Closed axis-aligned rectangles stand in for robots, obstacles and goals.
Graded containment is the overlap-area ratio; the two-way sum rho of those
ratios acts as a similarity (2 means identical), from which nearness and a
candidate-quantified betweenness are defined.  For navigation the workable
notion is extent-betweenness: lying inside the smallest rectangle spanning
two others.

Formations couple robots with between / not-between / max-dist constraints
written in a tiny s-expression language.  The simulator drives the lowest-id
robot down a grid potential field (breadth-first distance to the goal with
obstacles inflated by the largest robot half-extent) while the others pick,
each step, the move that first repairs constraint violations and then makes
progress.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import MereomlError

_EPS = 1e-9


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle with positive area."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise MereomlError(
                f"degenerate rectangle ({self.x1}, {self.y1}, {self.x2}, {self.y2})"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x1 + self.x2) / 2, (self.y1 + self.y2) / 2)

    def contains(self, other: "Rect") -> bool:
        return (
            self.x1 <= other.x1 + _EPS
            and other.x2 <= self.x2 + _EPS
            and self.y1 <= other.y1 + _EPS
            and other.y2 <= self.y2 + _EPS
        )

    def translated(self, dx: float, dy: float) -> "Rect":
        return Rect(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)


def overlap_area(a: Rect, b: Rect) -> float:
    w = min(a.x2, b.x2) - max(a.x1, b.x1)
    h = min(a.y2, b.y2) - max(a.y1, b.y1)
    return w * h if w > 0 and h > 0 else 0.0


def area_inclusion(a: Rect, b: Rect) -> float:
    """Share of a's area lying inside b; 1 exactly when a is contained in b."""
    return overlap_area(a, b) / a.area


def rho(a: Rect, b: Rect) -> float:
    """Two-way overlap similarity in [0, 2]; rho(a, a) = 2."""
    return area_inclusion(a, b) + area_inclusion(b, a)


def rho_normalized(a: Rect, b: Rect) -> float:
    """rho scaled into [0, 1], so 1 means identical rectangles."""
    return rho(a, b) / 2


def rnear(x: Rect, y: Rect, z: Rect) -> bool:
    """y is at least as near to x as z is: rho(x, y) >= rho(x, z)."""
    return rho(x, y) >= rho(x, z)


def rbtw(z: Rect, x: Rect, y: Rect, candidates: Sequence[Rect]) -> bool:
    """Betweenness relative to a finite comparison family.

    z counts as between x and y when no candidate other than z is strictly
    nearer to z than both x and y are.
    """
    return all(
        w == z or rnear(z, x, w) or rnear(z, y, w) for w in candidates
    )


def extent(a: Rect, b: Rect) -> Rect:
    """Smallest rectangle containing both; the lattice join."""
    return Rect(
        min(a.x1, b.x1), min(a.y1, b.y1), max(a.x2, b.x2), max(a.y2, b.y2)
    )


def between_extent(z: Rect, a: Rect, b: Rect) -> bool:
    """Navigational betweenness: z lies inside the extent of a and b."""
    return extent(a, b).contains(z)


# --- formations -------------------------------------------------------------

@dataclass(frozen=True)
class Between:
    robot: int
    a: int
    b: int


@dataclass(frozen=True)
class NotBetween:
    robot: int
    a: int
    b: int


@dataclass(frozen=True)
class MaxDist:
    delta: float
    robot: int
    inner: Between


Constraint = Union[Between, NotBetween, MaxDist]


@dataclass(frozen=True)
class Formation:
    """Named constraint set; ``species`` is the word robots go by in scripts."""

    name: str
    constraints: tuple[Constraint, ...]
    species: str = "roomba"

    def robot_ids(self) -> frozenset[int]:
        ids: set[int] = set()
        for c in self.constraints:
            if isinstance(c, MaxDist):
                ids |= {c.robot, c.inner.robot, c.inner.a, c.inner.b}
            else:
                ids |= {c.robot, c.a, c.b}
        return frozenset(ids)


class FormationParseError(MereomlError):
    """Formation script rejected; message carries a 1-based column."""


class _SexpTokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, int]] = []
        i = 0
        while i < len(text):
            c = text[i]
            if c.isspace():
                i += 1
            elif c in "()":
                self.items.append((c, i + 1))
                i += 1
            else:
                j = i
                while j < len(text) and not text[j].isspace() and text[j] not in "()":
                    j += 1
                self.items.append((text[i:j], i + 1))
                i = j
        self.pos = 0

    def peek(self) -> tuple[str, int]:
        if self.pos < len(self.items):
            return self.items[self.pos]
        return ("", len(self.text) + 1)

    def take(self, expected: str | None = None) -> tuple[str, int]:
        tok, col = self.peek()
        if not tok:
            raise FormationParseError(f"unexpected end of input at column {col}")
        if expected is not None and tok != expected:
            raise FormationParseError(
                f"expected {expected!r}, found {tok!r} at column {col}"
            )
        self.pos += 1
        return tok, col


def parse_formation(
    text: str, robot_ids: Sequence[int] | None = None
) -> Formation:
    """Parse a formation script like ``(cross (set (between roomba 0 ...)))``.

    When ``robot_ids`` is given, every referenced robot must be among them.
    All robot references must use one species word.
    """
    tokens = _SexpTokens(text)
    tokens.take("(")
    name, col = tokens.take()
    if name in "()" or name == "set":
        raise FormationParseError(f"expected formation name at column {col}")
    tokens.take("(")
    tokens.take("set")
    species: list[str] = []
    constraints = []
    while tokens.peek()[0] == "(":
        constraints.append(_parse_clause(tokens, species))
    tokens.take(")")
    tokens.take(")")
    trailing, col = tokens.peek()
    if trailing:
        raise FormationParseError(f"unexpected {trailing!r} at column {col}")
    formation = Formation(name, tuple(constraints), species[0] if species else "roomba")
    if robot_ids is not None:
        known = set(robot_ids)
        unknown = sorted(formation.robot_ids() - known)
        if unknown:
            raise FormationParseError(f"unknown robot ids {unknown}")
    return formation


def _parse_robot(tokens: _SexpTokens, species: list[str]) -> int:
    word, col = tokens.take()
    if word in "()":
        raise FormationParseError(f"expected robot name at column {col}")
    if species and word != species[0]:
        raise FormationParseError(
            f"robot species {word!r} at column {col} differs from {species[0]!r}"
        )
    if not species:
        species.append(word)
    num, col = tokens.take()
    try:
        return int(num)
    except ValueError:
        raise FormationParseError(
            f"expected robot number, found {num!r} at column {col}"
        ) from None


def _parse_clause(tokens: _SexpTokens, species: list[str]) -> Constraint:
    tokens.take("(")
    head, col = tokens.take()
    if head == "between":
        clause: Constraint = Between(
            _parse_robot(tokens, species),
            _parse_robot(tokens, species),
            _parse_robot(tokens, species),
        )
    elif head == "not-between":
        clause = NotBetween(
            _parse_robot(tokens, species),
            _parse_robot(tokens, species),
            _parse_robot(tokens, species),
        )
    elif head == "max-dist":
        num, ncol = tokens.take()
        try:
            delta = float(num)
        except ValueError:
            raise FormationParseError(
                f"expected a distance, found {num!r} at column {ncol}"
            ) from None
        if delta <= 0:
            raise FormationParseError(f"max-dist must be positive at column {ncol}")
        robot = _parse_robot(tokens, species)
        inner = _parse_clause(tokens, species)
        if not isinstance(inner, Between):
            raise FormationParseError(
                f"max-dist wraps a between clause (column {col})"
            )
        clause = MaxDist(delta, robot, inner)
    else:
        raise FormationParseError(f"unknown clause {head!r} at column {col}")
    tokens.take(")")
    return clause


def print_formation(formation: Formation) -> str:
    """Canonical script text; parse round-trips it."""
    sp = formation.species
    parts = [_print_clause(c, sp) for c in formation.constraints]
    inner = ("(set " + " ".join(parts) + ")") if parts else "(set)"
    return f"({formation.name} {inner})"


def _print_clause(c: Constraint, sp: str) -> str:
    if isinstance(c, Between):
        return f"(between {sp} {c.robot} {sp} {c.a} {sp} {c.b})"
    if isinstance(c, NotBetween):
        return f"(not-between {sp} {c.robot} {sp} {c.a} {sp} {c.b})"
    return f"(max-dist {c.delta:g} {sp} {c.robot} {_print_clause(c.inner, sp)})"


@dataclass(frozen=True)
class Violation:
    index: int
    constraint: Constraint
    reason: str


def _centroid_distance(a: Rect, b: Rect) -> float:
    ax, ay = a.center
    bx, by = b.center
    return math.hypot(ax - bx, ay - by)


def check_formation(
    formation: Formation, poses: Mapping[int, Rect]
) -> list[Violation]:
    """All constraints violated by the given poses, with their indices."""
    out = []
    for i, c in enumerate(formation.constraints):
        reason = _check_one(c, poses)
        if reason is not None:
            out.append(Violation(i, c, reason))
    return out


def _pose(poses: Mapping[int, Rect], rid: int) -> Rect:
    try:
        return poses[rid]
    except KeyError:
        raise MereomlError(f"no pose for robot {rid}") from None


def _check_one(c: Constraint, poses: Mapping[int, Rect]) -> str | None:
    if isinstance(c, Between):
        if not between_extent(_pose(poses, c.robot), _pose(poses, c.a), _pose(poses, c.b)):
            return f"robot {c.robot} outside extent of {c.a} and {c.b}"
        return None
    if isinstance(c, NotBetween):
        if between_extent(_pose(poses, c.robot), _pose(poses, c.a), _pose(poses, c.b)):
            return f"robot {c.robot} inside extent of {c.a} and {c.b}"
        return None
    inner_reason = _check_one(c.inner, poses)
    if inner_reason is not None:
        return inner_reason
    r = _pose(poses, c.robot)
    d = max(
        _centroid_distance(r, _pose(poses, c.inner.a)),
        _centroid_distance(r, _pose(poses, c.inner.b)),
    )
    if d > c.delta + _EPS:
        return f"robot {c.robot} at distance {d:.3f} > {c.delta}"
    return None


# --- world and navigation ---------------------------------------------------

@dataclass(frozen=True)
class World:
    """Bounded arena with obstacles, one goal region, and named robots."""

    bounds: Rect
    obstacles: tuple[Rect, ...]
    goal: Rect
    cell: float
    robots: tuple[tuple[int, Rect], ...]

    def __post_init__(self):
        if self.cell <= 0:
            raise MereomlError(f"cell size must be positive, got {self.cell}")
        if not self.bounds.contains(self.goal):
            raise MereomlError("goal outside world bounds")
        for o in self.obstacles:
            if overlap_area(o, self.goal) > 0:
                raise MereomlError("goal overlaps an obstacle")
        ids = [rid for rid, _ in self.robots]
        if len(set(ids)) != len(ids):
            raise MereomlError("duplicate robot ids")
        for rid, r in self.robots:
            if not self.bounds.contains(r):
                raise MereomlError(f"robot {rid} outside world bounds")

    @property
    def robot_poses(self) -> dict[int, Rect]:
        return dict(self.robots)


def load_world(path: str | Path) -> World:
    """Read a world from a line-oriented file.

    Directives ('#' comments allowed): ``bounds x1 y1 x2 y2``,
    ``cell SIZE``, ``obstacle x1 y1 x2 y2`` (repeat), ``goal x1 y1 x2 y2``,
    ``robot ID x1 y1 x2 y2`` (repeat).
    """
    bounds = goal = cell = None
    obstacles: list[Rect] = []
    robots: list[tuple[int, Rect]] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "bounds":
                bounds = Rect(*map(float, words[1:5]))
            elif words[0] == "cell":
                cell = float(words[1])
            elif words[0] == "obstacle":
                obstacles.append(Rect(*map(float, words[1:5])))
            elif words[0] == "goal":
                goal = Rect(*map(float, words[1:5]))
            elif words[0] == "robot":
                robots.append((int(words[1]), Rect(*map(float, words[2:6]))))
            else:
                raise MereomlError(f"unknown directive {words[0]!r}")
        except (IndexError, ValueError, TypeError):
            raise MereomlError(f"malformed world line {lineno}: {raw.strip()!r}") from None
    if bounds is None or goal is None or cell is None:
        raise MereomlError("world file needs bounds, goal and cell lines")
    robots.sort(key=lambda pair: pair[0])
    return World(bounds, tuple(obstacles), goal, cell, tuple(robots))


class PotentialField:
    """Per-cell distance-to-goal over the world grid; inf where blocked."""

    def __init__(self, world: World, inflate: float = 0.0):
        b = world.bounds
        self.x1, self.y1, self.cell = b.x1, b.y1, world.cell
        self.nx = max(1, round(b.width / world.cell))
        self.ny = max(1, round(b.height / world.cell))
        if (
            abs(self.nx * world.cell - b.width) > 1e-6
            or abs(self.ny * world.cell - b.height) > 1e-6
        ):
            raise MereomlError("world bounds are not a whole number of cells")
        self.inflate = inflate
        self.blocked = np.zeros((self.ny, self.nx), dtype=bool)
        for j in range(self.ny):
            for i in range(self.nx):
                cx, cy = self.center(i, j)
                near_edge = (
                    cx - inflate < b.x1 - _EPS
                    or cx + inflate > b.x2 + _EPS
                    or cy - inflate < b.y1 - _EPS
                    or cy + inflate > b.y2 + _EPS
                )
                inside_obstacle = any(
                    o.x1 - inflate + _EPS < cx < o.x2 + inflate - _EPS
                    and o.y1 - inflate + _EPS < cy < o.y2 + inflate - _EPS
                    for o in world.obstacles
                )
                self.blocked[j, i] = near_edge or inside_obstacle
        self.values = np.full((self.ny, self.nx), math.inf)
        queue: deque[tuple[int, int]] = deque()
        for j in range(self.ny):
            for i in range(self.nx):
                cx, cy = self.center(i, j)
                if (
                    not self.blocked[j, i]
                    and world.goal.x1 <= cx <= world.goal.x2
                    and world.goal.y1 <= cy <= world.goal.y2
                ):
                    self.values[j, i] = 0.0
                    queue.append((i, j))
        while queue:
            i, j = queue.popleft()
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ni, nj = i + di, j + dj
                if (
                    0 <= ni < self.nx
                    and 0 <= nj < self.ny
                    and not self.blocked[nj, ni]
                    and math.isinf(self.values[nj, ni])
                ):
                    self.values[nj, ni] = self.values[j, i] + 1
                    queue.append((ni, nj))

    def center(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.x1 + (i + 0.5) * self.cell,
            self.y1 + (j + 0.5) * self.cell,
        )

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        i = min(self.nx - 1, max(0, int((x - self.x1) / self.cell)))
        j = min(self.ny - 1, max(0, int((y - self.y1) / self.cell)))
        return i, j

    def value(self, i: int, j: int) -> float:
        return float(self.values[j, i])

    def is_blocked(self, i: int, j: int) -> bool:
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            return True
        return bool(self.blocked[j, i])


def build_potential(world: World, inflate: float = 0.0) -> PotentialField:
    """Flood-fill distance field to the goal, obstacles fattened by inflate."""
    return PotentialField(world, inflate)


@dataclass(frozen=True)
class LogEntry:
    robot: int
    rect: Rect
    potential: float
    violations: int


@dataclass(frozen=True)
class StepRecord:
    step: int
    entries: tuple[LogEntry, ...]


@dataclass(frozen=True)
class NavigationLog:
    """Complete trajectory with a terminal status.

    status is one of goal_reached, deadlock, step_budget, unreachable.
    """

    status: str
    steps: tuple[StepRecord, ...]
    field: PotentialField


# follower move preference when violation count and potential tie
_FOLLOWER_MOVES = (
    (0, 0), (0, 1), (0, -1), (-1, 0), (1, 0), (-1, 1), (1, 1), (-1, -1), (1, -1)
)
_LEADER_MOVES = _FOLLOWER_MOVES[1:]
_STALL_LIMIT = 5


def navigate(world: World, formation: Formation, max_steps: int = 1000) -> NavigationLog:
    """March the formation toward the goal; deterministic.

    The lowest-id robot strictly descends the potential; every other robot,
    in id order, picks the move minimizing (violations, potential, move
    preference).  Robots never enter blocked cells, so they can never touch
    an obstacle; they may overlap each other.  Termination: the leader's
    rectangle overlaps the goal with no violation outstanding, the step
    budget runs out, or nobody moves for five consecutive steps.
    """
    poses = world.robot_poses
    if not poses:
        raise MereomlError("world has no robots")
    unknown = sorted(formation.robot_ids() - set(poses))
    if unknown:
        raise MereomlError(f"formation references unknown robots {unknown}")
    inflate = max(max(r.width, r.height) / 2 for r in poses.values())
    field = build_potential(world, inflate)

    ids = sorted(poses)
    leader = ids[0]
    half = {rid: (poses[rid].width / 2, poses[rid].height / 2) for rid in ids}
    cells = {rid: field.cell_of(*poses[rid].center) for rid in ids}

    def rect_at(rid: int, cell: tuple[int, int]) -> Rect:
        cx, cy = field.center(*cell)
        hx, hy = half[rid]
        return Rect(cx - hx, cy - hy, cx + hx, cy + hy)

    def all_rects(cs: Mapping[int, tuple[int, int]]) -> dict[int, Rect]:
        return {rid: rect_at(rid, cs[rid]) for rid in ids}

    def record(step: int) -> StepRecord:
        rects = all_rects(cells)
        violations = len(check_formation(formation, rects))
        return StepRecord(
            step,
            tuple(
                LogEntry(rid, rects[rid], field.value(*cells[rid]), violations)
                for rid in ids
            ),
        )

    steps = [record(0)]
    if math.isinf(field.value(*cells[leader])):
        return NavigationLog("unreachable", tuple(steps), field)

    stall = 0
    status = "step_budget"
    for step in range(1, max_steps + 1):
        current = steps[-1]
        leader_rect = rect_at(leader, cells[leader])
        if (
            overlap_area(leader_rect, world.goal) > 0
            and current.entries[0].violations == 0
        ):
            status = "goal_reached"
            break
        moved = False
        # leader: strict greedy descent
        li, lj = cells[leader]
        best = field.value(li, lj)
        best_cell = None
        for di, dj in _LEADER_MOVES:
            ci, cj = li + di, lj + dj
            if field.is_blocked(ci, cj):
                continue
            v = field.value(ci, cj)
            if v < best - _EPS:
                best, best_cell = v, (ci, cj)
        if best_cell is not None:
            cells[leader] = best_cell
            moved = True
        # followers: repair first, then advance
        for rid in ids[1:]:
            ri, rj = cells[rid]
            choices = []
            for order, (di, dj) in enumerate(_FOLLOWER_MOVES):
                ci, cj = ri + di, rj + dj
                if field.is_blocked(ci, cj):
                    continue
                trial = dict(cells)
                trial[rid] = (ci, cj)
                bad = len(check_formation(formation, all_rects(trial)))
                choices.append((bad, field.value(ci, cj), order, (ci, cj)))
            choices.sort()
            chosen = choices[0][3]
            if chosen != (ri, rj):
                moved = True
            cells[rid] = chosen
        steps.append(record(step))
        if moved:
            stall = 0
        else:
            stall += 1
            if stall >= _STALL_LIMIT:
                status = "deadlock"
                break
    else:
        current = steps[-1]
        leader_rect = rect_at(leader, cells[leader])
        if (
            overlap_area(leader_rect, world.goal) > 0
            and current.entries[0].violations == 0
        ):
            status = "goal_reached"
    return NavigationLog(status, tuple(steps), field)


def write_trajectory_csv(log: NavigationLog, path: str | Path) -> None:
    lines = ["step,robot,x1,y1,x2,y2,potential,violations"]
    for rec in log.steps:
        for e in rec.entries:
            r = e.rect
            lines.append(
                f"{rec.step},{e.robot},{r.x1:.4f},{r.y1:.4f},{r.x2:.4f},{r.y2:.4f},"
                f"{e.potential:.0f},{e.violations}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_SVG_COLORS = ("#c22", "#27c", "#2a2", "#d80", "#93b", "#067", "#b33", "#555")


def write_trajectory_svg(log: NavigationLog, world: World, path: str | Path) -> None:
    """Plot obstacles (grey), goal (green) and per-robot paths as polylines."""
    scale = 60.0
    b = world.bounds

    def pt(x: float, y: float) -> tuple[float, float]:
        return ((x - b.x1) * scale, (b.y2 - y) * scale)

    def rect_svg(r: Rect, fill: str, opacity: float = 1.0) -> str:
        px, py = pt(r.x1, r.y2)
        return (
            f'<rect x="{px:.1f}" y="{py:.1f}" width="{r.width * scale:.1f}" '
            f'height="{r.height * scale:.1f}" fill="{fill}" fill-opacity="{opacity}"/>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{b.width * scale:.0f}" '
        f'height="{b.height * scale:.0f}">',
        rect_svg(b, "#fff"),
    ]
    for o in world.obstacles:
        parts.append(rect_svg(o, "#999"))
    parts.append(rect_svg(world.goal, "#3c3", 0.5))
    ids = [e.robot for e in log.steps[0].entries]
    for k, rid in enumerate(ids):
        color = _SVG_COLORS[k % len(_SVG_COLORS)]
        points = []
        for rec in log.steps:
            r = next(e.rect for e in rec.entries if e.robot == rid)
            px, py = pt(*r.center)
            points.append(f"{px:.1f},{py:.1f}")
        parts.append(
            f'<polyline points="{" ".join(points)}" fill="none" stroke="{color}" '
            f'stroke-width="2"/>'
        )
        px, py = points[-1].split(",")
        parts.append(f'<circle cx="{px}" cy="{py}" r="4" fill="{color}"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
