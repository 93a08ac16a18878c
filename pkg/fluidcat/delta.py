"""Thick points, the thickening map, strata and the directed system of
thick-point categories."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .errors import LawViolationError, LevelExceededError, UnknownObjectError, ZeroLevelError
from .fincat import FinCategory, FinFunctor, Morphism, Violation, codiscrete_category, validate_category
from .info_space import Atom, InfoSpace, ball, info_content, is_connected

logger = logging.getLogger(__name__)

THIN_LABEL = "pi.a"


@dataclass(frozen=True)
class ThickPoint:
    core: Atom
    level: int
    grading: tuple[tuple[Atom, int], ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.core, self.level, self.grading)))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def build(cls, core: Atom, level: int, degrees: Mapping[Atom, int]) -> "ThickPoint":
        grading = tuple(sorted(degrees.items(), key=lambda item: (item[1], item[0])))
        return cls(core, level, grading)

    @cached_property
    def degrees(self) -> dict[Atom, int]:
        return dict(self.grading)

    @cached_property
    def members(self) -> frozenset[Atom]:
        return frozenset(self.degrees)

    @property
    def max_degree(self) -> int:
        return max(self.degrees.values())

    @property
    def ident(self) -> str:
        return f"{self.core}@{self.level}"

    def degree(self, atom: Atom) -> int:
        return self.degrees[atom]


def point(core: Atom) -> ThickPoint:
    """Level-0 point: the bare atom."""
    return ThickPoint(core, 0, ((core, 0),))


def thicken(space: InfoSpace, epsilon: float, tp: ThickPoint) -> ThickPoint:
    grown = set(tp.members)
    for member in tp.members:
        grown |= ball(space, member, epsilon)
    degrees = dict(tp.degrees)
    for atom in grown - tp.members:
        degrees[atom] = tp.level
    return ThickPoint.build(tp.core, tp.level + 1, degrees)


def thick_point(space: InfoSpace, epsilon: float, core: Atom, level: int) -> ThickPoint:
    space.require(core)
    tp = point(core)
    for _ in range(level):
        tp = thicken(space, epsilon, tp)
    return tp


def strata(tp: ThickPoint) -> list[frozenset[Atom]]:
    if tp.level == 0:
        raise ZeroLevelError(f"{tp.ident} is a bare point and has no strata.")
    layers: list[set[Atom]] = [set() for _ in range(tp.max_degree + 1)]
    for atom, degree in tp.grading:
        layers[degree].add(atom)
    return [frozenset(layer) for layer in layers]


def check_strata(tp: ThickPoint) -> list[Violation]:
    if tp.level == 0:
        return []
    layers = strata(tp)
    violations: list[Violation] = []
    seen: set[Atom] = set()
    for k, layer in enumerate(layers):
        if seen & layer:
            violations.append(Violation("strata-disjoint", f"{tp.ident}: stratum {k} overlaps lower strata"))
        seen |= layer
    if seen != tp.members:
        violations.append(Violation("strata-union", f"{tp.ident}: strata do not cover the members"))
    return violations


def validate_thick_point(space: InfoSpace, epsilon: float, tp: ThickPoint) -> list[Violation]:
    expected = thick_point(space, epsilon, tp.core, tp.level)
    violations = check_strata(tp)
    if expected.members != tp.members:
        violations.append(Violation("thick-point-members", f"{tp.ident}: members differ from iterated thickening"))
    elif expected.degrees != tp.degrees:
        violations.append(Violation("thick-point-degrees", f"{tp.ident}: degrees differ from iterated thickening"))
    return violations


def referent_ratio(space: InfoSpace, tp: ThickPoint) -> float:
    return info_content(space, {tp.core}) / info_content(space, tp.members)


@dataclass(frozen=True, eq=False)
class ThickCategory:
    level: int
    points: tuple[ThickPoint, ...]
    category: FinCategory

    @cached_property
    def _by_core(self) -> dict[Atom, ThickPoint]:
        return {tp.core: tp for tp in self.points}

    def point(self, core: Atom) -> ThickPoint:
        try:
            return self._by_core[core]
        except KeyError:
            raise UnknownObjectError(f"No thick point with core '{core}' at level {self.level}.") from None


@dataclass(frozen=True, eq=False)
class DirectedSystem:
    space: InfoSpace
    epsilon: float
    levels: tuple[ThickCategory, ...]
    stabilization: Mapping[Atom, int | None]
    connected: bool

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    def category(self, level: int) -> ThickCategory:
        if not 0 <= level <= self.max_level:
            raise LevelExceededError(f"Level {level} is outside 0..{self.max_level}.")
        return self.levels[level]

    def point(self, core: Atom, level: int) -> ThickPoint:
        return self.category(level).point(core)


def build_system(space: InfoSpace, epsilon: float, max_level: int) -> DirectedSystem:
    if max_level < 0:
        raise LevelExceededError(f"max level must be >= 0, got {max_level}.")
    levels: list[ThickCategory] = []
    previous: tuple[ThickPoint, ...] | None = None
    for level in range(max_level + 1):
        if previous is None:
            points = tuple(point(core) for core in space.atoms)
        else:
            points = tuple(thicken(space, epsilon, tp) for tp in previous)
        category = codiscrete_category(points, THIN_LABEL, name=f"1d[{level}eps]")
        violations = validate_category(category)
        if violations:
            raise LawViolationError(f"level {level}: {violations[0].law}: {violations[0].detail}")
        levels.append(ThickCategory(level, points, category))
        previous = points

    stabilization: dict[Atom, int | None] = {}
    for core in space.atoms:
        stabilization[core] = None
        for level in range(1, max_level + 1):
            tp = levels[level].point(core)
            if thicken(space, epsilon, tp).members == tp.members:
                stabilization[core] = level
                break

    connected = is_connected(space, epsilon)
    if not connected:
        logger.warning("epsilon-graph at eps=%s is disconnected; colimits stop at components", epsilon)
    logger.debug("Built directed system up to level %d over %d atoms", max_level, len(space))
    return DirectedSystem(space, epsilon, tuple(levels), stabilization, connected)


def colimit(space: InfoSpace, epsilon: float, a: Atom) -> frozenset[Atom]:
    tp = thicken(space, epsilon, point(a))
    while True:
        grown = thicken(space, epsilon, tp)
        if grown.members == tp.members:
            return tp.members
        tp = grown


def delta_on_morphism(system: DirectedSystem, f: Morphism) -> Morphism:
    level = getattr(f.src, "level", None)
    if level is None or not system.category(level).category.has_morphism(f):
        raise UnknownObjectError(f"{f!r} is not a morphism of the directed system.")
    if level + 1 > system.max_level:
        raise LevelExceededError(f"Cannot thicken a level-{level} morphism; system stops at {system.max_level}.")
    upper = system.category(level + 1)
    src = upper.point(f.src.core)
    dst = upper.point(f.dst.core)
    return upper.category.hom(src, dst)[0]


def delta_functor(system: DirectedSystem, level: int) -> FinFunctor:
    lower = system.category(level)
    upper = system.category(level + 1)
    return FinFunctor(
        source=lower.category,
        target=upper.category,
        on_objects={tp: upper.point(tp.core) for tp in lower.points},
        on_morphisms={f: delta_on_morphism(system, f) for f in lower.category.morphisms},
    )
