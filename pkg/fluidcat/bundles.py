"""Tower bundles: Grothendieck constructions of the tower functors over the
thick-point categories, their thickening, threads and the duality checks."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import Any

from .delta import DirectedSystem, ThickPoint, delta_on_morphism
from .errors import LawViolationError, LevelExceededError, NonComposablePathError
from .fincat import (
    ElementsCategory,
    FinCategory,
    FinFunctor,
    GroupoidFunctor,
    GroupoidValuedFunctor,
    Morphism,
    Violation,
    category_of_elements,
    check_cofibered,
    pair_sample,
    power,
)
from .info_space import Atom, InfoSpace
from .towers import Tower, TowerGroupoid, canonical_tower, delta_tower, kay, kay_sum, merge_all, unit_groupoid

logger = logging.getLogger(__name__)

Generators = Mapping[Atom, Sequence[Tower]]


@dataclass(frozen=True, eq=False)
class TowerFunctor(GroupoidValuedFunctor):
    """chi_p (arity 1) or chi_{p,q}: base objects to reshaping groupoids of towers."""

    space: InfoSpace
    epsilon: float
    level: int
    arity: int
    generators: Mapping[Atom, tuple[Tower, ...]]


@dataclass(frozen=True, eq=False)
class TowerBundle:
    chi: TowerFunctor
    elements: ElementsCategory
    delta_in: FinFunctor | None = None

    @property
    def level(self) -> int:
        return self.chi.level

    @property
    def arity(self) -> int:
        return self.chi.arity

    @property
    def space(self) -> InfoSpace:
        return self.chi.space

    @property
    def base(self) -> FinCategory:
        return self.elements.base

    @property
    def category(self) -> FinCategory:
        return self.elements.category


def _kay_groupoids(
    system: DirectedSystem, level: int, generators: Mapping[Atom, tuple[Tower, ...]]
) -> dict[ThickPoint, TowerGroupoid]:
    return {
        tp: kay(system.space, system.epsilon, tp, generators.get(tp.core, ()))
        for tp in system.category(level).points
    }


def _freeze(generators: Generators | None) -> dict[Atom, tuple[Tower, ...]]:
    return {core: tuple(towers) for core, towers in (generators or {}).items()}


def _action(base: FinCategory, fibers: Mapping[Any, Any], f: Morphism, target: Tower) -> GroupoidFunctor:
    """Identities fix every tower; any other arrow sends each tower to ``target``."""
    source = fibers[f.src]
    if f == base.identities[f.src]:
        return GroupoidFunctor(source, source, {tower: tower for tower in source.objects})
    return GroupoidFunctor(source, fibers[f.dst], {tower: target for tower in source.objects})


def build_chi_p(system: DirectedSystem, level: int, generators: Generators | None = None) -> TowerFunctor:
    frozen = _freeze(generators)
    thick = system.category(level)
    groupoids = _kay_groupoids(system, level, frozen)
    fibers = {tp: groupoids[tp].groupoid for tp in thick.points}
    canonical = {tp: canonical_tower(system.space, system.epsilon, tp) for tp in thick.points}
    actions = {f: _action(thick.category, fibers, f, canonical[f.dst]) for f in thick.category.morphisms}
    return TowerFunctor(
        base=thick.category,
        on_objects=fibers,
        on_morphisms=actions,
        space=system.space,
        epsilon=system.epsilon,
        level=level,
        arity=1,
        generators=frozen,
    )


def build_chi_pq(
    system: DirectedSystem, level: int, arity: int, generators: Generators | None = None
) -> TowerFunctor:
    if arity < 1:
        raise ValueError(f"arity must be >= 1, got {arity}.")
    if arity == 1:
        return build_chi_p(system, level, generators)

    frozen = _freeze(generators)
    thick = system.category(level)
    base = power(thick.category, arity, name=f"{thick.category.name}^{arity}")
    groupoids = _kay_groupoids(system, level, frozen)
    canonical = {tp: canonical_tower(system.space, system.epsilon, tp) for tp in thick.points}

    merged: dict[tuple[ThickPoint, ...], TowerGroupoid] = {
        obj: reduce(kay_sum, (groupoids[tp] for tp in obj), unit_groupoid()) for obj in base.objects
    }
    fibers = {obj: group.groupoid for obj, group in merged.items()}
    targets = {obj: merge_all(canonical[tp] for tp in obj) for obj in base.objects}
    actions = {f: _action(base, fibers, f, targets[f.dst]) for f in base.morphisms}
    return TowerFunctor(
        base=base,
        on_objects=fibers,
        on_morphisms=actions,
        space=system.space,
        epsilon=system.epsilon,
        level=level,
        arity=arity,
        generators=frozen,
    )


def build_bundle(chi: TowerFunctor, check: bool = True) -> TowerBundle:
    elements = category_of_elements(chi)
    if check:
        violations = check_cofibered(elements, sample=pair_sample(elements.category))
        if violations:
            raise LawViolationError(f"{violations[0].law}: {violations[0].detail}")
    logger.debug(
        "Bundle p=%d q=%d: %d objects, %d morphisms",
        chi.level,
        chi.arity,
        len(elements.category.objects),
        len(elements.category.morphisms),
    )
    return TowerBundle(chi, elements)


def _delta_base_object(system: DirectedSystem, obj: Any) -> Any:
    if isinstance(obj, ThickPoint):
        return system.point(obj.core, obj.level + 1)
    return tuple(system.point(tp.core, tp.level + 1) for tp in obj)


def _delta_base_morphism(system: DirectedSystem, f: Morphism) -> Morphism:
    if isinstance(f.src, ThickPoint):
        return delta_on_morphism(system, f)
    parts = tuple(delta_on_morphism(system, part) for part in f.label)
    return Morphism(tuple(m.src for m in parts), tuple(m.dst for m in parts), parts)


def delta_bundle(system: DirectedSystem, bundle: TowerBundle) -> TowerBundle:
    """The bundle one level up whose fibers hold the thickened towers, together
    with the thickening functor from ``bundle`` into it."""
    level = bundle.level
    if level + 1 > system.max_level:
        raise LevelExceededError(f"Cannot thicken a level-{level} bundle; system stops at {system.max_level}.")
    space, epsilon = system.space, system.epsilon

    generators = {
        tp.core: tuple(delta_tower(space, epsilon, tower) for tower in group.towers)
        for tp, group in _kay_groupoids(system, level, bundle.chi.generators).items()
    }
    upper = build_bundle(build_chi_pq(system, level + 1, bundle.arity, generators))

    # images resolve to the upper bundle's own instances so later lookups compare by identity
    interned = {obj: obj for obj in upper.category.objects}
    on_objects: dict[Any, Any] = {}
    for c, tower in bundle.category.objects:
        image = (_delta_base_object(system, c), delta_tower(space, epsilon, tower))
        if image not in interned:
            raise LawViolationError(f"thickened element {image!r} is missing from the level-{level + 1} bundle")
        on_objects[(c, tower)] = interned[image]

    base_images = {f: _delta_base_morphism(system, f) for f in bundle.base.morphisms}
    on_morphisms: dict[Morphism, Morphism] = {}
    for m in bundle.category.morphisms:
        candidates = upper.elements.lifts_between(on_objects[m.src], on_objects[m.dst], base_images[m.label[0]])
        if len(candidates) != 1:
            raise LawViolationError(f"{len(candidates)} thickenings of {m!r}")
        on_morphisms[m] = candidates[0]

    functor = FinFunctor(bundle.category, upper.category, on_objects, on_morphisms)
    return TowerBundle(upper.chi, upper.elements, delta_in=functor)


def bundle_sequence(
    system: DirectedSystem, arity: int = 1, generators: Generators | None = None, start: int = 1
) -> list[TowerBundle]:
    bundles = [build_bundle(build_chi_pq(system, start, arity, generators))]
    for _ in range(start, system.max_level):
        bundles.append(delta_bundle(system, bundles[-1]))
    return bundles


@dataclass(frozen=True, slots=True)
class Thread:
    start: Any
    base_path: tuple[Morphism, ...]
    lift: tuple[Morphism, ...]


def _check_path(base: FinCategory, gamma: Sequence[Morphism], start: Any) -> Any:
    if not gamma:
        if start is None:
            raise NonComposablePathError("An empty path needs a start object.")
        return base.require(start)
    for f in gamma:
        if not base.has_morphism(f):
            raise NonComposablePathError(f"{f!r} is not a base morphism.")
    for f, g in zip(gamma, gamma[1:]):
        if f.dst != g.src:
            raise NonComposablePathError(f"{g!r} does not start where {f!r} ends.")
    if start is not None and start != gamma[0].src:
        raise NonComposablePathError("The path does not begin at the given start object.")
    return gamma[0].src


def threads(bundle: TowerBundle, gamma: Sequence[Morphism], start: Any = None) -> list[Thread]:
    gamma = tuple(gamma)
    origin = _check_path(bundle.base, gamma, start)
    elements = bundle.elements
    found: list[Thread] = []

    def extend(first: Any, current: Any, lifted: tuple[Morphism, ...]) -> None:
        step = len(lifted)
        if step == len(gamma):
            found.append(Thread(first, gamma, lifted))
            return
        for m in bundle.category.out(current):
            if elements.over(m, gamma[step]):
                extend(first, m.dst, lifted + (m,))

    for obj in elements.fiber(origin):
        extend(obj, obj, ())
    return found


@dataclass(frozen=True, slots=True)
class PathKay:
    base_path: tuple[Morphism, ...]
    threads: tuple[Thread, ...]
    closed_form: int


def kay_of_path(bundle: TowerBundle, gamma: Sequence[Morphism], start: Any = None) -> PathKay:
    """All threads over ``gamma`` and the fiber-size product they should number."""
    gamma = tuple(gamma)
    found = threads(bundle, gamma, start)
    origin = gamma[0].src if gamma else start
    stops = [origin, *(f.dst for f in gamma)]
    closed_form = math.prod(len(bundle.elements.fiber(c)) for c in stops)
    return PathKay(gamma, tuple(found), closed_form)


def kay_cover_check(bundle: TowerBundle) -> list[Violation]:
    covered: set[Atom] = set()
    for _, tower in bundle.category.objects:
        if tower.top is not None:
            covered |= tower.top.members
    missing = bundle.space.omega - covered
    if missing:
        return [Violation("kay-cover", f"tower tops miss {sorted(missing)}")]
    return []


@dataclass(frozen=True, slots=True)
class RecoveredBase:
    objects: frozenset[Any]
    hom_sizes: Mapping[tuple[Any, Any], int]
    fibers: Mapping[Any, int]

    @property
    def morphism_count(self) -> int:
        return sum(self.hom_sizes.values())


def recover_base(bundle: TowerBundle) -> RecoveredBase:
    projection = bundle.elements.projection
    objects = frozenset(projection.on_objects[obj] for obj in bundle.category.objects if obj in projection.on_objects)
    arrows = {projection.on_morphisms[m] for m in bundle.category.morphisms if m in projection.on_morphisms}
    hom_sizes: dict[tuple[Any, Any], int] = defaultdict(int)
    for arrow in arrows:
        hom_sizes[(arrow.src, arrow.dst)] += 1
    fibers: dict[Any, int] = defaultdict(int)
    for obj in bundle.category.objects:
        if obj in projection.on_objects:
            fibers[projection.on_objects[obj]] += 1
    return RecoveredBase(objects, dict(hom_sizes), dict(fibers))


def duality_roundtrip(bundle: TowerBundle, system: DirectedSystem) -> list[Violation]:
    """Recover the base from the bundle alone and compare it with the thick-point
    category (or its power) it was built over."""
    violations: list[Violation] = []
    projection = bundle.elements.projection
    for obj in bundle.category.objects:
        if obj not in projection.on_objects:
            violations.append(Violation("projection-total", f"object {obj!r} has no projection"))
    for m in bundle.category.morphisms:
        if m not in projection.on_morphisms:
            violations.append(Violation("projection-total", f"morphism {m!r} has no projection"))

    thick = system.category(bundle.level).category
    expected = thick if bundle.arity == 1 else power(thick, bundle.arity)
    recovered = recover_base(bundle)

    missing = set(expected.objects) - recovered.objects
    extra = recovered.objects - set(expected.objects)
    if missing or extra:
        violations.append(
            Violation("base-objects", f"{len(missing)} base objects missing, {len(extra)} unexpected")
        )
        return violations

    for a in expected.objects:
        for b in expected.objects:
            want = len(expected.hom(a, b))
            got = recovered.hom_sizes.get((a, b), 0)
            if want != got:
                violations.append(Violation("base-hom", f"|Hom| recovered {got}, expected {want}"))
    for obj in expected.objects:
        if recovered.fibers.get(obj, 0) == 0:
            violations.append(Violation("empty-fiber", f"no elements over {obj!r}"))
    return violations
