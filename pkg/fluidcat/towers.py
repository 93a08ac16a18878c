"""Towers over thick points, their reshaping groupoids and the merge product."""

from __future__ import annotations

import logging
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property, reduce

from .delta import ThickPoint, thicken
from .errors import BaseMismatchError, InvalidTowerError, RepresentativeMismatchError
from .fincat import FinGroupoid, Morphism, Violation, codiscrete_groupoid
from .info_space import Atom, InfoSpace, ball

logger = logging.getLogger(__name__)

RESHAPE_LABEL = "reshape"


@dataclass(frozen=True)
class CrossSection:
    intensity: tuple[tuple[Atom, float], ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(self.intensity))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def build(cls, intensity: Mapping[Atom, float]) -> "CrossSection":
        return cls(tuple(sorted(intensity.items())))

    @classmethod
    def full(cls, space: InfoSpace) -> "CrossSection":
        return cls.build({atom: 1.0 for atom in space.atoms})

    @cached_property
    def weights(self) -> dict[Atom, float]:
        return dict(self.intensity)

    @cached_property
    def members(self) -> frozenset[Atom]:
        return frozenset(self.weights)


@dataclass(frozen=True)
class Tower:
    feet: tuple[ThickPoint, ...]
    sections: tuple[CrossSection, ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.feet, self.sections)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def arity(self) -> int:
        return len(self.feet)

    @property
    def top(self) -> CrossSection | None:
        return self.sections[-1] if self.sections else None


EMPTY_TOWER = Tower((), ())


def _grow(space: InfoSpace, epsilon: float, members: Iterable[Atom]) -> frozenset[Atom]:
    grown: set[Atom] = set()
    for atom in members:
        grown |= ball(space, atom, epsilon)
    return frozenset(grown)


def validate_tower(space: InfoSpace, tower: Tower) -> list[Violation]:
    if not tower.feet:
        if tower.sections:
            return [Violation("empty-tower", "a tower without feet must carry no sections")]
        return []
    if not tower.sections:
        return [Violation("sections-empty", "tower has no cross-sections")]

    violations: list[Violation] = []
    for k, section in enumerate(tower.sections):
        if not section.members <= space.omega:
            violations.append(Violation("unknown-atom", f"section {k} leaves the atom set"))
        if any(not 0 < w <= 1 for w in section.weights.values()):
            violations.append(Violation("intensity-range", f"section {k} has an intensity outside (0, 1]"))

    base = frozenset().union(*(foot.members for foot in tower.feet))
    if tower.sections[0].members != base:
        violations.append(Violation("base", "first section differs from the union of the feet"))
    top = tower.sections[-1]
    if top.members != space.omega or any(w != 1 for w in top.weights.values()):
        violations.append(Violation("omega-top", "last section is not the full atom set at intensity 1"))

    for k in range(len(tower.sections) - 1):
        lower, upper = tower.sections[k], tower.sections[k + 1]
        if not lower.members <= upper.members:
            violations.append(Violation("monotone-members", f"section {k} is not contained in section {k + 1}"))
            continue
        if any(lower.weights[a] > upper.weights[a] for a in lower.members):
            violations.append(Violation("monotone-intensity", f"intensity drops between sections {k} and {k + 1}"))
    return violations


def canonical_tower(space: InfoSpace, epsilon: float, foot: ThickPoint) -> Tower:
    chain = [foot.members]
    while True:
        grown = _grow(space, epsilon, chain[-1])
        if grown == chain[-1]:
            break
        chain.append(grown)
    chain.append(space.omega)
    sections = tuple(CrossSection.build({atom: 1.0 for atom in members}) for members in chain)
    return Tower((foot,), sections)


def random_tower(space: InfoSpace, epsilon: float, foot: ThickPoint, rng: random.Random) -> Tower:
    """A valid tower over ``foot``: the canonical chain with some sections held
    for extra steps and the lower sections faded."""
    base = canonical_tower(space, epsilon, foot)
    chain = list(base.sections[:-1])
    for _ in range(rng.randint(0, 2)):
        k = rng.randrange(len(chain))
        chain.insert(k, chain[k])
    fade = rng.choice((1.0, 0.75, 0.5, 0.25))
    faded = [CrossSection.build({a: w * fade for a, w in section.intensity}) for section in chain]
    return Tower(base.feet, tuple(faded) + (base.sections[-1],))


@dataclass(frozen=True, slots=True)
class Reshaping:
    source: Tower
    target: Tower


def reshape(tower: Tower, other: Tower) -> Reshaping:
    if tower.feet != other.feet:
        raise BaseMismatchError("Towers over different feet cannot be reshaped into each other.")
    return Reshaping(tower, other)


def _merge_sections(left: CrossSection, right: CrossSection) -> CrossSection:
    merged = dict(left.weights)
    for atom, weight in right.intensity:
        merged[atom] = max(weight, merged.get(atom, weight))
    return CrossSection.build(merged)


def tensor(tower: Tower, other: Tower) -> Tower:
    """Index-aligned union; the shorter chain repeats its top, shared feet collapse."""
    feet = tuple(dict.fromkeys(tower.feet + other.feet))
    if not tower.sections:
        return Tower(feet, other.sections)
    if not other.sections:
        return Tower(feet, tower.sections)
    length = max(len(tower.sections), len(other.sections))
    left = tower.sections + (tower.sections[-1],) * (length - len(tower.sections))
    right = other.sections + (other.sections[-1],) * (length - len(other.sections))
    return Tower(feet, tuple(_merge_sections(a, b) for a, b in zip(left, right)))


def merge_all(towers: Iterable[Tower]) -> Tower:
    return reduce(tensor, towers, EMPTY_TOWER)


def delta_tower(space: InfoSpace, epsilon: float, tower: Tower) -> Tower:
    """Thicken feet and every section below the top; the top stays put."""
    feet = tuple(thicken(space, epsilon, foot) for foot in tower.feet)
    sections: list[CrossSection] = []
    for section in tower.sections[:-1]:
        grown: dict[Atom, float] = {}
        for atom, weight in section.intensity:
            for neighbour in ball(space, atom, epsilon):
                grown[neighbour] = max(weight, grown.get(neighbour, weight))
        sections.append(CrossSection.build(grown))
    sections.extend(tower.sections[-1:])
    return Tower(feet, tuple(sections))


@dataclass(frozen=True, eq=False)
class TowerGroupoid:
    feet: tuple[ThickPoint, ...]
    towers: tuple[Tower, ...]
    groupoid: FinGroupoid

    def __len__(self) -> int:
        return len(self.towers)

    def morphism(self, tower: Tower, other: Tower) -> Morphism:
        reshape(tower, other)
        return self.groupoid.hom(tower, other)[0]


def tower_groupoid(feet: tuple[ThickPoint, ...], towers: Iterable[Tower]) -> TowerGroupoid:
    unique = tuple(dict.fromkeys(towers))
    for tower in unique:
        if tower.feet != feet:
            raise BaseMismatchError("Every tower of a reshaping groupoid must share its feet.")
    name = "T[" + ",".join(foot.ident for foot in feet) + "]"
    return TowerGroupoid(feet, unique, codiscrete_groupoid(unique, RESHAPE_LABEL, name=name))


def kay(
    space: InfoSpace,
    epsilon: float,
    foot: ThickPoint,
    generators: Sequence[Tower] = (),
) -> TowerGroupoid:
    for generator in generators:
        if generator.feet != (foot,):
            raise BaseMismatchError(f"Generator tower is not based at {foot.ident}.")
        violations = validate_tower(space, generator)
        if violations:
            raise InvalidTowerError(f"{violations[0].law}: {violations[0].detail}")
    groupoid = tower_groupoid((foot,), [canonical_tower(space, epsilon, foot), *generators])
    logger.debug("Reshaping groupoid at %s: %d towers from %d generators", foot.ident, len(groupoid), len(generators))
    return groupoid


def kay_sum(left: TowerGroupoid, right: TowerGroupoid) -> TowerGroupoid:
    feet = tuple(dict.fromkeys(left.feet + right.feet))
    return tower_groupoid(feet, [tensor(a, b) for a in left.towers for b in right.towers])


def unit_groupoid() -> TowerGroupoid:
    return tower_groupoid((), [EMPTY_TOWER])


@dataclass(frozen=True, slots=True)
class MultiTowerClass:
    target: Tower
    representatives: tuple[tuple[Tower, ...], ...]


def tower_class(target: Tower, representatives: Iterable[Sequence[Tower]]) -> MultiTowerClass:
    kept: list[tuple[Tower, ...]] = []
    for parts in representatives:
        if merge_all(parts) != target:
            raise RepresentativeMismatchError("Representative does not merge to the target tower.")
        kept.append(tuple(parts))
    return MultiTowerClass(target, tuple(dict.fromkeys(kept)))


def random_splitting(target: Tower, rng: random.Random) -> tuple[Tower, ...]:
    """One tower per foot whose merge is ``target``; atoms above the base are
    handed to a random non-empty set of feet and kept from then on."""
    q = len(target.feet)
    if q <= 1:
        return (target,)
    last = len(target.sections) - 1
    current = [set(foot.members) for foot in target.feet]
    chains: list[list[CrossSection]] = [[] for _ in range(q)]
    for k, section in enumerate(target.sections):
        if k == last:
            current = [set(section.members) for _ in range(q)]
        elif k > 0:
            for atom in sorted(section.members):
                holders = [i for i in range(q) if atom in current[i]]
                if not holders:
                    holders = rng.sample(range(q), rng.randint(1, q))
                for i in range(q):
                    if i in holders or rng.random() < 0.25:
                        current[i].add(atom)
        for i in range(q):
            chains[i].append(CrossSection.build({atom: section.weights[atom] for atom in current[i]}))
    return tuple(Tower((foot,), tuple(chain)) for foot, chain in zip(target.feet, chains))
