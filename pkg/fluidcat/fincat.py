"""Explicit finite categories, groupoids, functors and the category of elements."""

from __future__ import annotations

import itertools
import logging
import random
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from .errors import FunctorLawViolationError, NonComposablePathError, UnknownObjectError

logger = logging.getLogger(__name__)

EXHAUSTIVE_TRIPLE_LIMIT = 500_000
EXHAUSTIVE_PAIR_LIMIT = 250_000
PAIR_SAMPLE = 20_000


@dataclass(frozen=True)
class Morphism:
    src: Any
    dst: Any
    label: Hashable = ""
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.src, self.dst, self.label)))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, slots=True)
class Violation:
    law: str
    detail: str


Rule = Callable[[Morphism, Morphism], Morphism]


@dataclass(frozen=True, eq=False)
class FinCategory:
    """A finite category.

    Composition comes either from an explicit table keyed by ``(g, f)`` for
    ``g . f`` or, for large codiscrete and product categories, from a rule
    evaluated on lookup.
    """

    objects: tuple[Any, ...]
    morphisms: tuple[Morphism, ...]
    identities: Mapping[Any, Morphism]
    composition: Mapping[tuple[Morphism, Morphism], Morphism] | None = None
    rule: Rule | None = None
    name: str = ""

    @cached_property
    def _object_set(self) -> frozenset[Any]:
        return frozenset(self.objects)

    @cached_property
    def _hom_index(self) -> dict[tuple[Any, Any], tuple[Morphism, ...]]:
        index: dict[tuple[Any, Any], list[Morphism]] = defaultdict(list)
        for morphism in self.morphisms:
            index[(morphism.src, morphism.dst)].append(morphism)
        return {key: tuple(value) for key, value in index.items()}

    @cached_property
    def _out_index(self) -> dict[Any, tuple[Morphism, ...]]:
        index: dict[Any, list[Morphism]] = defaultdict(list)
        for morphism in self.morphisms:
            index[morphism.src].append(morphism)
        return {key: tuple(value) for key, value in index.items()}

    @cached_property
    def _in_index(self) -> dict[Any, tuple[Morphism, ...]]:
        index: dict[Any, list[Morphism]] = defaultdict(list)
        for morphism in self.morphisms:
            index[morphism.dst].append(morphism)
        return {key: tuple(value) for key, value in index.items()}

    @cached_property
    def _morphism_set(self) -> frozenset[Morphism]:
        return frozenset(self.morphisms)

    @cached_property
    def is_codiscrete(self) -> bool:
        n = len(self.objects)
        if len(self.morphisms) != n * n:
            return False
        return all(len(self.hom(a, b)) == 1 for a in self.objects for b in self.objects)

    def has_object(self, obj: Any) -> bool:
        return obj in self._object_set

    def has_morphism(self, morphism: Morphism) -> bool:
        return morphism in self._morphism_set

    def require(self, obj: Any) -> Any:
        if obj not in self._object_set:
            raise UnknownObjectError(f"{obj!r} is not an object of {self.name or 'the category'}.")
        return obj

    def hom(self, a: Any, b: Any) -> tuple[Morphism, ...]:
        return self._hom_index.get((a, b), ())

    def out(self, a: Any) -> tuple[Morphism, ...]:
        return self._out_index.get(a, ())

    def into(self, b: Any) -> tuple[Morphism, ...]:
        return self._in_index.get(b, ())

    def identity(self, obj: Any) -> Morphism:
        return self.identities[self.require(obj)]

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        if f.dst != g.src:
            raise NonComposablePathError(f"Cannot compose {g!r} after {f!r}.")
        if self.composition is not None:
            return self.composition[(g, f)]
        if self.rule is None:
            raise NonComposablePathError("Category has neither a composition table nor a rule.")
        return self.rule(g, f)

    def composable_triples(self) -> int:
        return sum(len(self.out(g.dst)) for f in self.morphisms for g in self.out(f.dst))

    def composable_pair_count(self) -> int:
        return sum(len(self.out(f.dst)) for f in self.morphisms)

    def composable_pairs(self, sample: int | None = None, seed: int = 0) -> Iterator[tuple[Morphism, Morphism]]:
        """``(f, g)`` with ``g`` after ``f``: all of them, or ``sample`` seeded draws."""
        if sample is None:
            for f in self.morphisms:
                for g in self.out(f.dst):
                    yield f, g
            return
        yield from _draw_pairs(self.morphisms, lambda f: self.out(f.dst), sample, seed)

    def spans(self, sample: int | None = None, seed: int = 0) -> Iterator[tuple[Morphism, Morphism]]:
        """``(m, h)`` leaving the same object, exhaustively or by seeded draws."""
        if sample is None:
            for m in self.morphisms:
                for h in self.out(m.src):
                    yield m, h
            return
        yield from _draw_pairs(self.morphisms, lambda m: self.out(m.src), sample, seed)

    def table(self) -> Iterator[tuple[Morphism, Morphism, Morphism]]:
        for f in self.morphisms:
            for g in self.out(f.dst):
                yield g, f, self.compose(g, f)


def _draw_pairs(
    morphisms: tuple[Morphism, ...],
    partners: Callable[[Morphism], tuple[Morphism, ...]],
    sample: int,
    seed: int,
) -> Iterator[tuple[Morphism, Morphism]]:
    if not morphisms:
        return
    rng = random.Random(seed)
    for _ in range(sample):
        first = rng.choice(morphisms)
        options = partners(first)
        if options:
            yield first, rng.choice(options)


def pair_sample(category: FinCategory) -> int | None:
    """Seeded sample size for pairwise laws on ``category``; None means exhaustive."""
    if category.composable_pair_count() > EXHAUSTIVE_PAIR_LIMIT:
        return PAIR_SAMPLE
    return None


@dataclass(frozen=True, eq=False)
class FinGroupoid(FinCategory):
    inverses: Mapping[Morphism, Morphism] | None = None
    inverse_rule: Callable[[Morphism], Morphism] | None = None

    def inverse(self, morphism: Morphism) -> Morphism:
        if self.inverses is not None:
            return self.inverses[morphism]
        if self.inverse_rule is None:
            raise KeyError(morphism)
        return self.inverse_rule(morphism)


def codiscrete_category(objects: tuple[Any, ...], label: Hashable = "", name: str = "") -> FinCategory:
    morphisms = tuple(Morphism(a, b, label) for a in objects for b in objects)
    identities = {a: Morphism(a, a, label) for a in objects}
    return FinCategory(
        objects=tuple(objects),
        morphisms=morphisms,
        identities=identities,
        rule=lambda g, f: Morphism(f.src, g.dst, label),
        name=name,
    )


def codiscrete_groupoid(objects: tuple[Any, ...], label: Hashable = "", name: str = "") -> FinGroupoid:
    morphisms = tuple(Morphism(a, b, label) for a in objects for b in objects)
    identities = {a: Morphism(a, a, label) for a in objects}
    return FinGroupoid(
        objects=tuple(objects),
        morphisms=morphisms,
        identities=identities,
        rule=lambda g, f: Morphism(f.src, g.dst, label),
        name=name,
        inverse_rule=lambda f: Morphism(f.dst, f.src, label),
    )


def power(category: FinCategory, q: int, name: str = "") -> FinCategory:
    """q-fold product category; objects and morphisms are q-tuples."""
    objects = tuple(itertools.product(category.objects, repeat=q))
    morphisms = tuple(
        Morphism(tuple(m.src for m in parts), tuple(m.dst for m in parts), parts)
        for parts in itertools.product(category.morphisms, repeat=q)
    )
    identities = {
        obj: Morphism(obj, obj, tuple(category.identity(x) for x in obj)) for obj in objects
    }

    def rule(g: Morphism, f: Morphism) -> Morphism:
        parts = tuple(category.compose(gi, fi) for gi, fi in zip(g.label, f.label))
        return Morphism(f.src, g.dst, parts)

    return FinCategory(objects, morphisms, identities, rule=rule, name=name or f"{category.name}^{q}")


def _composite(category: FinCategory, g: Morphism, f: Morphism) -> Morphism | None:
    try:
        return category.compose(g, f)
    except (KeyError, NonComposablePathError):
        return None


def validate_category(
    category: FinCategory, sample: int | None = None, seed: int = 0
) -> list[Violation]:
    """Every identity, closure and associativity violation of ``category``.

    With ``sample`` set, associativity is checked on that many seeded random
    composable triples instead of all of them.
    """
    violations: list[Violation] = []

    for morphism in category.morphisms:
        if not (category.has_object(morphism.src) and category.has_object(morphism.dst)):
            violations.append(Violation("endpoints", f"{morphism!r} leaves the object set"))

    for obj in category.objects:
        ident = category.identities.get(obj)
        if ident is None or ident.src != obj or ident.dst != obj or not category.has_morphism(ident):
            violations.append(Violation("identity-exists", f"no identity on {obj!r}"))
    if violations:
        return violations

    for f in category.morphisms:
        if _composite(category, f, category.identities[f.src]) != f:
            violations.append(Violation("identity-right", f"f . id != f for {f!r}"))
        if _composite(category, category.identities[f.dst], f) != f:
            violations.append(Violation("identity-left", f"id . f != f for {f!r}"))
        for g in category.out(f.dst):
            gf = _composite(category, g, f)
            if gf is None or gf.src != f.src or gf.dst != g.dst or not category.has_morphism(gf):
                violations.append(Violation("composition-closure", f"{g!r} . {f!r} -> {gf!r}"))

    if any(v.law == "composition-closure" for v in violations):
        return violations

    def check(f: Morphism, g: Morphism, h: Morphism) -> None:
        left = category.compose(h, category.compose(g, f))
        right = category.compose(category.compose(h, g), f)
        if left != right:
            violations.append(
                Violation("associativity", f"h.(g.f) != (h.g).f for f={f!r}, g={g!r}, h={h!r}")
            )

    if sample is None:
        for f in category.morphisms:
            for g in category.out(f.dst):
                for h in category.out(g.dst):
                    check(f, g, h)
    elif category.morphisms:
        rng = random.Random(seed)
        for _ in range(sample):
            f = rng.choice(category.morphisms)
            g = rng.choice(category.out(f.dst))
            h = rng.choice(category.out(g.dst))
            check(f, g, h)

    return violations


def validate_groupoid(groupoid: FinGroupoid) -> list[Violation]:
    violations = validate_category(groupoid)
    if violations:
        return violations
    for f in groupoid.morphisms:
        try:
            inv = groupoid.inverse(f)
        except KeyError:
            violations.append(Violation("inverse-exists", f"no inverse for {f!r}"))
            continue
        if _composite(groupoid, inv, f) != groupoid.identities[f.src]:
            violations.append(Violation("inverse-left", f"f^-1 . f != id for {f!r}"))
        if _composite(groupoid, f, inv) != groupoid.identities[f.dst]:
            violations.append(Violation("inverse-right", f"f . f^-1 != id for {f!r}"))
    return violations


@dataclass(frozen=True, slots=True)
class MicroReversibility:
    holds: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_micro_reversible(category: FinCategory, a: Any, b: Any) -> MicroReversibility:
    """Relative micro-reversibility: postcomposition with every f: a -> b is a
    bijection Hom(c, a) -> Hom(c, b) for every object c."""
    category.require(a)
    category.require(b)
    arrows = category.hom(a, b)
    if not arrows:
        return MicroReversibility(False, "NoConnectingMorphism")
    for f in arrows:
        for c in category.objects:
            source = category.hom(c, a)
            target = set(category.hom(c, b))
            image = [category.compose(f, u) for u in source]
            if len(set(image)) != len(image) or set(image) != target:
                return MicroReversibility(
                    False, f"postcomposition with {f!r} is not a bijection from Hom({c!r}, a)"
                )
    return MicroReversibility(True)


@dataclass(frozen=True, eq=False)
class FinFunctor:
    source: FinCategory
    target: FinCategory
    on_objects: Mapping[Any, Any]
    on_morphisms: Mapping[Morphism, Morphism]


def check_functor_laws(functor: FinFunctor, sample: int | None = None, seed: int = 0) -> list[Violation]:
    """Totality, endpoints and identities on everything; composites on every
    composable pair, or on ``sample`` seeded pairs."""
    violations: list[Violation] = []
    source, target = functor.source, functor.target

    for obj in source.objects:
        if obj not in functor.on_objects:
            violations.append(Violation("functor-total", f"object {obj!r} has no image"))
        elif not target.has_object(functor.on_objects[obj]):
            violations.append(Violation("functor-total", f"image of {obj!r} is not a target object"))
    for f in source.morphisms:
        image = functor.on_morphisms.get(f)
        if image is None or not target.has_morphism(image):
            violations.append(Violation("functor-total", f"morphism {f!r} has no valid image"))
    if violations:
        return violations

    for f in source.morphisms:
        image = functor.on_morphisms[f]
        if image.src != functor.on_objects[f.src] or image.dst != functor.on_objects[f.dst]:
            violations.append(Violation("functor-endpoints", f"F({f!r}) has wrong endpoints"))

    for obj in source.objects:
        if functor.on_morphisms[source.identities[obj]] != target.identities[functor.on_objects[obj]]:
            violations.append(Violation("functor-identity", f"F(id) != id on {obj!r}"))

    for f, g in source.composable_pairs(sample, seed):
        lhs = functor.on_morphisms.get(source.compose(g, f))
        rhs = _composite(target, functor.on_morphisms[g], functor.on_morphisms[f])
        if lhs != rhs:
            violations.append(
                Violation("functor-composition", f"F(g.f) != F(g).F(f) for f={f!r}, g={g!r}")
            )
    return violations


@dataclass(frozen=True, eq=False)
class GroupoidFunctor:
    """Functor between two fiber groupoids.

    Without an explicit morphism map the target must be codiscrete, so each
    morphism goes to the unique arrow between the image objects.
    """

    source: FinGroupoid
    target: FinGroupoid
    on_objects: Mapping[Any, Any]
    on_morphisms: Mapping[Morphism, Morphism] | None = None

    def __call__(self, obj: Any) -> Any:
        return self.on_objects[obj]

    def apply(self, morphism: Morphism) -> Morphism:
        if self.on_morphisms is not None:
            return self.on_morphisms[morphism]
        arrows = self.target.hom(self.on_objects[morphism.src], self.on_objects[morphism.dst])
        if len(arrows) != 1:
            raise FunctorLawViolationError(
                "Implicit morphism action requires a codiscrete target groupoid."
            )
        return arrows[0]


@dataclass(frozen=True, eq=False)
class GroupoidValuedFunctor:
    base: FinCategory
    on_objects: Mapping[Any, FinGroupoid]
    on_morphisms: Mapping[Morphism, GroupoidFunctor]


def check_groupoid_functor(chi: GroupoidValuedFunctor) -> list[Violation]:
    """Functor laws of ``chi``; for codiscrete fibers composites only need to
    agree up to the unique fiber isomorphism."""
    violations: list[Violation] = []
    base = chi.base

    for c in base.objects:
        fiber = chi.on_objects.get(c)
        if fiber is None:
            violations.append(Violation("fiber-missing", f"no fiber over {c!r}"))
            continue
        for violation in validate_groupoid(fiber):
            violations.append(Violation(f"fiber-{violation.law}", f"over {c!r}: {violation.detail}"))

    for f in base.morphisms:
        action = chi.on_morphisms.get(f)
        if action is None:
            violations.append(Violation("action-missing", f"no functor for {f!r}"))
            continue
        if action.source is not chi.on_objects.get(f.src) or action.target is not chi.on_objects.get(f.dst):
            violations.append(Violation("action-endpoints", f"functor for {f!r} has wrong fibers"))
            continue
        for xi in action.source.objects:
            if xi not in action.on_objects or not action.target.has_object(action.on_objects[xi]):
                violations.append(Violation("action-total", f"chi({f!r}) undefined on {xi!r}"))
    if violations:
        return violations

    for c in base.objects:
        action = chi.on_morphisms[base.identities[c]]
        for xi in action.source.objects:
            if action(xi) != xi:
                violations.append(Violation("chi-identity", f"chi(id_{c!r}) moves {xi!r}"))

    for g in base.morphisms:
        if chi.on_objects[g.dst].is_codiscrete:
            continue
        for f in base.into(g.src):
            gf = base.compose(g, f)
            for xi in chi.on_objects[f.src].objects:
                if chi.on_morphisms[gf](xi) != chi.on_morphisms[g](chi.on_morphisms[f](xi)):
                    violations.append(
                        Violation("chi-composition", f"chi(g.f) != chi(g)chi(f) on {xi!r}")
                    )
    return violations


def strictly_functorial(chi: GroupoidValuedFunctor) -> bool:
    base = chi.base
    for f in base.morphisms:
        for g in base.out(f.dst):
            gf = base.compose(g, f)
            for xi in chi.on_objects[f.src].objects:
                if chi.on_morphisms[gf](xi) != chi.on_morphisms[g](chi.on_morphisms[f](xi)):
                    return False
    return True


@dataclass(frozen=True, eq=False)
class ElementsCategory:
    category: FinCategory
    base: FinCategory
    projection: FinFunctor
    chi: GroupoidValuedFunctor | None = None

    @cached_property
    def _fibers(self) -> dict[Any, tuple[Any, ...]]:
        fibers: dict[Any, list[Any]] = {c: [] for c in self.base.objects}
        for obj in self.category.objects:
            c = self.projection.on_objects.get(obj)
            if c in fibers:
                fibers[c].append(obj)
        return {c: tuple(objs) for c, objs in fibers.items()}

    @cached_property
    def _lifts_between(self) -> dict[tuple[Any, Any, Morphism], tuple[Morphism, ...]]:
        index: dict[tuple[Any, Any, Morphism], list[Morphism]] = defaultdict(list)
        for m in self.category.morphisms:
            f = self.projection.on_morphisms.get(m)
            if f is not None:
                index[(m.src, m.dst, f)].append(m)
        return {key: tuple(value) for key, value in index.items()}

    @cached_property
    def _lifts_at(self) -> dict[tuple[Any, Morphism], tuple[Morphism, ...]]:
        index: dict[tuple[Any, Morphism], list[Morphism]] = defaultdict(list)
        for (src, _, f), arrows in self._lifts_between.items():
            index[(src, f)].extend(arrows)
        return {key: tuple(value) for key, value in index.items()}

    def fiber(self, c: Any) -> tuple[Any, ...]:
        return self._fibers.get(c, ())

    def over(self, morphism: Morphism, base_morphism: Morphism) -> bool:
        return self.projection.on_morphisms.get(morphism) == base_morphism

    def lifts(self, obj: Any, base_morphism: Morphism) -> tuple[Morphism, ...]:
        """Morphisms out of ``obj`` lying over ``base_morphism``."""
        return self._lifts_at.get((obj, base_morphism), ())

    def lifts_between(self, src: Any, dst: Any, base_morphism: Morphism) -> tuple[Morphism, ...]:
        return self._lifts_between.get((src, dst, base_morphism), ())


def category_of_elements(chi: GroupoidValuedFunctor, validate: bool = True) -> ElementsCategory:
    """Grothendieck construction: objects ``(c, xi)``, morphisms labelled ``(f, alpha)``
    with ``alpha: chi(f)(xi) -> psi`` in the fiber over the target."""
    if validate:
        violations = check_groupoid_functor(chi)
        if violations:
            first = violations[0]
            raise FunctorLawViolationError(f"{first.law}: {first.detail}")

    base = chi.base
    objects = tuple((c, xi) for c in base.objects for xi in chi.on_objects[c].objects)

    morphisms: list[Morphism] = []
    for f in base.morphisms:
        source_fiber = chi.on_objects[f.src]
        target_fiber = chi.on_objects[f.dst]
        action = chi.on_morphisms[f]
        for xi in source_fiber.objects:
            moved = action(xi)
            for psi in target_fiber.objects:
                for alpha in target_fiber.hom(moved, psi):
                    morphisms.append(Morphism((f.src, xi), (f.dst, psi), (f, alpha)))

    identities = {
        (c, xi): Morphism((c, xi), (c, xi), (base.identities[c], chi.on_objects[c].identities[xi]))
        for c, xi in objects
    }

    def rule(second: Morphism, first: Morphism) -> Morphism:
        f, alpha = first.label
        g, beta = second.label
        gf = base.compose(g, f)
        fiber = chi.on_objects[gf.dst]
        if fiber.is_codiscrete:
            start = chi.on_morphisms[gf](first.src[1])
            arrow = fiber.hom(start, second.dst[1])[0]
        else:
            arrow = fiber.compose(beta, chi.on_morphisms[g].apply(alpha))
        return Morphism(first.src, second.dst, (gf, arrow))

    category = FinCategory(objects, tuple(morphisms), identities, rule=rule, name=f"el({base.name})")
    projection = FinFunctor(
        source=category,
        target=base,
        on_objects={obj: obj[0] for obj in objects},
        on_morphisms={m: m.label[0] for m in morphisms},
    )
    logger.debug(
        "Category of elements over %s: %d objects, %d morphisms",
        base.name,
        len(objects),
        len(morphisms),
    )
    return ElementsCategory(category=category, base=base, projection=projection, chi=chi)


def check_cofibered(
    elements: ElementsCategory, functor_laws: bool = True, sample: int | None = None, seed: int = 0
) -> list[Violation]:
    """Fibers are groupoids, every base arrow has a lift at every object, lifts
    agree up to a unique fiber isomorphism, and every morphism is cocartesian.

    Cocartesian means: for m over f and any h from the same source over g.f
    there is exactly one k over g with k.m = h. Those spans, like the
    projection's composites, are checked on ``sample`` seeded draws when set.
    """
    category, base = elements.category, elements.base
    violations: list[Violation] = []

    for obj in category.objects:
        if obj not in elements.projection.on_objects:
            violations.append(Violation("projection-total", f"object {obj!r} has no projection"))
    for morphism in category.morphisms:
        if morphism not in elements.projection.on_morphisms:
            violations.append(Violation("projection-total", f"morphism {morphism!r} has no projection"))
    if violations:
        return violations
    if functor_laws:
        violations.extend(check_functor_laws(elements.projection, sample, seed))
        if violations:
            return violations

    for c in base.objects:
        ident = base.identities[c]
        for obj in elements.fiber(c):
            for m in elements.lifts(obj, ident):
                inverse = next(
                    (
                        n
                        for n in elements.lifts_between(m.dst, m.src, ident)
                        if category.compose(n, m) == category.identities[m.src]
                        and category.compose(m, n) == category.identities[m.dst]
                    ),
                    None,
                )
                if inverse is None:
                    violations.append(
                        Violation("fiber-not-groupoid", f"{m!r} has no inverse in the fiber over {c!r}")
                    )

    for f in base.morphisms:
        target_ident = base.identities[f.dst]
        for obj in elements.fiber(f.src):
            lifts = elements.lifts(obj, f)
            if not lifts:
                violations.append(Violation("cocartesian-lift-missing", f"no lift of {f!r} at {obj!r}"))
                continue
            for first in lifts:
                for second in lifts:
                    mediators = [
                        theta
                        for theta in elements.lifts_between(first.dst, second.dst, target_ident)
                        if category.compose(theta, first) == second
                    ]
                    if len(mediators) != 1:
                        violations.append(
                            Violation(
                                "cocartesian-lift-not-unique",
                                f"{len(mediators)} fiber maps relate lifts of {f!r} at {obj!r}",
                            )
                        )

    on_morphisms = elements.projection.on_morphisms
    for m, h in category.spans(sample, seed):
        f, target = on_morphisms[m], on_morphisms[h]
        for g in base.hom(f.dst, target.dst):
            if base.compose(g, f) != target:
                continue
            factors = [k for k in elements.lifts_between(m.dst, h.dst, g) if category.compose(k, m) == h]
            if len(factors) != 1:
                violations.append(
                    Violation(
                        "cocartesian-factorization",
                        f"{len(factors)} arrows over {g!r} factor {h!r} through {m!r}",
                    )
                )
    return violations
