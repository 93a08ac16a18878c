from __future__ import annotations

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from fluidcat.errors import FunctorLawViolationError, NonComposablePathError, UnknownObjectError
from fluidcat.fincat import (
    ElementsCategory,
    FinCategory,
    FinFunctor,
    GroupoidFunctor,
    GroupoidValuedFunctor,
    Morphism,
    category_of_elements,
    check_cofibered,
    check_functor_laws,
    check_groupoid_functor,
    codiscrete_category,
    codiscrete_groupoid,
    is_micro_reversible,
    pair_sample,
    power,
    strictly_functorial,
    validate_category,
    validate_groupoid,
)


def arrow_category() -> FinCategory:
    """0 -> 1 with identities, composition given as a table."""
    id0, id1, f = Morphism(0, 0, "id0"), Morphism(1, 1, "id1"), Morphism(0, 1, "f")
    table = {(id0, id0): id0, (id1, id1): id1, (f, id0): f, (id1, f): f}
    return FinCategory((0, 1), (id0, id1, f), {0: id0, 1: id1}, composition=table, name="arrow")


def test_codiscrete_category_is_lawful() -> None:
    category = codiscrete_category(("a", "b", "c"), "t")

    assert validate_category(category) == []
    assert len(category.morphisms) == 9
    assert category.is_codiscrete
    assert category.compose(category.hom("b", "c")[0], category.hom("a", "b")[0]) == Morphism("a", "c", "t")


def test_arrow_category_laws_and_micro_reversibility() -> None:
    category = arrow_category()

    assert validate_category(category) == []
    assert not category.is_codiscrete
    verdict = is_micro_reversible(category, 1, 0)
    assert not verdict
    assert verdict.reason == "NoConnectingMorphism"
    assert not is_micro_reversible(category, 0, 1)


def test_codiscrete_points_are_micro_reversible() -> None:
    category = codiscrete_category(("a", "b"))

    assert is_micro_reversible(category, "a", "b")
    with pytest.raises(UnknownObjectError):
        is_micro_reversible(category, "a", "z")


def test_corrupted_table_names_the_broken_law() -> None:
    base = arrow_category()
    id0, _, f = base.morphisms
    table = dict(base.composition)
    table[(f, id0)] = id0
    corrupted = FinCategory(base.objects, base.morphisms, base.identities, composition=table)

    laws = {v.law for v in validate_category(corrupted)}

    assert "identity-right" in laws


def test_missing_identity_is_reported() -> None:
    f = Morphism(0, 1, "f")
    category = FinCategory((0, 1), (f,), {}, composition={})

    assert [v.law for v in validate_category(category)] == ["identity-exists", "identity-exists"]


def test_compose_rejects_non_composable_pair() -> None:
    category = codiscrete_category(("a", "b", "c"))

    with pytest.raises(NonComposablePathError):
        category.compose(category.hom("a", "b")[0], category.hom("a", "b")[0])


def test_sampled_validation_is_seeded() -> None:
    category = codiscrete_category(tuple(range(6)))

    assert validate_category(category, sample=200, seed=7) == []


def test_power_category() -> None:
    category = power(codiscrete_category(("a", "b")), 2)

    assert len(category.objects) == 4
    assert len(category.morphisms) == 16
    assert validate_category(category) == []


def test_codiscrete_groupoid_inverses() -> None:
    groupoid = codiscrete_groupoid(("x", "y"), "r")

    assert validate_groupoid(groupoid) == []
    arrow = groupoid.hom("x", "y")[0]
    assert groupoid.inverse(arrow) == groupoid.hom("y", "x")[0]


def test_functor_laws_detect_bad_identity() -> None:
    source = codiscrete_category(("a", "b"))
    target = codiscrete_category(("u", "v"))
    on_objects = {"a": "u", "b": "u"}
    on_morphisms = {m: target.hom("u", "u")[0] for m in source.morphisms}

    assert check_functor_laws(FinFunctor(source, target, on_objects, on_morphisms)) == []

    broken = dict(on_morphisms)
    broken[source.identity("a")] = target.hom("u", "v")[0]
    laws = {v.law for v in check_functor_laws(FinFunctor(source, target, on_objects, broken))}
    assert "functor-endpoints" in laws


def two_point_chi(fiber_size: int = 2) -> GroupoidValuedFunctor:
    base = codiscrete_category(("c", "d"), "base")
    fibers = {c: codiscrete_groupoid(tuple(f"{c}{i}" for i in range(fiber_size)), "iso") for c in base.objects}
    actions = {}
    for f in base.morphisms:
        if f == base.identity(f.src):
            mapping = {xi: xi for xi in fibers[f.src].objects}
        else:
            mapping = {xi: fibers[f.dst].objects[0] for xi in fibers[f.src].objects}
        actions[f] = GroupoidFunctor(fibers[f.src], fibers[f.dst], mapping)
    return GroupoidValuedFunctor(base, fibers, actions)


def test_category_of_elements_counts_and_cofibration() -> None:
    chi = two_point_chi(2)
    elements = category_of_elements(chi)

    assert len(elements.category.objects) == 4
    assert len(elements.category.morphisms) == 16
    assert validate_category(elements.category) == []
    assert check_cofibered(elements) == []
    assert len(elements.fiber("c")) == 2


def test_groupoid_functor_checks() -> None:
    chi = two_point_chi(2)

    assert check_groupoid_functor(chi) == []
    assert not strictly_functorial(chi)
    assert strictly_functorial(two_point_chi(1))


def test_identity_action_must_fix_objects() -> None:
    chi = two_point_chi(2)
    base = chi.base
    fiber = chi.on_objects["c"]
    actions = dict(chi.on_morphisms)
    actions[base.identity("c")] = GroupoidFunctor(fiber, fiber, {xi: fiber.objects[0] for xi in fiber.objects})
    broken = GroupoidValuedFunctor(base, chi.on_objects, actions)

    assert "chi-identity" in {v.law for v in check_groupoid_functor(broken)}
    with pytest.raises(FunctorLawViolationError):
        category_of_elements(broken)


def test_dropping_a_projection_entry_breaks_cofibration() -> None:
    elements = category_of_elements(two_point_chi(1))
    on_objects = dict(elements.projection.on_objects)
    on_objects.pop(elements.category.objects[0])
    projection = FinFunctor(elements.category, elements.base, on_objects, elements.projection.on_morphisms)
    damaged = type(elements)(elements.category, elements.base, projection, elements.chi)

    assert [v.law for v in check_cofibered(damaged)] == ["projection-total"]


def _after(g: Morphism, f: Morphism) -> Morphism:
    return Morphism(f.src, g.dst, tuple(g.label[i] for i in f.label))


def function_category(
    sizes: list[int], generators: list[tuple[int, int, tuple[int, ...]]], limit: int | None = None
) -> FinCategory | None:
    """Maps between the finite sets ``range(size)`` closed under composition;
    None once the closure passes ``limit`` arrows."""
    objects = tuple(range(len(sizes)))
    identities = {obj: Morphism(obj, obj, tuple(range(sizes[obj]))) for obj in objects}
    arrows = set(identities.values()) | {Morphism(a, b, mapping) for a, b, mapping in generators}
    while True:
        grown = {_after(g, f) for f in arrows for g in arrows if g.src == f.dst} - arrows
        if not grown:
            break
        arrows |= grown
        if limit is not None and len(arrows) > limit:
            return None
    morphisms = tuple(sorted(arrows, key=lambda m: (m.src, m.dst, m.label)))
    table = {(g, f): _after(g, f) for f in morphisms for g in morphisms if g.src == f.dst}
    return FinCategory(objects, morphisms, identities, composition=table, name="maps")


@st.composite
def function_categories(draw) -> FinCategory:
    sizes = draw(st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=6))
    objects = range(len(sizes))
    generators = []
    for _ in range(draw(st.integers(min_value=0, max_value=5))):
        a, b = draw(st.sampled_from(objects)), draw(st.sampled_from(objects))
        mapping = tuple(draw(st.integers(min_value=0, max_value=sizes[b] - 1)) for _ in range(sizes[a]))
        generators.append((a, b, mapping))
    category = function_category(sizes, generators, limit=40)
    assume(category is not None)
    return category


def every_arrow_invertible(category: FinCategory, a, b) -> bool:
    """Postcomposition is bijective on every Hom(c, -) exactly when each arrow is an isomorphism."""
    arrows = [m for m in category.morphisms if (m.src, m.dst) == (a, b)]
    backwards = [m for m in category.morphisms if (m.src, m.dst) == (b, a)]

    def invertible(f: Morphism) -> bool:
        return any(
            _after(g, f).label == tuple(range(len(f.label)))
            and _after(f, g).label == tuple(range(len(g.label)))
            for g in backwards
        )

    return bool(arrows) and all(invertible(f) for f in arrows)


@given(function_categories())
def test_micro_reversibility_agrees_with_invertibility(category) -> None:
    assert validate_category(category) == []
    for a in category.objects:
        for b in category.objects:
            assert bool(is_micro_reversible(category, a, b)) == every_arrow_invertible(category, a, b)


def test_group_endomorphisms_are_micro_reversible() -> None:
    symmetric = function_category([3], [(0, 0, (1, 0, 2)), (0, 0, (1, 2, 0))])

    assert len(symmetric.morphisms) == 6
    assert is_micro_reversible(symmetric, 0, 0)


def test_idempotent_endomorphism_is_not_micro_reversible() -> None:
    monoid = function_category([2], [(0, 0, (0, 0))])

    assert len(monoid.morphisms) == 2
    verdict = is_micro_reversible(monoid, 0, 0)
    assert not verdict
    assert verdict.reason != "NoConnectingMorphism"


def thin_chain() -> FinCategory:
    """0 -> 1 -> 2 with its composite."""
    ids = {obj: Morphism(obj, obj, f"id{obj}") for obj in range(3)}
    f, g, gf = Morphism(0, 1, "f"), Morphism(1, 2, "g"), Morphism(0, 2, "gf")
    table = {(ident, ident): ident for ident in ids.values()}
    for arrow in (f, g, gf):
        table[(arrow, ids[arrow.src])] = arrow
        table[(ids[arrow.dst], arrow)] = arrow
    table[(g, f)] = gf
    return FinCategory(tuple(ids), (*ids.values(), f, g, gf), ids, composition=table, name="chain")


def test_factorization_catches_two_arrows_through_one_lift() -> None:
    base = thin_chain()
    f, g, gf = base.morphisms[3:]
    ids = {obj: Morphism(obj, obj, f"id_{obj}") for obj in "xyz"}
    m, h = Morphism("x", "y", "m"), Morphism("x", "z", "h")
    k1, k2 = Morphism("y", "z", "k1"), Morphism("y", "z", "k2")
    table = {(ident, ident): ident for ident in ids.values()}
    for arrow in (m, h, k1, k2):
        table[(arrow, ids[arrow.src])] = arrow
        table[(ids[arrow.dst], arrow)] = arrow
    table[(k1, m)] = h
    table[(k2, m)] = h
    category = FinCategory(tuple(ids), (*ids.values(), m, h, k1, k2), ids, composition=table, name="E")
    over = {obj: base.objects[i] for i, obj in enumerate("xyz")}
    labels = {ids[obj]: base.identities[over[obj]] for obj in "xyz"} | {m: f, h: gf, k1: g, k2: g}
    projection = FinFunctor(category, base, over, labels)
    elements = ElementsCategory(category, base, projection)

    assert validate_category(category) == []
    assert check_functor_laws(projection) == []
    assert "cocartesian-factorization" in {v.law for v in check_cofibered(elements)}


def test_sampled_pair_laws_on_a_large_power() -> None:
    base = power(codiscrete_category(tuple(range(8))), 2)
    fibers = {c: codiscrete_groupoid((c,), "iso") for c in base.objects}
    actions = {f: GroupoidFunctor(fibers[f.src], fibers[f.dst], {f.src: f.dst}) for f in base.morphisms}
    elements = category_of_elements(GroupoidValuedFunctor(base, fibers, actions), validate=False)
    sample = pair_sample(elements.category)

    assert sample is not None
    assert check_cofibered(elements, sample=sample, seed=4) == []
