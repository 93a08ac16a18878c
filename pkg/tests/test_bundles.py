from __future__ import annotations

import dataclasses
import random

import pytest

from fluidcat.bundles import (
    build_bundle,
    build_chi_p,
    build_chi_pq,
    bundle_sequence,
    delta_bundle,
    duality_roundtrip,
    kay_cover_check,
    kay_of_path,
    recover_base,
    threads,
)
from fluidcat.checks import truncated_bundle
from fluidcat.errors import LevelExceededError, NonComposablePathError
from fluidcat.fincat import FinFunctor, check_cofibered, check_functor_laws, strictly_functorial
from fluidcat.towers import random_tower


def generators_at(system, level, seed=0):
    rng = random.Random(seed)
    return {
        tp.core: (random_tower(system.space, system.epsilon, tp, rng),)
        for tp in system.category(level).points
    }


def test_level_one_bundle_counts(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 1))

    assert len(bundle.category.objects) == 5
    assert len(bundle.category.morphisms) == 25
    assert bundle.level == 1
    assert bundle.arity == 1
    assert strictly_functorial(bundle.chi)


def test_two_feet_bundle_counts(l5_system) -> None:
    bundle = build_bundle(build_chi_pq(l5_system, 1, 2))

    assert len(bundle.base.objects) == 25
    assert len(bundle.category.objects) == 25
    assert len(bundle.category.morphisms) == 625
    assert check_cofibered(bundle.elements) == []


def test_generators_grow_the_fibers(l5_system) -> None:
    generators = generators_at(l5_system, 1)
    bundle = build_bundle(build_chi_p(l5_system, 1, generators))
    sizes = {c.core: len(bundle.elements.fiber(c)) for c in bundle.base.objects}

    expected_objects = sum(sizes.values())
    expected_morphisms = sum(sizes[a] * sizes[b] for a in sizes for b in sizes)
    assert len(bundle.category.objects) == expected_objects
    assert len(bundle.category.morphisms) == expected_morphisms
    assert check_cofibered(bundle.elements) == []


def test_arity_must_be_positive(l5_system) -> None:
    with pytest.raises(ValueError):
        build_chi_pq(l5_system, 1, 0)


def test_delta_bundle_is_a_functor(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 1, generators_at(l5_system, 1)))

    upper = delta_bundle(l5_system, bundle)

    assert upper.level == 2
    assert upper.delta_in is not None
    assert check_functor_laws(upper.delta_in) == []
    assert check_cofibered(upper.elements) == []


def test_two_feet_delta_bundle_is_a_functor(l5_system) -> None:
    bundle = build_bundle(build_chi_pq(l5_system, 1, 2))

    upper = delta_bundle(l5_system, bundle)

    assert upper.level == 2
    assert upper.arity == 2
    assert len(upper.base.objects) == 25
    assert upper.delta_in is not None
    assert check_functor_laws(upper.delta_in) == []
    assert check_cofibered(upper.elements) == []


def test_two_feet_bundle_sequence(l5_system) -> None:
    sequence = bundle_sequence(l5_system, 2)

    assert [bundle.level for bundle in sequence] == [1, 2, 3]
    assert all(check_functor_laws(bundle.delta_in) == [] for bundle in sequence[1:])


def test_delta_bundle_stops_at_the_top(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 3))

    with pytest.raises(LevelExceededError):
        delta_bundle(l5_system, bundle)


def test_bundle_sequence_walks_every_level(l5_system) -> None:
    sequence = bundle_sequence(l5_system, 1, generators_at(l5_system, 1))

    assert [bundle.level for bundle in sequence] == [1, 2, 3]
    assert sequence[0].delta_in is None
    assert all(check_functor_laws(bundle.delta_in) == [] for bundle in sequence[1:])


def test_kay_of_path_matches_fiber_product(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 1, generators_at(l5_system, 1, seed=5)))
    base = bundle.base
    a, b, c = (l5_system.point(core, 1) for core in "abc")
    gamma = [base.hom(a, b)[0], base.hom(b, c)[0]]

    found = kay_of_path(bundle, gamma)

    assert len(found.threads) == found.closed_form
    assert all(len(thread.lift) == 2 for thread in found.threads)


def test_empty_path_threads_are_the_fiber(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 1))
    a = l5_system.point("a", 1)

    assert len(threads(bundle, [], start=a)) == len(bundle.elements.fiber(a))
    with pytest.raises(NonComposablePathError):
        threads(bundle, [])


def test_threads_reject_broken_paths(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 1))
    base = bundle.base
    a, b, c = (l5_system.point(core, 1) for core in "abc")

    with pytest.raises(NonComposablePathError):
        threads(bundle, [base.hom(a, b)[0], base.hom(a, c)[0]])
    with pytest.raises(NonComposablePathError):
        threads(bundle, [base.hom(a, b)[0]], start=c)


def test_kay_cover_and_negative_control(l5_system, l5) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 2))

    assert kay_cover_check(bundle) == []
    assert [v.law for v in kay_cover_check(truncated_bundle(l5, 1.5))] == ["kay-cover"]


def test_duality_recovers_the_base(l5_system) -> None:
    for arity in (1, 2):
        bundle = build_bundle(build_chi_pq(l5_system, 2, arity))
        recovered = recover_base(bundle)

        assert duality_roundtrip(bundle, l5_system) == []
        assert recovered.morphism_count == len(bundle.base.morphisms)


def test_duality_notices_a_missing_projection(l5_system) -> None:
    bundle = build_bundle(build_chi_p(l5_system, 1))
    elements = bundle.elements
    dropped = elements.category.objects[0]
    on_objects = {k: v for k, v in elements.projection.on_objects.items() if k != dropped}
    projection = FinFunctor(elements.category, elements.base, on_objects, elements.projection.on_morphisms)
    damaged = dataclasses.replace(bundle, elements=dataclasses.replace(elements, projection=projection))

    laws = [v.law for v in duality_roundtrip(damaged, l5_system)]

    assert "projection-total" in laws
    assert "base-objects" in laws
