"""Law suites behind ``fluidcat check``.

Each suite counts the cases it examined and records one ``FailedLaw`` per
failing case. Randomized inputs (extra towers, splittings, sampled triples)
are drawn from a ``random.Random`` seeded by the caller.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import networkx as nx

from .bundles import (
    TowerBundle,
    TowerFunctor,
    build_bundle,
    build_chi_pq,
    bundle_sequence,
    duality_roundtrip,
    kay_cover_check,
)
from .delta import (
    THIN_LABEL,
    DirectedSystem,
    build_system,
    colimit,
    delta_functor,
    point,
    validate_thick_point,
)
from .fincat import (
    EXHAUSTIVE_TRIPLE_LIMIT,
    FinCategory,
    GroupoidFunctor,
    Violation,
    category_of_elements,
    check_cofibered,
    check_functor_laws,
    codiscrete_category,
    codiscrete_groupoid,
    is_micro_reversible,
    pair_sample,
    validate_category,
)
from .info_space import InfoSpace, eps_graph
from .models import BlobDocument, CheckReport, FailedLaw
from .natural import (
    Reconstruction,
    blob_document,
    blob_from_document,
    check_rec_square,
    push_forward,
    rec_point,
    wavefn,
)
from .towers import (
    EMPTY_TOWER,
    RESHAPE_LABEL,
    CrossSection,
    Tower,
    canonical_tower,
    delta_tower,
    merge_all,
    random_splitting,
    random_tower,
    tensor,
    tower_class,
    validate_tower,
)

logger = logging.getLogger(__name__)

LAMBDA_GRID = (0.1, 0.25, 0.5, 0.75, 0.9)
NORMALIZATION_TOLERANCE = 1e-12
MAX_TRIPLES = 500
ASSOCIATIVITY_SAMPLE = 20_000
MIN_PAIRS = 500
MAX_BUNDLE_LEVEL = 3
MAX_BUNDLE_ARITY = 2
UNIFORM_LAMBDA = 0.999


@dataclass(slots=True)
class SuiteTally:
    suite: str
    total: int = 0
    failed: list[FailedLaw] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def record(self, violations: Sequence[Violation]) -> None:
        self.total += 1
        if violations:
            first = violations[0]
            extra = f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""
            self.failed.append(FailedLaw(law=first.law, counterexample=first.detail + extra))

    def expect(self, ok: bool, law: str, detail: str) -> None:
        self.record([] if ok else [Violation(law, detail)])

    def report(self) -> CheckReport:
        return CheckReport(
            suite=self.suite,
            total=self.total,
            passed=self.total - len(self.failed),
            failed=self.failed,
            note="; ".join(self.notes) or None,
        )


def level_categories(system: DirectedSystem) -> list[FinCategory]:
    return [level.category for level in system.levels]


def category_suite(categories: Iterable[FinCategory], seed: int = 0) -> CheckReport:
    tally = SuiteTally("category-laws")
    for category in categories:
        sample = None
        if category.composable_triples() > EXHAUSTIVE_TRIPLE_LIMIT:
            sample = ASSOCIATIVITY_SAMPLE
            tally.notes.append(f"{category.name}: associativity sampled on {sample} triples")
        tally.record(validate_category(category, sample=sample, seed=seed))
    return tally.report()


def micro_reversibility_suite(system: DirectedSystem) -> CheckReport:
    tally = SuiteTally("micro-reversibility")
    for level in system.levels:
        for a, b in itertools.product(level.points, repeat=2):
            verdict = is_micro_reversible(level.category, a, b)
            tally.expect(bool(verdict), "micro-reversible", f"{a.ident} -> {b.ident}: {verdict.reason}")
    return tally.report()


def delta_functor_suite(system: DirectedSystem) -> CheckReport:
    tally = SuiteTally("delta-functor")
    for level in range(system.max_level):
        tally.record(check_functor_laws(delta_functor(system, level)))
    return tally.report()


def strata_suite(system: DirectedSystem) -> CheckReport:
    tally = SuiteTally("strata")
    for level in system.levels:
        for tp in level.points:
            tally.record(validate_thick_point(system.space, system.epsilon, tp))
    return tally.report()


def degree_suite(system: DirectedSystem) -> CheckReport:
    """Members of a level-p point are the atoms within p hops; degree is hop - 1."""
    tally = SuiteTally("degree-oracle")
    graph = eps_graph(system.space, system.epsilon)
    for level in system.levels:
        for tp in level.points:
            hops = nx.single_source_shortest_path_length(graph, tp.core, cutoff=level.level)
            if set(hops) != tp.members:
                tally.expect(False, "degree-members", f"{tp.ident}: members differ from the {level.level}-hop ball")
                continue
            wrong = [b for b in tp.members if tp.degree(b) != max(0, hops[b] - 1)]
            tally.expect(not wrong, "degree-bfs", f"{tp.ident}: degree != hop - 1 at {sorted(wrong)}")
    return tally.report()


def colimit_suite(system: DirectedSystem) -> CheckReport:
    tally = SuiteTally("colimit")
    space, epsilon = system.space, system.epsilon
    graph = eps_graph(space, epsilon)
    for core in space.atoms:
        component = nx.node_connected_component(graph, core)
        reached = colimit(space, epsilon, core)
        tally.expect(reached == component, "colimit-component", f"colim at {core} is not its component")
        if system.connected:
            tally.expect(reached == space.omega, "colimit-omega", f"colim at {core} misses part of the atom set")

        steps = max(1, nx.eccentricity(graph.subgraph(component), v=core))
        expected = steps if steps <= system.max_level else None
        found = system.stabilization[core]
        tally.expect(found == expected, "stabilization", f"{core}: stabilizes at {found}, expected {expected}")
    if not system.connected:
        tally.notes.append("epsilon-graph is disconnected; colimits checked against components")
    return tally.report()


def generated_towers(system: DirectedSystem, rng: random.Random, extra: int = 1) -> list[Tower]:
    """Canonical towers of every level-P point plus ``extra`` random ones each."""
    space, epsilon = system.space, system.epsilon
    towers: list[Tower] = []
    for tp in system.category(system.max_level).points:
        towers.append(canonical_tower(space, epsilon, tp))
        towers.extend(random_tower(space, epsilon, tp, rng) for _ in range(extra))
    return list(dict.fromkeys(towers))


def _pick(rng: random.Random, pool: Sequence[tuple[Tower, ...]], limit: int) -> Sequence[tuple[Tower, ...]]:
    if len(pool) <= limit:
        return pool
    return rng.sample(pool, limit)


def monoidal_suite(towers: Sequence[Tower], rng: random.Random) -> CheckReport:
    tally = SuiteTally("monoidal")
    for tower in towers:
        tally.expect(
            tensor(tower, EMPTY_TOWER) == tower and tensor(EMPTY_TOWER, tower) == tower,
            "unit",
            f"empty tower is not a unit for tower over {[f.ident for f in tower.feet]}",
        )
    for a, b in itertools.product(towers, repeat=2):
        ab, ba = tensor(a, b), tensor(b, a)
        tally.expect(
            ab.sections == ba.sections and set(ab.feet) == set(ba.feet),
            "commutativity",
            f"T x T' and T' x T differ beyond foot order for feet {[f.ident for f in ab.feet]}",
        )
    triples = list(itertools.product(towers, repeat=3))
    for a, b, c in _pick(rng, triples, MAX_TRIPLES):
        tally.expect(
            tensor(tensor(a, b), c) == tensor(a, tensor(b, c)),
            "associativity",
            f"(T x T') x T'' != T x (T' x T'') for feet {[f.ident for f in a.feet + b.feet + c.feet]}",
        )
    return tally.report()


def distributivity_suite(system: DirectedSystem, towers: Sequence[Tower], rng: random.Random) -> CheckReport:
    """delta(T x T') = delta T x delta T', also through random splittings of
    each product into one tower per foot."""
    tally = SuiteTally("delta-distributivity")
    space, epsilon = system.space, system.epsilon
    pairs = list(itertools.product(towers, repeat=2))
    while pairs and len(pairs) < MIN_PAIRS:
        pairs.append((rng.choice(towers), rng.choice(towers)))

    for a, b in pairs:
        product = tensor(a, b)
        thickened = tensor(delta_tower(space, epsilon, a), delta_tower(space, epsilon, b))
        tally.expect(
            delta_tower(space, epsilon, product) == thickened,
            "delta-tensor",
            f"delta(T x T') != delta T x delta T' for feet {[f.ident for f in product.feet]}",
        )
        parts = random_splitting(product, rng)
        try:
            tower_class(product, [parts])
        except ValueError as exc:
            tally.expect(False, "splitting", str(exc))
            continue
        split = merge_all(delta_tower(space, epsilon, part) for part in parts)
        tally.expect(
            delta_tower(space, epsilon, product) == split,
            "representative-independence",
            f"delta disagrees across representatives for feet {[f.ident for f in product.feet]}",
        )
    return tally.report()


def top_invariance_suite(system: DirectedSystem, towers: Sequence[Tower]) -> CheckReport:
    tally = SuiteTally("omega-top")
    space, epsilon = system.space, system.epsilon
    for tower in towers:
        thick = delta_tower(space, epsilon, tower)
        tally.expect(thick.top == tower.top, "omega-top", f"delta moved the top of {[f.ident for f in tower.feet]}")
        tally.record(validate_tower(space, thick))
    return tally.report()


def bundle_generators(system: DirectedSystem, level: int, rng: random.Random) -> dict[str, tuple[Tower, ...]]:
    space, epsilon = system.space, system.epsilon
    return {tp.core: (random_tower(space, epsilon, tp, rng),) for tp in system.category(level).points}


def generated_bundles(system: DirectedSystem, rng: random.Random) -> list[TowerBundle]:
    """Level 1..min(3, P) bundles: arity 1 with one random generator per core
    and arity 2 without generators."""
    bundles: list[TowerBundle] = []
    for level in range(1, min(MAX_BUNDLE_LEVEL, system.max_level) + 1):
        generators = bundle_generators(system, level, rng)
        for arity in range(1, MAX_BUNDLE_ARITY + 1):
            chi = build_chi_pq(system, level, arity, generators if arity == 1 else None)
            bundles.append(build_bundle(chi, check=False))
    return bundles


def _closed_form_counts(bundle: TowerBundle) -> tuple[int, int]:
    fibers = {c: len(bundle.elements.fiber(c)) for c in bundle.base.objects}
    objects = sum(fibers.values())
    morphisms = sum(fibers[f.src] * fibers[f.dst] for f in bundle.base.morphisms)
    return objects, morphisms


def cofibration_suite(system: DirectedSystem, bundles: Sequence[TowerBundle], rng: random.Random) -> CheckReport:
    tally = SuiteTally("cofibration")
    for bundle in bundles:
        label = f"p={bundle.level} q={bundle.arity}"
        sample = pair_sample(bundle.category)
        if sample is not None:
            tally.notes.append(f"{label}: pairwise laws sampled on {sample} seeded pairs")
        tally.record(check_cofibered(bundle.elements, sample=sample))
        objects, morphisms = _closed_form_counts(bundle)
        tally.expect(
            (len(bundle.category.objects), len(bundle.category.morphisms)) == (objects, morphisms),
            "element-counts",
            f"{label}: {len(bundle.category.objects)} objects and {len(bundle.category.morphisms)} morphisms, "
            f"expected {objects} and {morphisms}",
        )
    if system.max_level >= 2:
        start = 1
        for arity in range(1, MAX_BUNDLE_ARITY + 1):
            generators = bundle_generators(system, start, rng) if arity == 1 else None
            sequence = bundle_sequence(system, arity, generators, start=start)
            for bundle in sequence[1:]:
                if bundle.delta_in is not None:
                    tally.record(check_functor_laws(bundle.delta_in, pair_sample(bundle.delta_in.source)))
    else:
        tally.notes.append("bundle thickening needs at least two levels")
    return tally.report()


def duality_suite(system: DirectedSystem, bundles: Sequence[TowerBundle]) -> CheckReport:
    tally = SuiteTally("duality")
    for bundle in bundles:
        tally.record(duality_roundtrip(bundle, system))
    return tally.report()


def truncated_bundle(space: InfoSpace, epsilon: float) -> TowerBundle:
    """Bundle over a single bare point whose only tower stops at the point."""
    foot = point(space.atoms[0])
    truncated = Tower((foot,), (CrossSection.build({foot.core: 1.0}),))
    base = codiscrete_category((foot,), THIN_LABEL, name="truncated")
    fiber = codiscrete_groupoid((truncated,), RESHAPE_LABEL, name="truncated")
    chi = TowerFunctor(
        base=base,
        on_objects={foot: fiber},
        on_morphisms={base.identity(foot): GroupoidFunctor(fiber, fiber, {truncated: truncated})},
        space=space,
        epsilon=epsilon,
        level=0,
        arity=1,
        generators={},
    )
    return TowerBundle(chi, category_of_elements(chi))


def kay_cover_suite(system: DirectedSystem, bundles: Sequence[TowerBundle]) -> CheckReport:
    tally = SuiteTally("kay-cover")
    for bundle in bundles:
        tally.record(kay_cover_check(bundle))
    if len(system.space) > 1:
        control = kay_cover_check(truncated_bundle(system.space, system.epsilon))
        tally.expect(bool(control), "kay-cover-control", "truncated tower unexpectedly covers the atom set")
    else:
        tally.notes.append("negative control skipped: a single atom is always covered")
    return tally.report()


def wavefn_suite(system: DirectedSystem, lam: float) -> CheckReport:
    tally = SuiteTally("wavefn")
    grid = sorted({*LAMBDA_GRID, lam})
    components = Reconstruction.by_component(system.space, system.epsilon)
    for level in system.levels:
        for tp in level.points:
            for value in grid:
                wave = wavefn(tp, value)
                total = math.fsum(wave.prob.values())
                tally.expect(
                    abs(total - 1) <= NORMALIZATION_TOLERANCE,
                    "normalization",
                    f"{tp.ident} at lambda={value}: mass {total!r}",
                )
                inverted = [
                    (b, c)
                    for b, c in itertools.permutations(tp.members, 2)
                    if tp.degree(b) < tp.degree(c) and not wave.prob[b] > wave.prob[c]
                ]
                tally.expect(
                    not inverted, "degree-monotone", f"{tp.ident} at lambda={value}: {inverted[:1]}"
                )
                pushed = math.fsum(push_forward(wave, components).values())
                tally.expect(
                    abs(pushed - 1) <= NORMALIZATION_TOLERANCE,
                    "push-forward",
                    f"{tp.ident} at lambda={value}: pushed mass {pushed!r}",
                )
            near_one = wavefn(tp, UNIFORM_LAMBDA)
            uniform = 1 / len(tp.members)
            tally.expect(
                all(abs(p - uniform) <= 10 * (1 - UNIFORM_LAMBDA) for p in near_one.prob.values()),
                "uniform-limit",
                f"{tp.ident}: lambda={UNIFORM_LAMBDA} does not approach the uniform distribution",
            )
    return tally.report()


def rec_square_suite(system: DirectedSystem) -> CheckReport:
    tally = SuiteTally("rec-square")
    labelings = {
        "identity": Reconstruction.identity(system.space),
        "component": Reconstruction.by_component(system.space, system.epsilon),
    }
    for name, reconstruction in labelings.items():
        tally.record(check_rec_square(system, reconstruction))
        rebuilt = {}
        for level in system.levels:
            for tp in level.points:
                stored = blob_document(rec_point(tp, reconstruction)).model_dump(mode="json")
                rebuilt[(tp.core, tp.level)] = blob_from_document(BlobDocument.model_validate(stored), system)
        violations = check_rec_square(system, reconstruction, rebuilt)
        tally.record([Violation(v.law, f"{name}: {v.detail}") for v in violations])
    return tally.report()


def run_checks(
    space: InfoSpace, epsilon: float, levels: int, lam: float = 0.5, seed: int = 0
) -> list[CheckReport]:
    system = build_system(space, epsilon, levels)
    rng = random.Random(seed)
    towers = generated_towers(system, rng)
    bundles = generated_bundles(system, rng)

    reports = [
        category_suite(level_categories(system), seed=seed),
        micro_reversibility_suite(system),
        delta_functor_suite(system),
        strata_suite(system),
        degree_suite(system),
        colimit_suite(system),
        monoidal_suite(towers, rng),
        distributivity_suite(system, towers, rng),
        top_invariance_suite(system, towers),
        cofibration_suite(system, bundles, rng),
        duality_suite(system, bundles),
        kay_cover_suite(system, bundles),
        wavefn_suite(system, lam),
        rec_square_suite(system),
    ]
    for report in reports:
        logger.debug("%s: %d/%d passed", report.suite, report.passed, report.total)
    return reports
