"""JSON report payloads. Atom sets are listed in input order so reports are
byte-stable for a fixed input."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from typing import Any

from . import __version__
from .bundles import TowerBundle, duality_roundtrip, kay_cover_check, recover_base
from .delta import DirectedSystem, ThickPoint, referent_ratio, strata
from .fincat import Violation, check_cofibered, strictly_functorial
from .info_space import InfoSpace, ball, components, order
from .models import CheckReport, RunConfig
from .natural import Blob, WaveFunction
from .towers import CrossSection, Tower


def envelope(command: str, config: RunConfig, result: Any) -> dict[str, Any]:
    return {
        "tool": "fluidcat",
        "version": __version__,
        "command": command,
        "config": config.describe(),
        "result": result,
    }


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def violations_payload(violations: Iterable[Violation]) -> list[dict[str, str]]:
    return [{"law": v.law, "detail": v.detail} for v in violations]


def cover_report(space: InfoSpace, epsilon: float) -> dict[str, Any]:
    cells = components(space, epsilon)
    warnings = []
    if len(cells) > 1:
        warnings.append(
            f"epsilon-graph is disconnected ({len(cells)} components); the colimit is not the full atom set"
        )
    return {
        "epsilon": epsilon,
        "balls": {atom: order(space, ball(space, atom, epsilon)) for atom in space.atoms},
        "components": [order(space, cell) for cell in cells],
        "connected": len(cells) == 1,
        "warnings": warnings,
    }


def thick_point_payload(space: InfoSpace, tp: ThickPoint) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "core": tp.core,
        "level": tp.level,
        "members": order(space, tp.members),
        "degrees": {atom: tp.degree(atom) for atom in order(space, tp.members)},
        "referent_ratio": referent_ratio(space, tp),
    }
    if tp.level > 0:
        payload["strata"] = [order(space, layer) for layer in strata(tp)]
    return payload


def system_report(system: DirectedSystem) -> dict[str, Any]:
    space = system.space
    return {
        "epsilon": system.epsilon,
        "max_level": system.max_level,
        "connected": system.connected,
        "levels": [
            {
                "level": level.level,
                "objects": len(level.category.objects),
                "morphisms": len(level.category.morphisms),
                "points": [thick_point_payload(space, tp) for tp in level.points],
            }
            for level in system.levels
        ],
        "stabilization": dict(system.stabilization),
    }


def strata_report(space: InfoSpace, points: Sequence[ThickPoint]) -> dict[str, Any]:
    return {tp.core: [order(space, layer) for layer in strata(tp)] for tp in points}


def colimit_report(space: InfoSpace, colimits: dict[str, frozenset[str]]) -> dict[str, Any]:
    return {
        "colimits": {core: order(space, members) for core, members in colimits.items()},
        "reaches_omega": {core: members == space.omega for core, members in colimits.items()},
    }


def wavefn_payload(space: InfoSpace, wave: WaveFunction) -> dict[str, Any]:
    return {
        "core": wave.core,
        "level": wave.level,
        "lambda": wave.decay,
        "prob": {atom: wave.prob[atom] for atom in order(space, wave.support)},
    }


def blob_payload(blob: Blob) -> dict[str, Any]:
    labels = sorted(blob.labels)
    return {
        "core": blob.source.core,
        "level": blob.source.level,
        "labels": {
            label: {"min_degree": blob.min_degree[label], "multiplicity": blob.multiplicity[label]}
            for label in labels
        },
    }


def section_payload(space: InfoSpace, section: CrossSection) -> dict[str, Any]:
    members = order(space, section.members)
    return {"members": members, "intensity": {atom: section.weights[atom] for atom in members}}


def tower_payload(space: InfoSpace, tower: Tower) -> dict[str, Any]:
    return {
        "feet": [foot.ident for foot in tower.feet],
        "sections": [section_payload(space, section) for section in tower.sections],
    }


def base_object_id(obj: Any) -> str:
    if isinstance(obj, ThickPoint):
        return obj.ident
    return "|".join(tp.ident for tp in obj)


def bundle_report(bundle: TowerBundle, system: DirectedSystem) -> dict[str, Any]:
    space = bundle.space
    elements = bundle.elements
    tower_ids: dict[Tower, str] = {}
    for _, tower in bundle.category.objects:
        tower_ids.setdefault(tower, f"T{len(tower_ids)}")
    element_ids = {obj: f"{base_object_id(obj[0])}/{tower_ids[obj[1]]}" for obj in bundle.category.objects}
    recovered = recover_base(bundle)

    return {
        "level": bundle.level,
        "arity": bundle.arity,
        "base": {
            "objects": len(bundle.base.objects),
            "morphisms": len(bundle.base.morphisms),
        },
        "objects": len(bundle.category.objects),
        "morphisms": len(bundle.category.morphisms),
        "towers": {ident: tower_payload(space, tower) for tower, ident in tower_ids.items()},
        "fibers": {
            base_object_id(c): [tower_ids[obj[1]] for obj in elements.fiber(c)] for c in bundle.base.objects
        },
        "projection": {element_ids[obj]: base_object_id(c) for obj, c in elements.projection.on_objects.items()},
        "recovered_base": {
            "objects": len(recovered.objects),
            "morphisms": recovered.morphism_count,
        },
        "checks": {
            "cofibered": violations_payload(check_cofibered(elements)),
            "kay_cover": violations_payload(kay_cover_check(bundle)),
            "duality": violations_payload(duality_roundtrip(bundle, system)),
            "strictly_functorial": strictly_functorial(bundle.chi),
        },
    }


def check_payload(reports: Sequence[CheckReport]) -> dict[str, Any]:
    return {
        "passed": all(report.ok for report in reports),
        "suites": [report.model_dump(mode="json", exclude_none=True) for report in reports],
    }
