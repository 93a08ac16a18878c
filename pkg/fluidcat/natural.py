"""Reconstructed (labelled) thick points and the degree-decay wave function."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .delta import DirectedSystem, ThickPoint, thicken
from .errors import LambdaOutOfRangeError, UnlabeledAtomError
from .fincat import Violation
from .info_space import Atom, InfoSpace, components
from .models import BlobDocument

logger = logging.getLogger(__name__)

Label = str


@dataclass(frozen=True)
class Reconstruction:
    labels: Mapping[Atom, Label]

    @classmethod
    def identity(cls, space: InfoSpace) -> "Reconstruction":
        return cls({atom: atom for atom in space.atoms})

    @classmethod
    def collapse(cls, space: InfoSpace, groups: Iterable[Iterable[Atom]]) -> "Reconstruction":
        """Atoms in one group share the label of the group's first atom."""
        labels = {atom: atom for atom in space.atoms}
        for group in groups:
            members = [space.atoms[i] for i in sorted(space.require(atom) for atom in group)]
            for atom in members:
                labels[atom] = members[0]
        return cls(labels)

    @classmethod
    def by_component(cls, space: InfoSpace, epsilon: float) -> "Reconstruction":
        return cls.collapse(space, components(space, epsilon))

    def label(self, atom: Atom) -> Label:
        try:
            return self.labels[atom]
        except KeyError:
            raise UnlabeledAtomError(f"Atom '{atom}' has no label.") from None


@dataclass(frozen=True)
class Blob:
    source: ThickPoint
    min_degree: Mapping[Label, int]
    multiplicity: Mapping[Label, int]

    @property
    def labels(self) -> frozenset[Label]:
        return frozenset(self.min_degree)

    def same_shape(self, other: "Blob") -> bool:
        return dict(self.min_degree) == dict(other.min_degree) and dict(self.multiplicity) == dict(
            other.multiplicity
        )


def rec_point(tp: ThickPoint, reconstruction: Reconstruction) -> Blob:
    min_degree: dict[Label, int] = {}
    multiplicity: dict[Label, int] = {}
    for atom, degree in tp.grading:
        label = reconstruction.label(atom)
        min_degree[label] = min(degree, min_degree.get(label, degree))
        multiplicity[label] = multiplicity.get(label, 0) + 1
    return Blob(tp, min_degree, multiplicity)


def blob_thicken(space: InfoSpace, epsilon: float, blob: Blob, reconstruction: Reconstruction) -> Blob:
    return rec_point(thicken(space, epsilon, blob.source), reconstruction)


def natural_system(system: DirectedSystem, reconstruction: Reconstruction) -> list[dict[Atom, Blob]]:
    return [
        {tp.core: rec_point(tp, reconstruction) for tp in level.points} for level in system.levels
    ]


def check_rec_square(
    system: DirectedSystem,
    reconstruction: Reconstruction,
    blobs: Mapping[tuple[Atom, int], Blob] | None = None,
) -> list[Violation]:
    """rec after delta against delta after rec, for every core and level.

    ``blobs`` holds rebuilt blobs keyed by ``(core, level)``; each is also
    checked against a fresh reconstruction of its source.
    """
    supplied = blobs or {}
    violations: list[Violation] = []
    for core in system.space.atoms:
        for level in range(system.max_level + 1):
            tp = system.point(core, level)
            blob = supplied.get((core, level))
            if blob is None:
                blob = rec_point(tp, reconstruction)
            elif not blob.same_shape(rec_point(blob.source, reconstruction)):
                violations.append(Violation("blob-stale", f"blob {tp.ident} disagrees with rec of its source"))
            if level == system.max_level:
                continue
            direct = rec_point(thicken(system.space, system.epsilon, tp), reconstruction)
            transported = blob_thicken(system.space, system.epsilon, blob, reconstruction)
            if not direct.same_shape(transported):
                violations.append(Violation("rec-square", f"rec.delta != delta.rec at {tp.ident}"))
    logger.debug("Reconstruction square over %d levels: %d violations", system.max_level + 1, len(violations))
    return violations


def blob_document(blob: Blob) -> BlobDocument:
    return BlobDocument(
        core=blob.source.core,
        level=blob.source.level,
        min_degree=dict(blob.min_degree),
        multiplicity=dict(blob.multiplicity),
    )


def blob_from_document(document: BlobDocument, system: DirectedSystem) -> Blob:
    source = system.point(document.core, document.level)
    return Blob(source, dict(document.min_degree), dict(document.multiplicity))


@dataclass(frozen=True)
class WaveFunction:
    core: Atom
    level: int
    decay: float
    prob: Mapping[Atom, float]

    @property
    def support(self) -> frozenset[Atom]:
        return frozenset(self.prob)


def wavefn(tp: ThickPoint, lam: float) -> WaveFunction:
    """Geometric fading over strata: prob(b) is proportional to lam ** degree(b)."""
    if not 0 < lam < 1:
        raise LambdaOutOfRangeError(f"lambda must lie in (0, 1), got {lam}.")
    weights = {atom: lam**degree for atom, degree in tp.grading}
    total = math.fsum(weights.values())
    return WaveFunction(tp.core, tp.level, lam, {atom: w / total for atom, w in weights.items()})


def push_forward(wave: WaveFunction, reconstruction: Reconstruction) -> dict[Label, float]:
    masses: dict[Label, list[float]] = {}
    for atom, prob in wave.prob.items():
        masses.setdefault(reconstruction.label(atom), []).append(prob)
    return {label: math.fsum(values) for label, values in masses.items()}
