from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import networkx as nx
import numpy as np
from pydantic import ValidationError

from .errors import (
    AsymmetricMetricError,
    MalformedDocumentError,
    NegativeDistanceError,
    NonpositiveEpsilonError,
    NonzeroDiagonalError,
    UnknownAtomError,
)
from .models import CoordinateMetric, MatrixMetric, SpaceDocument

logger = logging.getLogger(__name__)

Atom = str


@dataclass(frozen=True)
class InfoSpace:
    """Finite atom set with a symmetric information distance.

    The full atom set plays the part of the ambient space Omega.
    """

    atoms: tuple[Atom, ...]
    matrix: tuple[tuple[float, ...], ...]
    index: Mapping[Atom, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.atoms)) != len(self.atoms):
            raise MalformedDocumentError("Atom ids must be unique.")
        n = len(self.atoms)
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise MalformedDocumentError(f"Distance matrix must be {n}x{n}.")
        for i in range(n):
            if self.matrix[i][i] != 0:
                raise NonzeroDiagonalError(
                    f"d({self.atoms[i]},{self.atoms[i]}) = {self.matrix[i][i]}, expected 0."
                )
        for i in range(n):
            for j in range(n):
                value = self.matrix[i][j]
                if value < 0:
                    raise NegativeDistanceError(
                        f"d({self.atoms[i]},{self.atoms[j]}) = {value} is negative."
                    )
                if value != self.matrix[j][i]:
                    raise AsymmetricMetricError(
                        f"d({self.atoms[i]},{self.atoms[j]}) = {value} but "
                        f"d({self.atoms[j]},{self.atoms[i]}) = {self.matrix[j][i]}."
                    )
        object.__setattr__(self, "index", {atom: i for i, atom in enumerate(self.atoms)})

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.index

    @property
    def omega(self) -> frozenset[Atom]:
        return frozenset(self.atoms)

    def require(self, atom: Atom) -> int:
        try:
            return self.index[atom]
        except KeyError:
            raise UnknownAtomError(f"Atom '{atom}' is not part of the space.") from None

    def dist(self, a: Atom, b: Atom) -> float:
        return self.matrix[self.require(a)][self.require(b)]


def _require_epsilon(epsilon: float) -> None:
    if not epsilon > 0:
        raise NonpositiveEpsilonError(f"epsilon must be positive, got {epsilon}.")


def load_space(document: SpaceDocument | Mapping[str, Any]) -> InfoSpace:
    if not isinstance(document, SpaceDocument):
        try:
            document = SpaceDocument.model_validate(document)
        except ValidationError as exc:
            raise MalformedDocumentError(f"Invalid space document: {exc}") from exc

    atoms = document.atom_ids()
    if not atoms:
        raise MalformedDocumentError("A space needs at least one atom.")
    metric = document.metric
    if isinstance(metric, MatrixMetric):
        rows = metric.d
        # a lone atom may come with an empty matrix
        if len(atoms) == 1 and rows in ([], [[]]):
            rows = [[0.0]]
        if len(rows) != len(atoms) or any(len(row) != len(atoms) for row in rows):
            raise MalformedDocumentError(
                f"Matrix must be {len(atoms)}x{len(atoms)} to match the atoms list."
            )
        matrix = np.asarray(rows, dtype=float).reshape(len(atoms), len(atoms))
    else:
        matrix = _coordinate_matrix(metric, atoms)

    if not np.isfinite(matrix).all():
        raise MalformedDocumentError("Distances must be finite.")

    space = InfoSpace(tuple(atoms), tuple(tuple(float(x) for x in row) for row in matrix.tolist()))
    logger.debug("Loaded space with %d atoms", len(space))
    return space


def read_space(path: str | Path) -> InfoSpace:
    target = Path(path).expanduser()
    if not target.is_file():
        raise MalformedDocumentError(f"Space document does not exist: {target}")
    try:
        payload = json.loads(target.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocumentError(f"Space document {target} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedDocumentError(f"Space document {target} must hold a JSON object.")
    return load_space(payload)


def _coordinate_matrix(metric: CoordinateMetric, atoms: Sequence[Atom]) -> np.ndarray:
    points = np.asarray([metric.coords[atom] for atom in atoms], dtype=float)
    diff = points[:, None, :] - points[None, :, :]
    if metric.type == "euclidean":
        return np.sqrt((diff**2).sum(axis=-1))
    if metric.type == "manhattan":
        return np.abs(diff).sum(axis=-1)
    return np.abs(diff).max(axis=-1)


def random_space(n: int, seed: int, max_distance: int = 6) -> InfoSpace:
    """Seeded space with integer distances in [1, max_distance]."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.integers(1, max_distance + 1, size=(n, n)), k=1)
    matrix = upper + upper.T
    atoms = tuple(f"x{i}" for i in range(n))
    return InfoSpace(atoms, tuple(tuple(float(x) for x in row) for row in matrix.tolist()))


def order(space: InfoSpace, atoms: Iterable[Atom]) -> list[Atom]:
    return sorted(atoms, key=space.require)


def ball(space: InfoSpace, a: Atom, epsilon: float) -> frozenset[Atom]:
    _require_epsilon(epsilon)
    row = space.matrix[space.require(a)]
    return frozenset(b for b, d in zip(space.atoms, row) if d < epsilon)


def is_mu_related(space: InfoSpace, a: Atom, b: Atom, epsilon: float) -> bool:
    _require_epsilon(epsilon)
    return space.dist(a, b) < epsilon


def eps_cover(space: InfoSpace, epsilon: float) -> list[frozenset[Atom]]:
    return [ball(space, a, epsilon) for a in space.atoms]


def eps_graph(space: InfoSpace, epsilon: float) -> nx.Graph:
    _require_epsilon(epsilon)
    graph = nx.Graph()
    graph.add_nodes_from(space.atoms)
    n = len(space)
    for i in range(n):
        for j in range(i + 1, n):
            if space.matrix[i][j] < epsilon:
                graph.add_edge(space.atoms[i], space.atoms[j])
    return graph


def components(space: InfoSpace, epsilon: float) -> list[frozenset[Atom]]:
    cells = [frozenset(cell) for cell in nx.connected_components(eps_graph(space, epsilon))]
    cells.sort(key=lambda cell: min(space.require(atom) for atom in cell))
    return cells


def is_connected(space: InfoSpace, epsilon: float) -> bool:
    return len(components(space, epsilon)) <= 1


def info_content(space: InfoSpace, atoms: Iterable[Atom]) -> int:
    members = set(atoms)
    for atom in members:
        space.require(atom)
    return len(members)
