from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fluidcat.delta import DirectedSystem, build_system
from fluidcat.info_space import InfoSpace, load_space

settings.register_profile("ci", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

L5_DOCUMENT = {
    "metric": {
        "type": "euclidean",
        "coords": {"a": [0], "b": [1], "c": [2], "d": [3], "e": [10]},
    }
}
L5_EPSILON = 1.5


def write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")


@pytest.fixture
def l5() -> InfoSpace:
    return load_space(L5_DOCUMENT)


@pytest.fixture
def l5_system(l5: InfoSpace) -> DirectedSystem:
    return build_system(l5, L5_EPSILON, 3)


@pytest.fixture
def l5_file(tmp_path: Path) -> Path:
    target = tmp_path / "l5.json"
    write(target, json.dumps(L5_DOCUMENT))
    return target


@st.composite
def spaces(draw, max_atoms: int = 12) -> InfoSpace:
    """Random symmetric integer metrics; triangle inequality not enforced."""
    n = draw(st.integers(min_value=1, max_value=max_atoms))
    matrix = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            value = float(draw(st.integers(min_value=1, max_value=6)))
            matrix[i][j] = matrix[j][i] = value
    atoms = tuple(f"x{i}" for i in range(n))
    return InfoSpace(atoms, tuple(tuple(row) for row in matrix))


epsilons = st.sampled_from((1.5, 2.5, 3.5, 4.5, 6.5))
