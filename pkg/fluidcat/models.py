from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class MatrixMetric(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["matrix"]
    d: list[list[float]]


class CoordinateMetric(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["euclidean", "manhattan", "chebyshev"]
    coords: dict[str, list[float]]

    @field_validator("coords")
    @classmethod
    def _validate_keys(cls, value: dict[str, list[float]]) -> dict[str, list[float]]:
        if any(not key.strip() for key in value):
            raise ValueError("Atom ids cannot be empty.")
        return value

    @model_validator(mode="after")
    def _validate_dimensions(self) -> "CoordinateMetric":
        dimensions = {len(point) for point in self.coords.values()}
        if len(dimensions) > 1:
            raise ValueError("All coordinates must have the same dimension.")
        if 0 in dimensions:
            raise ValueError("Coordinates cannot be empty.")
        return self


Metric = Annotated[Union[MatrixMetric, CoordinateMetric], Field(discriminator="type")]


class SpaceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    atoms: list[str] | None = None
    metric: Metric

    @field_validator("atoms")
    @classmethod
    def _validate_atoms(cls, value: list[str] | None) -> list[str] | None:
        if value is None:
            return value
        if any(not atom.strip() for atom in value):
            raise ValueError("Atom ids cannot be empty.")
        if len(value) != len(set(value)):
            raise ValueError("Atom ids must be unique.")
        return value

    @model_validator(mode="after")
    def _validate_atom_source(self) -> "SpaceDocument":
        if isinstance(self.metric, MatrixMetric):
            if self.atoms is None:
                raise ValueError("A matrix metric needs an explicit atoms list.")
            return self
        if self.atoms is not None and set(self.atoms) != set(self.metric.coords):
            raise ValueError("Atoms list and coordinate keys differ.")
        return self

    def atom_ids(self) -> list[str]:
        if self.atoms is not None:
            return list(self.atoms)
        assert isinstance(self.metric, CoordinateMetric)
        return list(self.metric.coords)


class BlobDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    core: str
    level: int = Field(ge=0)
    min_degree: dict[str, int]
    multiplicity: dict[str, int]

    @model_validator(mode="after")
    def _validate_labels(self) -> "BlobDocument":
        if set(self.min_degree) != set(self.multiplicity):
            raise ValueError("min_degree and multiplicity must cover the same labels.")
        if any(count < 1 for count in self.multiplicity.values()):
            raise ValueError("Multiplicities must be at least 1.")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    input: Path
    epsilon: float
    levels: int = 3
    lam: float = Field(0.5, alias="lambda")
    arity: int = 1
    core: str | None = None
    seed: int = 0
    output: Path | None = None
    format: Literal["json", "dot"] = "json"

    @field_validator("epsilon")
    @classmethod
    def _validate_epsilon(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"NonpositiveEpsilon: epsilon must be positive, got {value}.")
        return value

    @field_validator("levels")
    @classmethod
    def _validate_levels(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"levels must be >= 0, got {value}.")
        return value

    @field_validator("lam")
    @classmethod
    def _validate_lambda(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError(f"LambdaOutOfRange: lambda must lie in (0, 1), got {value}.")
        return value

    @field_validator("arity")
    @classmethod
    def _validate_arity(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"arity must be >= 1, got {value}.")
        return value

    def describe(self) -> dict[str, object]:
        return self.model_dump(mode="json", by_alias=True, exclude={"output"})


class FailedLaw(BaseModel):
    law: str
    counterexample: str


class CheckReport(BaseModel):
    suite: str
    total: int = Field(ge=0)
    passed: int = Field(ge=0)
    failed: list[FailedLaw] = Field(default_factory=list)
    note: str | None = None

    @model_validator(mode="after")
    def _validate_counts(self) -> "CheckReport":
        if self.passed + len(self.failed) != self.total:
            raise ValueError("passed + failed must equal total.")
        return self

    @property
    def ok(self) -> bool:
        return not self.failed
