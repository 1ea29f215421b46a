"""Pydantic schemas for complex, weight, function and tower files.

Exact numbers travel as ``"p/q"`` strings or integers; plain JSON floats are
accepted where a float-valued (Euclidean) quantity makes sense. Conversion
to engine objects lives in :mod:`tropdeg.core.io`.
"""

from __future__ import annotations

from typing import Literal, TypeAlias

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tropdeg.core.linalg import as_rational

RationalLike: TypeAlias = int | str
"""An integer or a ``"p/q"`` string."""

ScalarLike: TypeAlias = int | str | float
"""A rational, or a float where floats are meaningful."""


def _check_rational(value: object) -> object:
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, str):
        as_rational(value)
    return value


class ComplexSchema(BaseModel):
    """Schema for a conical complex.

    Attributes:
        name: Optional label.
        ambient_dim: Rank of the ambient lattice.
        rays: Ray id to integer image.
        cones: Maximal cones as lists of ray ids.
        inner_product: Optional symmetric Gram matrix (rationals).
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str = Field(default="", description="Complex label")
    ambient_dim: int = Field(..., ge=1, alias="ambient-dim", description="Ambient rank")
    rays: dict[str, list[int]] = Field(..., min_length=1, description="Ray images")
    cones: list[list[str]] = Field(..., min_length=1, description="Maximal cones")
    inner_product: list[list[RationalLike]] | None = Field(
        default=None, alias="inner-product", description="Gram matrix"
    )

    @field_validator("rays", mode="before")
    @classmethod
    def rays_from_list(cls, v: object) -> object:
        """Accept ``[{"id": ..., "image": [...]}, ...]`` as well as a mapping."""
        if not isinstance(v, list):
            return v
        rays: dict[str, object] = {}
        for entry in v:
            if not isinstance(entry, dict) or set(entry) != {"id", "image"}:
                raise ValueError("ray entries need exactly 'id' and 'image'")
            if entry["id"] in rays:
                raise ValueError(f"duplicate ray id {entry['id']!r}")
            rays[entry["id"]] = entry["image"]
        return rays

    @field_validator("rays")
    @classmethod
    def validate_rays(cls, v: dict[str, list[int]]) -> dict[str, list[int]]:
        """Ray ids must be non-empty and must not contain the cone separator."""
        for rid in v:
            if not rid.strip() or "|" in rid:
                raise ValueError(f"invalid ray id {rid!r}")
        return v

    @field_validator("inner_product")
    @classmethod
    def validate_inner_product(
        cls, v: list[list[RationalLike]] | None
    ) -> list[list[RationalLike]] | None:
        if v is not None:
            for row in v:
                for x in row:
                    _check_rational(x)
        return v


class WeightSchema(BaseModel):
    """Schema for a weight: values keyed by ``"r1|r2|..."`` cone keys."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=0, description="Dimension of the weighted cones")
    flavor: Literal["lattice", "euclidean"] = Field(default="lattice")
    values: dict[str, ScalarLike] = Field(default_factory=dict)

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: dict[str, ScalarLike]) -> dict[str, ScalarLike]:
        for x in v.values():
            _check_rational(x)
        return v

    @model_validator(mode="after")
    def lattice_values_exact(self) -> WeightSchema:
        if self.flavor == "lattice" and any(isinstance(x, float) for x in self.values.values()):
            raise ValueError("lattice weights need exact values")
        return self


class FunctionSchema(BaseModel):
    """Schema for a PL function, by ray values or by a boundary divisor."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    ray_values: dict[str, ScalarLike] | None = Field(default=None, alias="ray-values")
    divisor: dict[str, RationalLike] | None = Field(default=None)

    @field_validator("ray_values", "divisor")
    @classmethod
    def validate_numbers(cls, v: dict[str, ScalarLike] | None) -> dict[str, ScalarLike] | None:
        if v is not None:
            for x in v.values():
                _check_rational(x)
        return v

    @model_validator(mode="after")
    def exactly_one_form(self) -> FunctionSchema:
        if (self.ray_values is None) == (self.divisor is None):
            raise ValueError("give exactly one of 'ray_values' and 'divisor'")
        return self


class LadderSchema(BaseModel):
    """Base complex of a refinement ladder: a fixture name or an explicit complex."""

    model_config = ConfigDict(extra="forbid")

    fixture: str | None = None
    complex: ComplexSchema | None = None

    @model_validator(mode="after")
    def exactly_one_base(self) -> LadderSchema:
        if (self.fixture is None) == (self.complex is None):
            raise ValueError("give exactly one of 'fixture' and 'complex'")
        return self


class TowerFunctionSchema(BaseModel):
    """One slot of a degree-by-convergence run."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal["negative-norm", "pl", "divisor"]
    ray_values: dict[str, RationalLike] | None = Field(default=None, alias="ray-values")
    divisor: dict[str, RationalLike] | None = None

    @model_validator(mode="after")
    def payload_matches_kind(self) -> TowerFunctionSchema:
        if self.kind == "pl" and self.ray_values is None:
            raise ValueError("kind 'pl' needs 'ray_values'")
        if self.kind == "divisor" and self.divisor is None:
            raise ValueError("kind 'divisor' needs 'divisor'")
        return self


class TowerSchema(BaseModel):
    """Schema for a tower file used by ``tropdeg converge``."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    ladder: LadderSchema
    steps: int = Field(..., ge=0, le=16, description="Number of bisection rounds")
    functions: list[TowerFunctionSchema] = Field(..., min_length=1)
    claimed_nef: bool = Field(default=False, alias="claimed-nef")
