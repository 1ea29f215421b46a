"""Reading input documents and writing reproducible JSON.

Inputs may be JSON or YAML (chosen by suffix). A complex argument of the
form ``fixture:<name>`` loads a built-in complex instead of a file.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from tropdeg.core.complex import (
    ConicalComplex,
    Subdivision,
    cone_key,
    parse_cone_key,
    refinement_ladder,
)
from tropdeg.core.exceptions import (
    ComplexValidationError,
    DimensionMismatchError,
    InputFileError,
    LinearAlgebraError,
)
from tropdeg.core.fixtures import get_fixture
from tropdeg.core.functions import DivisorView, PLFunction, from_divisor
from tropdeg.core.linalg import InnerProduct, RatMatrix, as_rational
from tropdeg.core.logging_config import get_logger
from tropdeg.core.mameasure import (
    BDivisorSequence,
    DiscreteMeasure,
    negative_norm_tower,
    pullback_tower,
)
from tropdeg.core.models import (
    ComplexSchema,
    FunctionSchema,
    TowerSchema,
    WeightSchema,
)
from tropdeg.core.weights import Flavor, Scalar, Weight

log = get_logger("io")

FIXTURE_PREFIX = "fixture:"

SchemaT = TypeVar("SchemaT", bound=BaseModel)


def read_document(path: Path | str) -> Any:
    """Parse a JSON or YAML file.

    Raises:
        InputFileError: If the file is missing, empty or malformed.
    """
    p = Path(path)
    if not p.exists():
        raise InputFileError("file not found", str(p))
    try:
        text = p.read_text(encoding="utf-8")
        if p.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError, UnicodeDecodeError) as e:
        raise InputFileError(f"cannot parse file: {e}", str(p)) from e
    if data is None or data == {}:
        raise InputFileError("file is empty", str(p))
    return data


def validate_document(schema: type[SchemaT], raw: Any, path: Path | str | None = None) -> SchemaT:
    """Validate raw data against a schema, flattening pydantic errors."""
    if not isinstance(raw, Mapping):
        raise InputFileError("expected a mapping at the top level", str(path) if path else None)
    try:
        return schema.model_validate(raw)
    except ValidationError as e:
        messages = []
        for error in e.errors():
            field = " -> ".join(str(loc) for loc in error["loc"])
            messages.append(f"{field}: {error['msg']}")
        kind = schema.__name__.removesuffix("Schema").lower()
        raise InputFileError(
            f"invalid {kind}:\n  " + "\n  ".join(messages),
            str(path) if path else None,
        ) from e


def _scalar(value: int | str | float) -> Scalar:
    if isinstance(value, float):
        return value
    return as_rational(value)


# ---------------------------------------------------------------------------
# Complexes
# ---------------------------------------------------------------------------


def complex_from_schema(schema: ComplexSchema) -> ConicalComplex:
    inner_product = None
    if schema.inner_product is not None:
        inner_product = InnerProduct(RatMatrix.from_rows(schema.inner_product))
    return ConicalComplex.build(
        schema.ambient_dim,
        {rid: tuple(img) for rid, img in schema.rays.items()},
        schema.cones,
        inner_product,
        schema.name,
    )


def load_complex(source: Path | str) -> ConicalComplex:
    """Load a complex from a file, or a fixture given as ``fixture:<name>``."""
    text = str(source)
    if text.startswith(FIXTURE_PREFIX):
        return get_fixture(text[len(FIXTURE_PREFIX) :])
    schema = validate_document(ComplexSchema, read_document(source), source)
    try:
        complex_ = complex_from_schema(schema)
    except (LinearAlgebraError, DimensionMismatchError) as e:
        raise ComplexValidationError(str(e), code="inner-product") from e
    log.info(
        "loaded complex %r: %d rays, %d maximal cones",
        complex_.name,
        len(complex_.rays),
        len(complex_.maximal_cones),
    )
    return complex_


def complex_to_dict(c: ConicalComplex) -> dict[str, Any]:
    data: dict[str, Any] = {
        "name": c.name,
        "ambient_dim": c.ambient_dim,
        "rays": {r.id: list(r.image) for r in c.rays},
        "cones": [list(cone) for cone in c.maximal_cones],
    }
    if not c.inner_product.is_standard:
        gram = c.inner_product.gram.rows
        data["inner_product"] = [[format_scalar(x) for x in row] for row in gram]
    return data


# ---------------------------------------------------------------------------
# Weights and functions
# ---------------------------------------------------------------------------


def weight_from_schema(schema: WeightSchema, complex_: ConicalComplex) -> Weight:
    values = {parse_cone_key(k): _scalar(v) for k, v in schema.values.items()}
    return Weight(complex_, schema.dim, values, Flavor(schema.flavor))


def load_weight(path: Path | str, complex_: ConicalComplex) -> Weight:
    return weight_from_schema(validate_document(WeightSchema, read_document(path), path), complex_)


def weight_to_dict(w: Weight) -> dict[str, Any]:
    return {
        "dim": w.dim,
        "flavor": w.flavor.value,
        "values": {cone_key(c) or "apex": format_scalar(v) for c, v in w.items() if v != 0},
    }


def function_from_schema(schema: FunctionSchema, complex_: ConicalComplex) -> PLFunction:
    if schema.divisor is not None:
        return from_divisor(divisor_from_mapping(schema.divisor, complex_))
    assert schema.ray_values is not None
    return PLFunction(complex_, {r: _scalar(v) for r, v in schema.ray_values.items()})


def load_function(path: Path | str, complex_: ConicalComplex) -> PLFunction:
    schema = validate_document(FunctionSchema, read_document(path), path)
    return function_from_schema(schema, complex_)


def divisor_from_mapping(data: Mapping[str, Any], complex_: ConicalComplex) -> DivisorView:
    return DivisorView(complex_, {r: as_rational(v) for r, v in data.items()})


def load_divisor(path: Path | str, complex_: ConicalComplex) -> DivisorView:
    """Load a divisor file (``{"divisor": {...}}``)."""
    schema = validate_document(FunctionSchema, read_document(path), path)
    if schema.divisor is None:
        raise InputFileError("expected a 'divisor' section", str(path))
    return divisor_from_mapping(schema.divisor, complex_)


def function_to_dict(phi: PLFunction) -> dict[str, Any]:
    return {"ray_values": {r: format_scalar(v) for r, v in phi.ray_values.items()}}


def subdivision_to_dict(s: Subdivision) -> dict[str, Any]:
    return {
        "fine": complex_to_dict(s.fine),
        "ray_map": {
            r: {
                "cone": cone_key(p.cone),
                "coefficients": {k: format_scalar(v) for k, v in p.as_mapping().items()},
            }
            for r, p in s.ray_map.items()
        },
    }


def measure_to_dict(mu: DiscreteMeasure) -> dict[str, Any]:
    return {
        "atoms": [
            {"ray": atom.ray, "direction": list(atom.unit_image), "mass": mass}
            for atom, mass in mu.atoms
        ],
        "total_variation": mu.total_variation,
    }


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------


def towers_from_schema(schema: TowerSchema) -> list[BDivisorSequence]:
    """Build the ladder and one tower per function slot."""
    if schema.ladder.fixture is not None:
        base = get_fixture(schema.ladder.fixture)
    else:
        assert schema.ladder.complex is not None
        base = complex_from_schema(schema.ladder.complex)
    ladder = refinement_ladder(base, schema.steps)
    towers = []
    for slot in schema.functions:
        if slot.kind == "negative-norm":
            tower = negative_norm_tower(ladder)
        else:
            if slot.kind == "divisor":
                assert slot.divisor is not None
                phi = from_divisor(divisor_from_mapping(slot.divisor, base))
            else:
                assert slot.ray_values is not None
                phi = PLFunction(base, {r: as_rational(v) for r, v in slot.ray_values.items()})
            tower = pullback_tower(phi, ladder)
        towers.append(
            BDivisorSequence(tower.levels, schema.claimed_nef or tower.claimed_nef, tower.name)
        )
    return towers


def load_towers(path: Path | str) -> list[BDivisorSequence]:
    return towers_from_schema(validate_document(TowerSchema, read_document(path), path))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def format_scalar(value: Fraction | float | int) -> str | float:
    """Exact values as ``"p/q"`` strings, floats unchanged."""
    if isinstance(value, float):
        return value
    return str(Fraction(value))


def dumps(data: Any) -> str:
    """Deterministic JSON."""
    return json.dumps(data, sort_keys=True, indent=2)
