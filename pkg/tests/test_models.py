"""Tests for the pydantic input schemas."""

import pytest
from pydantic import ValidationError

from tropdeg.core.models import (
    ComplexSchema,
    FunctionSchema,
    LadderSchema,
    TowerFunctionSchema,
    TowerSchema,
    WeightSchema,
)


class TestComplexSchema:
    """Tests for ComplexSchema."""

    def test_alias_and_field_name(self):
        """Test that both spellings of the ambient dimension work."""
        a = ComplexSchema.model_validate({"ambient-dim": 1, "rays": {"a": [1]}, "cones": [["a"]]})
        b = ComplexSchema.model_validate({"ambient_dim": 1, "rays": {"a": [1]}, "cones": [["a"]]})
        assert a.ambient_dim == b.ambient_dim == 1

    def test_rays_as_list(self):
        """Test the list-of-objects spelling of the rays."""
        s = ComplexSchema.model_validate(
            {
                "ambient_dim": 2,
                "rays": [{"id": "a", "image": [1, 0]}, {"id": "b", "image": [0, 1]}],
                "cones": [["a", "b"]],
            }
        )
        assert s.rays == {"a": [1, 0], "b": [0, 1]}

    def test_duplicate_ray_in_list(self):
        """Test that a repeated id in the list form is rejected."""
        with pytest.raises(ValidationError, match="duplicate ray id"):
            ComplexSchema.model_validate(
                {
                    "ambient_dim": 1,
                    "rays": [{"id": "a", "image": [1]}, {"id": "a", "image": [2]}],
                    "cones": [["a"]],
                }
            )

    def test_separator_in_ray_id(self):
        """Test that ray ids cannot contain the cone separator."""
        with pytest.raises(ValidationError, match="invalid ray id"):
            ComplexSchema.model_validate({"ambient-dim": 1, "rays": {"a|b": [1]}, "cones": [["a|b"]]})

    def test_extra_keys_forbidden(self):
        """Test that unknown keys are rejected."""
        with pytest.raises(ValidationError):
            ComplexSchema.model_validate(
                {"ambient-dim": 1, "rays": {"a": [1]}, "cones": [["a"]], "colour": "red"}
            )

    def test_inner_product_entries(self):
        """Test rational strings in the Gram matrix."""
        s = ComplexSchema.model_validate(
            {
                "ambient-dim": 1,
                "rays": {"a": [1]},
                "cones": [["a"]],
                "inner-product": [["1/2"]],
            }
        )
        assert s.inner_product == [["1/2"]]
        with pytest.raises(ValidationError):
            ComplexSchema.model_validate(
                {"ambient-dim": 1, "rays": {"a": [1]}, "cones": [["a"]], "inner-product": [["x"]]}
            )


class TestWeightSchema:
    """Tests for WeightSchema."""

    def test_defaults(self):
        """Test the lattice default."""
        s = WeightSchema.model_validate({"dim": 1, "values": {"a": "3/2"}})
        assert s.flavor == "lattice"

    def test_lattice_floats_rejected(self):
        """Test that lattice weights must be exact."""
        with pytest.raises(ValidationError, match="exact"):
            WeightSchema.model_validate({"dim": 1, "values": {"a": 0.5}})

    def test_euclidean_floats_accepted(self):
        """Test float values in Euclidean weights."""
        s = WeightSchema.model_validate({"dim": 1, "flavor": "euclidean", "values": {"a": 0.5}})
        assert s.values["a"] == 0.5

    def test_booleans_rejected(self):
        """Test that true/false are not numbers."""
        with pytest.raises(ValidationError):
            WeightSchema.model_validate({"dim": 1, "values": {"a": True}})


class TestFunctionSchema:
    """Tests for FunctionSchema."""

    def test_exactly_one_form(self):
        """Test that one of ray values and divisor is required."""
        with pytest.raises(ValidationError, match="exactly one"):
            FunctionSchema.model_validate({})
        with pytest.raises(ValidationError, match="exactly one"):
            FunctionSchema.model_validate({"ray-values": {"a": 1}, "divisor": {"a": 1}})

    def test_divisor_needs_rationals(self):
        """Test that divisors reject floats."""
        with pytest.raises(ValidationError):
            FunctionSchema.model_validate({"divisor": {"a": 0.5}})


class TestTowerSchema:
    """Tests for tower files."""

    def test_ladder_base(self):
        """Test that a ladder needs exactly one base."""
        assert LadderSchema.model_validate({"fixture": "p2"}).fixture == "p2"
        with pytest.raises(ValidationError):
            LadderSchema.model_validate({})

    def test_payload_matches_kind(self):
        """Test the payload of each slot kind."""
        TowerFunctionSchema.model_validate({"kind": "negative-norm"})
        with pytest.raises(ValidationError, match="needs 'divisor'"):
            TowerFunctionSchema.model_validate({"kind": "divisor"})
        with pytest.raises(ValidationError, match="needs 'ray_values'"):
            TowerFunctionSchema.model_validate({"kind": "pl"})

    def test_step_limit(self):
        """Test the bound on bisection rounds."""
        base = {"ladder": {"fixture": "p2"}, "functions": [{"kind": "negative-norm"}]}
        assert TowerSchema.model_validate({**base, "steps": 16}).steps == 16
        with pytest.raises(ValidationError):
            TowerSchema.model_validate({**base, "steps": 17})
