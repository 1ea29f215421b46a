"""Tests for reading input files and writing JSON."""

import json
from fractions import Fraction

import pytest

from tropdeg.core.exceptions import ComplexValidationError, InputFileError
from tropdeg.core.io import (
    complex_to_dict,
    dumps,
    format_scalar,
    load_complex,
    load_divisor,
    load_function,
    load_towers,
    load_weight,
    read_document,
    weight_to_dict,
)
from tropdeg.core.weights import Flavor, Weight


def test_load_complex_json(fixtures_dir):
    """Test loading the P2 fan from JSON."""
    c = load_complex(fixtures_dir / "p2.json")
    assert c.ambient_dim == 2
    assert len(c.maximal_cones) == 3


def test_load_complex_yaml_with_hyphenated_keys(fixtures_dir):
    """Test the YAML spelling of the complex schema."""
    c = load_complex(fixtures_dir / "elliptic.yaml")
    assert c.name == "elliptic"
    assert c.image("O") == (2,)


def test_load_fixture_prefix():
    """Test built-in complexes by name."""
    assert load_complex("fixture:p1xp1").name == "p1xp1"
    with pytest.raises(ComplexValidationError, match="unknown fixture"):
        load_complex("fixture:nowhere")


def test_missing_file(tmp_path):
    """Test a path that does not exist."""
    with pytest.raises(InputFileError) as exc_info:
        read_document(tmp_path / "missing.json")
    assert "not found" in str(exc_info.value)
    assert exc_info.value.path.endswith("missing.json")


def test_empty_file(tmp_path):
    """Test that an empty YAML file is rejected."""
    path = tmp_path / "empty.yaml"
    path.write_text("")
    with pytest.raises(InputFileError, match="empty"):
        read_document(path)


def test_malformed_json(tmp_path):
    """Test a syntax error in JSON."""
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InputFileError, match="cannot parse"):
        read_document(path)


def test_schema_errors_are_flattened(tmp_path):
    """Test that pydantic errors are reported field by field."""
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"ambient-dim": 0, "rays": {"a": [1]}, "cones": [["a"]]}))
    with pytest.raises(InputFileError) as exc_info:
        load_complex(path)
    assert "invalid complex" in str(exc_info.value)
    assert "ambient-dim" in str(exc_info.value)


def test_bad_inner_product(tmp_path):
    """Test that an indefinite Gram matrix becomes a validation error."""
    path = tmp_path / "c.yaml"
    path.write_text(
        "ambient-dim: 2\n"
        "rays: {a: [1, 0], b: [0, 1]}\n"
        "cones: [[a, b]]\n"
        "inner-product: [[1, 2], [2, 1]]\n"
    )
    with pytest.raises(ComplexValidationError) as exc_info:
        load_complex(path)
    assert exc_info.value.code == "inner-product"


def test_load_weight(fixtures_dir):
    """Test loading a lattice weight keyed by cones."""
    c = load_complex(fixtures_dir / "p2.json")
    w = load_weight(fixtures_dir / "p2_fundamental.json", c)
    assert w.dim == 2
    assert w.flavor is Flavor.LATTICE
    assert w.value(("e1", "e3")) == 1


def test_load_function_both_forms(fixtures_dir, p2):
    """Test ray values and divisors describing the same function."""
    a = load_function(fixtures_dir / "h.json", p2)
    b = load_function(fixtures_dir / "h_values.json", p2)
    assert a.equals(b)


def test_load_divisor_needs_divisor_section(fixtures_dir, p2):
    """Test that a ray-value file is not a divisor."""
    assert load_divisor(fixtures_dir / "2h.json", p2).coefficient("e3") == 2
    with pytest.raises(InputFileError, match="divisor"):
        load_divisor(fixtures_dir / "h_values.json", p2)


def test_load_towers(fixtures_dir):
    """Test tower files from a fixture ladder."""
    towers = load_towers(fixtures_dir / "disk_tower.yaml")
    assert len(towers) == 2
    assert len(towers[0]) == 6
    assert towers[0].claimed_nef
    pullback = load_towers(fixtures_dir / "hyperplane_tower.json")
    assert pullback[0].function(3).complex is pullback[1].complex(3)


def test_complex_round_trip(fixtures_dir, tmp_path):
    """Test that written complexes load back."""
    c = load_complex(fixtures_dir / "elliptic.yaml")
    path = tmp_path / "out.json"
    path.write_text(dumps(complex_to_dict(c)))
    again = load_complex(path)
    assert again.ray_ids == c.ray_ids
    assert again.maximal_cones == c.maximal_cones


def test_output_formatting(p2):
    """Test exact strings, float passthrough and zero suppression."""
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(2) == "2"
    assert format_scalar(0.5) == 0.5
    w = Weight(p2, 1, {("e1",): 1, ("e2",): 0})
    assert weight_to_dict(w) == {"dim": 1, "flavor": "lattice", "values": {"e1": "1"}}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')
