"""Tests for configuration files and numerical settings."""

import ast
import inspect

import pytest
import yaml

from tropdeg.core import config_file
from tropdeg.core.config_file import (
    ConfigFile,
    Settings,
    generate_config_template,
    load_config,
    resolve_settings,
)


@pytest.fixture(autouse=True)
def no_user_config(tmp_path, monkeypatch):
    """Point the user config at a file that does not exist."""
    monkeypatch.setattr(config_file, "USER_CONFIG_PATH", tmp_path / "home" / ".tropdeg.yaml")
    monkeypatch.delenv("TROPDEG_SEED", raising=False)


def write_project_config(directory, text):
    path = directory / ".tropdeg.yaml"
    path.write_text(text)
    return path


class TestConfigFile:
    """Tests for ConfigFile."""

    def test_no_files(self, tmp_path):
        """Test that nothing is loaded from an empty directory."""
        config = load_config(tmp_path)
        assert config.config == {}
        assert config.loaded_from == []

    def test_project_file(self, tmp_path):
        """Test loading the project file and dotted lookups."""
        path = write_project_config(tmp_path, "numerics:\n  max_steps: 4\n")
        config = load_config(tmp_path)
        assert config.loaded_from == [path]
        assert config.get("numerics.max_steps") == 4
        assert config.get("numerics.missing", "x") == "x"

    def test_project_overrides_user(self, tmp_path, monkeypatch):
        """Test that the project file wins over the user file."""
        user = tmp_path / "user.yaml"
        user.write_text("numerics:\n  max_steps: 4\n  converge_tol: 0.1\n")
        monkeypatch.setattr(config_file, "USER_CONFIG_PATH", user)
        write_project_config(tmp_path, "numerics:\n  max_steps: 8\n")
        config = load_config(tmp_path)
        assert config.get("numerics.max_steps") == 8
        assert config.get("numerics.converge_tol") == 0.1

    def test_invalid_yaml_is_skipped(self, tmp_path, caplog):
        """Test that a broken file only logs a warning."""
        write_project_config(tmp_path, "numerics: [unclosed\n")
        caplog.set_level("WARNING", logger="tropdeg")
        config = load_config(tmp_path)
        assert config.config == {}
        assert "Error parsing config file" in caplog.text

    def test_non_mapping_is_skipped(self, tmp_path, caplog):
        """Test that a YAML list is ignored."""
        write_project_config(tmp_path, "- a\n- b\n")
        caplog.set_level("WARNING", logger="tropdeg")
        assert load_config(tmp_path).config == {}
        assert "not a dictionary" in caplog.text

    def test_profiles(self, tmp_path):
        """Test that profiles merge over the base configuration."""
        write_project_config(
            tmp_path,
            "numerics:\n  max_steps: 4\n  converge_tol: 0.01\n"
            "profiles:\n  deep:\n    numerics:\n      max_steps: 10\n    verbose: 2\n",
        )
        config = load_config(tmp_path)
        profile = config.get_profile("deep")
        assert profile["numerics"] == {"max_steps": 10, "converge_tol": 0.01}
        assert profile["verbose"] == 2
        assert "profiles" not in config.get_profile("unknown")


class TestSettings:
    """Tests for Settings."""

    def test_defaults(self):
        """Test the built-in defaults."""
        s = Settings()
        assert s.euclidean_tol == 1e-9
        assert s.max_steps == 12
        assert s.seed is None

    def test_from_mapping(self):
        """Test the numerics section with type coercion."""
        s = Settings.from_mapping({"numerics": {"converge_tol": "1e-4", "max_steps": "5", "seed": 3}, "other": 1})
        assert s.converge_tol == 1e-4
        assert s.max_steps == 5
        assert s.seed == 3

    def test_seed_from_environment(self, monkeypatch):
        """Test TROPDEG_SEED."""
        monkeypatch.setenv("TROPDEG_SEED", "42")
        assert Settings().with_env().seed == 42

    def test_bad_seed_is_ignored(self, monkeypatch, caplog):
        """Test a non-integer TROPDEG_SEED."""
        monkeypatch.setenv("TROPDEG_SEED", "abc")
        caplog.set_level("WARNING", logger="tropdeg")
        assert Settings().with_env().seed is None
        assert "Ignoring non-integer" in caplog.text

    def test_resolve_with_profile(self, tmp_path):
        """Test settings resolved through a profile."""
        write_project_config(tmp_path, generate_config_template())
        config = ConfigFile().load(tmp_path)
        assert resolve_settings(config, "fine").max_steps == 16
        assert resolve_settings(config, "ci").seed == 0
        assert resolve_settings(config).converge_tol == 1e-6


def test_template_is_valid_yaml():
    """Test that the generated template parses and names both profiles."""
    data = yaml.safe_load(generate_config_template())
    assert set(data["profiles"]) == {"fine", "ci"}
    assert Settings.from_mapping(data).max_box_points == 10_000_000


def test_top_level_definitions_are_spaced():
    """Test that top-level functions and classes follow two blank lines."""
    source = inspect.getsource(config_file)
    lines = source.splitlines()
    for node in ast.parse(source).body:
        if isinstance(node, (ast.FunctionDef, ast.ClassDef)):
            first = min([node.lineno] + [d.lineno for d in node.decorator_list])
            assert lines[first - 3 : first - 1] == ["", ""], node.name
