"""Configuration file support for tropdeg.

Settings are resolved from, in increasing priority:
1. Built-in defaults
2. User config file (~/.tropdeg.yaml)
3. Project config file (.tropdeg.yaml in the current directory)
4. The selected profile
5. Environment (``TROPDEG_SEED``) and command-line options
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import yaml

from tropdeg.core.logging_config import get_logger

log = get_logger("config_file")

PROJECT_CONFIG_NAME = ".tropdeg.yaml"
USER_CONFIG_PATH = Path.home() / ".tropdeg.yaml"
SEED_ENV_VAR = "TROPDEG_SEED"


def _deep_merge(base: dict[str, Any], new: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in new.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


class ConfigFile:
    """Merged view of the user and project ``.tropdeg.yaml`` files.

    Later files override earlier ones one level deep, so a project file can
    change a single ``numerics`` key without restating the section.
    """

    def __init__(self) -> None:
        self.config: dict[str, Any] = {}
        self.loaded_from: list[Path] = []

    def candidates(self, project_dir: Path | None = None) -> list[Path]:
        """Config paths in increasing priority."""
        return [USER_CONFIG_PATH, (project_dir or Path.cwd()) / PROJECT_CONFIG_NAME]

    def load(self, project_dir: Path | None = None) -> ConfigFile:
        """Read every existing candidate file and return self."""
        for path in self.candidates(project_dir):
            if not path.exists():
                continue
            data = self._read(path)
            if data is None:
                continue
            self.config = _deep_merge(self.config, data)
            self.loaded_from.append(path)
            log.info("Loaded config from: %s", path)
        return self

    @staticmethod
    def _read(path: Path) -> dict[str, Any] | None:
        # A broken config file never stops a computation; it is skipped.
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as e:
            log.warning("Error parsing config file %s: %s", path, e)
            return None
        except OSError as e:
            log.warning("Error reading config file %s: %s", path, e)
            return None
        if not isinstance(data, dict):
            log.warning("Config file %s is not a dictionary, skipping", path)
            return None
        return data

    def get(self, key: str, default: Any = None) -> Any:
        """Look up a dotted key such as ``numerics.max_steps``."""
        value: Any = self.config
        for part in key.split("."):
            if not isinstance(value, dict) or part not in value:
                return default
            value = value[part]
        return value

    def get_profile(self, profile_name: str) -> dict[str, Any]:
        """Return the base configuration with ``profiles.<name>`` merged on top.

        An unknown or malformed profile yields the base configuration alone.
        """
        base = {k: v for k, v in self.config.items() if k != "profiles"}
        overlay = (self.config.get("profiles") or {}).get(profile_name)
        if overlay is None:
            log.debug("Profile '%s' not found, using base config", profile_name)
            return base
        if not isinstance(overlay, dict):
            log.warning("Profile '%s' is not a dictionary", profile_name)
            return base
        log.info("Loaded profile: %s", profile_name)
        return _deep_merge(base, overlay)


@dataclass(frozen=True)
class Settings:
    """Numerical settings shared by every command.

    Attributes:
        euclidean_tol: Absolute tolerance (scaled by the largest summand) for
            Euclidean balancing and float identities.
        converge_tol: Cauchy window tolerance for degree-by-convergence.
        max_steps: Number of refinement steps a ladder may take.
        max_box_points: Cap on the bounding box size for lattice counting.
        seed: Seed for randomized checks, ``None`` for nondeterministic.
    """

    euclidean_tol: float = 1e-9
    converge_tol: float = 1e-6
    max_steps: int = 12
    max_box_points: int = 10_000_000
    seed: int | None = None

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> Settings:
        """Build settings from a merged config mapping.

        Numerical keys are read from the ``numerics`` section; unknown keys are
        ignored so that config files can carry comments and extra sections.
        """
        numerics = data.get("numerics", {}) or {}
        settings = cls()
        overrides: dict[str, Any] = {}
        for name in ("euclidean_tol", "converge_tol"):
            if name in numerics:
                overrides[name] = float(numerics[name])
        for name in ("max_steps", "max_box_points"):
            if name in numerics:
                overrides[name] = int(numerics[name])
        if numerics.get("seed") is not None:
            overrides["seed"] = int(numerics["seed"])
        return replace(settings, **overrides)

    def with_env(self) -> Settings:
        """Return settings with ``TROPDEG_SEED`` applied, if set."""
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None or not raw.strip():
            return self
        try:
            return replace(self, seed=int(raw))
        except ValueError:
            log.warning("Ignoring non-integer %s=%r", SEED_ENV_VAR, raw)
            return self


def load_config(project_dir: Path | None = None) -> ConfigFile:
    """Convenience function to load configuration.

    Args:
        project_dir: Project directory to search for config

    Returns:
        Loaded ConfigFile instance
    """
    return ConfigFile().load(project_dir)


def resolve_settings(config: ConfigFile, profile: str | None = None) -> Settings:
    """Resolve :class:`Settings` from a loaded config and optional profile."""
    data = config.get_profile(profile) if profile else config.config
    return Settings.from_mapping(data).with_env()


def generate_config_template() -> str:
    """Generate a YAML config file template.

    Returns:
        YAML string with commented template
    """
    return """# tropdeg configuration file
# Place this file as .tropdeg.yaml in your project root or home directory

# Numerical defaults applied to all commands
numerics:
  euclidean_tol: 1.0e-9
  converge_tol: 1.0e-6
  max_steps: 12
  max_box_points: 10000000
  # seed: 20261016

# Profile-based configuration
# Use with: tropdeg --profile fine converge tower.json
profiles:
  fine:
    # Longer ladders and tighter Cauchy window
    numerics:
      converge_tol: 1.0e-8
      max_steps: 16
    verbose: 1

  ci:
    # Quiet, reproducible runs
    quiet: true
    numerics:
      seed: 0
"""
