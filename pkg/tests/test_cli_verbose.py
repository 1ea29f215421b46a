"""Tests for verbose mode functionality.

This module contains tests for the -v/--verbose and -q/--quiet flags
and the logging configuration.
"""

import logging
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from tropdeg.cli import cli
from tropdeg.core.logging_config import ClickHandler, get_logger, setup_logging


@pytest.fixture
def runner():
    """Provide a Click CLI test runner."""
    return CliRunner()


class TestVerboseFlag:
    """Tests for the -v/--verbose flag."""

    def test_verbose_flag_in_help(self, runner):
        """Test that verbose flag appears in help."""
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        assert "-v" in result.output
        assert "--verbose" in result.output
        assert "verbosity" in result.output.lower()

    def test_quiet_flag_in_help(self, runner):
        """Test that quiet flag appears in help."""
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        assert "-q" in result.output
        assert "--quiet" in result.output

    def test_double_verbose_flag_accepted(self, runner):
        """Test that -vv flag is accepted."""
        result = runner.invoke(cli, ["-vv", "--help"])
        assert result.exit_code == 0


class TestLoggingConfiguration:
    """Tests for the logging configuration module."""

    def test_get_logger_names(self):
        """Test child and package logger names."""
        assert get_logger("test").name == "tropdeg.test"
        assert get_logger().name == "tropdeg"

    @pytest.mark.parametrize(
        "verbosity,quiet,level",
        [
            (0, False, logging.WARNING),
            (1, False, logging.INFO),
            (2, False, logging.DEBUG),
            (3, True, logging.ERROR),
        ],
    )
    def test_setup_logging_levels(self, verbosity, quiet, level):
        """Test the level chosen for each flag combination."""
        setup_logging(verbosity=verbosity, quiet=quiet)
        assert get_logger().level == level

    def test_single_click_handler(self):
        """Test that repeated setup does not stack handlers."""
        setup_logging(verbosity=1)
        setup_logging(verbosity=1)
        handlers = get_logger().handlers
        assert len(handlers) == 1
        assert isinstance(handlers[0], ClickHandler)

    def test_python_warnings_are_captured(self):
        """Test that numpy/scipy warnings share the package handler and level."""
        setup_logging(quiet=True)
        captured = logging.getLogger("py.warnings")
        assert isinstance(captured.handlers[0], ClickHandler)
        assert captured.level == logging.ERROR
        assert captured.propagate is False

    def test_warnings_go_to_stderr(self):
        """Test the stream chosen by the handler."""
        handler = ClickHandler()
        handler.setFormatter(logging.Formatter("%(message)s"))
        with patch("tropdeg.core.logging_config.click.echo") as echo:
            handler.emit(logging.LogRecord("tropdeg", logging.INFO, "", 0, "info", None, None))
            handler.emit(logging.LogRecord("tropdeg", logging.WARNING, "", 0, "warn", None, None))
        assert echo.call_args_list[0].kwargs["err"] is False
        assert echo.call_args_list[1].kwargs["err"] is True


class TestVerboseCommands:
    """Tests for verbose output of the commands."""

    def test_verbose_shows_info(self, runner, fixtures_dir):
        """Test that -v shows info messages while loading."""
        result = runner.invoke(cli, ["-v", "validate", str(fixtures_dir / "p2.json")])
        assert result.exit_code == 0
        assert "loaded complex 'p2'" in result.output

    def test_default_hides_info(self, runner, fixtures_dir):
        """Test that info messages are hidden without -v."""
        result = runner.invoke(cli, ["validate", str(fixtures_dir / "p2.json")])
        assert result.exit_code == 0
        assert "loaded complex" not in result.output
        assert "Complex is valid." in result.output

    def test_warning_shown_by_default(self, runner, fixtures_dir):
        """Test that an exhausted ladder warns."""
        tower = str(fixtures_dir / "disk_tower.yaml")
        result = runner.invoke(cli, ["converge", "--max-steps", "1", tower])
        assert result.exit_code == 0
        assert "ladder exhausted" in result.output

    def test_quiet_hides_warnings(self, runner, fixtures_dir):
        """Test that -q suppresses warnings but keeps results."""
        tower = str(fixtures_dir / "disk_tower.yaml")
        result = runner.invoke(cli, ["-q", "converge", "--max-steps", "1", tower])
        assert result.exit_code == 0
        assert "ladder exhausted" not in result.output
        assert "not converged" in result.output
