"""Helpers shared by the CLI commands: loading, output and exit codes."""

from __future__ import annotations

import sys
from collections.abc import Sequence
from typing import Any, NoReturn

import click

from tropdeg.core.complex import ConicalComplex, ensure_valid
from tropdeg.core.config_file import Settings
from tropdeg.core.exceptions import (
    ComplexValidationError,
    InputFileError,
    NotBalancedError,
    NumericalToleranceError,
    OracleError,
    SubdivisionError,
    TropDegError,
)
from tropdeg.core.io import dumps, load_complex
from tropdeg.core.logging_config import get_logger

log = get_logger("cli")

EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3

VALIDATION_ERRORS = (
    ComplexValidationError,
    InputFileError,
    NotBalancedError,
    SubdivisionError,
    OracleError,
)


def exit_code_for(error: TropDegError) -> int:
    if isinstance(error, NumericalToleranceError):
        return EXIT_TOLERANCE
    if isinstance(error, VALIDATION_ERRORS):
        return EXIT_VALIDATION
    return EXIT_ERROR


def fail(error: TropDegError) -> NoReturn:
    """Print the error and exit with its code."""
    click.echo(click.style(f"Error: {error}", fg="red"), err=True)
    sys.exit(exit_code_for(error))


def settings(ctx: click.Context) -> Settings:
    obj = ctx.find_root().obj or {}
    return obj.get("settings") or Settings()


def wants_json(ctx: click.Context) -> bool:
    obj = ctx.find_root().obj or {}
    return bool(obj.get("json", False))


def load_valid_complex(source: str) -> ConicalComplex:
    """Load a complex and refuse to continue if it breaks an invariant."""
    complex_ = load_complex(source)
    ensure_valid(complex_)
    return complex_


def emit(ctx: click.Context, data: dict[str, Any], lines: Sequence[str]) -> None:
    """JSON on ``--json``, plain text otherwise."""
    if wants_json(ctx):
        click.echo(dumps(data))
    else:
        for line in lines:
            click.echo(line)


def table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> list[str]:
    """Aligned columns."""
    cells = [[str(h) for h in headers]] + [[str(x) for x in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return ["  ".join(c.rjust(w) for c, w in zip(row, widths, strict=True)) for row in cells]


def fmt(value: object, digits: int = 12) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)
