"""Commands on complexes and weights: validate, balance, subdivide."""

import sys
from pathlib import Path

import click

from tropdeg.cli.common import (
    EXIT_VALIDATION,
    emit,
    fail,
    load_valid_complex,
    settings,
)
from tropdeg.core.exceptions import TropDegError
from tropdeg.core.io import dumps, load_complex, load_weight
from tropdeg.core.logging_config import get_logger
from tropdeg.core.service import check_balance, subdivide, validate_complex, validation_to_dict

log = get_logger("cli.geometry")


@click.command(name="validate")
@click.argument("complex_source")
@click.pass_context
def validate_cmd(ctx: click.Context, complex_source: str) -> None:
    """Check a complex's invariants (COMPLEX_SOURCE: file or fixture:<name>)."""
    try:
        report = validate_complex(load_complex(complex_source))
    except TropDegError as e:
        fail(e)
    lines = []
    for issue in report.issues:
        color = "red" if issue.level == "error" else "yellow"
        text = f"{issue.level.title()} [{issue.code}]: {issue.message}"
        lines.append(click.style(text, fg=color))
    if report.is_valid:
        lines.append(click.style("Complex is valid.", fg="green"))
    emit(ctx, validation_to_dict(report), lines)
    if report.has_errors:
        sys.exit(EXIT_VALIDATION)


@click.command(name="balance")
@click.argument("complex_source")
@click.argument("weight_file", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def balance_cmd(ctx: click.Context, complex_source: str, weight_file: Path) -> None:
    """Check the balancing condition of a weight, in both flavors."""
    try:
        complex_ = load_valid_complex(complex_source)
        result = check_balance(load_weight(weight_file, complex_), settings(ctx))
    except TropDegError as e:
        fail(e)

    def yes_no(flag: bool | None) -> str:
        return "n/a" if flag is None else ("yes" if flag else "no")

    if result.balanced:
        headline = click.style("balanced", fg="green")
    else:
        headline = click.style(f"not balanced at {result.face}", fg="red")
    lines = [
        headline,
        f"lattice: {yes_no(result.lattice)}",
        f"euclidean: {yes_no(result.euclidean)}",
    ]
    emit(ctx, result.to_dict(), lines)
    if not result.balanced:
        sys.exit(EXIT_VALIDATION)


@click.command(name="subdivide")
@click.argument("complex_source")
@click.option(
    "--at",
    "at",
    required=True,
    help="Cone and coefficients of the new ray, e.g. 'e1|e2:1,1'.",
)
@click.option(
    "--output",
    "-o",
    type=click.Path(path_type=Path),
    help="Write the result to a file instead of stdout.",
)
def subdivide_cmd(complex_source: str, at: str, output: Path | None) -> None:
    """Stellar subdivision; emits the fine complex and the ray map as JSON."""
    try:
        result = subdivide(load_valid_complex(complex_source), at)
    except TropDegError as e:
        fail(e)
    text = dumps(result.to_dict())
    if output is not None:
        output.write_text(text + "\n", encoding="utf-8")
        log.info("wrote subdivision to %s", output)
    else:
        click.echo(text)
    if result.check.has_errors:
        sys.exit(EXIT_VALIDATION)
