"""Command-line interface for tropdeg.

This module defines the top-level ``tropdeg`` group and wires in the
geometry, analysis and oracle commands.
"""

from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import click

from tropdeg.cli.analysis import degree_cmd, intersect_cmd, measure_cmd, size_cmd
from tropdeg.cli.geometry import balance_cmd, subdivide_cmd, validate_cmd
from tropdeg.cli.oracle import converge_cmd, toric_cmd
from tropdeg.core.config_file import (
    PROJECT_CONFIG_NAME,
    generate_config_template,
    load_config,
    resolve_settings,
)
from tropdeg.core.logging_config import get_logger, setup_logging

log = get_logger("cli")


def _version() -> str:
    try:
        return version("tropdeg")
    except PackageNotFoundError:
        return "0.0.0"


@click.group()
@click.version_option(version=_version(), prog_name="tropdeg")
@click.option(
    "-v",
    "--verbose",
    count=True,
    help="Increase verbosity. Use -v for INFO, -vv for DEBUG.",
)
@click.option(
    "-q",
    "--quiet",
    is_flag=True,
    help="Suppress all output except errors.",
)
@click.option(
    "--profile",
    "-p",
    help="Configuration profile to use (e.g., fine, ci).",
)
@click.option(
    "--json",
    "as_json",
    is_flag=True,
    help="Print machine-readable JSON.",
)
@click.pass_context
def cli(
    ctx: click.Context, verbose: int, quiet: bool, profile: str | None, as_json: bool
) -> None:
    """tropdeg - tropical intersection numbers and degrees on conical complexes."""
    ctx.ensure_object(dict)

    config = load_config()
    ctx.obj["config"] = config

    if profile:
        profile_config = config.get_profile(profile)
        ctx.obj["profile"] = profile
        if verbose == 0 and "verbose" in profile_config:
            verbose = int(profile_config["verbose"])
        if not quiet and profile_config.get("quiet", False):
            quiet = True

    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet
    ctx.obj["json"] = as_json
    setup_logging(verbosity=verbose, quiet=quiet)
    ctx.obj["settings"] = resolve_settings(config, profile)
    log.debug("settings: %s", ctx.obj["settings"])


cli.add_command(validate_cmd)
cli.add_command(balance_cmd)
cli.add_command(subdivide_cmd)
cli.add_command(intersect_cmd)
cli.add_command(degree_cmd)
cli.add_command(measure_cmd)
cli.add_command(size_cmd)
cli.add_command(converge_cmd)
cli.add_command(toric_cmd)


@cli.group(name="config")
def config_cli() -> None:
    """Manage tropdeg configuration files."""
    pass


@config_cli.command(name="init")
@click.option("--force", "-f", is_flag=True, help="Overwrite an existing file.")
def config_init(force: bool) -> None:
    """Write a commented .tropdeg.yaml into the current directory."""
    target = Path(PROJECT_CONFIG_NAME)
    if target.exists() and not force:
        click.echo(
            f"Error: {PROJECT_CONFIG_NAME} already exists. Use --force to overwrite.",
            err=True,
        )
        raise click.Abort()
    target.write_text(generate_config_template(), encoding="utf-8")
    click.echo(click.style(f"Wrote {target}", fg="green"))


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
