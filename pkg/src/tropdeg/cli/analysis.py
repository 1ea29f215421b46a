"""Intersection commands: intersect, degree, measure, size."""

import sys
from pathlib import Path

import click

from tropdeg.cli.common import (
    EXIT_TOLERANCE,
    emit,
    fail,
    fmt,
    load_valid_complex,
    settings,
    table,
)
from tropdeg.core.exceptions import TropDegError
from tropdeg.core.io import load_function, load_weight
from tropdeg.core.service import degree_report, intersect, measure_report, size_report
from tropdeg.core.weights import BalancedSpace, Flavor

FUNCTION_FILES = click.Path(exists=True, path_type=Path)

# "euclid" is the short spelling; weight files use "euclidean"
FLAVORS = {
    "lattice": Flavor.LATTICE,
    "euclid": Flavor.EUCLIDEAN,
    "euclidean": Flavor.EUCLIDEAN,
}


def _space(complex_, weight_file: Path | None) -> BalancedSpace:
    if weight_file is None:
        return BalancedSpace.of(complex_)
    return BalancedSpace(load_weight(weight_file, complex_))


@click.command(name="intersect")
@click.argument("complex_source")
@click.argument("weight_file", type=click.Path(exists=True, path_type=Path))
@click.argument("function_files", nargs=-1, type=FUNCTION_FILES)
@click.option(
    "--flavor",
    type=click.Choice(list(FLAVORS)),
    default="lattice",
    show_default=True,
    help="Which product to use.",
)
@click.pass_context
def intersect_cmd(
    ctx: click.Context,
    complex_source: str,
    weight_file: Path,
    function_files: tuple[Path, ...],
    flavor: str,
) -> None:
    """Iterated product phi_1 . ( ... (phi_r . w)); the last function acts first."""
    try:
        complex_ = load_valid_complex(complex_source)
        w = load_weight(weight_file, complex_)
        functions = [load_function(f, complex_) for f in function_files]
        result = intersect(w, functions, FLAVORS[flavor])
    except TropDegError as e:
        fail(e)
    rows = [(k, fmt(v)) for k, v in result.to_dict()["weight"]["values"].items()]
    lines = [f"{result.weight.dim}-dimensional {result.weight.flavor.value} weight"]
    lines += table(["cone", "value"], rows)
    if result.degree is not None:
        lines.append(f"degree: {fmt(result.degree)}")
    emit(ctx, result.to_dict(), lines)


@click.command(name="degree")
@click.argument("complex_source")
@click.argument("function_files", nargs=-1, required=True, type=FUNCTION_FILES)
@click.option(
    "--weight",
    "weight_file",
    type=click.Path(exists=True, path_type=Path),
    help="Top-dimensional weight of the space (default: all ones).",
)
@click.pass_context
def degree_cmd(
    ctx: click.Context,
    complex_source: str,
    function_files: tuple[Path, ...],
    weight_file: Path | None,
) -> None:
    """Top intersection number of n functions, in both flavors."""
    try:
        complex_ = load_valid_complex(complex_source)
        space = _space(complex_, weight_file)
        functions = [load_function(f, complex_) for f in function_files]
        result = degree_report(space, functions, settings(ctx))
    except TropDegError as e:
        fail(e)
    bridge = "ok" if result.bridge_ok else click.style("FAILED", fg="red")
    lines = [
        f"lattice: {fmt(result.lattice)}",
        f"euclidean: {result.euclidean:.9f}",
        f"bridge: {bridge} (defect {result.bridge_defect:.3e})",
    ]
    if result.lifting_ok is not None:
        lines.append(f"lifting independence: {'ok' if result.lifting_ok else 'FAILED'}")
    emit(ctx, result.to_dict(), lines)
    if not result.bridge_ok or result.lifting_ok is False:
        sys.exit(EXIT_TOLERANCE)


@click.command(name="measure")
@click.argument("complex_source")
@click.argument("function_files", nargs=-1, type=FUNCTION_FILES)
@click.option(
    "--weight",
    "weight_file",
    type=click.Path(exists=True, path_type=Path),
    help="Top-dimensional weight of the space (default: all ones).",
)
@click.pass_context
def measure_cmd(
    ctx: click.Context,
    complex_source: str,
    function_files: tuple[Path, ...],
    weight_file: Path | None,
) -> None:
    """Mixed Monge-Ampere measure of n - 1 functions."""
    try:
        complex_ = load_valid_complex(complex_source)
        space = _space(complex_, weight_file)
        functions = [load_function(f, complex_) for f in function_files]
        result = measure_report(space, functions)
    except TropDegError as e:
        fail(e)
    rows = [
        (atom.ray, ", ".join(fmt(x, 6) for x in atom.unit_image), fmt(mass))
        for atom, mass in result.measure.atoms
    ]
    lines = table(["ray", "direction", "mass"], rows)
    lines.append(f"total variation: {fmt(result.measure.total_variation)}")
    emit(ctx, result.to_dict(), lines)


@click.command(name="size")
@click.argument("complex_source")
@click.argument("weight_file", type=click.Path(exists=True, path_type=Path))
@click.option(
    "--cln",
    "cln_file",
    type=click.Path(exists=True, path_type=Path),
    help="PL function for the Chern-Levine-Nirenberg check.",
)
@click.pass_context
def size_cmd(
    ctx: click.Context, complex_source: str, weight_file: Path, cln_file: Path | None
) -> None:
    """Size of a positive weight with respect to the auxiliary concave function."""
    try:
        complex_ = load_valid_complex(complex_source)
        z = load_weight(weight_file, complex_)
        phi = load_function(cln_file, complex_) if cln_file else None
        result = size_report(z, phi, settings(ctx))
    except TropDegError as e:
        fail(e)
    lines = [
        f"size: {fmt(result.size)}",
        f"auxiliary complex: {result.refined_cones} maximal cones",
    ]
    cln = result.cln
    if cln is not None:
        if not cln.applicable:
            lines.append(click.style("CLN: not applicable (phi . z is not positive)", fg="yellow"))
        else:
            status = "holds" if cln.holds else click.style("FAILS", fg="red")
            lines.append(
                f"CLN: {fmt(cln.lhs)} <= {fmt(cln.bound)} * size = {fmt(cln.rhs)}: {status}"
            )
    emit(ctx, result.to_dict(), lines)
    if cln is not None and cln.holds is False:
        sys.exit(EXIT_TOLERANCE)
