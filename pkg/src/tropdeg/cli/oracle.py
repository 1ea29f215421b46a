"""Convergence and toric oracle commands."""

import dataclasses
import sys
from pathlib import Path

import click

from tropdeg.cli.common import EXIT_TOLERANCE, emit, fail, fmt, settings, table
from tropdeg.core.exceptions import TropDegError
from tropdeg.core.fixtures import TORIC_FIXTURES, get_fixture
from tropdeg.core.io import load_divisor, load_towers
from tropdeg.core.service import converge, convergence_to_dict, toric_report


@click.command(name="converge")
@click.argument("tower_file", type=click.Path(exists=True, path_type=Path))
@click.option("--tol", type=float, help="Cauchy tolerance (default from settings).")
@click.option(
    "--max-steps",
    type=click.IntRange(min=0),
    help="Maximum number of refinement steps (default from settings).",
)
@click.pass_context
def converge_cmd(
    ctx: click.Context, tower_file: Path, tol: float | None, max_steps: int | None
) -> None:
    """Degree of nef b-divisors as the limit of degrees along a refinement ladder."""
    current = settings(ctx)
    overrides: dict[str, float | int] = {}
    if tol is not None:
        overrides["converge_tol"] = tol
    if max_steps is not None:
        overrides["max_steps"] = max_steps
    current = dataclasses.replace(current, **overrides)

    try:
        report = converge(load_towers(tower_file), current)
    except TropDegError as e:
        fail(e)

    rows = [
        (
            s.step,
            s.cones,
            fmt(s.degree),
            "-" if s.delta is None else f"{s.delta:.3e}",
            fmt(s.total_variation, 9),
        )
        for s in report.steps
    ]
    lines = table(["step", "cones", "degree", "|delta|", "|mu|"], rows)
    if report.cauchy_ok:
        lines.append(click.style(f"converged: {fmt(report.limit)}", fg="green"))
    else:
        lines.append(click.style(f"not converged; last value {fmt(report.limit)}", fg="yellow"))
    emit(ctx, convergence_to_dict(report), lines)


@click.command(name="toric")
@click.argument("fixture", type=click.Choice(TORIC_FIXTURES))
@click.argument(
    "divisor_files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path)
)
@click.option(
    "--hs", "hs_max", type=click.IntRange(min=1), help="Hilbert-Samuel table up to this scale."
)
@click.option("--bm", is_flag=True, help="Brunn-Minkowski check on the first two divisors.")
@click.pass_context
def toric_cmd(
    ctx: click.Context,
    fixture: str,
    divisor_files: tuple[Path, ...],
    hs_max: int | None,
    bm: bool,
) -> None:
    """Compare tropical degrees with mixed volumes and lattice-point counts.

    A single divisor is used for every slot of the top intersection number.
    """
    complex_ = get_fixture(fixture)
    try:
        divisors = [load_divisor(f, complex_) for f in divisor_files]
        result = toric_report(complex_, divisors, settings(ctx), hs_max=hs_max, bm=bm)
    except TropDegError as e:
        fail(e)

    comparison = result.comparison
    lines = [
        f"tropical: {comparison.tropical}",
        f"mixed volume: {comparison.oracle}",
        click.style("agree", fg="green"),
    ]
    if result.ray_weights_match is not None:
        match = "yes" if result.ray_weights_match else "no"
        lines.append(f"ray weights match facet lengths: {match}")
    failed = False
    if result.hilbert_samuel:
        rows = [
            (r.scale, r.count, f"{r.normalized:.6f}", f"{r.error:.2e}", "yes" if r.within else "NO")
            for r in result.hilbert_samuel
        ]
        lines.append(f"Hilbert-Samuel (target {result.hilbert_samuel[0].target}):")
        lines += table(["scale", "points", "normalized", "error", "in band"], rows)
        failed = not all(r.within for r in result.hilbert_samuel)
    if result.brunn_minkowski is not None:
        report = result.brunn_minkowski
        lines.append(
            f"Brunn-Minkowski: root of sum {report.sum_root:.9f}, "
            f"sum of roots {report.separate_roots:.9f}"
        )
        failed = failed or not report.superadditive
    emit(ctx, result.to_dict(), lines)
    if failed:
        sys.exit(EXIT_TOLERANCE)
