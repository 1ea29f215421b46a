"""Service functions behind the CLI commands.

Each function takes already-loaded engine objects, runs one workflow and
returns a result dataclass with a ``to_dict`` for ``--json`` output. The CLI
only parses arguments, calls these and prints.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from tropdeg.core.complex import (
    ConicalComplex,
    Point,
    Subdivision,
    ValidationReport,
    cone_key,
    parse_cone_key,
    stellar_subdivide,
    validate,
)
from tropdeg.core.config_file import Settings
from tropdeg.core.exceptions import SubdivisionError
from tropdeg.core.fixtures import TORIC_FIXTURES
from tropdeg.core.functions import DivisorView, PLFunction
from tropdeg.core.intersection import (
    iterated_product,
    lifting_independence_check,
    normalization_bridge_check,
    top_number,
)
from tropdeg.core.io import (
    format_scalar,
    measure_to_dict,
    subdivision_to_dict,
    weight_to_dict,
)
from tropdeg.core.linalg import as_rational
from tropdeg.core.logging_config import get_logger
from tropdeg.core.mameasure import (
    AuxiliaryConcave,
    BDivisorSequence,
    CLNReport,
    ConvergenceReport,
    DiscreteMeasure,
    cln_check,
    converge_degree,
    mixed_ma_measure,
    size,
)
from tropdeg.core.toric import (
    BrunnMinkowskiReport,
    DegreeComparison,
    HilbertSamuelRow,
    brunn_minkowski,
    compare_degrees,
    facet_lattice_lengths,
    hilbert_samuel,
    hilbert_samuel_scales,
    tropical_ray_weights,
)
from tropdeg.core.weights import (
    BalancedSpace,
    Flavor,
    Weight,
    degree,
    is_balanced,
    normalize,
)

log = get_logger("service")


# ---------------------------------------------------------------------------
# validate / balance / subdivide
# ---------------------------------------------------------------------------


def validation_to_dict(report: ValidationReport) -> dict[str, Any]:
    return {
        "valid": report.is_valid,
        "issues": [
            {
                "level": i.level,
                "code": i.code,
                "message": i.message,
                "cone": i.cone,
            }
            for i in report.issues
        ],
    }


def validate_complex(complex_: ConicalComplex) -> ValidationReport:
    report = validate(complex_)
    log.info(
        "validated %r: %d errors, %d warnings",
        complex_.name,
        sum(i.level == "error" for i in report.issues),
        sum(i.level == "warning" for i in report.issues),
    )
    return report


@dataclass
class BalanceResult:
    """Balancing in the weight's own flavor and after normalization."""

    lattice: bool | None
    euclidean: bool
    face: str | None = None

    @property
    def balanced(self) -> bool:
        return self.euclidean and self.lattice is not False

    def to_dict(self) -> dict[str, Any]:
        return {
            "balanced": self.balanced,
            "lattice": self.lattice,
            "euclidean": self.euclidean,
            "face": self.face,
        }


def check_balance(w: Weight, settings: Settings) -> BalanceResult:
    lattice = None
    face = None
    if w.flavor is Flavor.LATTICE:
        report = is_balanced(w)
        lattice = report.balanced
        if report.face is not None:
            face = cone_key(report.face) or "apex"
    euclid = is_balanced(normalize(w), settings.euclidean_tol)
    if face is None and euclid.face is not None:
        face = cone_key(euclid.face) or "apex"
    return BalanceResult(lattice, euclid.balanced, face)


def parse_subdivision_point(complex_: ConicalComplex, text: str) -> Point:
    """Parse ``"r1|r2:1,1"`` (cone key, colon, comma-separated coefficients)."""
    if ":" not in text:
        raise SubdivisionError(f"expected '<cone>:<coefficients>', got {text!r}")
    key, _, coeffs = text.partition(":")
    cone = parse_cone_key(key)
    complex_.require_face(cone)
    try:
        values = [as_rational(x.strip()) for x in coeffs.split(",")]
    except ValueError as e:
        raise SubdivisionError(f"bad coefficients {coeffs!r}") from e
    if len(values) != len(cone):
        raise SubdivisionError("one coefficient per ray of the cone is required", cone=key)
    # coefficients follow the rays in the order they were written
    written = [part.strip() for part in key.split("|")]
    return Point.from_mapping(dict(zip(written, values, strict=True)))


@dataclass
class SubdivideResult:
    subdivision: Subdivision
    check: ValidationReport

    def to_dict(self) -> dict[str, Any]:
        data = subdivision_to_dict(self.subdivision)
        data["check"] = validation_to_dict(self.check)
        return data


def subdivide(complex_: ConicalComplex, text: str) -> SubdivideResult:
    s = stellar_subdivide(complex_, parse_subdivision_point(complex_, text))
    return SubdivideResult(s, s.check())


# ---------------------------------------------------------------------------
# intersect / degree
# ---------------------------------------------------------------------------


@dataclass
class IntersectResult:
    weight: Weight

    @property
    def degree(self) -> Fraction | float | None:
        return degree(self.weight) if self.weight.dim == 0 else None

    def to_dict(self) -> dict[str, Any]:
        data = {"weight": weight_to_dict(self.weight)}
        if self.degree is not None:
            data["degree"] = format_scalar(self.degree)
        return data


def intersect(w: Weight, functions: Sequence[PLFunction], flavor: Flavor) -> IntersectResult:
    """Iterated product in the requested flavor (lattice weights are normalized for Euclidean)."""
    start = normalize(w) if flavor is Flavor.EUCLIDEAN else w
    result = iterated_product(functions, start)
    log.info("product of %d functions: %d-dimensional weight", len(functions), result.dim)
    return IntersectResult(result)


@dataclass
class DegreeResult:
    """Top number in both flavors with the bridge and lifting spot checks."""

    lattice: Fraction | None
    euclidean: float
    bridge_defect: float
    bridge_ok: bool
    lifting_ok: bool | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "lattice": format_scalar(self.lattice) if self.lattice is not None else None,
            "euclidean": self.euclidean,
            "bridge_defect": self.bridge_defect,
            "bridge_ok": self.bridge_ok,
            "lifting_ok": self.lifting_ok,
        }


def degree_report(
    space: BalancedSpace, functions: Sequence[PLFunction], settings: Settings
) -> DegreeResult:
    euclid = float(top_number(functions, space, Flavor.EUCLIDEAN))
    exact = all(phi.is_exact for phi in functions) and space.cycle.flavor is Flavor.LATTICE
    if not exact:
        log.info("float data: only the Euclidean top number is computed")
        return DegreeResult(None, euclid, 0.0, True, None)
    lattice = Fraction(top_number(functions, space, Flavor.LATTICE))
    # bridge at the last step: outer function against the lattice (n-1)-fold product
    inner = iterated_product(functions[1:], space.lattice_cycle())
    bridge = normalization_bridge_check(functions[0], inner, settings.euclidean_tol)
    defect = max(bridge.defect, abs(float(lattice) - euclid))
    ok = bridge.holds and defect <= settings.euclidean_tol * max(1.0, abs(euclid))
    rng = random.Random(settings.seed)
    lifting = lifting_independence_check(functions[0], inner, rng)
    return DegreeResult(lattice, euclid, defect, ok, lifting.holds)


# ---------------------------------------------------------------------------
# measure / size
# ---------------------------------------------------------------------------


@dataclass
class MeasureResult:
    measure: DiscreteMeasure

    def to_dict(self) -> dict[str, Any]:
        return measure_to_dict(self.measure)


def measure_report(space: BalancedSpace, functions: Sequence[PLFunction]) -> MeasureResult:
    mu = mixed_ma_measure(functions, space)
    log.info("measure with %d atoms, total variation %.9g", len(mu.atoms), mu.total_variation)
    return MeasureResult(mu)


@dataclass
class SizeResult:
    size: float
    refined_cones: int
    cln: CLNReport | None = None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"size": self.size, "aux_cones": self.refined_cones}
        if self.cln is not None:
            data["cln"] = {
                "applicable": self.cln.applicable,
                "holds": self.cln.holds,
                "lhs": self.cln.lhs,
                "rhs": self.cln.rhs,
                "bound": self.cln.bound,
            }
        return data


def size_report(
    z: Weight, cln_function: PLFunction | None, settings: Settings
) -> SizeResult:
    aux = AuxiliaryConcave.refine(z.complex)
    value = size(z, aux)
    cln = None
    if cln_function is not None:
        cln = cln_check(cln_function, z, aux, settings.euclidean_tol)
    return SizeResult(value, len(aux.complex.maximal_cones), cln)


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------


def convergence_to_dict(report: ConvergenceReport) -> dict[str, Any]:
    return {
        "cauchy_ok": report.cauchy_ok,
        "limit": report.limit,
        "steps": [
            {
                "step": s.step,
                "cones": s.cones,
                "rays": s.rays,
                "degree": s.degree,
                "delta": s.delta,
                "total_variation": s.total_variation,
                "pairing": s.pairing,
                "naive_integral": s.naive_integral,
            }
            for s in report.steps
        ],
        "final_measure": measure_to_dict(report.final_measure) if report.final_measure else None,
    }


def converge(towers: Sequence[BDivisorSequence], settings: Settings) -> ConvergenceReport:
    return converge_degree(towers, settings.converge_tol, settings.max_steps)


# ---------------------------------------------------------------------------
# toric
# ---------------------------------------------------------------------------


@dataclass
class ToricResult:
    comparison: DegreeComparison
    ray_weights_match: bool | None = None
    hilbert_samuel: list[HilbertSamuelRow] = field(default_factory=list)
    brunn_minkowski: BrunnMinkowskiReport | None = None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "tropical": format_scalar(self.comparison.tropical),
            "mixed_volume": format_scalar(self.comparison.oracle),
            "agree": self.comparison.agree,
            "ray_weights_match": self.ray_weights_match,
        }
        if self.hilbert_samuel:
            data["hilbert_samuel"] = [
                {
                    "scale": r.scale,
                    "count": r.count,
                    "normalized": r.normalized,
                    "target": format_scalar(r.target),
                    "error": r.error,
                    "within": r.within,
                }
                for r in self.hilbert_samuel
            ]
        if self.brunn_minkowski is not None:
            data["brunn_minkowski"] = {
                "root_of_sum": self.brunn_minkowski.sum_root,
                "sum_of_roots": self.brunn_minkowski.separate_roots,
                "superadditive": self.brunn_minkowski.superadditive,
                "reverse_direction": self.brunn_minkowski.reverse_direction,
            }
        return data


def toric_report(
    complex_: ConicalComplex,
    divisors: Sequence[DivisorView],
    settings: Settings,
    hs_max: int | None = None,
    bm: bool = False,
) -> ToricResult:
    """Oracle comparisons for nef divisors on a toric fixture.

    A single divisor is repeated to fill all ``n`` slots.
    """
    if complex_.name not in TORIC_FIXTURES:
        log.warning("%r is not one of the toric fixtures; the fan must be complete", complex_.name)
    slots = list(divisors)
    if len(slots) == 1:
        slots = slots * complex_.dim
    result = ToricResult(compare_degrees(complex_, slots))
    if complex_.ambient_dim == 2:
        matches = True
        for d in divisors:
            trop = tropical_ray_weights(d)
            lengths = facet_lattice_lengths(d)
            matches = matches and all(trop[r] == lengths[r] for r in complex_.ray_ids)
        result.ray_weights_match = matches
    if hs_max is not None:
        result.hilbert_samuel = hilbert_samuel(
            divisors[0], hilbert_samuel_scales(hs_max), settings.max_box_points
        )
    if bm:
        if len(divisors) < 2:
            log.warning("--bm needs two divisors; skipped")
        else:
            result.brunn_minkowski = brunn_minkowski(divisors[0], divisors[1])
    return result


__all__ = [
    "BalanceResult",
    "DegreeResult",
    "IntersectResult",
    "MeasureResult",
    "SizeResult",
    "SubdivideResult",
    "ToricResult",
    "check_balance",
    "converge",
    "convergence_to_dict",
    "degree_report",
    "intersect",
    "measure_report",
    "parse_subdivision_point",
    "size_report",
    "subdivide",
    "toric_report",
    "validate_complex",
    "validation_to_dict",
]
