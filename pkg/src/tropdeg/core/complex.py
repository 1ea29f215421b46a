"""Smooth simplicial conical complexes with a quasi-embedding.

A complex is abstract: cones are sets of ray ids and each ray carries an
integer image in one ambient lattice. Images must be independent on every
cone, but distinct rays may share an image, so points of the complex are
always carried as ``(cone, coefficients)`` and never as bare vectors.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import numpy as np

from tropdeg.core.exceptions import (
    ComplexValidationError,
    DimensionMismatchError,
    LinearAlgebraError,
    SubdivisionError,
)
from tropdeg.core.linalg import (
    InnerProduct,
    IntVector,
    RatMatrix,
    RatVector,
    as_rational,
    combine,
    gram_det,
    gram_matrix,
    minors_gcd,
    primitive_rational,
)
from tropdeg.core.logging_config import get_logger

log = get_logger("complex")

Cone = tuple[str, ...]
APEX: Cone = ()

MAX_GENERATED_ID_LENGTH = 24


def make_cone(ray_ids: Iterable[str]) -> Cone:
    """Canonical cone: sorted tuple of distinct ray ids."""
    ids = list(ray_ids)
    cone = tuple(sorted(set(ids)))
    if len(cone) != len(ids):
        raise ComplexValidationError(
            "cone lists a ray twice", code="repeated-ray", cone="|".join(ids)
        )
    return cone


def cone_key(cone: Cone) -> str:
    """Serialize a cone as its sorted ray ids joined by ``|``."""
    return "|".join(cone)


def parse_cone_key(key: str) -> Cone:
    key = key.strip()
    if key in ("", "apex"):
        return APEX
    return make_cone(part.strip() for part in key.split("|"))


@dataclass(frozen=True)
class Ray:
    """A ray generator together with its image in the ambient lattice."""

    id: str
    image: IntVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "image", tuple(int(x) for x in self.image))


@dataclass(frozen=True)
class Point:
    """A point of the complex given by a cone and nonnegative coefficients.

    Coefficients are aligned with the (sorted) rays of ``cone``.
    """

    cone: Cone
    coefficients: RatVector

    def __post_init__(self) -> None:
        coefficients = tuple(as_rational(c) for c in self.coefficients)
        if len(coefficients) != len(self.cone):
            raise DimensionMismatchError(
                "one coefficient per ray is required", len(self.cone), len(coefficients)
            )
        if any(c < 0 for c in coefficients):
            raise ComplexValidationError(
                "point has a negative coefficient",
                code="outside-cone",
                cone=cone_key(self.cone),
            )
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def of_ray(cls, ray_id: str) -> Point:
        return cls((ray_id,), (Fraction(1),))

    @classmethod
    def from_mapping(cls, coefficients: Mapping[str, object]) -> Point:
        cone = make_cone(coefficients)
        return cls(cone, tuple(as_rational(coefficients[r]) for r in cone))

    def as_mapping(self) -> dict[str, Fraction]:
        return dict(zip(self.cone, self.coefficients, strict=True))

    @property
    def carrier(self) -> Cone:
        """Rays with strictly positive coefficient."""
        return tuple(r for r, c in zip(self.cone, self.coefficients, strict=True) if c > 0)


@dataclass(frozen=True)
class SphereAtom:
    """Unit-sphere representative of a ray."""

    ray: str
    unit_image: tuple[float, ...]


@dataclass(frozen=True)
class FacetData:
    """Orthogonal decomposition of the extra ray of ``sigma`` over ``tau``.

    ``coefficients`` express the orthogonal projection of the extra ray's image
    onto span(tau) in tau's rays; ``perp_sq`` is the squared length of the
    orthogonal remainder, equal to gram_det(sigma) / gram_det(tau).
    """

    tau: Cone
    sigma: Cone
    extra: str
    coefficients: RatVector
    perp_sq: Fraction

    @property
    def perp_norm(self) -> float:
        return math.sqrt(float(self.perp_sq))


@dataclass(frozen=True, eq=False)
class ConicalComplex:
    """Abstract smooth simplicial fan with per-ray images.

    Attributes:
        ambient_dim: Rank ``d`` of the ambient lattice.
        rays: Ray generators.
        maximal_cones: Maximal cones; faces are implied.
        inner_product: Rational Euclidean structure on the ambient space.
        name: Optional label used in reports.
    """

    ambient_dim: int
    rays: tuple[Ray, ...]
    maximal_cones: tuple[Cone, ...]
    inner_product: InnerProduct
    name: str = ""

    @classmethod
    def build(
        cls,
        ambient_dim: int,
        rays: Mapping[str, Sequence[int]] | Iterable[Ray],
        cones: Iterable[Iterable[str]],
        inner_product: InnerProduct | None = None,
        name: str = "",
    ) -> ConicalComplex:
        """Convenience constructor from plain Python data."""
        if isinstance(rays, Mapping):
            ray_list = tuple(Ray(rid, tuple(img)) for rid, img in rays.items())
        else:
            ray_list = tuple(rays)
        return cls(
            ambient_dim=ambient_dim,
            rays=ray_list,
            maximal_cones=tuple(make_cone(c) for c in cones),
            inner_product=inner_product or InnerProduct.standard(ambient_dim),
            name=name,
        )

    @cached_property
    def ray_map(self) -> dict[str, Ray]:
        return {r.id: r for r in self.rays}

    @cached_property
    def ray_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.ray_map))

    @cached_property
    def dim(self) -> int:
        return max((len(c) for c in self.maximal_cones), default=0)

    @cached_property
    def faces(self) -> dict[int, tuple[Cone, ...]]:
        """All faces grouped by dimension, each group sorted."""
        found: set[Cone] = {APEX}
        for cone in self.maximal_cones:
            for k in range(1, len(cone) + 1):
                found.update(combinations(cone, k))
        grouped: dict[int, list[Cone]] = defaultdict(list)
        for cone in found:
            grouped[len(cone)].append(cone)
        return {k: tuple(sorted(v)) for k, v in sorted(grouped.items())}

    @cached_property
    def face_set(self) -> frozenset[Cone]:
        return frozenset(c for group in self.faces.values() for c in group)

    @cached_property
    def cofaces(self) -> dict[Cone, tuple[Cone, ...]]:
        """Map each face to the faces having it as a facet."""
        table: dict[Cone, list[Cone]] = defaultdict(list)
        for k, group in self.faces.items():
            if k == 0:
                continue
            for sigma in group:
                for i in range(k):
                    table[sigma[:i] + sigma[i + 1 :]].append(sigma)
        return {tau: tuple(sorted(v)) for tau, v in table.items()}

    @cached_property
    def _facet_cache(self) -> dict[tuple[Cone, Cone], FacetData]:
        return {}

    @cached_property
    def _volume_cache(self) -> dict[Cone, float]:
        return {}

    def faces_of_dim(self, k: int) -> tuple[Cone, ...]:
        return self.faces.get(k, ())

    def is_face(self, cone: Cone) -> bool:
        return cone in self.face_set

    def image(self, ray_id: str) -> IntVector:
        try:
            return self.ray_map[ray_id].image
        except KeyError as e:
            raise ComplexValidationError(
                f"unknown ray {ray_id!r}", code="unknown-ray"
            ) from e

    def images(self, cone: Cone) -> list[IntVector]:
        return [self.image(r) for r in cone]

    def require_face(self, cone: Cone) -> None:
        if not self.is_face(cone):
            raise ComplexValidationError(
                "not a cone of the complex", code="unknown-cone", cone=cone_key(cone)
            )

    def __repr__(self) -> str:
        label = f"{self.name!r}, " if self.name else ""
        return (
            f"ConicalComplex({label}d={self.ambient_dim}, "
            f"rays={len(self.rays)}, maximal_cones={len(self.maximal_cones)})"
        )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass
class ValidationIssue:
    """A single validation warning or error.

    Attributes:
        level: Either ``"error"`` or ``"warning"``.
        code: Stable diagnostic code.
        message: Human-readable description of the issue.
        cone: Key of the offending cone, if any.
    """

    level: str
    code: str
    message: str
    cone: str | None = None


@dataclass
class ValidationReport:
    """Outcome of :func:`validate` and :meth:`Subdivision.check`."""

    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def has_errors(self) -> bool:
        return any(i.level == "error" for i in self.issues)

    @property
    def has_warnings(self) -> bool:
        return any(i.level == "warning" for i in self.issues)

    @property
    def is_valid(self) -> bool:
        return not self.has_errors

    @property
    def first_error(self) -> ValidationIssue | None:
        return next((i for i in self.issues if i.level == "error"), None)

    def error(self, code: str, message: str, cone: Cone | None = None) -> None:
        self.issues.append(
            ValidationIssue("error", code, message, None if cone is None else cone_key(cone))
        )

    def warning(self, code: str, message: str, cone: Cone | None = None) -> None:
        self.issues.append(
            ValidationIssue(
                "warning", code, message, None if cone is None else cone_key(cone)
            )
        )

    def raise_first(self) -> None:
        issue = self.first_error
        if issue is not None:
            raise ComplexValidationError(issue.message, code=issue.code, cone=issue.cone)


def validate(complex_: ConicalComplex) -> ValidationReport:
    """Check the invariants of a conical complex.

    Errors: duplicate or unknown rays, zero or mis-sized images, mismatched
    inner product, empty or repeated cones, cones that are faces of other
    listed cones, impure dimension, dependent images on a cone, unused rays.
    Warnings: cones whose images span a non-saturated sublattice of the
    ambient lattice (harmless, the lattice of a cone is the abstract one).
    """
    report = ValidationReport()
    d = complex_.ambient_dim

    seen: set[str] = set()
    for ray in complex_.rays:
        if ray.id in seen:
            report.error("duplicate-ray", f"ray id {ray.id!r} is used twice")
        seen.add(ray.id)
        if len(ray.image) != d:
            report.error(
                "image-dimension",
                f"ray {ray.id!r} has an image of length {len(ray.image)}, expected {d}",
                (ray.id,),
            )
        elif not any(ray.image):
            report.error("zero-image", f"ray {ray.id!r} has the zero image", (ray.id,))

    if complex_.inner_product.dim != d:
        report.error(
            "inner-product-dimension",
            f"inner product is {complex_.inner_product.dim}-dimensional, expected {d}",
        )
    if not complex_.maximal_cones:
        report.error("empty-complex", "the complex has no cones")
    if report.has_errors:
        return report

    listed = set()
    for cone in complex_.maximal_cones:
        if not cone:
            report.error("empty-cone", "a listed cone has no rays")
            continue
        if cone in listed:
            report.error("duplicate-cone", "cone is listed twice", cone)
        listed.add(cone)
        unknown = [r for r in cone if r not in complex_.ray_map]
        if unknown:
            report.error("unknown-ray", f"cone uses unknown rays {unknown}", cone)
    if report.has_errors:
        return report

    for a in complex_.maximal_cones:
        for b in complex_.maximal_cones:
            if a != b and set(a) < set(b):
                report.error("redundant-cone", f"cone is a face of {cone_key(b)}", a)

    dims = {len(c) for c in complex_.maximal_cones}
    if len(dims) > 1:
        report.error("impure", f"maximal cones have dimensions {sorted(dims)}")

    for cone in complex_.maximal_cones:
        images = complex_.images(cone)
        if len(cone) > d or RatMatrix.from_rows(images).rank() < len(cone):
            report.error("dependent-images", "ray images are linearly dependent", cone)
            continue
        g = minors_gcd(images)
        if g != 1:
            report.warning(
                "non-saturated",
                f"images span an index-{g} sublattice of the ambient lattice",
                cone,
            )

    used = {r for c in complex_.maximal_cones for r in c}
    for ray in complex_.rays:
        if ray.id not in used:
            report.error("orphan-ray", f"ray {ray.id!r} lies in no cone", (ray.id,))

    for issue in report.issues:
        log.debug("validate %s: [%s] %s", issue.level, issue.code, issue.message)
    return report


def ensure_valid(complex_: ConicalComplex) -> ValidationReport:
    """Validate and raise :class:`ComplexValidationError` on the first error."""
    report = validate(complex_)
    report.raise_first()
    for issue in report.issues:
        log.warning("%s: %s", issue.code, issue.message)
    return report


# ---------------------------------------------------------------------------
# Points, normals and volumes
# ---------------------------------------------------------------------------


def locate(complex_: ConicalComplex, point: Point) -> Point:
    """Return the point on its carrier, the minimal cone containing it."""
    complex_.require_face(point.cone)
    pairs = [(r, c) for r, c in zip(point.cone, point.coefficients, strict=True) if c > 0]
    return Point(tuple(r for r, _ in pairs), tuple(c for _, c in pairs))


def point_image(complex_: ConicalComplex, point: Point) -> RatVector:
    if not point.cone:
        return tuple(Fraction(0) for _ in range(complex_.ambient_dim))
    return combine(point.coefficients, complex_.images(point.cone))


def _require_facet(complex_: ConicalComplex, tau: Cone, sigma: Cone) -> str:
    complex_.require_face(sigma)
    extra = set(sigma) - set(tau)
    if len(sigma) != len(tau) + 1 or not set(tau) <= set(sigma) or len(extra) != 1:
        raise ComplexValidationError(
            f"{cone_key(tau) or 'apex'} is not a facet of {cone_key(sigma)}",
            code="not-a-facet",
            cone=cone_key(sigma),
        )
    return extra.pop()


def facet_data(complex_: ConicalComplex, tau: Cone, sigma: Cone) -> FacetData:
    """Orthogonal decomposition of sigma's extra ray over tau (cached)."""
    key = (tau, sigma)
    cached = complex_._facet_cache.get(key)
    if cached is not None:
        return cached
    extra = _require_facet(complex_, tau, sigma)
    ip = complex_.inner_product
    e = complex_.image(extra)
    tau_images = complex_.images(tau)
    rhs = [ip.pair(t, e) for t in tau_images]
    if tau_images:
        coefficients = gram_matrix(tau_images, ip).solve(rhs)
    else:
        coefficients = ()
    perp_sq = ip.pair(e, e) - sum(
        (a * g for a, g in zip(coefficients, rhs, strict=True)), Fraction(0)
    )
    if perp_sq <= 0:
        raise LinearAlgebraError(f"images of {cone_key(sigma)} are dependent")
    data = FacetData(tau, sigma, extra, coefficients, perp_sq)
    complex_._facet_cache[key] = data
    return data


def euclidean_normal(complex_: ConicalComplex, tau: Cone, sigma: Cone) -> np.ndarray:
    """Unit normal of sigma over tau, orthogonal to span(tau), pointing into sigma."""
    data = facet_data(complex_, tau, sigma)
    e = np.asarray(complex_.image(data.extra), dtype=float)
    projection = np.zeros(complex_.ambient_dim)
    for a, t in zip(data.coefficients, complex_.images(tau), strict=True):
        projection += float(a) * np.asarray(t, dtype=float)
    return (e - projection) / data.perp_norm


def lattice_normal(complex_: ConicalComplex, tau: Cone, sigma: Cone) -> IntVector:
    """Lifting of the lattice normal: the image of sigma's extra ray generator."""
    extra = _require_facet(complex_, tau, sigma)
    return complex_.image(extra)


def ray_norm(complex_: ConicalComplex, ray_id: str) -> float:
    key = (ray_id,)
    cached = complex_._volume_cache.get(key)
    if cached is None:
        e = complex_.image(ray_id)
        cached = math.sqrt(float(complex_.inner_product.pair(e, e)))
        complex_._volume_cache[key] = cached
    return cached


def cone_volume(complex_: ConicalComplex, sigma: Cone) -> float:
    """Covolume of the abstract lattice of sigma; 1 at the apex."""
    if not sigma:
        return 1.0
    cached = complex_._volume_cache.get(sigma)
    if cached is not None:
        return cached
    if len(sigma) == 1:
        return ray_norm(complex_, sigma[0])
    value = math.sqrt(float(gram_det(complex_.images(sigma), complex_.inner_product)))
    complex_._volume_cache[sigma] = value
    return value


def sphere_atom(complex_: ConicalComplex, ray_id: str) -> SphereAtom:
    e = np.asarray(complex_.image(ray_id), dtype=float)
    return SphereAtom(ray_id, tuple(float(x) for x in e / ray_norm(complex_, ray_id)))


# ---------------------------------------------------------------------------
# Subdivisions
# ---------------------------------------------------------------------------


def _fresh_id(existing: set[str], candidate: str, fallback: str) -> str:
    base = candidate if len(candidate) <= MAX_GENERATED_ID_LENGTH else fallback
    rid, n = base, 1
    while rid in existing:
        n += 1
        rid = f"{base}#{n}"
    existing.add(rid)
    return rid


@dataclass(frozen=True, eq=False)
class Subdivision:
    """A refinement ``fine -> coarse`` recorded ray by ray.

    ``ray_map`` sends each fine ray to a point of the coarse complex whose
    image equals the fine ray's image.
    """

    fine: ConicalComplex
    coarse: ConicalComplex
    ray_map: Mapping[str, Point]

    @classmethod
    def identity(cls, complex_: ConicalComplex) -> Subdivision:
        return cls(complex_, complex_, {r: Point.of_ray(r) for r in complex_.ray_ids})

    def point(self, fine_ray: str) -> Point:
        try:
            return self.ray_map[fine_ray]
        except KeyError as e:
            raise SubdivisionError(f"fine ray {fine_ray!r} is not mapped") from e

    def carrier(self, fine_cone: Cone) -> Cone:
        """Minimal coarse cone containing the relative interior of ``fine_cone``."""
        rays: set[str] = set()
        for r in fine_cone:
            rays.update(self.point(r).carrier)
        return tuple(sorted(rays))

    def push_point(self, point: Point) -> Point:
        """Express a point of the fine complex in the coarse complex."""
        carrier = self.carrier(point.cone)
        index = {r: i for i, r in enumerate(carrier)}
        coefficients = [Fraction(0)] * len(carrier)
        for r, c in zip(point.cone, point.coefficients, strict=True):
            for cr, cc in self.point(r).as_mapping().items():
                if cr in index:
                    coefficients[index[cr]] += c * cc
        return Point(carrier, tuple(coefficients))

    def compose(self, inner: Subdivision) -> Subdivision:
        """Chain ``inner.fine -> inner.coarse == self.fine -> self.coarse``."""
        if inner.coarse is not self.fine:
            raise SubdivisionError("subdivisions do not chain")
        ray_map = {r: locate(self.coarse, self.push_point(p)) for r, p in inner.ray_map.items()}
        return Subdivision(inner.fine, self.coarse, ray_map)

    def check(self) -> ValidationReport:
        """Certify the refinement.

        Every fine ray must land in a coarse cone with nonnegative coefficients
        and matching image; each fine maximal cone must sit in one coarse
        maximal cone; and, slicing every coarse maximal cone by the hyperplane
        "coefficients sum to 1", the fine pieces' simplex volumes must add up
        to exactly 1.
        """
        report = ValidationReport()
        fine, coarse = self.fine, self.coarse
        for r in fine.ray_ids:
            if r not in self.ray_map:
                report.error("unmapped-ray", f"fine ray {r!r} is not mapped", (r,))
                continue
            p = self.ray_map[r]
            if not coarse.is_face(p.cone):
                report.error("not-a-face", f"fine ray {r!r} maps outside the coarse complex", (r,))
                continue
            if not p.carrier:
                report.error("apex-image", f"fine ray {r!r} maps to the apex", (r,))
                continue
            if point_image(coarse, p) != tuple(Fraction(x) for x in fine.image(r)):
                report.error(
                    "image-mismatch", f"fine ray {r!r} image differs from its location", (r,)
                )
        if report.has_errors:
            return report

        coarse_maximal = set(coarse.maximal_cones)
        pieces: dict[Cone, Fraction] = defaultdict(Fraction)
        for sigma in fine.maximal_cones:
            carrier = self.carrier(sigma)
            if not coarse.is_face(carrier):
                report.error("straddles-cones", "fine cone is not inside one coarse cone", sigma)
                continue
            if len(carrier) != len(sigma) or carrier not in coarse_maximal:
                report.error(
                    "dimension-drop", "fine cone is not full-dimensional in its carrier", sigma
                )
                continue
            index = {cr: i for i, cr in enumerate(carrier)}
            rows = []
            for r in sigma:
                row = [Fraction(0)] * len(carrier)
                for cr, c in self.point(r).as_mapping().items():
                    row[index[cr]] += c
                total = sum(row, Fraction(0))
                rows.append([x / total for x in row])
            volume = abs(RatMatrix.from_rows(rows).det())
            if volume == 0:
                report.error("degenerate-piece", "fine cone is degenerate", sigma)
            pieces[carrier] += volume
        for cone in coarse.maximal_cones:
            covered = pieces.get(cone, Fraction(0))
            if covered != 1:
                report.error(
                    "coverage",
                    f"fine pieces cover {covered} of the coarse cone",
                    cone,
                )
        return report


def stellar_subdivide(
    complex_: ConicalComplex, point: Point, new_id: str | None = None
) -> Subdivision:
    """Stellar subdivision at a rational point of a cone's relative interior.

    The new ray is the primitive integer vector of the point's coefficients,
    read in the abstract lattice of the cone; every cone containing the
    point's cone is split.

    Raises:
        SubdivisionError: If the point lies on a proper face, the cone is a
            ray, or a split cone would not be unimodular.
    """
    complex_.require_face(point.cone)
    tau = point.cone
    if not tau or any(c == 0 for c in point.coefficients):
        raise SubdivisionError(
            "point lies on a proper face; subdivide at its carrier instead",
            cone=cone_key(tau),
        )
    if len(tau) == 1:
        raise SubdivisionError("a ray has no interior to split", cone=cone_key(tau))
    weights = primitive_rational(point.coefficients)
    if any(w != 1 for w in weights):
        raise SubdivisionError(
            f"split cones would have index {max(weights)}; not unimodular",
            cone=cone_key(tau),
        )

    existing = set(complex_.ray_ids)
    rid = new_id or _fresh_id(existing, "+".join(tau), f"s{len(existing)}")
    if new_id is not None:
        if new_id in existing:
            raise SubdivisionError(f"ray id {new_id!r} already exists")
        existing.add(new_id)
    image = tuple(int(x) for x in combine(weights, complex_.images(tau)))

    new_cones: list[Cone] = []
    for cone in complex_.maximal_cones:
        if set(tau) <= set(cone):
            for t in tau:
                new_cones.append(make_cone([r for r in cone if r != t] + [rid]))
        else:
            new_cones.append(cone)

    fine = ConicalComplex(
        ambient_dim=complex_.ambient_dim,
        rays=complex_.rays + (Ray(rid, image),),
        maximal_cones=tuple(new_cones),
        inner_product=complex_.inner_product,
        name=complex_.name,
    )
    ray_map = {r: Point.of_ray(r) for r in complex_.ray_ids}
    ray_map[rid] = Point(tau, tuple(Fraction(w) for w in weights))
    log.debug("stellar subdivision of %s at new ray %s", cone_key(tau), rid)
    return Subdivision(fine, complex_, ray_map)


def bisect_maximal_cones(
    complex_: ConicalComplex, cones: Iterable[Cone] | None = None
) -> Subdivision:
    """Stellar subdivision of the selected maximal cones at the sum of their rays.

    The selected cones are split simultaneously; each new ray only lies in its
    own cone, so the splits do not interact.
    """
    maximal = set(complex_.maximal_cones)
    selected = set(complex_.maximal_cones if cones is None else cones)
    for cone in selected:
        if cone not in maximal:
            raise SubdivisionError("only maximal cones can be bisected", cone=cone_key(cone))
        if len(cone) == 1:
            raise SubdivisionError("a ray has no interior to split", cone=cone_key(cone))

    existing = set(complex_.ray_ids)
    new_rays: list[Ray] = []
    new_cones: list[Cone] = []
    ray_map = {r: Point.of_ray(r) for r in complex_.ray_ids}
    for cone in complex_.maximal_cones:
        if cone not in selected:
            new_cones.append(cone)
            continue
        rid = _fresh_id(existing, "+".join(cone), f"b{len(existing)}")
        image = tuple(sum(col) for col in zip(*complex_.images(cone), strict=True))
        new_rays.append(Ray(rid, image))
        ray_map[rid] = Point(cone, tuple(Fraction(1) for _ in cone))
        for t in cone:
            new_cones.append(make_cone([r for r in cone if r != t] + [rid]))

    fine = ConicalComplex(
        ambient_dim=complex_.ambient_dim,
        rays=complex_.rays + tuple(new_rays),
        maximal_cones=tuple(new_cones),
        inner_product=complex_.inner_product,
        name=complex_.name,
    )
    log.debug("bisected %d maximal cones, %d rays now", len(selected), len(fine.rays))
    return Subdivision(fine, complex_, ray_map)


def refinement_ladder(complex_: ConicalComplex, steps: int) -> list[Subdivision]:
    """Level 0 is the identity; level k bisects every maximal cone of level k-1."""
    if steps < 0:
        raise SubdivisionError("a ladder needs a nonnegative number of steps")
    ladder = [Subdivision.identity(complex_)]
    for _ in range(steps):
        ladder.append(bisect_maximal_cones(ladder[-1].fine))
    return ladder
