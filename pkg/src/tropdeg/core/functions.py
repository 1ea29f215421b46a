"""Piecewise linear and conical functions on complexes.

A PL function on a simplicial complex is determined by its ray values; the
linear form on a cone is reconstructed when needed. Ray values may be exact
(Fractions) or floats, the latter only being meaningful for the Euclidean
product.
"""

from __future__ import annotations

import math
import random
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

from tropdeg.core.complex import (
    Cone,
    ConicalComplex,
    Point,
    Subdivision,
    cone_key,
    point_image,
    ray_norm,
)
from tropdeg.core.exceptions import (
    ComplexMismatchError,
    FlavorMismatchError,
    SubdivisionError,
)
from tropdeg.core.linalg import RatMatrix, RatVector, as_rational
from tropdeg.core.logging_config import get_logger

if TYPE_CHECKING:
    from tropdeg.core.weights import BalancedSpace, Weight

log = get_logger("functions")


def _as_scalar(value: object) -> Fraction | float:
    if isinstance(value, float):
        return value
    return as_rational(value)


@dataclass(frozen=True, eq=False)
class PLFunction:
    """Piecewise linear function given by its values on the rays."""

    complex: ConicalComplex
    ray_values: Mapping[str, Fraction | float]

    def __post_init__(self) -> None:
        values = {r: _as_scalar(v) for r, v in self.ray_values.items()}
        missing = set(self.complex.ray_ids) - set(values)
        extra = set(values) - set(self.complex.ray_ids)
        if missing or extra:
            raise ComplexMismatchError(
                f"function does not match the complex's rays "
                f"(missing {sorted(missing)}, unknown {sorted(extra)})"
            )
        object.__setattr__(self, "ray_values", values)

    @classmethod
    def zero(cls, complex_: ConicalComplex) -> PLFunction:
        return cls(complex_, {r: Fraction(0) for r in complex_.ray_ids})

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.ray_values.values())

    def value(self, ray_id: str) -> Fraction | float:
        return self.ray_values[ray_id]

    def values_on(self, cone: Cone) -> list[Fraction | float]:
        return [self.ray_values[r] for r in cone]

    def _check(self, other: PLFunction) -> None:
        if other.complex is not self.complex:
            raise ComplexMismatchError("functions live on different complexes")

    def __add__(self, other: PLFunction) -> PLFunction:
        self._check(other)
        return PLFunction(
            self.complex, {r: v + other.ray_values[r] for r, v in self.ray_values.items()}
        )

    def __sub__(self, other: PLFunction) -> PLFunction:
        return self + other.scale(-1)

    def __neg__(self) -> PLFunction:
        return self.scale(-1)

    def scale(self, factor: Fraction | float | int) -> PLFunction:
        return PLFunction(self.complex, {r: v * factor for r, v in self.ray_values.items()})

    def equals(self, other: PLFunction) -> bool:
        """Exact equality of ray values on the same complex."""
        return other.complex is self.complex and all(
            other.ray_values[r] == v for r, v in self.ray_values.items()
        )

    def dominates(self, other: PLFunction) -> bool:
        """``self >= other`` everywhere (equivalently, on every ray)."""
        self._check(other)
        return all(v >= other.ray_values[r] for r, v in self.ray_values.items())

    def __repr__(self) -> str:
        return f"PLFunction({dict(sorted(self.ray_values.items()))})"


def linear_combination(
    functions: list[PLFunction], coefficients: list[Fraction | float | int]
) -> PLFunction:
    if not functions or len(functions) != len(coefficients):
        raise ComplexMismatchError("need one coefficient per function")
    total = functions[0].scale(coefficients[0])
    for f, c in zip(functions[1:], coefficients[1:], strict=True):
        total = total + f.scale(c)
    return total


def evaluate(phi: PLFunction, point: Point) -> Fraction | float:
    """Value of a PL function at a located point: linear in the coefficients."""
    phi.complex.require_face(point.cone)
    return sum(
        (c * phi.ray_values[r] for r, c in zip(point.cone, point.coefficients, strict=True)),
        Fraction(0),
    )


def sphere_value(phi: PLFunction, ray_id: str) -> float:
    """Value of ``phi`` at the unit vector of a ray."""
    return float(phi.ray_values[ray_id]) / ray_norm(phi.complex, ray_id)


def sup_on_rays(phi: PLFunction) -> float:
    """Largest ``|phi|`` over the unit ray vectors."""
    return max((abs(sphere_value(phi, r)) for r in phi.complex.ray_ids), default=0.0)


def cone_form(phi: PLFunction, sigma: Cone) -> RatVector:
    """Ambient linear form agreeing with ``phi`` on a full-dimensional cone.

    Raises:
        FlavorMismatchError: If ``phi`` has float values.
        ComplexMismatchError: If the cone is not full-dimensional.
    """
    c = phi.complex
    if len(sigma) != c.ambient_dim:
        raise ComplexMismatchError(
            f"cone {cone_key(sigma)} is not full-dimensional in the ambient space"
        )
    if not phi.is_exact:
        raise FlavorMismatchError("cone forms need exact ray values")
    return RatMatrix.from_rows(c.images(sigma)).solve(phi.values_on(sigma))


# ---------------------------------------------------------------------------
# Divisors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DivisorView:
    """Boundary divisor: a multiplicity for each ray (missing rays are 0)."""

    complex: ConicalComplex
    coefficients: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        unknown = set(self.coefficients) - set(self.complex.ray_ids)
        if unknown:
            raise ComplexMismatchError(f"divisor uses unknown rays {sorted(unknown)}")
        object.__setattr__(
            self,
            "coefficients",
            {r: as_rational(v) for r, v in self.coefficients.items()},
        )

    def coefficient(self, ray_id: str) -> Fraction:
        return self.coefficients.get(ray_id, Fraction(0))

    def __add__(self, other: DivisorView) -> DivisorView:
        if other.complex is not self.complex:
            raise ComplexMismatchError("divisors live on different complexes")
        return DivisorView(
            self.complex,
            {r: self.coefficient(r) + other.coefficient(r) for r in self.complex.ray_ids},
        )

    def scale(self, factor: Fraction | int) -> DivisorView:
        return DivisorView(self.complex, {r: v * factor for r, v in self.coefficients.items()})


def from_divisor(d: DivisorView) -> PLFunction:
    """``phi_D(v) = -ord_v(D)``."""
    return PLFunction(d.complex, {r: -d.coefficient(r) for r in d.complex.ray_ids})


def to_divisor(phi: PLFunction) -> DivisorView:
    if not phi.is_exact:
        raise FlavorMismatchError("only exact functions correspond to divisors")
    return DivisorView(
        phi.complex, {r: -Fraction(v) for r, v in phi.ray_values.items() if v != 0}
    )


# ---------------------------------------------------------------------------
# Pull-back / push-forward
# ---------------------------------------------------------------------------


def pull_back_fn(phi: PLFunction, s: Subdivision) -> PLFunction:
    """Compose with the subdivision map: evaluate at each fine ray's location."""
    if phi.complex is not s.coarse:
        raise ComplexMismatchError("function does not live on the subdivided complex")
    return PLFunction(s.fine, {r: evaluate(phi, s.point(r)) for r in s.fine.ray_ids})


def push_forward_fn(phi: PLFunction, s: Subdivision) -> PLFunction:
    """Keep the values on the 1-skeleton of the coarse complex."""
    if phi.complex is not s.fine:
        raise ComplexMismatchError("function does not live on the fine complex")
    values: dict[str, Fraction | float] = {}
    for r in s.fine.ray_ids:
        p = s.point(r)
        if len(p.carrier) == 1:
            coarse_ray = p.carrier[0]
            scale = p.as_mapping()[coarse_ray]
            values[coarse_ray] = phi.ray_values[r] / scale
    missing = set(s.coarse.ray_ids) - set(values)
    if missing:
        raise SubdivisionError(f"coarse rays {sorted(missing)} have no fine counterpart")
    return PLFunction(s.coarse, values)


# ---------------------------------------------------------------------------
# Conical functions
# ---------------------------------------------------------------------------


Evaluator = Callable[[ConicalComplex, Point], float]


@dataclass(frozen=True)
class ConicFunction:
    """A positively homogeneous function on the support of a complex.

    Evaluated at located points, so it can be restricted to any refinement.
    """

    evaluator: Evaluator
    name: str = "conic"

    def __call__(self, complex_: ConicalComplex, point: Point) -> float:
        return self.evaluator(complex_, point)

    def restrict(self, complex_: ConicalComplex) -> PLFunction:
        """PL function with the same values on the rays of ``complex_``."""
        return PLFunction(
            complex_, {r: float(self(complex_, Point.of_ray(r))) for r in complex_.ray_ids}
        )

    @classmethod
    def negative_norm(cls) -> ConicFunction:
        """``x -> -||x||`` for the complex's inner product."""

        def _evaluate(complex_: ConicalComplex, point: Point) -> float:
            if len(point.cone) == 1 and point.coefficients[0] == 1:
                return -ray_norm(complex_, point.cone[0])
            image = point_image(complex_, point)
            return -math.sqrt(float(complex_.inner_product.pair(image, image)))

        return cls(_evaluate, "negative-norm")

    @classmethod
    def from_pl(cls, phi: PLFunction, s: Subdivision | None = None) -> ConicFunction:
        """View a PL function as a conical function.

        Points on other complexes are pushed to ``phi``'s complex through the
        subdivision ``s`` (whose coarse side must be ``phi.complex``).
        """

        def _evaluate(complex_: ConicalComplex, point: Point) -> float:
            if complex_ is phi.complex:
                return float(evaluate(phi, point))
            if s is None or s.fine is not complex_:
                raise ComplexMismatchError("no route from this complex to the function's")
            return float(evaluate(phi, s.push_point(point)))

        return cls(_evaluate, "pl")


def homogeneity_defect(
    psi: ConicFunction,
    complex_: ConicalComplex,
    rng: random.Random,
    samples: int = 16,
) -> float:
    """Largest ``|psi(t x) - t psi(x)|`` over random located points."""
    worst = 0.0
    cones = complex_.maximal_cones
    for _ in range(samples):
        cone = rng.choice(cones)
        coeffs = tuple(Fraction(rng.randint(1, 20), rng.randint(1, 5)) for _ in cone)
        t = Fraction(rng.randint(1, 30), rng.randint(1, 7))
        x = Point(cone, coeffs)
        tx = Point(cone, tuple(t * c for c in coeffs))
        worst = max(worst, abs(psi(complex_, tx) - float(t) * psi(complex_, x)))
    return worst


# ---------------------------------------------------------------------------
# Concavity
# ---------------------------------------------------------------------------


class ConcavityClass(str, Enum):
    STRONGLY_CONCAVE = "strongly_concave"
    WEAKLY_CONCAVE = "weakly_concave"
    NEITHER = "neither"


@dataclass
class ConcavityReport:
    """Outcome of :func:`concavity_class`.

    Attributes:
        klass: Strongest class established.
        weak: Whether ``phi * [X]`` is positive.
        strong: Result of the min-of-cone-forms test, ``None`` if unavailable.
        concave_for_weights: Whether ``phi * w`` is positive for every
            supplied positive weight, ``None`` when none were supplied.
        witness: Description of the first failure found.
    """

    klass: ConcavityClass
    weak: bool
    strong: bool | None
    concave_for_weights: bool | None = None
    witness: list[str] = field(default_factory=list)


def _strong_samples(c: ConicalComplex) -> list[Point]:
    samples = [Point.of_ray(r) for r in c.ray_ids]
    samples += [Point(edge, (Fraction(1), Fraction(1))) for edge in c.faces_of_dim(2)]
    return samples


def is_strongly_concave(phi: PLFunction) -> tuple[bool | None, str | None]:
    """Min-of-cone-forms test on rays and midpoints of adjacent rays.

    Returns ``(None, reason)`` when some maximal cone is not full-dimensional
    in the ambient space, so that cone forms do not exist.
    """
    c = phi.complex
    if not phi.is_exact:
        return None, "float-valued function"
    if any(len(s) != c.ambient_dim for s in c.maximal_cones):
        return None, "maximal cones are not full-dimensional"
    forms = [cone_form(phi, s) for s in c.maximal_cones]
    for point in _strong_samples(c):
        value = evaluate(phi, point)
        image = point_image(c, point)
        for sigma, form in zip(c.maximal_cones, forms, strict=True):
            if sum((a * x for a, x in zip(form, image, strict=True)), Fraction(0)) < value:
                return False, (
                    f"form of {cone_key(sigma)} undercuts the function at "
                    f"{cone_key(point.cone)}"
                )
    return True, None


def concavity_class(
    phi: PLFunction,
    space: BalancedSpace,
    extra_weights: list[Weight] | None = None,
    tol: float = 1e-9,
) -> ConcavityReport:
    """Classify ``phi`` as strongly concave, weakly concave or neither."""
    from tropdeg.core.intersection import euclidean_product
    from tropdeg.core.weights import is_positive, normalize

    if phi.complex is not space.complex:
        raise ComplexMismatchError("function and balanced space differ")
    witness: list[str] = []

    weak_cycle = euclidean_product(phi, space.normalized())
    weak = is_positive(weak_cycle, tol)
    if not weak:
        witness.append("product with the fundamental cycle has a negative value")

    strong, reason = is_strongly_concave(phi)
    if strong is None:
        log.warning("strong concavity test unavailable: %s", reason)
    elif not strong and reason:
        witness.append(reason)

    for_weights: bool | None = None
    if extra_weights:
        for_weights = True
        for w in extra_weights:
            if not is_positive(w):
                raise FlavorMismatchError("concavity is tested against positive weights only")
            product = euclidean_product(phi, normalize(w))
            if not is_positive(product, tol):
                for_weights = False
                witness.append(f"negative product with a {w.dim}-dimensional weight")
                break

    if strong:
        klass = ConcavityClass.STRONGLY_CONCAVE
    elif weak:
        klass = ConcavityClass.WEAKLY_CONCAVE
    else:
        klass = ConcavityClass.NEITHER
    log.info("concavity class: %s", klass.value)
    return ConcavityReport(klass, weak, strong, for_weights, witness)


def random_function(
    complex_: ConicalComplex, rng: random.Random, low: int = -5, high: int = 5
) -> PLFunction:
    """PL function with random small integer ray values."""
    return PLFunction(complex_, {r: Fraction(rng.randint(low, high)) for r in complex_.ray_ids})

