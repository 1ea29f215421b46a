"""Minkowski weights in their lattice and Euclidean flavors.

Lattice weights carry exact rationals and are balanced when the weighted sum
of lattice normals falls back into the face's span; Euclidean weights carry
floats and are balanced when the weighted sum of unit normals vanishes.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from tropdeg.core.complex import (
    APEX,
    Cone,
    ConicalComplex,
    Subdivision,
    cone_key,
    cone_volume,
    euclidean_normal,
    lattice_normal,
)
from tropdeg.core.exceptions import (
    ComplexMismatchError,
    DimensionMismatchError,
    FlavorMismatchError,
    NotBalancedError,
    NotPositiveError,
)
from tropdeg.core.linalg import as_rational, solve_in_span
from tropdeg.core.logging_config import get_logger

log = get_logger("weights")

Scalar = Fraction | float

DEFAULT_TOL = 1e-9


class Flavor(str, Enum):
    """Which balancing condition and product a weight belongs to."""

    LATTICE = "lattice"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True, eq=False)
class Weight:
    """A function on the k-dimensional cones of a complex.

    Missing cones have value zero. Lattice weights hold exact rationals;
    Euclidean weights hold floats, except in dimension 0 where normalization
    keeps the exact value.
    """

    complex: ConicalComplex
    dim: int
    values: Mapping[Cone, Scalar]
    flavor: Flavor = Flavor.LATTICE

    def __post_init__(self) -> None:
        if not 0 <= self.dim <= self.complex.dim:
            raise DimensionMismatchError(
                f"no {self.dim}-dimensional cones in a {self.complex.dim}-dimensional complex"
            )
        cleaned: dict[Cone, Scalar] = {}
        for cone, value in self.values.items():
            if len(cone) != self.dim:
                raise DimensionMismatchError(
                    f"cone {cone_key(cone) or 'apex'} has the wrong dimension",
                    self.dim,
                    len(cone),
                )
            self.complex.require_face(cone)
            if self.flavor is Flavor.LATTICE:
                try:
                    cleaned[cone] = as_rational(value)
                except TypeError as e:
                    raise FlavorMismatchError(
                        "lattice weights need exact rational values"
                    ) from e
            elif isinstance(value, (Fraction, int)) and not isinstance(value, bool):
                cleaned[cone] = Fraction(value) if self.dim == 0 else float(value)
            else:
                cleaned[cone] = float(value)
        object.__setattr__(self, "values", cleaned)

    @classmethod
    def zero(cls, complex_: ConicalComplex, dim: int, flavor: Flavor = Flavor.LATTICE) -> Weight:
        return cls(complex_, dim, {}, flavor)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values.values())

    def value(self, cone: Cone) -> Scalar:
        if cone in self.values:
            return self.values[cone]
        return Fraction(0) if self.flavor is Flavor.LATTICE else 0.0

    def cones(self) -> tuple[Cone, ...]:
        return self.complex.faces_of_dim(self.dim)

    def items(self) -> list[tuple[Cone, Scalar]]:
        """All k-cones with their values, in canonical order."""
        return [(c, self.value(c)) for c in self.cones()]

    def support(self) -> list[Cone]:
        return [c for c, v in self.items() if v != 0]

    def _check_compatible(self, other: Weight) -> None:
        if other.complex is not self.complex:
            raise ComplexMismatchError("weights live on different complexes")
        if other.dim != self.dim or other.flavor is not self.flavor:
            raise FlavorMismatchError("weights differ in dimension or flavor")

    def __add__(self, other: Weight) -> Weight:
        self._check_compatible(other)
        keys = set(self.values) | set(other.values)
        return Weight(
            self.complex,
            self.dim,
            {c: self.value(c) + other.value(c) for c in keys},
            self.flavor,
        )

    def scale(self, factor: Scalar) -> Weight:
        return Weight(
            self.complex,
            self.dim,
            {c: v * factor for c, v in self.values.items()},
            self.flavor,
        )

    def max_difference(self, other: Weight) -> float:
        """Largest componentwise absolute difference."""
        if other.complex is not self.complex or other.dim != self.dim:
            raise ComplexMismatchError("weights are not comparable")
        return max(
            (abs(float(self.value(c)) - float(other.value(c))) for c in self.cones()),
            default=0.0,
        )


@dataclass
class BalancingReport:
    """Outcome of :func:`is_balanced`.

    Attributes:
        balanced: Whether the balancing condition holds at every face.
        face: First failing (k-1)-face, if any.
        residual: Size of the failing residual (Euclidean) or ``None``.
    """

    balanced: bool
    face: Cone | None = None
    residual: float | None = None

    def __bool__(self) -> bool:
        return self.balanced


def _lattice_residual_ok(w: Weight, tau: Cone) -> bool:
    c = w.complex
    total = [Fraction(0)] * c.ambient_dim
    nonzero = False
    for sigma in c.cofaces.get(tau, ()):
        value = w.value(sigma)
        if value == 0:
            continue
        nonzero = True
        for i, x in enumerate(lattice_normal(c, tau, sigma)):
            total[i] += value * x
    if not nonzero:
        return True
    return solve_in_span(c.images(tau), total) is not None


def _euclidean_residual(w: Weight, tau: Cone) -> tuple[float, float]:
    c = w.complex
    total = np.zeros(c.ambient_dim)
    scale = 0.0
    for sigma in c.cofaces.get(tau, ()):
        value = float(w.value(sigma))
        if value == 0.0:
            continue
        total += value * euclidean_normal(c, tau, sigma)
        scale = max(scale, abs(value))
    return float(np.linalg.norm(total)), scale


def is_balanced(w: Weight, tol: float = DEFAULT_TOL) -> BalancingReport:
    """Check the balancing condition at every (k-1)-face.

    Lattice weights are checked exactly; Euclidean weights at absolute
    tolerance ``tol`` scaled by the largest summand.
    """
    if w.dim == 0:
        return BalancingReport(True)
    for tau in w.complex.faces_of_dim(w.dim - 1):
        if w.flavor is Flavor.LATTICE:
            if not _lattice_residual_ok(w, tau):
                log.debug("lattice balancing fails at %s", cone_key(tau) or "apex")
                return BalancingReport(False, tau)
        else:
            residual, scale = _euclidean_residual(w, tau)
            if residual > tol * max(1.0, scale):
                log.debug(
                    "euclidean balancing fails at %s (residual %.3e)",
                    cone_key(tau) or "apex",
                    residual,
                )
                return BalancingReport(False, tau, residual)
    return BalancingReport(True)


def require_balanced(w: Weight, tol: float = DEFAULT_TOL) -> None:
    report = is_balanced(w, tol)
    if not report.balanced:
        raise NotBalancedError(
            f"{w.flavor.value} weight of dimension {w.dim} is not balanced",
            face=cone_key(report.face or APEX),
        )


def pull_back(w: Weight, s: Subdivision) -> Weight:
    """Pull a weight back along a subdivision.

    A fine cone inherits the value of its minimal coarse cone when both have
    the same dimension, and gets zero otherwise.
    """
    if w.complex is not s.coarse:
        raise ComplexMismatchError("weight does not live on the subdivided complex")
    values: dict[Cone, Scalar] = {}
    for sigma in s.fine.faces_of_dim(w.dim):
        carrier = s.carrier(sigma)
        if len(carrier) == w.dim:
            value = w.value(carrier)
            if value != 0:
                values[sigma] = value
    return Weight(s.fine, w.dim, values, w.flavor)


def degree(w: Weight) -> Scalar:
    """Degree of a zero-dimensional weight: its value at the apex."""
    if w.dim != 0:
        raise DimensionMismatchError("degree is only defined for 0-dimensional weights", 0, w.dim)
    return w.value(APEX)


def normalize(w: Weight) -> Weight:
    """Turn a lattice weight into a Euclidean one by multiplying with covolumes."""
    if w.flavor is Flavor.EUCLIDEAN:
        return w
    if w.dim == 0:
        return Weight(w.complex, 0, dict(w.values), Flavor.EUCLIDEAN)
    return Weight(
        w.complex,
        w.dim,
        {c: cone_volume(w.complex, c) * float(v) for c, v in w.values.items()},
        Flavor.EUCLIDEAN,
    )


def is_positive(w: Weight, tol: float = 0.0) -> bool:
    """True when no value is below ``-tol``."""
    return all(v >= -tol for v in w.values.values())


def fundamental_cycle(complex_: ConicalComplex, flavor: Flavor = Flavor.LATTICE) -> Weight:
    """All-ones weight on the maximal cones (normalized for the Euclidean flavor)."""
    ones = Weight(complex_, complex_.dim, {c: Fraction(1) for c in complex_.maximal_cones})
    return normalize(ones) if flavor is Flavor.EUCLIDEAN else ones


@dataclass(frozen=True, eq=False)
class TropicalCycle:
    """A balanced weight chosen as representative of its class."""

    representative: Weight

    def __post_init__(self) -> None:
        require_balanced(self.representative)

    @property
    def complex(self) -> ConicalComplex:
        return self.representative.complex

    def pull_back(self, s: Subdivision) -> TropicalCycle:
        return TropicalCycle(pull_back(self.representative, s))


@dataclass(frozen=True, eq=False)
class BalancedSpace:
    """A complex with a balanced top-dimensional weight, positive on every maximal cone."""

    cycle: Weight

    def __post_init__(self) -> None:
        w = self.cycle
        if w.dim != w.complex.dim:
            raise DimensionMismatchError(
                "the cycle of a balanced space must be top-dimensional", w.complex.dim, w.dim
            )
        if any(w.value(c) <= 0 for c in w.complex.maximal_cones):
            raise NotPositiveError("a balanced space needs positive weight on every maximal cone")
        require_balanced(w)

    @classmethod
    def of(
        cls, complex_: ConicalComplex, weights: Mapping[Cone, Scalar] | None = None
    ) -> BalancedSpace:
        """Balanced space from explicit weights, or the fundamental cycle."""
        if weights is None:
            return cls(fundamental_cycle(complex_))
        return cls(Weight(complex_, complex_.dim, weights))

    @property
    def complex(self) -> ConicalComplex:
        return self.cycle.complex

    @property
    def dim(self) -> int:
        return self.cycle.dim

    def lattice_cycle(self) -> Weight:
        if self.cycle.flavor is not Flavor.LATTICE:
            raise FlavorMismatchError("this balanced space only has a Euclidean cycle")
        return self.cycle

    def normalized(self) -> Weight:
        return normalize(self.cycle)

    def pull_back(self, s: Subdivision) -> BalancedSpace:
        return BalancedSpace(pull_back(self.cycle, s))


def weight_from_values(
    complex_: ConicalComplex,
    dim: int,
    values: Iterable[Scalar],
    flavor: Flavor = Flavor.LATTICE,
) -> Weight:
    """Weight from values listed in canonical cone order."""
    cones = complex_.faces_of_dim(dim)
    vals = list(values)
    if len(vals) != len(cones):
        raise DimensionMismatchError("one value per cone is required", len(cones), len(vals))
    return Weight(complex_, dim, dict(zip(cones, vals, strict=True)), flavor)
