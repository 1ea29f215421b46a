"""Tropical intersection products and the laws tying them together.

The Euclidean product pairs a PL function with a Euclidean weight:

    (phi . c)(tau) = sum over sigma > tau of  -phi_sigma(unit normal) * c(sigma)

and the lattice product uses lattice normals plus a correction term that
brings the weighted sum of normals back into span(tau). Both lower the
dimension of the weight by one.
"""

from __future__ import annotations

import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from tropdeg.core.complex import (
    APEX,
    Cone,
    Subdivision,
    cone_key,
    facet_data,
)
from tropdeg.core.exceptions import (
    ComplexMismatchError,
    DimensionMismatchError,
    FlavorMismatchError,
    NotBalancedError,
    NotPositiveError,
)
from tropdeg.core.functions import (
    ConicFunction,
    PLFunction,
    pull_back_fn,
    push_forward_fn,
    sphere_value,
)
from tropdeg.core.linalg import solve_in_span
from tropdeg.core.logging_config import get_logger
from tropdeg.core.weights import (
    DEFAULT_TOL,
    BalancedSpace,
    Flavor,
    Scalar,
    Weight,
    degree,
    is_positive,
    normalize,
    pull_back,
    require_balanced,
)

log = get_logger("intersection")

LiftingShift = Callable[[Cone, Cone], Sequence[int]]


def _extra_ray(tau: Cone, sigma: Cone) -> str:
    (extra,) = set(sigma) - set(tau)
    return extra


def _check_operands(phi: PLFunction, w: Weight) -> None:
    if phi.complex is not w.complex:
        raise ComplexMismatchError("function and weight live on different complexes")
    if w.dim == 0:
        raise DimensionMismatchError("cannot intersect a 0-dimensional weight")


def normal_value(phi: PLFunction, tau: Cone, sigma: Cone) -> float:
    """``phi_sigma`` at the Euclidean unit normal of sigma over tau."""
    if not tau:
        return sphere_value(phi, sigma[0])
    data = facet_data(phi.complex, tau, sigma)
    numerator = phi.ray_values[data.extra] - sum(
        (a * phi.ray_values[t] for a, t in zip(data.coefficients, tau, strict=True)),
        Fraction(0),
    )
    return float(numerator) / data.perp_norm


def euclidean_product(
    phi: PLFunction, w: Weight, check: bool = True, tol: float = DEFAULT_TOL
) -> Weight:
    """Euclidean intersection product ``phi . w``.

    Args:
        phi: PL function on ``w``'s complex (exact or float values).
        w: Euclidean weight, normally balanced.
        check: Verify that the result is balanced.
        tol: Tolerance of that verification.
    """
    _check_operands(phi, w)
    if w.flavor is not Flavor.EUCLIDEAN:
        raise FlavorMismatchError("the Euclidean product needs a normalized weight")
    c = w.complex
    values: dict[Cone, Scalar] = {}
    for tau in c.faces_of_dim(w.dim - 1):
        terms = []
        for sigma in c.cofaces.get(tau, ()):
            value = w.value(sigma)
            if value == 0:
                continue
            terms.append(-normal_value(phi, tau, sigma) * float(value))
        if terms:
            values[tau] = sum(terms)
    result = Weight(c, w.dim - 1, values, Flavor.EUCLIDEAN)
    if check:
        require_balanced(result, tol)
    return result


def lattice_product(
    phi: PLFunction, w: Weight, lifting_shift: LiftingShift | None = None
) -> Weight:
    """Lattice intersection product ``phi (.) w``, exact over Q.

    The lifting of the lattice normal of sigma over tau is the image of
    sigma's extra ray, optionally moved by ``lifting_shift(tau, sigma)``
    (integer coefficients on tau's rays); the result does not depend on it.

    Raises:
        NotBalancedError: If the weighted normals at some face do not return
            to its span.
    """
    _check_operands(phi, w)
    if w.flavor is not Flavor.LATTICE:
        raise FlavorMismatchError("the lattice product needs a lattice weight")
    if not phi.is_exact:
        raise FlavorMismatchError("the lattice product needs exact ray values")
    c = w.complex
    values: dict[Cone, Scalar] = {}
    for tau in c.faces_of_dim(w.dim - 1):
        tau_images = c.images(tau)
        total = [Fraction(0)] * c.ambient_dim
        value = Fraction(0)
        touched = False
        for sigma in c.cofaces.get(tau, ()):
            weight = w.value(sigma)
            if weight == 0:
                continue
            touched = True
            extra = _extra_ray(tau, sigma)
            lift = list(c.image(extra))
            lift_value = Fraction(phi.ray_values[extra])
            if lifting_shift is not None:
                shift = lifting_shift(tau, sigma)
                for s, t, t_image in zip(shift, tau, tau_images, strict=True):
                    lift_value += s * phi.ray_values[t]
                    lift = [x + s * y for x, y in zip(lift, t_image, strict=True)]
            value -= weight * lift_value
            for i, x in enumerate(lift):
                total[i] += weight * x
        if not touched:
            continue
        coefficients = solve_in_span(tau_images, total)
        if coefficients is None:
            raise NotBalancedError("lattice weight is not balanced", face=cone_key(tau))
        value += sum(
            (b * phi.ray_values[t] for b, t in zip(coefficients, tau, strict=True)),
            Fraction(0),
        )
        if value != 0:
            values[tau] = value
    return Weight(c, w.dim - 1, values, Flavor.LATTICE)


def random_lifting(rng: random.Random, bound: int = 3) -> LiftingShift:
    """Random integer shifts of the liftings, one per (tau, sigma) pair."""
    chosen: dict[tuple[Cone, Cone], list[int]] = {}

    def _shift(tau: Cone, sigma: Cone) -> list[int]:
        key = (tau, sigma)
        if key not in chosen:
            chosen[key] = [rng.randint(-bound, bound) for _ in tau]
        return chosen[key]

    return _shift


def product(phi: PLFunction, w: Weight) -> Weight:
    """Product in the flavor of ``w``."""
    if w.flavor is Flavor.LATTICE:
        return lattice_product(phi, w)
    return euclidean_product(phi, w)


def iterated_product(functions: Sequence[PLFunction], w: Weight) -> Weight:
    """``phi_1 . (phi_2 . ( ... (phi_r . w)))``."""
    if len(functions) > w.dim:
        raise DimensionMismatchError(
            "more functions than the weight's dimension", w.dim, len(functions)
        )
    result = w
    for phi in reversed(functions):
        result = product(phi, result)
    return result


def _space_cycle(space: BalancedSpace, flavor: Flavor) -> Weight:
    if flavor is Flavor.LATTICE:
        return space.lattice_cycle()
    return space.normalized()


def top_number(
    functions: Sequence[PLFunction],
    space: BalancedSpace,
    flavor: Flavor = Flavor.LATTICE,
) -> Scalar:
    """Top intersection number of ``n`` PL functions on an ``n``-dimensional space."""
    if len(functions) != space.dim:
        raise DimensionMismatchError("wrong number of functions", space.dim, len(functions))
    for phi in functions:
        if phi.complex is not space.complex:
            raise ComplexMismatchError("pull all functions back to one complex first")
    return degree(iterated_product(functions, _space_cycle(space, flavor)))


def mixed_top_number(
    psi: ConicFunction | PLFunction,
    functions: Sequence[PLFunction],
    space: BalancedSpace,
) -> float:
    """Euclidean top number of a conical function with ``n - 1`` PL functions.

    The conical function enters through its restriction to the rays, placed
    outermost: ``deg(psi . phi_1 ... phi_{n-1} . [X]^)``.
    """
    if len(functions) != space.dim - 1:
        raise DimensionMismatchError(
            "wrong number of PL functions", space.dim - 1, len(functions)
        )
    restricted = psi.restrict(space.complex) if isinstance(psi, ConicFunction) else psi
    return float(top_number([restricted, *functions], space, Flavor.EUCLIDEAN))


# ---------------------------------------------------------------------------
# Laws
# ---------------------------------------------------------------------------


@dataclass
class LawReport:
    """Outcome of a consistency check.

    Attributes:
        holds: Whether the identity holds (exactly or within tolerance).
        defect: Largest observed discrepancy.
        face: Cone where the largest discrepancy occurs.
    """

    holds: bool
    defect: float = 0.0
    face: str | None = None

    def __bool__(self) -> bool:
        return self.holds


def compare_weights(
    lhs: Weight, rhs: Weight, tol: float = DEFAULT_TOL, relative: bool = False
) -> LawReport:
    """Componentwise comparison; exact when both sides are exact."""
    if lhs.complex is not rhs.complex or lhs.dim != rhs.dim:
        raise ComplexMismatchError("weights are not comparable")
    exact = lhs.is_exact and rhs.is_exact
    worst, worst_face, holds = 0.0, None, True
    for cone in lhs.cones():
        a, b = lhs.value(cone), rhs.value(cone)
        if exact:
            ok = a == b
            diff = float(abs(Fraction(a) - Fraction(b)))
        else:
            diff = abs(float(a) - float(b))
            scale = max(1.0, abs(float(a)), abs(float(b))) if relative else 1.0
            ok = diff <= tol * scale
        if diff > worst or (not ok and holds):
            worst, worst_face = diff, cone_key(cone) or "apex"
        holds = holds and ok
    return LawReport(holds, worst, worst_face)


def normalization_bridge_check(
    phi: PLFunction, w: Weight, tol: float = DEFAULT_TOL
) -> LawReport:
    """Normalizing the lattice product equals the Euclidean product of the normalization."""
    lhs = normalize(lattice_product(phi, w))
    rhs = euclidean_product(phi, normalize(w), tol=tol)
    report = compare_weights(lhs, rhs, tol, relative=True)
    log.debug("normalization bridge: holds=%s defect=%.3e", report.holds, report.defect)
    return report


def symmetry_check(
    phi1: PLFunction, phi2: PLFunction, w: Weight, tol: float = DEFAULT_TOL
) -> LawReport:
    """``phi1 . (phi2 . w) == phi2 . (phi1 . w)``."""
    lhs = product(phi1, product(phi2, w))
    rhs = product(phi2, product(phi1, w))
    return compare_weights(lhs, rhs, tol, relative=True)


def subdivision_compatibility_check(
    phi: PLFunction, w: Weight, s: Subdivision, tol: float = DEFAULT_TOL
) -> LawReport:
    """Pull-back of a product equals the product of pull-backs."""
    lhs = pull_back(product(phi, w), s)
    rhs = product(pull_back_fn(phi, s), pull_back(w, s))
    return compare_weights(lhs, rhs, tol, relative=True)


def projection_formula_check(
    phi: PLFunction, c1: Weight, s: Subdivision, tol: float = DEFAULT_TOL
) -> LawReport:
    """``f*(f_* phi . c1) == phi . f* c1`` for a 1-dimensional weight on the coarse side."""
    if c1.dim != 1:
        raise DimensionMismatchError(
            "the projection formula is checked on 1-dimensional weights", 1, c1.dim
        )
    if phi.complex is not s.fine or c1.complex is not s.coarse:
        raise ComplexMismatchError("function must be fine and weight coarse")
    lhs = pull_back(product(push_forward_fn(phi, s), c1), s)
    rhs = product(phi, pull_back(c1, s))
    return compare_weights(lhs, rhs, tol, relative=True)


def monotonicity_check(
    phi1: PLFunction, phi2: PLFunction, c: Weight, tol: float = DEFAULT_TOL
) -> LawReport:
    """For ``phi1 >= phi2`` and positive 1-dimensional ``c``, ``phi1 . c <= phi2 . c``."""
    if c.dim != 1:
        raise DimensionMismatchError("monotonicity is checked on 1-dimensional weights", 1, c.dim)
    if not phi1.dominates(phi2):
        raise ComplexMismatchError("the first function must dominate the second")
    if not is_positive(c):
        raise NotPositiveError("monotonicity needs a positive weight")
    lhs = degree(product(phi1, c))
    rhs = degree(product(phi2, c))
    gap = float(lhs) - float(rhs)
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        holds = lhs <= rhs
    else:
        holds = gap <= tol * max(1.0, abs(float(rhs)))
    return LawReport(holds, max(gap, 0.0), "apex")


def lifting_independence_check(
    phi: PLFunction, w: Weight, rng: random.Random, bound: int = 3
) -> LawReport:
    """Lattice product with randomly shifted liftings equals the canonical one."""
    lhs = lattice_product(phi, w)
    rhs = lattice_product(phi, w, random_lifting(rng, bound))
    return compare_weights(lhs, rhs)


__all__ = [
    "APEX",
    "LawReport",
    "LiftingShift",
    "compare_weights",
    "euclidean_product",
    "iterated_product",
    "lattice_product",
    "lifting_independence_check",
    "mixed_top_number",
    "monotonicity_check",
    "normal_value",
    "normalization_bridge_check",
    "product",
    "projection_formula_check",
    "random_lifting",
    "subdivision_compatibility_check",
    "symmetry_check",
    "top_number",
]
