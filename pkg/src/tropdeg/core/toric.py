"""Toric oracle: polytopes of divisors, mixed volumes and lattice points.

This module shares no arithmetic with the intersection engine
beyond reading the fan: polytope vertices come from exact facet
intersections, volumes from a convex-hull triangulation with exact
determinants, and lattice points from brute-force enumeration.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from tropdeg.core.complex import ConicalComplex
from tropdeg.core.exceptions import (
    DimensionMismatchError,
    OracleError,
    OracleMismatchError,
)
from tropdeg.core.functions import DivisorView, from_divisor
from tropdeg.core.intersection import lattice_product, top_number
from tropdeg.core.logging_config import get_logger
from tropdeg.core.weights import BalancedSpace, Flavor, fundamental_cycle

log = get_logger("toric")

DEFAULT_MAX_BOX_POINTS = 10_000_000
HS_BAND_CONSTANT = 10

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


# Exact arithmetic of the oracle. It is kept apart from tropdeg.core.linalg so
# that the two sides of a degree comparison share no kernel.


def _dot(u: Sequence[Fraction | int], v: Sequence[Fraction | int]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v, strict=True)), Fraction(0))


def _det(rows: Sequence[Sequence[Fraction | int]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination on integer rows.

    Each row is first cleared of denominators; the product of those row
    scales divides the integer determinant back out.
    """
    n = len(rows)
    if n == 0:
        return Fraction(1)
    scale = 1
    a: list[list[int]] = []
    for row in rows:
        fractions = [Fraction(x) for x in row]
        if len(fractions) != n:
            raise DimensionMismatchError("determinant of a non-square matrix", n, len(fractions))
        lcm = math.lcm(*(x.denominator for x in fractions))
        a.append([int(x * lcm) for x in fractions])
        scale *= lcm
    sign, previous = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
        previous = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], scale)


def _solve(rows: Sequence[Sequence[Fraction | int]], rhs: Sequence[Fraction]) -> RatVector | None:
    """Cramer's rule for a small square system; ``None`` when it is singular."""
    det = _det(rows)
    if det == 0:
        return None
    solution = []
    for col in range(len(rows)):
        replaced = [
            [rhs[i] if j == col else x for j, x in enumerate(row)] for i, row in enumerate(rows)
        ]
        solution.append(_det(replaced) / det)
    return tuple(solution)


@dataclass(frozen=True, eq=False)
class Polytope:
    """``{m : <m, v_i> >= -a_i}`` with integer normals ``v_i``."""

    normals: tuple[IntVector, ...]
    offsets: tuple[Fraction, ...]
    dim: int

    @classmethod
    def from_divisor(cls, d: DivisorView) -> Polytope:
        c = d.complex
        p = cls(
            tuple(c.image(r) for r in c.ray_ids),
            tuple(d.coefficient(r) for r in c.ray_ids),
            c.ambient_dim,
        )
        p.ensure_bounded()
        return p

    def contains(self, m: Sequence[Fraction | int]) -> bool:
        return all(_dot(m, v) >= -a for v, a in zip(self.normals, self.offsets, strict=True))

    def ensure_bounded(self) -> None:
        """Raise :class:`OracleError` if some coordinate is unbounded."""
        a_ub = -np.asarray(self.normals, dtype=float)
        b_ub = np.asarray([float(a) for a in self.offsets])
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                objective = np.zeros(self.dim)
                objective[i] = sign
                result = linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * self.dim)
                if result.status == 3:
                    raise OracleError("polytope is unbounded; is the fan complete?")
                if result.status == 2:
                    return

    @cached_property
    def vertices(self) -> tuple[RatVector, ...]:
        """Exact vertices: feasible intersections of ``dim`` facet hyperplanes."""
        found: set[RatVector] = set()
        for rows in itertools.combinations(range(len(self.normals)), self.dim):
            m = _solve([self.normals[i] for i in rows], [-self.offsets[i] for i in rows])
            if m is not None and self.contains(m):
                found.add(m)
        return tuple(sorted(found))

    def scaled(self, factor: int | Fraction) -> Polytope:
        return Polytope(self.normals, tuple(a * factor for a in self.offsets), self.dim)


def volume_of_points(points: Sequence[Sequence[Fraction]], dim: int) -> Fraction:
    """Exact volume of the convex hull of rational points.

    Degenerate hulls (too few points, or all in a hyperplane) have volume 0.
    """
    unique = sorted({tuple(Fraction(x) for x in p) for p in points})
    if len(unique) < dim + 1:
        return Fraction(0)
    if dim == 1:
        return max(p[0] for p in unique) - min(p[0] for p in unique)
    try:
        hull = ConvexHull(np.asarray(unique, dtype=float))
    except QhullError:
        return Fraction(0)
    on_hull = [unique[i] for i in hull.vertices]
    centre = [sum(col, Fraction(0)) / len(on_hull) for col in zip(*on_hull, strict=True)]
    total = Fraction(0)
    for simplex in hull.simplices:
        rows = [[x - c for x, c in zip(unique[i], centre, strict=True)] for i in simplex]
        total += abs(_det(rows))
    return total / math.factorial(dim)


def polytope_volume(p: Polytope) -> Fraction:
    return volume_of_points(p.vertices, p.dim)


def minkowski_sum(*point_sets: Sequence[Sequence[Fraction]]) -> list[RatVector]:
    """All sums of one point from each set (a superset of the sum's vertices)."""
    sums: set[RatVector] = set()
    for combo in itertools.product(*point_sets):
        sums.add(tuple(sum(xs, Fraction(0)) for xs in zip(*combo, strict=True)))
    return sorted(sums)


def mixed_volume(polytopes: Sequence[Polytope]) -> Fraction:
    """Normalized mixed volume: inclusion-exclusion over Minkowski sums.

    ``MV(P, ..., P) = n! vol(P)``, so for nef toric divisors this is the
    intersection number ``D_1 ... D_n``.
    """
    n = len(polytopes)
    if n == 0 or any(p.dim != n for p in polytopes):
        raise DimensionMismatchError("mixed volume needs n polytopes in dimension n", n)
    total = Fraction(0)
    for size in range(1, n + 1):
        for subset in itertools.combinations(polytopes, size):
            volume = volume_of_points(minkowski_sum(*(p.vertices for p in subset)), n)
            total += (-1) ** (n - size) * volume
    return total


def count_lattice_points(
    p: Polytope, scale: int = 1, max_points: int = DEFAULT_MAX_BOX_POINTS
) -> int:
    """Number of integer points in ``scale * P``, by slabs of the bounding box.

    Raises:
        OracleError: If the bounding box exceeds ``max_points`` points.
    """
    if scale < 1:
        raise OracleError("the scale must be at least 1")
    q = p.scaled(scale)
    vertices = q.vertices
    if not vertices:
        return 0
    low = [math.floor(min(v[i] for v in vertices)) for i in range(q.dim)]
    high = [math.ceil(max(v[i] for v in vertices)) for i in range(q.dim)]
    box = math.prod(h - lo + 1 for lo, h in zip(low, high, strict=True))
    if box > max_points:
        raise OracleError(f"bounding box has {box} points, above the limit {max_points}")
    normals = np.asarray(q.normals, dtype=np.int64)
    # <m, v> is an integer, so ">= -a" is the same as ">= ceil(-a)"
    thresholds = np.asarray([math.ceil(-a) for a in q.offsets], dtype=np.int64)
    axes = [np.arange(lo, h + 1, dtype=np.int64) for lo, h in zip(low[1:], high[1:], strict=True)]
    if axes:
        rest = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, q.dim - 1)
    else:
        rest = np.zeros((1, 0), dtype=np.int64)
    count = 0
    for first in range(low[0], high[0] + 1):
        slab = np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest])
        inside = np.all(slab @ normals.T >= thresholds, axis=1)
        count += int(inside.sum())
    return count


def is_nef(d: DivisorView) -> bool:
    """Vertex criterion: each maximal cone's Cartier data lies in the polytope."""
    c = d.complex
    p = Polytope(
        tuple(c.image(r) for r in c.ray_ids),
        tuple(d.coefficient(r) for r in c.ray_ids),
        c.ambient_dim,
    )
    for sigma in c.maximal_cones:
        if len(sigma) != c.ambient_dim:
            raise OracleError("nefness is tested on complete fans of full-dimensional cones")
        m = _solve(c.images(sigma), [-d.coefficient(r) for r in sigma])
        if m is None:
            raise OracleError(f"cone {sigma} is not simplicial of full dimension")
        if not p.contains(m):
            return False
    return True


def _require_nef(d: DivisorView) -> None:
    if not is_nef(d):
        raise OracleError(f"divisor {dict(d.coefficients)} is not nef")


def facet_lattice_lengths(d: DivisorView) -> dict[str, Fraction]:
    """Lattice length of the facet of ``P_D`` cut out by each ray (surfaces only).

    For nef ``D`` this is the intersection number ``D . B_ray``.
    """
    c = d.complex
    if c.ambient_dim != 2:
        raise DimensionMismatchError("facet lengths are computed for surfaces", 2, c.ambient_dim)
    p = Polytope.from_divisor(d)
    lengths: dict[str, Fraction] = {}
    for r in c.ray_ids:
        v = c.image(r)
        on_facet = [m for m in p.vertices if _dot(m, v) == -d.coefficient(r)]
        if len(on_facet) < 2:
            lengths[r] = Fraction(0)
            continue
        g = math.gcd(v[0], v[1])
        direction = (-v[1] // g, v[0] // g)
        start, end = on_facet[0], on_facet[-1]
        k = 0 if direction[0] != 0 else 1
        lengths[r] = abs((end[k] - start[k]) / direction[k])
    return lengths


def tropical_ray_weights(d: DivisorView) -> dict[str, Fraction]:
    """``phi_D (.) [X]`` read on the rays."""
    c = d.complex
    w = lattice_product(from_divisor(d), fundamental_cycle(c))
    return {cone[0]: Fraction(w.value(cone)) for cone in w.cones()}


@dataclass
class DegreeComparison:
    """Tropical top number against the mixed volume of the divisors' polytopes."""

    tropical: Fraction
    oracle: Fraction

    @property
    def agree(self) -> bool:
        return self.tropical == self.oracle


def compare_degrees(complex_: ConicalComplex, divisors: Sequence[DivisorView]) -> DegreeComparison:
    """Compare ``D_1 ... D_n`` computed tropically and by mixed volumes.

    Raises:
        OracleError: If a divisor is not nef.
        OracleMismatchError: If the two values differ.
    """
    if len(divisors) != complex_.dim:
        raise DimensionMismatchError(
            "one divisor per dimension is required", complex_.dim, len(divisors)
        )
    for d in divisors:
        _require_nef(d)
    tropical = top_number(
        [from_divisor(d) for d in divisors], BalancedSpace.of(complex_), Flavor.LATTICE
    )
    oracle = mixed_volume([Polytope.from_divisor(d) for d in divisors])
    result = DegreeComparison(Fraction(tropical), oracle)
    log.info("tropical %s vs mixed volume %s", result.tropical, result.oracle)
    if not result.agree:
        raise OracleMismatchError(
            f"tropical degree {result.tropical} differs from mixed volume {result.oracle}",
            defect=float(abs(result.tropical - result.oracle)),
        )
    return result


@dataclass
class HilbertSamuelRow:
    """``count(l) * n! / l^n`` against ``D^n`` at one scale."""

    scale: int
    count: int
    normalized: float
    target: Fraction
    band: float

    @property
    def error(self) -> float:
        return abs(self.normalized - float(self.target))

    @property
    def within(self) -> bool:
        return self.error <= self.band


def hilbert_samuel(
    d: DivisorView,
    scales: Sequence[int],
    max_points: int = DEFAULT_MAX_BOX_POINTS,
    band_constant: float = HS_BAND_CONSTANT,
) -> list[HilbertSamuelRow]:
    """Lattice-point counts of ``l P_D`` normalized against the top self-intersection."""
    _require_nef(d)
    p = Polytope.from_divisor(d)
    n = p.dim
    target = math.factorial(n) * polytope_volume(p)
    rows = []
    for scale in scales:
        count = count_lattice_points(p, scale, max_points)
        normalized = count * math.factorial(n) / scale**n
        rows.append(HilbertSamuelRow(scale, count, normalized, target, band_constant / scale))
        log.info("scale %d: %d points, normalized %.6f", scale, count, normalized)
    return rows


def hilbert_samuel_scales(max_scale: int) -> list[int]:
    """``max/4, max/2, max`` (at least 1, without repeats)."""
    return sorted({max(1, max_scale // 4), max(1, max_scale // 2), max_scale})


@dataclass
class BrunnMinkowskiReport:
    """``((D+F)^n)^(1/n)`` against ``(D^n)^(1/n) + (F^n)^(1/n)``."""

    sum_root: float
    separate_roots: float

    @property
    def superadditive(self) -> bool:
        return self.sum_root >= self.separate_roots - 1e-9

    @property
    def reverse_direction(self) -> bool:
        return self.separate_roots >= self.sum_root - 1e-9


def brunn_minkowski(d: DivisorView, f: DivisorView) -> BrunnMinkowskiReport:
    for x in (d, f):
        _require_nef(x)
    n = d.complex.ambient_dim
    factor = math.factorial(n)

    def root(volume: Fraction) -> float:
        return float(factor * volume) ** (1.0 / n)

    def volume_root(divisor: DivisorView) -> float:
        return root(polytope_volume(Polytope.from_divisor(divisor)))

    report = BrunnMinkowskiReport(volume_root(d + f), volume_root(d) + volume_root(f))
    if not report.reverse_direction:
        log.warning(
            "sub-additive form fails: sum of roots %.9f < root of sum %.9f",
            report.separate_roots,
            report.sum_root,
        )
    return report
