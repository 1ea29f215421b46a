"""Exact rational linear algebra.

Everything on the lattice side is computed over ``fractions.Fraction``.
Floats only appear at the boundary (square roots of Gram determinants, unit
normal vectors, Cholesky coordinates), produced by :class:`InnerProduct`.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations

import numpy as np

from tropdeg.core.exceptions import DimensionMismatchError, LinearAlgebraError

Rat = Fraction
RatVector = tuple[Fraction, ...]
IntVector = tuple[int, ...]


def as_rational(value: object) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: silently rationalizing binary64 values would turn
    every exact check into a float check in disguise.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rational numbers")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def rat_vector(values: Iterable[object]) -> RatVector:
    """Build a rational vector from ints, Fractions or ``"p/q"`` strings."""
    return tuple(as_rational(v) for v in values)


def dot(u: Sequence[Fraction | int], v: Sequence[Fraction | int]) -> Fraction:
    """Standard pairing of two exact vectors."""
    if len(u) != len(v):
        raise DimensionMismatchError("cannot pair vectors", len(u), len(v))
    return Fraction(sum(a * b for a, b in zip(u, v, strict=True)))


def combine(
    coefficients: Sequence[Fraction | int], vectors: Sequence[Sequence[int | Fraction]]
) -> RatVector:
    """Return ``sum(c_i * v_i)`` exactly."""
    if len(coefficients) != len(vectors):
        raise DimensionMismatchError(
            "coefficient count does not match vector count",
            len(vectors),
            len(coefficients),
        )
    if not vectors:
        raise DimensionMismatchError("cannot combine an empty list of vectors")
    dim = len(vectors[0])
    total = [Fraction(0)] * dim
    for c, v in zip(coefficients, vectors, strict=True):
        if len(v) != dim:
            raise DimensionMismatchError("vectors of different lengths", dim, len(v))
        for i, x in enumerate(v):
            total[i] += c * x
    return tuple(total)


def _row_reduce(
    rows: list[list[Fraction]], ncols: int
) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    lead = 0
    for col in range(ncols):
        pivot_row = next((r for r in range(lead, len(m)) if m[r][col] != 0), None)
        if pivot_row is None:
            continue
        m[lead], m[pivot_row] = m[pivot_row], m[lead]
        inv = 1 / m[lead][col]
        m[lead] = [x * inv for x in m[lead]]
        for r in range(len(m)):
            if r != lead and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[lead], strict=True)]
        pivots.append(col)
        lead += 1
        if lead == len(m):
            break
    return m, pivots


@dataclass(frozen=True)
class RatMatrix:
    """Immutable rational matrix stored row-major."""

    rows: tuple[RatVector, ...]

    def __post_init__(self) -> None:
        if self.rows:
            width = len(self.rows[0])
            for row in self.rows:
                if len(row) != width:
                    raise DimensionMismatchError(
                        "ragged matrix rows", width, len(row)
                    )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[object]]) -> RatMatrix:
        return cls(tuple(rat_vector(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(
            tuple(
                tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
            )
        )

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def transpose(self) -> RatMatrix:
        return RatMatrix(tuple(zip(*self.rows, strict=True))) if self.rows else self

    def matmul(self, other: RatMatrix) -> RatMatrix:
        if self.ncols != other.nrows:
            raise DimensionMismatchError(
                "incompatible matrix product", self.ncols, other.nrows
            )
        cols = other.transpose().rows
        return RatMatrix(tuple(tuple(dot(r, c) for c in cols) for r in self.rows))

    def matvec(self, v: Sequence[Fraction | int]) -> RatVector:
        if len(v) != self.ncols:
            raise DimensionMismatchError("incompatible vector", self.ncols, len(v))
        return tuple(dot(r, v) for r in self.rows)

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i)
        )

    def rank(self) -> int:
        _, pivots = _row_reduce([list(r) for r in self.rows], self.ncols)
        return len(pivots)

    def det(self) -> Fraction:
        """Determinant by fraction-free Gaussian elimination."""
        if not self.is_square:
            raise DimensionMismatchError(
                "determinant of a non-square matrix", self.nrows, self.ncols
            )
        n = self.nrows
        if n == 0:
            return Fraction(1)
        m = [list(r) for r in self.rows]
        sign = 1
        result = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                m[col], m[pivot] = m[pivot], m[col]
                sign = -sign
            p = m[col][col]
            result *= p
            for r in range(col + 1, n):
                if m[r][col] != 0:
                    f = m[r][col] / p
                    m[r] = [a - f * b for a, b in zip(m[r], m[col], strict=True)]
        return sign * result

    def solve(self, b: Sequence[Fraction | int]) -> RatVector:
        """Solve ``self @ x = b`` for a square nonsingular matrix."""
        if not self.is_square:
            raise DimensionMismatchError(
                "solve needs a square matrix", self.nrows, self.ncols
            )
        if len(b) != self.nrows:
            raise DimensionMismatchError("right-hand side", self.nrows, len(b))
        n = self.nrows
        aug = [list(r) + [Fraction(x)] for r, x in zip(self.rows, b, strict=True)]
        reduced, pivots = _row_reduce(aug, n)
        if pivots != list(range(n)):
            raise LinearAlgebraError("matrix is singular")
        return tuple(reduced[i][n] for i in range(n))

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)


def solve_in_span(
    basis: Sequence[Sequence[int | Fraction]], target: Sequence[int | Fraction]
) -> RatVector | None:
    """Express ``target`` in the linearly independent ``basis``.

    Returns:
        The coefficients, or ``None`` when ``target`` is not in the span.

    Raises:
        DimensionMismatchError: If the vectors have different lengths.
        LinearAlgebraError: If the basis is linearly dependent.
    """
    dim = len(target)
    for v in basis:
        if len(v) != dim:
            raise DimensionMismatchError("basis vector length", dim, len(v))
    k = len(basis)
    if k == 0:
        return () if all(x == 0 for x in target) else None
    # columns are basis vectors, last column is the target
    aug = [
        [Fraction(basis[j][i]) for j in range(k)] + [Fraction(target[i])]
        for i in range(dim)
    ]
    reduced, pivots = _row_reduce(aug, k + 1)
    if len([p for p in pivots if p < k]) < k:
        raise LinearAlgebraError("basis vectors are linearly dependent")
    if k in pivots:
        return None
    return tuple(reduced[i][k] for i in range(k))


@dataclass(frozen=True)
class InnerProduct:
    """Rational Euclidean structure on the ambient space.

    The Gram matrix must be symmetric positive definite, which is verified
    exactly through its leading principal minors.
    """

    gram: RatMatrix

    def __post_init__(self) -> None:
        if not self.gram.is_square or self.gram.nrows == 0:
            raise LinearAlgebraError("Gram matrix must be a non-empty square matrix")
        if not self.gram.is_symmetric():
            raise LinearAlgebraError("Gram matrix is not symmetric")
        n = self.gram.nrows
        for k in range(1, n + 1):
            minor = RatMatrix(tuple(r[:k] for r in self.gram.rows[:k])).det()
            if minor <= 0:
                raise LinearAlgebraError(
                    f"Gram matrix is not positive definite (leading minor {k} = {minor})"
                )

    @classmethod
    def standard(cls, dim: int) -> InnerProduct:
        return cls(RatMatrix.identity(dim))

    @property
    def dim(self) -> int:
        return self.gram.nrows

    @cached_property
    def is_standard(self) -> bool:
        return self.gram == RatMatrix.identity(self.dim)

    def pair(self, u: Sequence[int | Fraction], v: Sequence[int | Fraction]) -> Fraction:
        """Exact pairing ``u^T G v``."""
        if len(u) != self.dim or len(v) != self.dim:
            raise DimensionMismatchError(
                "vector does not live in the ambient space", self.dim, len(u)
            )
        if self.is_standard:
            return dot(u, v)
        return dot(u, self.gram.matvec(v))

    def norm(self, v: Sequence[int | Fraction]) -> float:
        return math.sqrt(float(self.pair(v, v)))

    @cached_property
    def _gram_float(self) -> np.ndarray:
        return self.gram.to_numpy()

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower triangular ``L`` with ``G = L L^T``."""
        return np.linalg.cholesky(self._gram_float)

    def pair_float(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self._gram_float @ v)

    def norm_float(self, v: np.ndarray) -> float:
        return math.sqrt(max(self.pair_float(v, v), 0.0))

    @cached_property
    def pivots(self) -> RatVector:
        """Exact ``D`` of ``G = M D M^T`` with ``M`` unit lower triangular.

        ``d_k`` is the ratio of consecutive leading principal minors.
        """
        minors = [Fraction(1)] + [
            RatMatrix(tuple(r[:k] for r in self.gram.rows[:k])).det()
            for k in range(1, self.dim + 1)
        ]
        return tuple(minors[k] / minors[k - 1] for k in range(1, self.dim + 1))

    @cached_property
    def has_rational_kinks(self) -> bool:
        """Whether every ``u_i = u_j`` in orthonormal coordinates is a rational hyperplane.

        ``u_i`` is ``sqrt(d_i)`` times a rational form, so this holds exactly
        when all ratios ``d_i / d_1`` are squares of rationals.
        """
        first = self.pivots[0]
        return all(_is_rational_square(d / first) for d in self.pivots[1:])

    def orthonormal_coordinates(self, v: Sequence[float] | np.ndarray) -> np.ndarray:
        """Coordinates ``u = L^T v`` in which the inner product is standard."""
        return self.cholesky.T @ np.asarray(v, dtype=float)


def _is_rational_square(q: Fraction) -> bool:
    if q < 0:
        return False
    return all(math.isqrt(n) ** 2 == n for n in (q.numerator, q.denominator))


def gram_matrix(
    vectors: Sequence[Sequence[int | Fraction]], ip: InnerProduct
) -> RatMatrix:
    return RatMatrix(tuple(tuple(ip.pair(u, v) for v in vectors) for u in vectors))


def gram_det(vectors: Sequence[Sequence[int | Fraction]], ip: InnerProduct) -> Fraction:
    """Squared covolume of the lattice spanned by ``vectors``.

    Raises:
        LinearAlgebraError: If the vectors are linearly dependent.
    """
    det = gram_matrix(vectors, ip).det()
    if det <= 0:
        raise LinearAlgebraError("vectors are linearly dependent")
    return det


def primitive(v: Sequence[int]) -> IntVector:
    """Divide an integer vector by the gcd of its entries.

    Raises:
        LinearAlgebraError: For the zero vector.
    """
    g = reduce(math.gcd, (abs(int(x)) for x in v), 0)
    if g == 0:
        raise LinearAlgebraError("the zero vector has no primitive generator")
    return tuple(int(x) // g for x in v)


def primitive_rational(v: Sequence[Fraction | int]) -> IntVector:
    """Smallest integer vector positively proportional to a rational vector."""
    fracs = [Fraction(x) for x in v]
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fracs), 1)
    return primitive([int(f * lcm) for f in fracs])


def minors_gcd(vectors: Sequence[Sequence[int]]) -> int:
    """Gcd of the maximal minors of the matrix with the given rows.

    Equals 1 exactly when the vectors span a saturated sublattice.
    """
    k = len(vectors)
    if k == 0:
        return 1
    d = len(vectors[0])
    g = 0
    for cols in combinations(range(d), k):
        minor = RatMatrix.from_rows([[v[c] for c in cols] for v in vectors]).det()
        g = math.gcd(g, abs(int(minor)))
        if g == 1:
            break
    return g
