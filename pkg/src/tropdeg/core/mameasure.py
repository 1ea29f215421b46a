"""Size functional, discrete Monge-Ampere measures and b-divisor towers.

A 1-dimensional Euclidean weight ``z`` defines the atomic measure
``sum_tau z(tau) * delta(unit ray of tau)`` on the sphere of the complex. The
Monge-Ampere measure of ``phi`` is the measure of ``phi^(n-1) . [X]^``.
Degrees of b-divisors are approached along refinement ladders.
"""

from __future__ import annotations

import itertools
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from tropdeg.core.complex import (
    Cone,
    ConicalComplex,
    SphereAtom,
    Subdivision,
    ValidationReport,
    bisect_maximal_cones,
    cone_key,
    sphere_atom,
)
from tropdeg.core.exceptions import (
    ComplexMismatchError,
    DimensionMismatchError,
    NotPositiveError,
    SubdivisionError,
)
from tropdeg.core.functions import (
    ConicFunction,
    PLFunction,
    linear_combination,
    pull_back_fn,
    push_forward_fn,
    sphere_value,
    sup_on_rays,
)
from tropdeg.core.intersection import euclidean_product, iterated_product
from tropdeg.core.logging_config import get_logger
from tropdeg.core.weights import (
    DEFAULT_TOL,
    BalancedSpace,
    Flavor,
    Weight,
    degree,
    fundamental_cycle,
    is_positive,
    normalize,
    pull_back,
)

log = get_logger("mameasure")

ARGMIN_TOL = 1e-12
DEFAULT_AUX_ROUNDS = 8


# ---------------------------------------------------------------------------
# Discrete measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atomic measure on the unit rays of a complex."""

    complex: ConicalComplex
    atoms: tuple[tuple[SphereAtom, float], ...] = ()

    def __post_init__(self) -> None:
        rays = [atom.ray for atom, _ in self.atoms]
        if len(set(rays)) != len(rays):
            raise DimensionMismatchError("a measure has at most one atom per ray")

    @property
    def total_variation(self) -> float:
        return sum(abs(mass) for _, mass in self.atoms)

    @property
    def total_mass(self) -> float:
        return sum(mass for _, mass in self.atoms)

    def masses(self) -> dict[str, float]:
        return {atom.ray: mass for atom, mass in self.atoms}

    def mass(self, ray_id: str) -> float:
        return self.masses().get(ray_id, 0.0)

    def integrate(self, phi: PLFunction) -> float:
        """``integral of phi d(mu)``: the naive atom sum."""
        self._check(phi)
        return sum(sphere_value(phi, atom.ray) * mass for atom, mass in self.atoms)

    def pairing(self, phi: PLFunction) -> float:
        """``integral of -phi d(mu)``, equal to ``deg(phi . z)`` for the defining weight."""
        self._check(phi)
        return sum(-sphere_value(phi, atom.ray) * mass for atom, mass in self.atoms)

    def max_difference(self, other: DiscreteMeasure) -> float:
        mine, theirs = self.masses(), other.masses()
        return max(
            (abs(mine.get(r, 0.0) - theirs.get(r, 0.0)) for r in set(mine) | set(theirs)),
            default=0.0,
        )

    def _check(self, phi: PLFunction) -> None:
        if phi.complex is not self.complex:
            raise ComplexMismatchError("function and measure live on different complexes")


def measure(z: Weight) -> DiscreteMeasure:
    """Discrete measure of a 1-dimensional weight (lattice weights are normalized)."""
    if z.dim != 1:
        raise DimensionMismatchError("measures come from 1-dimensional weights", 1, z.dim)
    w = normalize(z)
    atoms = []
    for cone in w.cones():
        mass = float(w.value(cone))
        if mass != 0.0:
            atoms.append((sphere_atom(w.complex, cone[0]), mass))
    return DiscreteMeasure(w.complex, tuple(atoms))


def mixed_ma_measure(functions: Sequence[PLFunction], space: BalancedSpace) -> DiscreteMeasure:
    """Measure of ``phi_1 ... phi_{n-1} . [X]^``."""
    if len(functions) != space.dim - 1:
        raise DimensionMismatchError(
            "a mixed measure takes n - 1 functions", space.dim - 1, len(functions)
        )
    for phi in functions:
        if phi.complex is not space.complex:
            raise ComplexMismatchError("pull all functions back to one complex first")
    return measure(iterated_product(functions, space.normalized()))


def ma_measure(phi: PLFunction, space: BalancedSpace) -> DiscreteMeasure:
    return mixed_ma_measure([phi] * (space.dim - 1), space)


def polarization_defect(
    functions: Sequence[PLFunction], coefficients: Sequence[float], space: BalancedSpace
) -> float:
    """Largest atom discrepancy in the multilinear expansion of ``mu`` of a combination."""
    if len(functions) != len(coefficients):
        raise DimensionMismatchError(
            "one coefficient per function", len(functions), len(coefficients)
        )
    slots = space.dim - 1
    combined = ma_measure(linear_combination(list(functions), list(coefficients)), space)
    expanded: dict[str, float] = {}
    for indices in itertools.product(range(len(functions)), repeat=slots):
        factor = math.prod(float(coefficients[i]) for i in indices)
        if factor == 0.0:
            continue
        mixed = mixed_ma_measure([functions[i] for i in indices], space)
        for ray, mass in mixed.masses().items():
            expanded[ray] = expanded.get(ray, 0.0) + factor * mass
    masses = combined.masses()
    return max(
        (abs(masses.get(r, 0.0) - expanded.get(r, 0.0)) for r in set(masses) | set(expanded)),
        default=0.0,
    )


# ---------------------------------------------------------------------------
# Auxiliary concave function and size
# ---------------------------------------------------------------------------


def _aux_value(u: np.ndarray) -> float:
    r = len(u)
    return 2 * r * min(0.0, float(u.min())) - float(u.sum())


def _argmin_set(u: np.ndarray) -> frozenset[int]:
    """Indices attaining ``min(0, u_1, ..., u_r)``; index 0 stands for the constant."""
    candidates = np.concatenate(([0.0], u))
    low = float(candidates.min())
    tol = ARGMIN_TOL * max(1.0, float(np.abs(candidates).max()))
    return frozenset(int(i) for i in np.flatnonzero(candidates <= low + tol))


def _nonlinear_cones(complex_: ConicalComplex) -> list[Cone]:
    ip = complex_.inner_product
    regions = {
        r: _argmin_set(ip.orthonormal_coordinates(np.asarray(complex_.image(r), dtype=float)))
        for r in complex_.ray_ids
    }
    bad = []
    for cone in complex_.maximal_cones:
        common = frozenset.intersection(*(regions[r] for r in cone))
        if not common:
            bad.append(cone)
    return bad


@dataclass(frozen=True, eq=False)
class AuxiliaryConcave:
    """``2r min(0, u) - sum(u)`` in orthonormal coordinates, on a complex where it is PL.

    Attributes:
        subdivision: Refinement of the original complex on which the function
            is linear on every cone.
        function: Ray values of the auxiliary function on ``subdivision.fine``.
    """

    subdivision: Subdivision
    function: PLFunction

    @classmethod
    def refine(
        cls, complex_: ConicalComplex, max_rounds: int = DEFAULT_AUX_ROUNDS
    ) -> AuxiliaryConcave:
        """Bisect maximal cones until the auxiliary function is linear on each.

        The function bends along ``u_i = 0`` and ``u_i = u_j``. Rational
        bisection can only reach those when they are rational hyperplanes,
        which is a condition on the Gram matrix alone.

        Raises:
            SubdivisionError: If the inner product has irrational kinks, or
                ``max_rounds`` bisections do not suffice.
        """
        ip = complex_.inner_product
        if not ip.has_rational_kinks:
            raise SubdivisionError(
                "size needs an inner product whose Cholesky pivot ratios are rational "
                f"squares (pivots: {', '.join(str(d) for d in ip.pivots)}); the auxiliary "
                "function bends along irrational hyperplanes"
            )
        s = Subdivision.identity(complex_)
        for round_ in range(max_rounds + 1):
            bad = _nonlinear_cones(s.fine)
            if not bad:
                break
            if round_ == max_rounds:
                raise SubdivisionError(
                    f"auxiliary function still bends inside {len(bad)} cones "
                    f"after {max_rounds} rounds",
                    cone=cone_key(bad[0]),
                )
            log.debug("auxiliary refinement round %d: %d cones", round_ + 1, len(bad))
            s = s.compose(bisect_maximal_cones(s.fine, bad))
        fine = s.fine
        ip = fine.inner_product
        values = {
            r: _aux_value(ip.orthonormal_coordinates(np.asarray(fine.image(r), dtype=float)))
            for r in fine.ray_ids
        }
        log.info("auxiliary function is linear on %d maximal cones", len(fine.maximal_cones))
        return cls(s, PLFunction(fine, values))

    @property
    def complex(self) -> ConicalComplex:
        return self.subdivision.fine

    @property
    def rank(self) -> int:
        return self.complex.ambient_dim

    def lift(self, z: Weight) -> Weight:
        """Bring a weight onto the auxiliary complex, normalized."""
        if z.complex is self.complex:
            return normalize(z)
        if z.complex is self.subdivision.coarse:
            return normalize(pull_back(z, self.subdivision))
        raise ComplexMismatchError("weight lives neither on the auxiliary complex nor below it")

    def lift_function(self, phi: PLFunction) -> PLFunction:
        if phi.complex is self.complex:
            return phi
        if phi.complex is self.subdivision.coarse:
            return pull_back_fn(phi, self.subdivision)
        raise ComplexMismatchError("function lives neither on the auxiliary complex nor below it")


def size(z: Weight, aux: AuxiliaryConcave) -> float:
    """``deg((phi_aux .)^k z)`` for a positive weight ``z``.

    Raises:
        NotPositiveError: If ``z`` has a negative value.
    """
    w = aux.lift(z)
    if not is_positive(w):
        raise NotPositiveError("the size is only defined for positive weights")
    for _ in range(w.dim):
        w = euclidean_product(aux.function, w)
    return float(degree(w))


@dataclass
class CLNReport:
    """Outcome of the Chern-Levine-Nirenberg check ``|phi . z| <= B |z|``.

    Attributes:
        applicable: False when ``phi . z`` is not positive.
        holds: Whether the inequality holds (None when not applicable).
        lhs: Size of ``phi . z``.
        rhs: ``bound * size(z)``.
        bound: ``B``, the largest ``|phi|`` over the unit rays.
    """

    applicable: bool
    holds: bool | None
    lhs: float | None = None
    rhs: float | None = None
    bound: float | None = None


def cln_check(
    phi: PLFunction, z: Weight, aux: AuxiliaryConcave, tol: float = DEFAULT_TOL
) -> CLNReport:
    fine_phi = aux.lift_function(phi)
    fine_z = aux.lift(z)
    product = euclidean_product(fine_phi, fine_z)
    if not is_positive(product, tol):
        log.info("CLN inequality inapplicable: phi . z is not positive")
        return CLNReport(applicable=False, holds=None)
    bound = sup_on_rays(fine_phi)
    clipped = Weight(
        product.complex,
        product.dim,
        {c: max(float(v), 0.0) for c, v in product.values.items()},
        Flavor.EUCLIDEAN,
    )
    lhs = size(clipped, aux)
    rhs = bound * size(fine_z, aux)
    holds = lhs <= rhs + tol * max(1.0, abs(rhs))
    log.info("CLN: %.9g <= %.9g: %s", lhs, rhs, holds)
    return CLNReport(True, holds, lhs, rhs, bound)


# ---------------------------------------------------------------------------
# b-divisor towers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Level:
    """One stage of a tower: complex, map to the previous stage, function."""

    subdivision: Subdivision
    function: PLFunction

    @property
    def complex(self) -> ConicalComplex:
        return self.subdivision.fine


@dataclass(frozen=True, eq=False)
class BDivisorSequence:
    """Compatible tower of PL functions along a refinement ladder."""

    levels: tuple[Level, ...]
    claimed_nef: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        if not self.levels:
            raise DimensionMismatchError("a tower needs at least one level")

    def __len__(self) -> int:
        return len(self.levels)

    def function(self, k: int) -> PLFunction:
        return self.levels[k].function

    def complex(self, k: int) -> ConicalComplex:
        return self.levels[k].complex


def _tower(
    ladder: Sequence[Subdivision],
    functions: Sequence[PLFunction],
    claimed_nef: bool,
    name: str,
) -> BDivisorSequence:
    levels = tuple(Level(s, f) for s, f in zip(ladder, functions, strict=True))
    return BDivisorSequence(levels, claimed_nef, name)


def negative_norm_tower(ladder: Sequence[Subdivision]) -> BDivisorSequence:
    """Restrictions of ``-||x||`` to each level: PL minorants converging to it."""
    psi = ConicFunction.negative_norm()
    return _tower(
        ladder, [psi.restrict(s.fine) for s in ladder], claimed_nef=True, name="negative-norm"
    )


def pullback_tower(phi: PLFunction, ladder: Sequence[Subdivision]) -> BDivisorSequence:
    """Cartier tower: ``phi`` pulled back to every level."""
    if phi.complex is not ladder[0].fine:
        raise ComplexMismatchError("the function must live on the ladder's first level")
    functions = [phi]
    for s in ladder[1:]:
        functions.append(pull_back_fn(functions[-1], s))
    return _tower(ladder, functions, claimed_nef=False, name="pull-back")


def ample_shift(tower: BDivisorSequence, shift: PLFunction, alpha: float = 1.0) -> BDivisorSequence:
    """``phi_k + shift / (alpha (k + 1))`` with ``shift`` pulled back to each level.

    The shifted tower is no longer compatible under push-forward.
    """
    if alpha <= 0:
        raise NotPositiveError("the shift scale must be positive")
    current = shift
    levels = []
    for k, level in enumerate(tower.levels):
        if k > 0:
            current = pull_back_fn(current, level.subdivision)
        if current.complex is not level.complex:
            raise ComplexMismatchError("the shift must live on the tower's first level")
        shifted = level.function + current.scale(1.0 / (alpha * (k + 1)))
        levels.append(Level(level.subdivision, shifted))
    return BDivisorSequence(tuple(levels), tower.claimed_nef, f"{tower.name}+shift")


def _values_close(a: Fraction | float, b: Fraction | float, tol: float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(b)))


def bdiv_validate(
    b: BDivisorSequence,
    monotone: bool = False,
    compatibility: bool = True,
    tol: float = DEFAULT_TOL,
) -> ValidationReport:
    """Diagnostics for a tower.

    Errors: ``broken-chain``, ``function-mismatch``, ``incompatible`` and (with
    ``monotone``) ``not-monotone``. A claimed-nef level whose product with the
    fundamental cycle is negative is reported as a ``not-nef`` warning.
    """
    report = ValidationReport()
    for k, level in enumerate(b.levels):
        if level.function.complex is not level.complex:
            report.error("function-mismatch", f"level {k} function lives elsewhere")
            continue
        if k == 0:
            continue
        prev = b.levels[k - 1]
        s = level.subdivision
        if s.coarse is not prev.complex:
            report.error("broken-chain", f"level {k} does not refine level {k - 1}")
            continue
        if compatibility:
            try:
                pushed = push_forward_fn(level.function, s)
            except SubdivisionError as e:
                report.error("incompatible", f"level {k}: {e}")
                continue
            for r in prev.complex.ray_ids:
                if not _values_close(pushed.value(r), prev.function.value(r), tol):
                    report.error(
                        "incompatible",
                        f"level {k} changes the value on ray {r!r}",
                        (r,),
                    )
                    break
        if monotone:
            pulled = pull_back_fn(prev.function, s)
            for r in level.complex.ray_ids:
                if float(level.function.value(r)) < float(pulled.value(r)) - tol:
                    report.error(
                        "not-monotone",
                        f"level {k} drops below level {k - 1} on ray {r!r}",
                        (r,),
                    )
                    break
    if b.claimed_nef and not report.has_errors:
        for k, level in enumerate(b.levels):
            cycle = fundamental_cycle(level.complex, Flavor.EUCLIDEAN)
            if not is_positive(euclidean_product(level.function, cycle), tol):
                report.warning("not-nef", f"level {k} has a negative product with [X]")
    return report


@dataclass
class StepRecord:
    """One rung of a degree-by-convergence run."""

    step: int
    cones: int
    rays: int
    degree: float
    delta: float | None
    total_variation: float
    pairing: float
    naive_integral: float


@dataclass
class ConvergenceReport:
    """Degree sequence along a ladder.

    ``pairing`` is ``integral of -phi_1 d(mu)`` (equal to the degree at every
    step); ``naive_integral`` is ``integral of phi_1 d(mu)``, its negative.
    """

    steps: list[StepRecord] = field(default_factory=list)
    cauchy_ok: bool = False
    final_measure: DiscreteMeasure | None = None

    @property
    def degrees(self) -> list[float]:
        return [s.degree for s in self.steps]

    @property
    def limit(self) -> float:
        return self.steps[-1].degree


def converge_degree(
    towers: Sequence[BDivisorSequence],
    tol: float = 1e-6,
    max_steps: int = 12,
    window: int = 3,
) -> ConvergenceReport:
    """Approach ``<D_1 ... D_n>`` by ``deg(phi_{1,k} ... phi_{n,k} . [X_k]^)``.

    Convergence is declared once ``window`` successive differences are below
    ``tol``; otherwise the report carries the partial sequence with
    ``cauchy_ok`` false.
    """
    if not towers:
        raise DimensionMismatchError("at least one tower is required")
    first = towers[0]
    n = first.complex(0).dim
    if len(towers) != n:
        raise DimensionMismatchError("one tower per dimension is required", n, len(towers))
    length = len(first)
    for t in towers[1:]:
        if len(t) != length or any(t.complex(k) is not first.complex(k) for k in range(length)):
            raise ComplexMismatchError("towers must share their refinement ladder")

    report = ConvergenceReport()
    last = min(max_steps, length - 1)
    streak = 0
    for k in range(last + 1):
        complex_ = first.complex(k)
        space = BalancedSpace.of(complex_)
        mu_weight = iterated_product([t.function(k) for t in towers[1:]], space.normalized())
        mu = measure(mu_weight)
        phi1 = towers[0].function(k)
        deg = float(degree(euclidean_product(phi1, mu_weight)))
        delta = None if not report.steps else abs(deg - report.steps[-1].degree)
        record = StepRecord(
            step=k,
            cones=len(complex_.maximal_cones),
            rays=len(complex_.rays),
            degree=deg,
            delta=delta,
            total_variation=mu.total_variation,
            pairing=mu.pairing(phi1),
            naive_integral=mu.integrate(phi1),
        )
        report.steps.append(record)
        report.final_measure = mu
        log.info("step %d: %d cones, degree %.12g", k, record.cones, deg)
        if delta is not None and delta < tol:
            streak += 1
            if streak >= window:
                report.cauchy_ok = True
                break
        else:
            streak = 0
    if not report.cauchy_ok:
        log.warning("ladder exhausted after %d steps before reaching tolerance %g", last, tol)
    return report


def total_variation_bound(towers: Sequence[BDivisorSequence], aux: AuxiliaryConcave) -> float:
    """Bound on the total variation of every measure along the towers.

    The product of the largest unit-ray values of the measure slots times the
    size of ``[X]^``; valid for nef towers where the auxiliary function is
    linear on the ladder's base.
    """
    base = towers[0].complex(0)
    if aux.subdivision.coarse is not base:
        raise ComplexMismatchError("auxiliary function was built for another complex")
    bound = 1.0
    for t in towers[1:]:
        bound *= max(sup_on_rays(level.function) for level in t.levels)
    return bound * size(fundamental_cycle(base, Flavor.EUCLIDEAN), aux)


# ---------------------------------------------------------------------------
# Admissible families
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AdmissibleFamily:
    """Finite set of PL functions on a common balanced space."""

    space: BalancedSpace
    functions: tuple[PLFunction, ...] = ()

    def __post_init__(self) -> None:
        for phi in self.functions:
            if phi.complex is not self.space.complex:
                raise ComplexMismatchError("family members must share the space's complex")


@dataclass
class AdmissibleReport:
    """Which admissibility conditions were verified.

    Density of differences cannot be checked on finitely many functions and
    is always reported as ``"not verified"``.
    """

    products_positive: bool
    combinations_positive: bool
    density: str = "not verified"
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.products_positive and self.combinations_positive


def _first_negative_product(
    functions: Sequence[PLFunction], space: BalancedSpace, tol: float
) -> str | None:
    cycle = space.normalized()
    for depth in range(1, space.dim + 1):
        for indices in itertools.combinations_with_replacement(range(len(functions)), depth):
            result = iterated_product([functions[i] for i in indices], cycle)
            if not is_positive(result, tol):
                return f"product of functions {list(indices)} is not positive"
    return None


def admissible_check(
    fam: AdmissibleFamily,
    rng: random.Random | None = None,
    samples: int = 10,
    tol: float = DEFAULT_TOL,
) -> AdmissibleReport:
    """Check positivity of all products, then of products of random conic combinations."""
    witness = _first_negative_product(fam.functions, fam.space, tol)
    if witness is not None:
        log.info("admissible check: %s", witness)
        return AdmissibleReport(False, False, witness=witness)
    if not fam.functions:
        return AdmissibleReport(True, True)
    rng = rng or random.Random()
    for _ in range(samples):
        weights = [Fraction(rng.randint(0, 4)) for _ in fam.functions]
        if not any(weights):
            continue
        combo = linear_combination(list(fam.functions), weights)
        found = _first_negative_product([combo], fam.space, tol)
        if found is not None:
            witness = f"conic combination {[str(w) for w in weights]}: {found}"
            log.info("admissible check: %s", witness)
            return AdmissibleReport(True, False, witness=witness)
    return AdmissibleReport(True, True)
