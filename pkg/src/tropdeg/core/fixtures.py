"""Named complexes used by the CLI, the oracle and the tests."""

from __future__ import annotations

from collections.abc import Callable
from fractions import Fraction

from tropdeg.core.complex import ConicalComplex
from tropdeg.core.exceptions import ComplexValidationError
from tropdeg.core.functions import DivisorView


def p2() -> ConicalComplex:
    """Fan of the projective plane."""
    return ConicalComplex.build(
        2,
        {"e1": (1, 0), "e2": (0, 1), "e3": (-1, -1)},
        [("e1", "e2"), ("e2", "e3"), ("e1", "e3")],
        name="p2",
    )


def p1xp1() -> ConicalComplex:
    """Fan of P1 x P1; bidegree (a, b) is ``a D(-e1) + b D(-e2)``."""
    return ConicalComplex.build(
        2,
        {"x+": (1, 0), "y+": (0, 1), "x-": (-1, 0), "y-": (0, -1)},
        [("x+", "y+"), ("y+", "x-"), ("x-", "y-"), ("y-", "x+")],
        name="p1xp1",
    )


def hirzebruch1() -> ConicalComplex:
    """Fan of the first Hirzebruch surface (P2 blown up in a point)."""
    return ConicalComplex.build(
        2,
        {"u1": (1, 0), "u2": (0, 1), "u3": (-1, 1), "u4": (0, -1)},
        [("u1", "u2"), ("u2", "u3"), ("u3", "u4"), ("u4", "u1")],
        name="hirzebruch1",
    )


def p3() -> ConicalComplex:
    """Fan of projective 3-space."""
    rays = {"e1": (1, 0, 0), "e2": (0, 1, 0), "e3": (0, 0, 1), "e4": (-1, -1, -1)}
    cones = [
        ("e1", "e2", "e3"),
        ("e1", "e2", "e4"),
        ("e1", "e3", "e4"),
        ("e2", "e3", "e4"),
    ]
    return ConicalComplex.build(3, rays, cones, name="p3")


def elliptic() -> ConicalComplex:
    """Three rays of a 1-dimensional complex mapped to the line with images 2, -1, -1.

    Both ``(1, 1, 1)`` and ``(1, 2, 0)`` on (O, P, Q) are balanced lattice weights.
    """
    return ConicalComplex.build(
        1,
        {"O": (2,), "P": (-1,), "Q": (-1,)},
        [("O",), ("P",), ("Q",)],
        name="elliptic",
    )


FIXTURES: dict[str, Callable[[], ConicalComplex]] = {
    "p2": p2,
    "p1xp1": p1xp1,
    "hirzebruch1": hirzebruch1,
    "p3": p3,
    "elliptic": elliptic,
}

TORIC_FIXTURES = ("p2", "p1xp1", "hirzebruch1", "p3")


def get_fixture(name: str) -> ConicalComplex:
    """Fresh copy of a named complex."""
    try:
        return FIXTURES[name]()
    except KeyError as e:
        raise ComplexValidationError(
            f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}",
            code="unknown-fixture",
        ) from e


def hyperplane(complex_: ConicalComplex, multiple: int = 1) -> DivisorView:
    """``multiple * H`` on the projective fixtures (the divisor of the last ray)."""
    last = {"p2": "e3", "p3": "e4"}.get(complex_.name)
    if last is None:
        raise ComplexValidationError(
            f"{complex_.name!r} has no hyperplane class", code="unknown-fixture"
        )
    return DivisorView(complex_, {last: Fraction(multiple)})


def bidegree(complex_: ConicalComplex, a: int, b: int) -> DivisorView:
    """Divisor of bidegree ``(a, b)`` on P1 x P1."""
    if complex_.name != "p1xp1":
        raise ComplexValidationError("bidegrees live on p1xp1", code="unknown-fixture")
    return DivisorView(complex_, {"x-": Fraction(a), "y-": Fraction(b)})
