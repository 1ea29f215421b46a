"""Tests for the toric oracle."""

import inspect
import itertools
import math
from fractions import Fraction

import pytest

from tropdeg.core import toric
from tropdeg.core.complex import ConicalComplex
from tropdeg.core.exceptions import DimensionMismatchError, OracleError
from tropdeg.core.fixtures import bidegree, hyperplane
from tropdeg.core.functions import DivisorView
from tropdeg.core.toric import (
    Polytope,
    brunn_minkowski,
    compare_degrees,
    count_lattice_points,
    facet_lattice_lengths,
    hilbert_samuel,
    hilbert_samuel_scales,
    is_nef,
    mixed_volume,
    polytope_volume,
    tropical_ray_weights,
    volume_of_points,
)

# On the Hirzebruch surface u3 is the fiber F (F^2 = 0) and u4 the section H (H^2 = 1)
NEF_PRODUCTS = [
    ("p2", [{"e3": 1}, {"e3": 1}], 1),
    ("p2", [{"e3": 1}, {"e3": 2}], 2),
    ("p2", [{"e3": 2}, {"e3": 2}], 4),
    ("p2", [{"e3": 1}, {"e3": 3}], 3),
    ("p2", [{"e3": 2}, {"e3": 3}], 6),
    ("p1xp1", [{"x-": 1, "y-": 2}, {"x-": 2, "y-": 1}], 5),
    ("p1xp1", [{"x-": 1}, {"y-": 1}], 1),
    ("p1xp1", [{"x-": 1, "y-": 1}, {"x-": 1, "y-": 1}], 2),
    ("p1xp1", [{"x-": 2, "y-": 3}, {"x-": 1, "y-": 1}], 5),
    ("p1xp1", [{"x-": 3, "y-": 1}, {"x-": 1, "y-": 2}], 7),
    ("hirzebruch1", [{"u3": 1}, {"u4": 1}], 1),
    ("hirzebruch1", [{"u4": 1}, {"u4": 1}], 1),
    ("hirzebruch1", [{"u3": 1, "u4": 1}, {"u3": 1, "u4": 1}], 3),
    ("hirzebruch1", [{"u3": 2, "u4": 1}, {"u3": 1}], 1),
    ("hirzebruch1", [{"u3": 1, "u4": 1}, {"u4": 2}], 4),
    ("hirzebruch1", [{"u3": 1, "u4": 2}, {"u3": 1, "u4": 1}], 5),
    ("p3", [{"e4": 1}, {"e4": 1}, {"e4": 1}], 1),
    ("p3", [{"e4": 1}, {"e4": 1}, {"e4": 2}], 2),
    ("p3", [{"e4": 1}, {"e4": 2}, {"e4": 3}], 6),
]

NEF_DIVISORS = {
    "p2": [{"e3": 1}, {"e3": 2}, {"e3": 3}],
    "p1xp1": [{"x-": 1}, {"y-": 1}, {"x-": 1, "y-": 2}, {"x-": 2, "y-": 1}, {"x-": 3, "y-": 1}],
    "hirzebruch1": [{"u3": 1}, {"u4": 1}, {"u3": 1, "u4": 1}, {"u3": 2, "u4": 1}, {"u3": 1, "u4": 3}],
    "p3": [{"e4": 1}, {"e4": 2}],
}


class TestExactArithmetic:
    """Tests for the oracle's own determinant and solver."""

    @pytest.mark.parametrize(
        "rows,expected",
        [
            ([], 1),
            ([[3]], 3),
            ([[1, 2], [3, 4]], -2),
            ([[0, 1], [1, 0]], -1),
            ([[1, 2], [2, 4]], 0),
            ([[Fraction(1, 2), Fraction(1, 3)], [1, 1]], Fraction(1, 6)),
            ([[0, 2, 1], [1, 0, 0], [3, 1, 5]], -9),
            ([[2, 0, 0, 0], [0, 0, 3, 0], [0, 1, 0, 0], [0, 0, 0, Fraction(1, 7)]], Fraction(-6, 7)),
        ],
    )
    def test_determinant(self, rows, expected):
        """Test Bareiss determinants, with pivoting and rational rows."""
        assert toric._det(rows) == expected

    def test_solve(self):
        """Test a Cramer solve and the singular case."""
        assert toric._solve([[1, 1], [1, -1]], [Fraction(3), Fraction(1)]) == (2, 1)
        assert toric._solve([[0, -1], [1, 1]], [Fraction(-2), Fraction(1, 2)]) == (
            Fraction(-3, 2),
            2,
        )
        assert toric._solve([[1, 2], [2, 4]], [Fraction(1), Fraction(2)]) is None

    def test_independent_of_engine_linear_algebra(self):
        """Test that the oracle does not import the engine's linear algebra."""
        source = inspect.getsource(toric)
        assert "from tropdeg.core.linalg import" not in source
        assert "import tropdeg.core.linalg" not in source
        assert not hasattr(toric, "RatMatrix")


class TestPolytope:
    """Tests for polytopes of divisors."""

    def test_hyperplane_triangle(self, p2):
        """Test that H gives the standard triangle."""
        p = Polytope.from_divisor(hyperplane(p2))
        assert p.vertices == ((0, 0), (0, 1), (1, 0))
        assert polytope_volume(p) == Fraction(1, 2)

    def test_unbounded_polytope(self):
        """Test that an incomplete fan is refused."""
        quadrant = ConicalComplex.build(2, {"a": (1, 0), "b": (0, 1)}, [("a", "b")])
        with pytest.raises(OracleError, match="unbounded"):
            Polytope.from_divisor(DivisorView(quadrant, {"a": Fraction(1)}))

    def test_degenerate_volume(self):
        """Test that flat point sets have volume 0."""
        points = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(2), Fraction(2))]
        assert volume_of_points(points, 2) == 0
        assert volume_of_points(points[:2], 2) == 0

    @pytest.mark.parametrize("a,b", [(1, 1), (2, 1), (1, 3)])
    def test_hirzebruch_trapezoid(self, hirzebruch1, a, b):
        """Test the vertices and area of the polytope of aF + bH."""
        p = Polytope.from_divisor(DivisorView(hirzebruch1, {"u3": a, "u4": b}))
        assert p.vertices == ((0, 0), (0, b), (a, 0), (a + b, b))
        assert polytope_volume(p) == Fraction(2 * a * b + b * b, 2)

    def test_is_nef(self, p2):
        """Test the vertex criterion."""
        assert is_nef(hyperplane(p2, 2))
        assert not is_nef(DivisorView(p2, {"e1": 1, "e2": 1, "e3": -5}))


class TestMixedVolume:
    """Tests for mixed volumes and the degree comparison."""

    def test_boxes(self, p1xp1):
        """Test MV of a 1x2 and a 2x1 box."""
        boxes = [Polytope.from_divisor(bidegree(p1xp1, 1, 2)), Polytope.from_divisor(bidegree(p1xp1, 2, 1))]
        assert mixed_volume(boxes) == 5

    def test_dimension_check(self, p2):
        """Test that n polytopes are needed in dimension n."""
        with pytest.raises(DimensionMismatchError):
            mixed_volume([Polytope.from_divisor(hyperplane(p2))])

    @pytest.mark.parametrize("fixture,divisors,expected", NEF_PRODUCTS)
    def test_compare_nef_products(self, request, fixture, divisors, expected):
        """Test that the tropical degree and the mixed volume are the same exact rational."""
        complex_ = request.getfixturevalue(fixture)
        result = compare_degrees(complex_, [DivisorView(complex_, d) for d in divisors])
        assert result.tropical == result.oracle == Fraction(expected)
        assert isinstance(result.tropical, Fraction)
        assert isinstance(result.oracle, Fraction)

    def test_not_nef_refused(self, p2):
        """Test that the oracle needs nef divisors."""
        bad = DivisorView(p2, {"e1": 1, "e2": 1, "e3": -5})
        with pytest.raises(OracleError, match="not nef"):
            compare_degrees(p2, [bad, hyperplane(p2)])

    def test_ray_weights_match_facet_lengths(self, p1xp1):
        """Test phi_D . [X] against lattice lengths of facets."""
        d = bidegree(p1xp1, 1, 2)
        assert tropical_ray_weights(d) == facet_lattice_lengths(d)
        assert facet_lattice_lengths(d)["x+"] == 2


class TestLatticePoints:
    """Tests for lattice point counts and the Hilbert-Samuel check."""

    @pytest.mark.parametrize("multiple,scale,expected", [(1, 1, 3), (1, 2, 6), (2, 10, 231)])
    def test_counts(self, p2, multiple, scale, expected):
        """Test counts of dilated triangles."""
        p = Polytope.from_divisor(hyperplane(p2, multiple))
        assert count_lattice_points(p, scale) == expected

    def test_box_limit(self, p2):
        """Test that oversized boxes are refused."""
        p = Polytope.from_divisor(hyperplane(p2))
        with pytest.raises(OracleError, match="bounding box"):
            count_lattice_points(p, 100, max_points=50)

    def test_scale_must_be_positive(self, p2):
        """Test the scale check."""
        with pytest.raises(OracleError):
            count_lattice_points(Polytope.from_divisor(hyperplane(p2)), 0)

    def test_hilbert_samuel_rows(self, p2):
        """Test count = 2l^2 + 3l + 1 for 2H and its band."""
        rows = hilbert_samuel(hyperplane(p2, 2), [1, 5, 20])
        for row in rows:
            scale = row.scale
            assert row.count == 2 * scale**2 + 3 * scale + 1
            assert row.normalized == pytest.approx(4 + 6 / scale + 2 / scale**2)
            assert row.target == 4
            assert row.band == pytest.approx(10 / scale)
            assert row.within

    @pytest.mark.parametrize(
        "fixture,coefficients,count,target",
        [
            ("p2", {"e3": 2}, lambda s: 2 * s**2 + 3 * s + 1, 4),
            ("p1xp1", {"x-": 1, "y-": 1}, lambda s: (s + 1) ** 2, 2),
            ("p1xp1", {"x-": 1, "y-": 2}, lambda s: (s + 1) * (2 * s + 1), 4),
        ],
    )
    def test_hilbert_samuel_large_scales(self, request, fixture, coefficients, count, target):
        """Test exact counts and the 10/l band at l = 50, 100 and 200."""
        complex_ = request.getfixturevalue(fixture)
        d = DivisorView(complex_, coefficients)
        assert math.factorial(2) * polytope_volume(Polytope.from_divisor(d)) == target
        rows = hilbert_samuel(d, [50, 100, 200])
        assert [row.scale for row in rows] == [50, 100, 200]
        for row in rows:
            assert row.count == count(row.scale)
            assert row.target == Fraction(target)
            assert row.band == pytest.approx(10 / row.scale)
            assert row.within

    def test_scales(self):
        """Test the default scale selection."""
        assert hilbert_samuel_scales(8) == [2, 4, 8]
        assert hilbert_samuel_scales(1) == [1]


class TestBrunnMinkowski:
    """Tests for the Brunn-Minkowski comparison."""

    def test_superadditive(self, p1xp1, caplog):
        """Test sqrt 18 against 4 for the two boxes."""
        caplog.set_level("WARNING", logger="tropdeg")
        report = brunn_minkowski(bidegree(p1xp1, 1, 2), bidegree(p1xp1, 2, 1))
        assert report.sum_root == pytest.approx(math.sqrt(18))
        assert report.separate_roots == pytest.approx(4.0)
        assert report.superadditive
        assert not report.reverse_direction
        assert "sub-additive form fails" in caplog.text

    def test_homothetic_equality(self, p2, caplog):
        """Test that multiples of one divisor give equality and no warning."""
        caplog.set_level("WARNING", logger="tropdeg")
        report = brunn_minkowski(hyperplane(p2), hyperplane(p2, 2))
        assert report.sum_root == pytest.approx(3.0)
        assert report.superadditive
        assert report.reverse_direction
        assert caplog.text == ""

    @pytest.mark.parametrize("fixture", sorted(NEF_DIVISORS))
    def test_superadditive_for_all_nef_pairs(self, request, fixture):
        """Test the inequality on every pair of listed nef divisors of a fixture."""
        complex_ = request.getfixturevalue(fixture)
        divisors = [DivisorView(complex_, c) for c in NEF_DIVISORS[fixture]]
        for d, f in itertools.combinations_with_replacement(divisors, 2):
            report = brunn_minkowski(d, f)
            assert report.superadditive, (d.coefficients, f.coefficients)

    def test_nef_divisors_are_nef(self, request):
        """Test that the divisor lists above pass the vertex criterion."""
        for fixture, listed in NEF_DIVISORS.items():
            complex_ = request.getfixturevalue(fixture)
            assert all(is_nef(DivisorView(complex_, c)) for c in listed)
