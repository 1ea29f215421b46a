"""Tests for conical complexes, validation and subdivisions."""

import math
from fractions import Fraction

import pytest

from tropdeg.core.complex import (
    APEX,
    ConicalComplex,
    Point,
    Subdivision,
    bisect_maximal_cones,
    cone_key,
    cone_volume,
    ensure_valid,
    euclidean_normal,
    facet_data,
    locate,
    make_cone,
    parse_cone_key,
    refinement_ladder,
    sphere_atom,
    stellar_subdivide,
    validate,
)
from tropdeg.core.exceptions import ComplexValidationError, SubdivisionError


def codes(report):
    return {issue.code for issue in report.issues}


class TestConeKeys:
    """Tests for cone keys."""

    def test_make_cone_sorts(self):
        """Test canonical ordering."""
        assert make_cone(["e2", "e1"]) == ("e1", "e2")

    def test_make_cone_rejects_repeats(self):
        """Test that a repeated ray is an error."""
        with pytest.raises(ComplexValidationError, match="repeated-ray"):
            make_cone(["e1", "e1"])

    def test_key_round_trip(self):
        """Test key serialization of cones and the apex."""
        assert cone_key(("e1", "e2")) == "e1|e2"
        assert parse_cone_key("e2|e1") == ("e1", "e2")
        assert parse_cone_key("apex") == APEX


class TestFaces:
    """Tests for the face lattice."""

    def test_p2_faces(self, p2):
        """Test face counts of the P2 fan."""
        assert p2.dim == 2
        assert len(p2.faces_of_dim(0)) == 1
        assert len(p2.faces_of_dim(1)) == 3
        assert len(p2.faces_of_dim(2)) == 3

    def test_cofaces(self, p2):
        """Test that each ray of P2 lies in two maximal cones."""
        assert p2.cofaces[("e1",)] == (("e1", "e2"), ("e1", "e3"))
        assert len(p2.cofaces[APEX]) == 3

    def test_unknown_face(self, p2):
        """Test require_face on a non-face."""
        with pytest.raises(ComplexValidationError, match="unknown-cone"):
            p2.require_face(("e1", "x"))


class TestValidate:
    """Tests for validate."""

    def test_fixtures_are_valid(self, p2, p1xp1, hirzebruch1, p3, elliptic):
        """Test that every fixture passes validation."""
        for c in (p2, p1xp1, hirzebruch1, p3, elliptic):
            assert validate(c).is_valid, c.name

    def test_dependent_images(self):
        """Test that dependent images on a cone are an error."""
        c = ConicalComplex.build(2, {"a": (1, 0), "b": (2, 0)}, [("a", "b")])
        report = validate(c)
        assert report.has_errors
        assert "dependent-images" in codes(report)

    def test_orphan_ray(self):
        """Test that an unused ray is reported."""
        c = ConicalComplex.build(1, {"a": (1,), "b": (-1,), "c": (2,)}, [("a",), ("b",)])
        assert "orphan-ray" in codes(validate(c))

    def test_unknown_ray(self):
        """Test a cone naming a ray that does not exist."""
        c = ConicalComplex.build(1, {"a": (1,)}, [("a",), ("z",)])
        assert "unknown-ray" in codes(validate(c))

    def test_redundant_cone(self):
        """Test that listing a face of another cone is an error."""
        c = ConicalComplex.build(2, {"a": (1, 0), "b": (0, 1)}, [("a", "b"), ("a",)])
        report = validate(c)
        assert "redundant-cone" in codes(report)

    def test_zero_image(self):
        """Test that a zero ray image is an error."""
        c = ConicalComplex.build(1, {"a": (0,)}, [("a",)])
        assert "zero-image" in codes(validate(c))

    def test_non_saturated_is_a_warning(self):
        """Test that a non-saturated cone only warns."""
        c = ConicalComplex.build(2, {"a": (2, 0), "b": (0, 1)}, [("a", "b")])
        report = validate(c)
        assert report.is_valid
        assert report.has_warnings
        assert "non-saturated" in codes(report)

    def test_elliptic_image_two_only_warns(self, elliptic):
        """Test that a ray image of 2 is a saturation warning on that ray alone."""
        report = validate(elliptic)
        assert report.is_valid
        assert [(i.code, i.cone) for i in report.issues] == [("non-saturated", "O")]

    def test_ensure_valid_raises_first_error(self):
        """Test that ensure_valid raises with the diagnostic code."""
        c = ConicalComplex.build(2, {"a": (1, 0), "b": (2, 0)}, [("a", "b")])
        with pytest.raises(ComplexValidationError) as exc_info:
            ensure_valid(c)
        assert exc_info.value.code == "dependent-images"


class TestGeometry:
    """Tests for normals, volumes and sphere atoms."""

    def test_facet_data(self, p2):
        """Test the orthogonal decomposition of e1 over e3."""
        data = facet_data(p2, ("e3",), ("e1", "e3"))
        assert data.extra == "e1"
        assert data.coefficients == (Fraction(-1, 2),)
        assert data.perp_sq == Fraction(1, 2)

    def test_euclidean_normal_is_unit(self, p2):
        """Test that the normal is a unit vector orthogonal to the facet."""
        n = euclidean_normal(p2, ("e3",), ("e1", "e3"))
        assert float(n @ n) == pytest.approx(1.0)
        assert float(n @ [-1.0, -1.0]) == pytest.approx(0.0)

    def test_cone_volume(self, p2):
        """Test covolumes of rays and maximal cones."""
        assert cone_volume(p2, ("e3",)) == pytest.approx(math.sqrt(2))
        assert cone_volume(p2, ("e2", "e3")) == pytest.approx(1.0)
        assert cone_volume(p2, APEX) == 1.0

    def test_sphere_atom(self, p2):
        """Test the unit representative of a ray."""
        atom = sphere_atom(p2, "e3")
        assert atom.unit_image == pytest.approx((-1 / math.sqrt(2), -1 / math.sqrt(2)))

    def test_locate_drops_zero_coefficients(self, p2):
        """Test that points move to their carrier."""
        p = locate(p2, Point(("e1", "e2"), (Fraction(2), Fraction(0))))
        assert p.cone == ("e1",)
        assert p.coefficients == (Fraction(2),)

    def test_negative_coefficient_rejected(self):
        """Test that points outside a cone are rejected."""
        with pytest.raises(ComplexValidationError, match="outside-cone"):
            Point(("a",), (Fraction(-1),))


class TestStellarSubdivision:
    """Tests for stellar subdivision."""

    def test_bisect_p2_cone(self, p2):
        """Test splitting the first quadrant at e1 + e2."""
        s = stellar_subdivide(p2, Point(("e1", "e2"), (Fraction(1), Fraction(1))))
        assert len(s.fine.maximal_cones) == 4
        new = (set(s.fine.ray_ids) - set(p2.ray_ids)).pop()
        assert s.fine.image(new) == (1, 1)
        assert not s.check().has_errors
        assert validate(s.fine).is_valid

    def test_subdivide_ray_interior_of_edge(self, p3):
        """Test splitting a 2-dimensional face of P3 splits both cofaces."""
        s = stellar_subdivide(p3, Point(("e1", "e2"), (Fraction(1), Fraction(1))), new_id="m")
        assert len(s.fine.maximal_cones) == 6
        assert s.point("m").cone == ("e1", "e2")
        assert not s.check().has_errors

    def test_point_on_face_rejected(self, p2):
        """Test that a zero coefficient is refused."""
        with pytest.raises(SubdivisionError, match="proper face"):
            stellar_subdivide(p2, Point(("e1", "e2"), (Fraction(1), Fraction(0))))

    def test_non_unimodular_rejected(self, p2):
        """Test that a split with index 2 is refused."""
        with pytest.raises(SubdivisionError, match="not unimodular"):
            stellar_subdivide(p2, Point(("e1", "e2"), (Fraction(1), Fraction(2))))

    def test_duplicate_new_id(self, p2):
        """Test that an existing ray id cannot be reused."""
        with pytest.raises(SubdivisionError, match="already exists"):
            stellar_subdivide(p2, Point(("e1", "e2"), (Fraction(1), Fraction(1))), new_id="e3")


class TestSubdivisionMaps:
    """Tests for the Subdivision record."""

    def test_identity_checks(self, p2):
        """Test that the identity is a valid refinement."""
        assert not Subdivision.identity(p2).check().issues

    def test_missing_piece_fails_coverage(self, p2):
        """Test that dropping a fine cone breaks coverage."""
        s = bisect_maximal_cones(p2)
        broken_fine = ConicalComplex(
            s.fine.ambient_dim,
            s.fine.rays,
            s.fine.maximal_cones[1:],
            s.fine.inner_product,
        )
        broken = Subdivision(broken_fine, p2, s.ray_map)
        assert "coverage" in {i.code for i in broken.check().issues}

    def test_push_point(self, p2):
        """Test expressing a fine point in the coarse complex."""
        s = bisect_maximal_cones(p2, [("e1", "e2")])
        new = "e1+e2"
        p = s.push_point(Point((new, "e2"), (Fraction(1), Fraction(1))))
        assert p.cone == ("e1", "e2")
        assert p.coefficients == (Fraction(1), Fraction(2))

    def test_compose(self, p2):
        """Test that two bisections chain into one refinement."""
        first = bisect_maximal_cones(p2)
        second = bisect_maximal_cones(first.fine)
        chained = first.compose(second)
        assert chained.coarse is p2
        assert not chained.check().has_errors

    def test_compose_requires_chain(self, p2, p1xp1):
        """Test that unrelated subdivisions do not compose."""
        with pytest.raises(SubdivisionError, match="do not chain"):
            Subdivision.identity(p2).compose(Subdivision.identity(p1xp1))

    def test_refinement_ladder(self, p2):
        """Test that each rung doubles the maximal cones of P2."""
        ladder = refinement_ladder(p2, 3)
        assert [len(s.fine.maximal_cones) for s in ladder] == [3, 6, 12, 24]
        for s in ladder:
            assert not s.check().has_errors

    def test_bisect_rejects_rays(self, elliptic):
        """Test that 1-dimensional maximal cones cannot be bisected."""
        with pytest.raises(SubdivisionError):
            bisect_maximal_cones(elliptic)
