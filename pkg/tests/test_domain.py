import math

import numpy as np
import pytest

from src.config import BoundaryDataConfig, DomainConfig
from src.domain import (
    BoundaryFunction,
    ConvexDomain,
    HoelderModulus,
    Line,
    boundary_data_from_config,
    cos_data,
    disk,
    domain_from_config,
    lens,
    linear_data,
    regularity_constant,
    square,
    stadium,
    superellipse,
    tabulated_modulus,
    two_bump_data,
)
from src.errors import DomainError, NotUniformlyConvexError


def test_disk_geometry(unit_disk):
    assert len(unit_disk) == 256
    assert unit_disk.area == pytest.approx(math.pi, rel=1e-3)
    assert unit_disk.perimeter == pytest.approx(2 * math.pi, rel=1e-3)
    assert unit_disk.diameter == pytest.approx(2.0)
    assert np.allclose(unit_disk.centroid, 0.0, atol=1e-12)
    assert unit_disk.is_strictly_convex
    assert len(unit_disk.corners()) == 0


def test_clockwise_input_is_reoriented():
    cw = disk(1.0, 64).vertices[::-1]
    dom = ConvexDomain(cw)
    assert dom.area > 0


def test_nonconvex_boundary_rejected():
    with pytest.raises(DomainError):
        ConvexDomain([[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [2.0, 2.0], [0.0, 2.0]])
    with pytest.raises(DomainError):
        ConvexDomain([[0.0, 0.0], [1.0, 0.0]])


def test_square_is_convex_not_strictly():
    sq = square(1.0)
    assert not sq.is_strictly_convex
    assert len(sq.corners()) == 4
    assert sq.area == pytest.approx(4.0)
    with pytest.raises(NotUniformlyConvexError):
        sq.uniform_convexity_coefficient()


def test_stadium_has_flat_sides():
    assert not stadium().is_strictly_convex


def test_disk_regularity_constant():
    dom = disk(1.0, 256)
    a = dom.uniform_convexity_coefficient()
    assert a == pytest.approx(0.5, rel=1e-2)
    assert regularity_constant(dom) == pytest.approx(4.0, rel=1e-2)


def test_ellipse_regularity_constant(wide_ellipse):
    wide_ellipse.uniform_convexity_coefficient()
    assert wide_ellipse.regularity_constant() == pytest.approx(12.0, rel=1e-2)


def test_regularity_constant_needs_coefficient():
    with pytest.raises(DomainError):
        disk(1.0, 64).regularity_constant()


def test_superellipse_beta_coefficient():
    dom = superellipse(4.0, 256)
    assert dom.beta == pytest.approx(2.0)
    a = dom.beta_convexity_coefficient(2.0)
    assert a > 0
    dom.uniform_convexity_coefficient()
    c = dom.regularity_constant()
    assert c == pytest.approx(dom.diameter ** 1.5 + (1.0 / dom.parabola_coeff) ** 0.5)


def test_lens_has_two_corners():
    dom = lens(math.pi / 16)
    assert dom.is_strictly_convex
    corners = dom.corners()
    assert len(corners) == 2
    pts = dom.vertices[corners]
    assert np.allclose(np.sort(np.abs(pts[:, 0])), 1.0, atol=1e-9)
    with pytest.raises(DomainError):
        lens(0.0)


def test_contains(unit_disk):
    inside = unit_disk.contains([[0.0, 0.0], [0.5, 0.5], [2.0, 0.0], [0.0, -1.5]])
    assert inside.tolist() == [True, True, False, False]


def test_chord_intersections(unit_disk):
    ends = unit_disk.chord_intersections(Line.through((0.0, 0.0), (1.0, 0.0)))
    assert len(ends) == 2
    assert np.allclose(ends[0], [-1.0, 0.0], atol=1e-9)
    assert np.allclose(ends[1], [1.0, 0.0], atol=1e-9)
    assert unit_disk.chord_intersections(Line.vertical(3.0)) == []


def test_supporting_line_smooth_and_corner(unit_disk):
    sl = unit_disk.supporting_line([1.0, 0.0])
    assert not sl.corner
    assert np.allclose(sl.normal, [1.0, 0.0], atol=1e-9)
    assert sl.supports(unit_disk)

    sq = square(1.0)
    corner = sq.supporting_line([1.0, 1.0])
    assert corner.corner
    lo, hi = corner.normal_interval
    assert hi - lo == pytest.approx(math.pi / 2, abs=1e-6)
    assert corner.supports(sq)
    with pytest.raises(DomainError):
        unit_disk.supporting_line([0.0, 0.0])


def test_nearest_boundary(unit_disk):
    proj = unit_disk.nearest_boundary([[0.5, 0.0], [0.0, 2.0]])
    assert proj.distance[0] == pytest.approx(0.5, abs=1e-3)
    assert proj.distance[1] == pytest.approx(1.0, abs=1e-3)


def test_sample_interior(unit_disk):
    pts = unit_disk.sample_interior(300, np.random.default_rng(0), margin=0.05)
    assert pts.shape == (300, 2)
    assert np.all(np.linalg.norm(pts, axis=1) < 0.96)


def test_cos_data_is_x_on_the_disk(unit_disk, cos_f):
    assert np.allclose(cos_f.values, unit_disk.vertices[:, 0])
    assert cos_f.min == pytest.approx(-1.0)
    assert cos_f.max == pytest.approx(1.0)
    assert cos_f.oscillation == pytest.approx(2.0)
    # periodic, linear in arc length between samples
    s = unit_disk.arclength[3]
    assert cos_f(s) == pytest.approx(cos_f.values[3])
    assert cos_f(s + unit_disk.perimeter) == pytest.approx(cos_f.values[3])


def test_linear_data_modulus(linear_f):
    assert linear_f.modulus(1.0) == pytest.approx(1.0)
    assert linear_f.modulus_violation() <= 1.0 + 1e-9


def test_estimated_and_tabulated_moduli(unit_disk):
    f = two_bump_data(unit_disk)
    assert f.modulus_violation() <= 1.0 + 1e-9
    tab = tabulated_modulus(unit_disk, f.values)
    assert tab(0.0) == 0.0
    d = np.linspace(0.0, 3.0, 50)
    assert np.all(np.diff(tab(d)) >= -1e-15)
    assert tab(unit_disk.diameter) == pytest.approx(f.oscillation)


def test_hoelder_modulus():
    m = HoelderModulus(2.0, 0.5)
    assert m(4.0) == pytest.approx(4.0)
    assert m.holder_exponent() == 0.5
    with pytest.raises(DomainError):
        HoelderModulus(1.0, 1.5)


def test_two_bump_data_shape(unit_disk):
    f = two_bump_data(unit_disk, (1.0, 0.6))
    assert f.max == pytest.approx(1.0)
    assert f.min == pytest.approx(0.0, abs=1e-12)
    left = np.argmin(unit_disk.vertices[:, 0])
    assert f.values[left] == pytest.approx(0.6)


def test_boundary_values_shape_checked(unit_disk):
    with pytest.raises(DomainError):
        BoundaryFunction(unit_disk, np.zeros(3))


def test_domain_and_data_from_config():
    dom = domain_from_config(DomainConfig(shape="ellipse", semi_axes=[2.0, 1.0], samples=128))
    assert dom.diameter == pytest.approx(4.0)
    f = boundary_data_from_config(dom, BoundaryDataConfig(kind="linear", direction=[0.0, 1.0]))
    assert np.allclose(f.values, dom.vertices[:, 1])
    with pytest.raises(DomainError):
        domain_from_config(DomainConfig(shape="torus"))
    with pytest.raises(DomainError):
        domain_from_config(DomainConfig(shape="polygon"))
    with pytest.raises(DomainError):
        boundary_data_from_config(dom, BoundaryDataConfig(kind="noise"))


def test_cos_data_on_ellipse_uses_polar_angle(wide_ellipse):
    f = cos_data(wide_ellipse)
    rel = wide_ellipse.vertices
    assert np.allclose(f.values, rel[:, 0] / np.linalg.norm(rel, axis=1))


def test_coefficients_are_kept_per_beta():
    dom = superellipse(4.0, 256)
    a2 = dom.uniform_convexity_coefficient(2.0)
    assert dom.has_coefficient(2.0) and dom.has_coefficient()
    assert not dom.has_coefficient(0.0)
    assert dom.parabola_coeff == a2
    with pytest.raises(DomainError):
        dom.regularity_constant(0.0)
    assert dom.regularity_constant(2.0) == pytest.approx(dom.diameter ** 1.5 + (1.0 / a2) ** 0.5)
