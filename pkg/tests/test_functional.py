import math

import numpy as np
import pytest

from src.anisotropy import hexagon, l1, l2, lp, regularize
from src.chord_solver import solve_strict
from src.errors import DomainError
from src.functional import (
    EnergyReport,
    Polyline,
    anisotropic_length,
    coarea_tv,
    energy_report,
    jensen_lower_bound,
    level_cell_widths,
    relaxed_energy,
)


def test_polyline_validation():
    with pytest.raises(DomainError):
        Polyline(np.array([[0.0, 0.0]]))
    with pytest.raises(DomainError):
        Polyline(np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]))


def test_polyline_normals_are_left_normals():
    line = Polyline(np.array([[0.0, 0.0], [2.0, 0.0]]))
    assert np.allclose(line.normals, [[0.0, 1.0]])
    assert line.euclidean_length == pytest.approx(2.0)


def test_anisotropic_length_of_segments():
    horizontal = Polyline(np.array([[0.0, 0.0], [1.0, 0.0]]))
    diagonal = Polyline(np.array([[0.0, 0.0], [1.0, 1.0]]))
    assert anisotropic_length(l1(), horizontal) == pytest.approx(1.0)
    assert anisotropic_length(l1(), diagonal) == pytest.approx(2.0)
    assert anisotropic_length(l2(), diagonal) == pytest.approx(math.sqrt(2.0))


@pytest.mark.parametrize(
    "norm", [l1(), l2(), lp(4.0), hexagon(), hexagon(0.2), regularize(l1(), 0.3)], ids=lambda n: n.form
)
def test_jensen_lower_bound(norm):
    rng = np.random.default_rng(3)
    for _ in range(1000):
        verts = rng.normal(size=(6, 2))
        curve = Polyline(verts)
        a, b = curve.endpoints
        assert jensen_lower_bound(norm, a, b) <= anisotropic_length(norm, curve) + 1e-12


def test_level_cell_widths():
    w = level_cell_widths(np.linspace(0.0, 1.0, 5))
    assert np.allclose(w, [0.125, 0.25, 0.25, 0.25, 0.125])
    assert w.sum() == pytest.approx(1.0)
    assert level_cell_widths(np.array([0.3]), spacing=0.7).tolist() == [0.7]
    assert len(level_cell_widths(np.empty(0))) == 0


def test_energy_report_fields():
    rep = EnergyReport(2.0, 0.5)
    assert rep.total == pytest.approx(2.5)
    assert rep.to_dict() == {"interior": 2.0, "boundary": 0.5, "total": 2.5}


def test_coarea_of_linear_solution_is_area(unit_disk, linear_f):
    family = solve_strict(l2(), unit_disk, linear_f, levels=201)
    tv = coarea_tv(l2(), family)
    assert tv == pytest.approx(unit_disk.area, rel=1e-2)
    rep = relaxed_energy(l2(), unit_disk, family, linear_f)
    assert rep.interior == pytest.approx(tv)
    assert rep.boundary < 1e-3
    as_dict = energy_report(l2(), unit_disk, family, linear_f)
    assert as_dict["total"] == pytest.approx(rep.total)


def test_anisotropic_coarea_uses_level_normals(unit_disk, linear_f):
    # the levels of x are vertical, whose normals (1, 0) have l1 value 1
    family = solve_strict(l2(), unit_disk, linear_f, levels=101)
    assert coarea_tv(l1(), family) == pytest.approx(coarea_tv(l2(), family), rel=1e-9)
