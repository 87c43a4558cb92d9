"""
Tests for metric projections onto the supported cones
"""

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from decimal import Decimal

import numpy as np
import pytest

from src.builtin_problems import worked_example_cone
from src.errors import DimensionError, EnumerationLimitError, ExactArithmeticError
from src.models import HyperplaneCone, OrthantCone, PolyhedralCone, ProductCone, SecondOrderCone
from src.numeric import as_array, exact_context
from src.projections import (
    hyperplane_through, project, project_polyhedral, project_product, translate_project,
)
from src.property_suites import grid_projection_oracle

NORMALS = [[1.0, -1.0], [-1.0, 0.0]]


def test_orthant_clamp():
    result = project(OrthantCone(2), np.array([-1.0, 2.0]))
    assert result.point.tolist() == [0.0, 2.0]
    assert result.distance == pytest.approx(1.0)


def test_hyperplane():
    h = np.sqrt(2.0) / 2
    result = project(HyperplaneCone((h, -h, 0.0, 0.0)), np.array([1.0, 0.0, 0.0, 0.0]))
    assert np.allclose(result.point, [0.5, 0.5, 0.0, 0.0])
    spec = hyperplane_through([3.0, -3.0, 0.0, 0.0])
    assert np.allclose(spec.normal, [h, -h, 0.0, 0.0])


def test_second_order_cases():
    cone = SecondOrderCone(3)
    inside = np.array([0.3, 0.4, 1.0])
    assert np.array_equal(project(cone, inside).point, inside)
    assert np.array_equal(project(cone, np.array([0.3, 0.4, -1.0])).point, np.zeros(3))
    # ||w|| = 5, t = 1: (t + ||w||)/2 = 3 along w/||w||
    assert np.allclose(project(cone, np.array([3.0, 4.0, 1.0])).point, [1.8, 2.4, 3.0])
    tiny = project(cone, np.array([1e-310, 0.0, -1e-311])).point
    assert np.all(np.isfinite(tiny))


def test_polyhedral_worked_example_cone():
    C = worked_example_cone()
    assert np.allclose(project(C, np.array([-1 / 30, 7 / 30])).point, [0.0, 7 / 30])
    assert np.allclose(project(C, np.array([3.0, 1.0])).point, [2.0, 2.0])
    assert np.allclose(project(C, np.array([-1.0, -2.0])).point, [0.0, 0.0])
    result = project(C, np.array([1.0, 3.0]))
    assert result.point.tolist() == [1.0, 3.0]
    assert result.active_set == ()
    print("✅ Polyhedral projections on C")


def test_points_just_outside_C_are_projected():
    result = project_polyhedral(NORMALS, np.array([-5e-10, 0.3]))
    assert result.point.tolist() == [0.0, 0.3]
    assert result.active_set == (1,)

    # u_1 > u_2 by less than the membership slack
    result = project_polyhedral(NORMALS, np.array([0.3 + 4e-10, 0.3]))
    assert result.point[0] == pytest.approx(0.3 + 2e-10, abs=1e-15)
    assert result.point[1] == pytest.approx(result.point[0], abs=1e-15)

    # near the apex the nearest face wins, not the lexicographically first one
    result = project_polyhedral(NORMALS, np.array([-5e-10, 1e-10]))
    assert result.point.tolist() == [0.0, 1e-10]

    with exact_context(40):
        point = project(worked_example_cone(), as_array(["-1e-20", "0.25"], exact=True)).point
        assert point[0] == Decimal(0)
        assert point[1] == Decimal("0.25")


def test_polyhedral_agrees_with_grid_oracle():
    rng = np.random.default_rng(42)
    for v in rng.normal(scale=3.0, size=(20, 2)):
        exact = project_polyhedral(NORMALS, v).point
        oracle = grid_projection_oracle(NORMALS, v)
        assert np.max(np.abs(exact - oracle)) <= 2e-3


def test_polyhedral_exact_arithmetic():
    with exact_context(40):
        v = as_array([-1, 2], exact=True)
        point = project(worked_example_cone(), v).point
        assert point[0] == Decimal(0)
        assert point[1] == Decimal(2)
        point = project(worked_example_cone(), as_array([3, 1], exact=True)).point
        assert point[0] == point[1] == Decimal(2)


def test_polyhedral_limits():
    normals = [[np.cos(t), np.sin(t)] for t in np.linspace(0.1, 1.0, 21)]
    with pytest.raises(EnumerationLimitError):
        project_polyhedral(normals, np.array([1.0, 1.0]))
    with pytest.raises(DimensionError):
        project_polyhedral(NORMALS, np.array([1.0, 1.0, 1.0]))


def test_generator_form():
    cone = PolyhedralCone(m=2, generators=((0.0, 1.0), (1.0, 1.0)))
    assert np.allclose(project(cone, np.array([3.0, 1.0])).point, [2.0, 2.0])
    assert np.allclose(project(cone, np.array([-1.0, -2.0])).point, [0.0, 0.0])
    with exact_context(30):
        with pytest.raises(ExactArithmeticError):
            project(cone, as_array([1, 0], exact=True))


def test_product_leaves_x_alone():
    point = project_product(np.array([5.0, -5.0]), np.array([-1.0, 1.0]), OrthantCone(2))
    assert point.x.tolist() == [5.0, -5.0]
    assert point.u.tolist() == [0.0, 1.0]

    point = project_product(np.array([0.4, 0.4]), np.array([-1 / 30, 7 / 30]), worked_example_cone())
    assert point.x.tolist() == [0.4, 0.4]
    assert np.allclose(point.u, [0.0, 7 / 30])

    u = np.array([0.1, 0.5])
    point = project_product(np.array([1.0, 2.0]), u, worked_example_cone())
    assert np.array_equal(point.u, u)

    K = ProductCone(2, OrthantCone(2))
    assert project(K, np.array([5.0, -5.0, -1.0, 1.0])).point.tolist() == [5.0, -5.0, 0.0, 1.0]
    with pytest.raises(DimensionError):
        project_product(np.zeros(2), np.zeros(3), OrthantCone(2))


def test_translated_projection():
    C = worked_example_cone()
    x = np.array([0.7, -0.3])
    assert np.allclose(translate_project(np.zeros(2), C, x), project(C, x).point)
    assert translate_project(np.array([1.0, 1.0]), OrthantCone(2), np.array([0.0, 3.0])).tolist() == [1.0, 3.0]


def test_projection_is_nonexpansive_and_idempotent():
    C = worked_example_cone()
    rng = np.random.default_rng(3)
    for a, b in rng.normal(size=(50, 2, 2)):
        pa, pb = project(C, a).point, project(C, b).point
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12
        assert np.allclose(project(C, pa).point, pa)


if __name__ == "__main__":
    print("🧪 Testing projections")
    print("=" * 50)
    test_orthant_clamp()
    test_hyperplane()
    test_second_order_cases()
    test_polyhedral_worked_example_cone()
    test_points_just_outside_C_are_projected()
    test_polyhedral_agrees_with_grid_oracle()
    test_polyhedral_exact_arithmetic()
    test_polyhedral_limits()
    test_generator_form()
    test_product_leaves_x_alone()
    test_translated_projection()
    test_projection_is_nonexpansive_and_idempotent()
    print("\n✅ All projection tests passed!")
