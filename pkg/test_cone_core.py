"""
Tests for cone membership, the L-order, generators and simplicial duals
"""

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from src.cone_core import (
    contains, contains_L, contains_M, dual_by_generators, dual_by_sampling,
    dual_contains, dual_simplicial, expected_generator_counts, generator_counts,
    generators_q1, leq_order, lorentz_slack_batch, sample_dual_testers, sample_lorentz,
)
from src.builtin_problems import worked_example_cone
from src.errors import ConeSpecError, DimensionError, SingularMatrixError
from src.models import (
    HyperplaneCone, OrthantCone, Point, PolyhedralCone, ProductCone,
    SecondOrderCone, Tolerance,
)


def test_contains_L_boundary_and_origin():
    """x = ||u|| e and the origin are members"""
    assert contains_L(Point.of((1, 1), (0.6, 0.8)))
    assert contains_L(Point.of((0, 0), (0, 0)))
    print("✅ L membership on the boundary")


def test_M_strictly_larger_than_L():
    z = Point.of((1, 1), (1.5 * 0.6, 1.5 * 0.8))
    assert not contains_L(z)
    assert contains_M(z)
    assert contains_M(Point.of((1, 1), (0.9, 0.9)))
    assert not contains_M(Point.of((-0.1, 1), (0, 0)))
    print("✅ M contains points outside L")


def test_tolerance_widens_membership():
    z = Point.of((1.0,), (1.0 + 1e-7,))
    assert not contains_L(z, Tolerance(1e-9))
    assert contains_L(z, Tolerance(1e-6))
    assert contains_L(z, 1e-6)
    with pytest.raises(ValueError):
        Tolerance(-1.0)


def test_order_examples():
    z = Point.of((0.3, -2.0), (1.0, 5.0))
    assert leq_order(z, z)
    origin = Point.of((0, 0), (0, 0))
    first = Point.of((0.4, 0.4), (-1 / 30, 7 / 30))
    assert leq_order(origin, first)
    e1 = Point.of((1, 0), (0, 0))
    e2 = Point.of((0, 1), (0, 0))
    assert not leq_order(e1, e2)
    assert not leq_order(e2, e1)


def test_order_split_mismatch():
    with pytest.raises(DimensionError):
        leq_order(Point.of((0, 0), (0,)), Point.of((0,), (0, 0)))
    with pytest.raises(DimensionError):
        Point.from_vector([1, 2, 3], 2, 2)


def test_generators_q1_counts():
    l_gens, m_gens = generators_q1(1)
    assert [g.tolist() for g in l_gens] == [[1, 1], [1, -1]]

    l_gens, m_gens = generators_q1(2)
    assert sorted(g.tolist() for g in l_gens) == sorted([[1, 1, 1], [1, 1, -1], [1, 0, 0], [0, 1, 0]])
    assert sorted(g.tolist() for g in m_gens) == sorted([[1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]])
    for p in range(1, 7):
        assert generator_counts(p) == expected_generator_counts(p)
    with pytest.raises(DimensionError):
        generators_q1(0)
    print("✅ q=1 generator lists")


def test_generators_span_the_cones():
    """Every L generator is in L, every M generator in M, and they pair nonnegatively"""
    for p in (1, 2, 3):
        l_gens, m_gens = generators_q1(p)
        for g in l_gens:
            assert contains_L(Point.from_vector(g, p, 1))
        for h in m_gens:
            assert contains_M(Point.from_vector(h, p, 1))
            assert dual_by_generators(h, l_gens)


def test_dual_simplicial():
    assert np.allclose(dual_simplicial(np.eye(3)), np.eye(3))
    U = np.array([[1.0, 1.0], [0.0, 1.0]])
    V = dual_simplicial(U)
    assert np.allclose(V, [[1, 0], [-1, 1]])
    assert np.allclose(U.T @ V, np.eye(2))
    with pytest.raises(SingularMatrixError):
        dual_simplicial([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(DimensionError):
        dual_simplicial([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def test_sampled_members_are_in_L():
    rng = np.random.default_rng(42)
    for p, q in ((1, 1), (2, 1), (2, 2), (3, 4)):
        Z = sample_lorentz(p, q, 500, rng)
        assert np.all(lorentz_slack_batch(Z, p) >= -1e-12)


def test_dual_by_sampling_matches_M():
    rng = np.random.default_rng(7)
    p, q = 2, 3
    testers = sample_dual_testers(p, q, 1000, rng)
    inside = np.array([1.0, 1.0, 1.2, 0.9, 0.0])
    assert contains_M(Point.from_vector(inside, p, q))
    assert dual_by_sampling(inside, p, testers)
    outside = np.array([1.0, 1.0, 2.0, 1.0, 0.5])
    assert not contains_M(Point.from_vector(outside, p, q))
    assert not dual_by_sampling(outside, p, testers)


def test_cone_variant_membership():
    assert contains(OrthantCone(2), np.array([0.0, 3.0]))
    assert not contains(OrthantCone(2), np.array([-0.1, 3.0]))
    # scalar stored last
    assert contains(SecondOrderCone(3), np.array([0.6, 0.8, 1.0]))
    assert not contains(SecondOrderCone(3), np.array([0.6, 0.8, 0.9]))

    C = worked_example_cone()
    assert contains(C, np.array([0.0, 7 / 30]))
    assert not contains(C, np.array([-1 / 30, 7 / 30]))
    assert not contains(C, np.array([2.0, 1.0]))

    line = HyperplaneCone((np.sqrt(0.5), -np.sqrt(0.5)))
    assert contains(line, np.array([2.0, 2.0]))
    assert dual_contains(line, np.array([-3.0, 3.0]))
    assert not dual_contains(line, np.array([1.0, 0.0]))

    K = ProductCone(2, C)
    assert contains(K, np.array([-5.0, 9.0, 0.0, 1.0]))
    assert not dual_contains(K, np.array([1.0, 0.0, 0.0, 1.0]))


def test_worked_example_dual_cone():
    """C* = cone{(-1, 1), (1, 0)}"""
    C = worked_example_cone()
    assert dual_contains(C, np.array([-1.0, 1.0]))
    assert dual_contains(C, np.array([1.0, 0.0]))
    assert dual_contains(C, np.array([0.0, 0.0]))
    assert not dual_contains(C, np.array([0.1333, -0.1333]))

    generated = PolyhedralCone(m=2, generators=((0.0, 1.0), (1.0, 1.0)))
    assert contains(generated, np.array([0.5, 2.0]))
    assert not contains(generated, np.array([1.0, 0.0]))
    assert dual_contains(generated, np.array([-1.0, 1.0]))


def test_cone_spec_validation():
    with pytest.raises(ConeSpecError):
        HyperplaneCone((1.0, 1.0))
    with pytest.raises(ConeSpecError):
        PolyhedralCone(m=2, normals=())
    with pytest.raises(ConeSpecError):
        PolyhedralCone(m=2, normals=((0.0, 0.0),))
    with pytest.raises(ConeSpecError):
        PolyhedralCone(m=2, normals=((1.0, 0.0),), generators=((1.0, 0.0),))
    with pytest.raises(ConeSpecError):
        ProductCone(1, ProductCone(1, OrthantCone(1)))
    with pytest.raises(DimensionError):
        contains(OrthantCone(3), np.zeros(2))


if __name__ == "__main__":
    print("🧪 Testing cone core")
    print("=" * 50)
    test_contains_L_boundary_and_origin()
    test_M_strictly_larger_than_L()
    test_tolerance_widens_membership()
    test_order_examples()
    test_order_split_mismatch()
    test_generators_q1_counts()
    test_generators_span_the_cones()
    test_dual_simplicial()
    test_sampled_members_are_in_L()
    test_dual_by_sampling_matches_M()
    test_cone_variant_membership()
    test_worked_example_dual_cone()
    test_cone_spec_validation()
    print("\n✅ All cone core tests passed!")
