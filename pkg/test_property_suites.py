"""
Tests for the sampled property suites behind the verify command
"""

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from src.builtin_problems import OMEGA_POINT, worked_example
from src.config import config
from src.numeric import to_float
from src.property_suites import SUITES, PropertyVerifier, check_points, fat_random_cone, run_suite


def failed(results):
    return [(r.name, r.detail, r.witnesses) for r in results if not r.passed]


def test_duality_suite():
    results = run_suite("duality", 2, 2, samples=2000, seed=42)
    names = [r.name for r in results]
    assert "M = L* (sampled)" in names
    assert "M strictly larger than L" in names
    assert not failed(results)
    print(f"✅ Duality suite: {len(results)} properties hold")


def test_duality_suite_q1_and_p1():
    results = run_suite("duality", 3, 1, samples=2000, seed=42)
    assert "generator enumeration for q = 1" in [r.name for r in results]
    assert not failed(results)

    results = run_suite("duality", 1, 1, samples=2000, seed=42)
    assert "L is self-dual for p = 1" in [r.name for r in results]
    assert not failed(results)


def test_hyperplane_suite(monkeypatch):
    monkeypatch.setattr(config.sampling, "HYPERPLANE_NORMALS", 40)
    results = run_suite("hyperplane", 2, 2, seed=42)
    assert len(results) == 1
    assert not failed(results)

    results = run_suite("hyperplane", 2, 1, seed=42)
    assert not failed(results)


def test_duality_at_full_sample_size():
    for p, q in [(2, 2), (3, 2), (2, 3), (2, 1)]:
        results = run_suite("duality", p, q, samples=10000, seed=42)
        assert not failed(results), (p, q)
    print("✅ Duality holds on 10^4 points for every shape")


def test_hyperplane_suite_default_normals():
    assert config.sampling.HYPERPLANE_NORMALS == 1000
    for p, q in [(2, 2), (2, 1), (3, 1)]:
        results = run_suite("hyperplane", p, q, seed=42)
        assert not failed(results), (p, q)


def test_projection_suite_full_sample_size():
    results = run_suite("projection", 2, 2, samples=10000, seed=42)
    labels = {r.name.split(":")[0] for r in results}
    assert {"orthant", "second-order", "worked-example"} <= labels
    assert not failed(results)


def test_projection_suite():
    results = PropertyVerifier(2, 2, samples=300, seed=42).run("projection")
    labels = {r.name.split(":")[0] for r in results}
    assert {"orthant", "second-order", "worked-example"} <= labels
    assert not failed(results)


def test_isotone_suite():
    results = run_suite("isotone", 2, 2, samples=1000, seed=42)
    assert "worked example step map is isotone" in [r.name for r in results]
    assert "negation is not isotone" in [r.name for r in results]
    assert not failed(results)

    assert not failed(run_suite("isotone", 1, 3, samples=500, seed=7))


def test_unknown_suite():
    assert "duality" in SUITES
    with pytest.raises(ValueError):
        run_suite("everything", 2, 2)


def test_check_points():
    problem = worked_example()
    results = check_points(problem, [to_float(OMEGA_POINT)])
    assert len(results) == 2
    assert all(r.passed for r in results)
    assert "24.6" in results[0].detail

    results = check_points(problem, [np.zeros(4)])
    omega, gamma = results
    assert not omega.passed
    # one step from the origin moves up, not down
    assert not gamma.passed


def test_fat_random_cone_perturbs_orthant():
    rng = np.random.default_rng(0)
    normals = np.array(fat_random_cone(3, rng))
    assert normals.shape == (3, 3)
    assert np.all(np.diag(normals) < 0)


if __name__ == "__main__":
    print("🧪 Testing property suites")
    print("=" * 50)
    test_duality_suite()
    test_duality_suite_q1_and_p1()
    test_duality_at_full_sample_size()
    test_hyperplane_suite_default_normals()
    test_projection_suite()
    test_projection_suite_full_sample_size()
    test_isotone_suite()
    test_unknown_suite()
    test_check_points()
    test_fat_random_cone_perturbs_orthant()
    print("\n✅ All property suite tests passed!")
