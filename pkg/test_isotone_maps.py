"""
Tests for monotone scalar functions, isotone combinations and the
hyperplane isotonicity conditions
"""

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import math
from decimal import Decimal

import numpy as np
import pytest

from src.builtin_problems import worked_example_combination
from src.cone_core import generators_q1
from src.errors import ConeSpecError, DimensionError, ExactArithmeticError, MapSpecError
from src.isotone_maps import (
    HALF_SQRT2, CombinationMapping, apply_descriptor, build_combination, build_map,
    classify_hyperplane, evaluate_scalar, generator_isotonicity_condition,
    segment_monotonicity,
    test_isotonicity as sample_isotonicity, validate_lorentz_affine, validate_scalar_fn,
)
from src.models import (
    AffineDescriptor, AffineMap, ArctanDescriptor, CombinationMap, CombinationTerm,
    Composed, ComposedDescriptor, ExpDescriptor, IsotoneCombination, LorentzAffine,
    PiecewiseLinearDescriptor, SeparableSimplicial,
)
from src.numeric import as_array, exact_context


def test_descriptors():
    assert apply_descriptor(AffineDescriptor(2.0, 1.0), 3.0) == 7.0
    assert apply_descriptor(ExpDescriptor(2.0, 0.0), 5.0) == 2.0
    assert apply_descriptor(ArctanDescriptor(1.0, 1.0), 1.0) == pytest.approx(math.pi / 4)
    pwl = PiecewiseLinearDescriptor((0.0, 1.0, 2.0), (0.0, 2.0, 2.5))
    assert apply_descriptor(pwl, 0.5) == pytest.approx(1.0)
    assert apply_descriptor(pwl, -3.0) == 0.0
    assert apply_descriptor(pwl, 9.0) == 2.5
    composed = ComposedDescriptor(outer=AffineDescriptor(3.0), inner=pwl)
    assert apply_descriptor(composed, 1.5) == pytest.approx(6.75)


def test_descriptor_validation():
    with pytest.raises(MapSpecError):
        AffineDescriptor(-1.0)
    with pytest.raises(MapSpecError):
        PiecewiseLinearDescriptor((0.0, 1.0), (1.0, 0.0))
    with pytest.raises(MapSpecError):
        PiecewiseLinearDescriptor((1.0, 1.0), (0.0, 1.0))


def test_exact_descriptors():
    with exact_context(40):
        t = as_array([0.5], exact=True)[0]
        pwl = PiecewiseLinearDescriptor((0.0, 1.0), (0.0, 3.0))
        assert apply_descriptor(pwl, t) == Decimal("1.5")
        with pytest.raises(ExactArithmeticError):
            apply_descriptor(ArctanDescriptor(), t)


def test_validate_lorentz_affine():
    assert validate_lorentz_affine((1 / 12, 0.0), 1 / 12)
    assert validate_lorentz_affine((0.0, 1 / 12), 1 / 12)
    assert not validate_lorentz_affine((0.0, 0.0), 0.1)
    assert not validate_lorentz_affine((-0.1, 1.0), 0.0)


def test_constant_combination():
    constant = LorentzAffine(d=(0.0, 0.0), beta=0.0, gamma=1.0)
    comb = IsotoneCombination(p=2, q=2, terms=(CombinationTerm(constant, (1, 1, 0, 0)),))
    F = build_combination(comb)
    assert F(np.array([3.0, -1.0, 2.0, 7.0])).tolist() == [1.0, 1.0, 0.0, 0.0]


def test_worked_example_combination_at_origin():
    T = build_combination(worked_example_combination())
    assert np.allclose(T(np.zeros(4)), [0.4, 0.4, -1 / 30, 7 / 30])
    F = build_map(CombinationMap(worked_example_combination()), 2, 2)
    assert np.allclose(F(np.zeros(4)), [-0.4, -0.4, 1 / 30, -7 / 30])
    print("✅ Worked example map at the origin")


def test_weight_outside_L_is_rejected():
    f = LorentzAffine(d=(1.0, 0.0), beta=0.0)
    comb = IsotoneCombination(p=2, q=2, terms=(CombinationTerm(f, (0.1, 1.0, 1.0, 0.0)),))
    with pytest.raises(MapSpecError, match=r"x_1 >= \|\|u\|\| fails"):
        build_combination(comb)


def test_non_monotone_function_is_rejected():
    f = LorentzAffine(d=(0.0, 0.0), beta=0.1)
    comb = IsotoneCombination(p=2, q=2, terms=(CombinationTerm(f, (1, 1, 0, 0)),))
    with pytest.raises(MapSpecError):
        build_combination(comb)
    with pytest.raises(DimensionError):
        validate_scalar_fn(LorentzAffine(d=(1.0,)), 2, 2)


def test_separable_simplicial():
    # L(1, 1) is simplicial with generators (1, 1) and (1, -1)
    fn = SeparableSimplicial(U=((1.0, 1.0), (1.0, -1.0)), g=(AffineDescriptor(1.0), ExpDescriptor()))
    validate_scalar_fn(fn, 1, 1)
    assert evaluate_scalar(fn, np.array([2.0, 0.0]), 1) == pytest.approx(1.0 + math.e)

    orthant = SeparableSimplicial(U=tuple(tuple(r) for r in np.eye(4)), g=(AffineDescriptor(1.0),) * 4)
    with pytest.raises(MapSpecError):
        validate_scalar_fn(orthant, 2, 2)


def test_isotonicity_sampling():
    identity = sample_isotonicity(lambda z: z, 2, 2, samples=2000, seed=42)
    assert identity.passed

    T = build_combination(worked_example_combination())
    report = sample_isotonicity(T, 2, 2, samples=10000, seed=42)
    assert report.violations == 0

    negation = sample_isotonicity(lambda z: -z, 1, 1, samples=2000, seed=42)
    assert negation.violations > 1000
    assert negation.witnesses
    witness = negation.witnesses[0]
    assert witness.slack < 0
    print("✅ Isotonicity sampling")


def test_affine_map():
    F = build_map(AffineMap(matrix=np.eye(2).tolist(), offset=(1.0, -1.0)), 1, 1)
    assert F(np.array([2.0, 3.0])).tolist() == [3.0, 2.0]
    with pytest.raises(DimensionError):
        build_map(AffineMap(matrix=np.eye(2).tolist(), offset=(1.0, -1.0)), 2, 2)


def test_composed_function_is_monotone_along_segments():
    inner = LorentzAffine(d=(0.5, 0.5), beta=0.7, gamma=-1.0)
    fn = Composed(inner=inner, psi=ComposedDescriptor(ExpDescriptor(1.0, 0.3), AffineDescriptor(2.0)))
    validate_scalar_fn(fn, 2, 3)
    assert segment_monotonicity(fn, 2, 3, segments=200, seed=42) == 0


def test_classify_hyperplane():
    assert classify_hyperplane((0.0, 0.0), (1.0, 0.0))
    assert classify_hyperplane((HALF_SQRT2, -HALF_SQRT2), (0.0, 0.0))
    assert classify_hyperplane((HALF_SQRT2, 0.0, -HALF_SQRT2), (0.0, 0.0))
    assert not classify_hyperplane((1.0, 0.0), (0.0, 0.0))
    assert not classify_hyperplane((0.5, -0.5), (HALF_SQRT2, 0.0))
    with pytest.raises(DimensionError):
        classify_hyperplane((1.0,), (0.0, 0.0))
    with pytest.raises(ConeSpecError):
        classify_hyperplane((1.0, 1.0), (0.0, 0.0))


def test_generator_isotonicity_condition():
    orthant = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    assert generator_isotonicity_condition((HALF_SQRT2, -HALF_SQRT2), orthant, orthant)
    assert generator_isotonicity_condition((1.0, 0.0), orthant, orthant)

    l_gens, m_gens = generators_q1(2)
    assert generator_isotonicity_condition((HALF_SQRT2, -HALF_SQRT2, 0.0), l_gens, m_gens)
    assert not generator_isotonicity_condition((1.0, 0.0, 0.0), l_gens, m_gens)
    with pytest.raises(ConeSpecError):
        generator_isotonicity_condition((1.0, 1.0), orthant, orthant)
    with pytest.raises(ConeSpecError):
        generator_isotonicity_condition((1.0, 0.0), [], orthant)


def test_mapping_rejects_wrong_length():
    T = CombinationMapping(worked_example_combination())
    with pytest.raises(DimensionError):
        T(np.zeros(3))


if __name__ == "__main__":
    print("🧪 Testing isotone maps")
    print("=" * 50)
    test_descriptors()
    test_descriptor_validation()
    test_exact_descriptors()
    test_validate_lorentz_affine()
    test_constant_combination()
    test_worked_example_combination_at_origin()
    test_weight_outside_L_is_rejected()
    test_non_monotone_function_is_rejected()
    test_separable_simplicial()
    test_isotonicity_sampling()
    test_affine_map()
    test_composed_function_is_monotone_along_segments()
    test_classify_hyperplane()
    test_generator_isotonicity_condition()
    test_mapping_rejects_wrong_length()
    print("\n✅ All isotone map tests passed!")
