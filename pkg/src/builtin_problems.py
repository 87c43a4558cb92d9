"""
Builtin complementarity problems, usable without a problem file.

Constants are kept as Fractions so the exact solver path sees them without
rounding.
"""

from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from .errors import ProblemFileError
from .models import (
    AffineMap, CombinationMap, CombinationTerm, IsotoneCombination,
    LorentzAffine, PolyhedralCone, Problem, SecondOrderCone,
)
from .numeric import exact_context, to_decimal

F = Fraction

WORKED_EXAMPLE_ID = "paper-example-7"

# C = {u : u_2 >= u_1 >= 0} as {u : <n_j, u> <= 0}
WORKED_EXAMPLE_NORMALS = ((F(1), F(-1)), (F(-1), F(0)))
# generators of C*, the negated normals
WORKED_EXAMPLE_DUAL_GENERATORS = ((F(-1), F(1)), (F(1), F(0)))

WORKED_EXAMPLE_SOLUTION = (F(8, 15), F(8, 15), F(0), F(4, 15))
WORKED_EXAMPLE_FIRST_ITERATE = (F(2, 5), F(2, 5), F(0), F(7, 30))
WORKED_EXAMPLE_CONTRACTION = F(5, 24)
# x_1' = (5/24) x_1 + 19/45 and u_2' = (5/24) u_2 + 19/90 inside the invariant set
WORKED_EXAMPLE_X_OFFSET = F(19, 45)
WORKED_EXAMPLE_U_OFFSET = F(19, 90)

OMEGA_POINT = (F(31), F(31), F(3), F(4))
OMEGA_POINT_G = (F(123, 5), F(123, 5))
OMEGA_POINT_H = (F(23, 15), F(34, 15))


def worked_example_cone() -> PolyhedralCone:
    return PolyhedralCone(m=2, normals=WORKED_EXAMPLE_NORMALS)


def worked_example_combination() -> IsotoneCombination:
    """T = f_1 w^1 + f_2 w^2 with f_1 = (x_1 + ||u|| + 12)/12 and f_2 = (x_2 + ||u|| - 7.2)/12"""
    f1 = LorentzAffine(d=(F(1, 12), F(0)), beta=F(1, 12), gamma=F(1))
    f2 = LorentzAffine(d=(F(0), F(1, 12)), beta=F(1, 12), gamma=F(-3, 5))
    w1 = (F(1), F(1), F(1, 6), F(1, 3))
    w2 = (F(1), F(1), F(1, 3), F(1, 6))
    return IsotoneCombination(p=2, q=2, terms=(CombinationTerm(f1, w1), CombinationTerm(f2, w2)))


def worked_example() -> Problem:
    return Problem(
        name=WORKED_EXAMPLE_ID,
        p=2,
        q=2,
        cone=worked_example_cone(),
        map_spec=CombinationMap(worked_example_combination()),
    )


def zero_map() -> Problem:
    """F = 0 on the worked example cone; every point of K solves it"""
    return Problem(
        name="zero-map",
        p=2,
        q=2,
        cone=worked_example_cone(),
        map_spec=AffineMap(matrix=((F(0),) * 4,) * 4, offset=(F(0),) * 4),
    )


def lorentz_affine_demo() -> Problem:
    """Isotone combination of two Lorentz-affine functions with C a second-order cone"""
    f1 = LorentzAffine(d=(F(1, 10), F(0)), beta=F(1, 20), gamma=F(1))
    f2 = LorentzAffine(d=(F(0), F(1, 10)), beta=F(1, 20), gamma=F(1, 2))
    w1 = (F(1), F(1), F(1, 5), F(0), F(1, 2))
    w2 = (F(1), F(1), F(0), F(1, 5), F(1, 2))
    combination = IsotoneCombination(p=2, q=3, terms=(CombinationTerm(f1, w1), CombinationTerm(f2, w2)))
    return Problem(
        name="lorentz-affine-demo",
        p=2,
        q=3,
        cone=SecondOrderCone(3),
        map_spec=CombinationMap(combination),
    )


BUILTIN_PROBLEMS: Dict[str, Callable[[], Problem]] = {
    WORKED_EXAMPLE_ID: worked_example,
    "zero-map": zero_map,
    "lorentz-affine-demo": lorentz_affine_demo,
}


def builtin_ids() -> List[str]:
    return sorted(BUILTIN_PROBLEMS)


def get_builtin(builtin_id: str) -> Problem:
    """Look up a builtin problem by id"""
    factory = BUILTIN_PROBLEMS.get(builtin_id)
    if factory is None:
        raise ProblemFileError(f"unknown builtin '{builtin_id}', expected one of {builtin_ids()}",
                               field="builtin")
    return factory()


def case1_candidate(digits: int = 0) -> np.ndarray:
    """
    The boundary candidate of the worked example with u_1 = u_2 = a and
    x_1 = x_2 = 4a, a = (120 + 6 sqrt 2)/995.

    digits = 0 gives float64; otherwise a Decimal vector with that precision.
    """
    if not digits:
        a = (120 + 6 * np.sqrt(2.0)) / 995
        return np.array([4 * a, 4 * a, a, a])
    with exact_context(digits):
        a = (to_decimal(120) + 6 * to_decimal(2).sqrt()) / to_decimal(995)
        return np.array([4 * a, 4 * a, a, a], dtype=object)

