"""
Isotone (order-preserving) mappings for the extended Lorentz cone order:
monotone scalar functions, isotone combinations F = f_1 w^1 + ... + f_l w^l,
the hyperplane isotonicity condition and classification, and sampling
refutation of isotonicity.
"""

import logging
import math
from decimal import Decimal
from typing import Callable, Optional, Sequence

import numpy as np

from .config import config
from .cone_core import (
    contains, dual_contains, dual_lorentz_slack, dual_simplicial,
    lorentz_slack, lorentz_slack_batch, sample_lorentz,
)
from .errors import (
    ConeSpecError, DimensionError, ExactArithmeticError, MapSpecError,
)
from .models import (
    AffineDescriptor, AffineMap, ArctanDescriptor, BuiltinMap, CombinationMap,
    Composed, ComposedDescriptor, ExpDescriptor, IsotoneCombination,
    IsotonicityReport, LorentzAffine, MapSpec, MonotoneScalarFn,
    PiecewiseLinearDescriptor, Point, ScalarDescriptor, SeparableSimplicial,
    TolLike, Witness, resolve_eps,
)
from .numeric import lift, norm, scalar, solve, to_decimal, to_float

logger = logging.getLogger(__name__)

Mapping = Callable[[np.ndarray], np.ndarray]

HALF_SQRT2 = math.sqrt(2.0) / 2


# ------------------------------------------------------------ 1-D functions

def apply_descriptor(desc: ScalarDescriptor, t):
    """Evaluate a monotone 1-D descriptor at t (float or Decimal)"""
    exact = isinstance(t, Decimal)
    c = to_decimal if exact else float

    if isinstance(desc, AffineDescriptor):
        return c(desc.slope) * t + c(desc.intercept)
    if isinstance(desc, ExpDescriptor):
        if exact:
            return c(desc.scale) * (c(desc.rate) * t).exp()
        return desc.scale * math.exp(min(desc.rate * t, 700.0))
    if isinstance(desc, ArctanDescriptor):
        if exact:
            raise ExactArithmeticError("arctan has no exact implementation")
        return desc.scale * math.atan(desc.rate * t)
    if isinstance(desc, PiecewiseLinearDescriptor):
        if not exact:
            return float(np.interp(t, to_float(desc.breakpoints), to_float(desc.values)))
        return _interpolate_exact(desc, t)
    if isinstance(desc, ComposedDescriptor):
        return apply_descriptor(desc.outer, apply_descriptor(desc.inner, t))
    raise MapSpecError(f"unknown scalar descriptor: {type(desc).__name__}")


def _interpolate_exact(desc: PiecewiseLinearDescriptor, t: Decimal) -> Decimal:
    xs = [to_decimal(b) for b in desc.breakpoints]
    ys = [to_decimal(v) for v in desc.values]
    if t <= xs[0]:
        return ys[0]
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if t <= x1:
            return y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    return ys[-1]


# ------------------------------------------------------- monotone functions

def evaluate_scalar(fn: MonotoneScalarFn, z: np.ndarray, p: int):
    """Value of a monotone scalar function at z = (x, u)"""
    if isinstance(fn, LorentzAffine):
        x, u = z[:p], z[p:]
        return lift(fn.d, z).dot(x) + scalar(fn.beta, z) * norm(u) + scalar(fn.gamma, z)
    if isinstance(fn, SeparableSimplicial):
        coordinates = solve(lift(fn.U, z), z)
        return sum(apply_descriptor(g, coordinates[i]) for i, g in enumerate(fn.g))
    if isinstance(fn, Composed):
        return apply_descriptor(fn.psi, evaluate_scalar(fn.inner, z, p))
    raise MapSpecError(f"unknown scalar function: {type(fn).__name__}")


def validate_lorentz_affine(d: Sequence[float], beta: float) -> bool:
    """Sufficient condition for L-monotonicity of <d, x> + beta ||u|| + gamma: d >= 0, |beta| <= <d, e>"""
    d = to_float(d)
    return bool(np.all(d >= 0) and abs(float(beta)) <= float(d.sum()))


def validate_scalar_fn(fn: MonotoneScalarFn, p: int, q: int, order_cone=None) -> None:
    """Raise MapSpecError unless fn is known to be monotone for the order (L unless order_cone)"""
    if isinstance(fn, LorentzAffine):
        if len(fn.d) != p:
            raise DimensionError(f"LorentzAffine d has length {len(fn.d)}, expected p={p}")
        if order_cone is not None:
            raise MapSpecError("LorentzAffine functions are only certified for the extended Lorentz order")
        if not validate_lorentz_affine(fn.d, fn.beta):
            raise MapSpecError(f"LorentzAffine needs d >= 0 and |beta| <= <d, e>: "
                               f"d={list(to_float(fn.d))}, beta={float(fn.beta)}")
    elif isinstance(fn, SeparableSimplicial):
        m = len(fn.U)
        if m != p + q:
            raise DimensionError(f"simplicial cone of dimension {m} does not match p+q={p + q}")
        V = dual_simplicial(fn.U)
        # the order cone must sit inside cone{U}, i.e. every dual generator lies in its dual
        for j in range(m):
            column = V[:, j]
            if order_cone is None:
                inside = dual_lorentz_slack(Point.from_vector(column, p, q)) >= -config.tolerance.EPS
            else:
                inside = dual_contains(order_cone, column)
            if not inside:
                raise MapSpecError(f"order cone is not contained in the simplicial cone: "
                                   f"dual generator {j} = {column.tolist()} is outside its dual")
    elif isinstance(fn, Composed):
        validate_scalar_fn(fn.inner, p, q, order_cone)
    else:
        raise MapSpecError(f"unknown scalar function: {type(fn).__name__}")


# -------------------------------------------------------------- combinations

class CombinationMapping:
    """Evaluable F(z) = sum_i f_i(z) w^i"""

    def __init__(self, combination: IsotoneCombination):
        self.combination = combination
        self.p = combination.p
        self.q = combination.q

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if z.size != self.p + self.q:
            raise DimensionError(f"vector of length {z.size} does not match p+q={self.p + self.q}")
        total = lift(np.zeros(z.size), z)
        for term in self.combination.terms:
            total = total + evaluate_scalar(term.fn, z, self.p) * lift(term.weight, z)
        return total

    def __repr__(self) -> str:
        return f"CombinationMapping(p={self.p}, q={self.q}, terms={len(self.combination.terms)})"


def weight_violation(weight: np.ndarray, p: int, q: int, order_cone=None, eps: TolLike = None) -> Optional[str]:
    """Description of the violated membership inequality, or None if the weight is in the order cone"""
    eps = resolve_eps(eps)
    if order_cone is not None:
        if contains(order_cone, weight, eps):
            return None
        return f"weight is outside the {order_cone.kind} order cone"
    z = Point.from_vector(weight, p, q)
    if lorentz_slack(z) >= -eps:
        return None
    j = int(np.argmin(z.x))
    return f"x_{j + 1} >= ||u|| fails: x_{j + 1}={float(z.x[j])!r} < ||u||={float(norm(z.u))!r}"


def build_combination(comb: IsotoneCombination, eps: TolLike = None) -> CombinationMapping:
    """Validate every term of comb and return the evaluable mapping"""
    for index, term in enumerate(comb.terms):
        if len(term.weight) != comb.dim:
            raise DimensionError(f"weight w^{index + 1} has length {len(term.weight)}, expected p+q={comb.dim}")
        problem = weight_violation(to_float(term.weight), comb.p, comb.q, comb.order_cone, eps)
        if problem:
            raise MapSpecError(f"weight w^{index + 1} is not in the order cone: {problem}")
        validate_scalar_fn(term.fn, comb.p, comb.q, comb.order_cone)
    logger.debug(f"Built isotone combination with {len(comb.terms)} terms (p={comb.p}, q={comb.q})")
    return CombinationMapping(comb)


def build_map(map_spec: MapSpec, p: int, q: int, eps: TolLike = None) -> Mapping:
    """
    The NCP mapping F described by map_spec.

    An affine map is F(z) = M z + b; a combination describes the step map
    T = I - F, so F(z) = z - T(z).
    """
    if isinstance(map_spec, AffineMap):
        if len(map_spec.offset) != p + q:
            raise DimensionError(f"affine map of size {len(map_spec.offset)} does not match p+q={p + q}")

        def affine(z: np.ndarray) -> np.ndarray:
            return lift(map_spec.matrix, z).dot(z) + lift(map_spec.offset, z)
        return affine

    if isinstance(map_spec, CombinationMap):
        comb = map_spec.combination
        if (comb.p, comb.q) != (p, q):
            raise DimensionError(f"combination is on p={comb.p}, q={comb.q}; problem has p={p}, q={q}")
        step = build_combination(comb, eps)
        return lambda z: z - step(z)

    if isinstance(map_spec, BuiltinMap):
        from .builtin_problems import get_builtin
        builtin = get_builtin(map_spec.builtin_id)
        return build_map(builtin.map_spec, p, q, eps)

    raise MapSpecError(f"unknown map variant: {type(map_spec).__name__}")


def step_map(F: Mapping) -> Mapping:
    """T = I - F"""
    return lambda z: z - F(z)


def lift_scalar(fn: MonotoneScalarFn, weight: Sequence[float], p: int) -> Mapping:
    """z -> f(z) w"""
    w = to_float(weight)
    return lambda z: evaluate_scalar(fn, z, p) * lift(w, z)


# ---------------------------------------------------------------- hyperplanes

def matches_isotone_pattern(a: Sequence[float], u: Sequence[float], eps: TolLike = None) -> bool:
    """a = 0, or u = 0 and a holds exactly one sqrt(2)/2, one -sqrt(2)/2 and zeros elsewhere"""
    eps = resolve_eps(eps)
    a, u = to_float(a), to_float(u)
    if np.all(np.abs(a) <= eps):
        return True
    if np.any(np.abs(u) > eps):
        return False
    plus = np.abs(a - HALF_SQRT2) <= eps
    minus = np.abs(a + HALF_SQRT2) <= eps
    zero = np.abs(a) <= eps
    return bool(plus.sum() == 1 and minus.sum() == 1 and np.all(plus | minus | zero))


def classify_hyperplane(a: Sequence[float], u: Sequence[float], eps: TolLike = None) -> bool:
    """
    Whether the hyperplane with unit normal (a, u) has an L-isotone projection.

    Only decided for p > 1 and q > 1.
    """
    eps = resolve_eps(eps)
    a, u = to_float(a), to_float(u)
    if a.size <= 1 or u.size <= 1:
        raise DimensionError(f"hyperplane classification needs p > 1 and q > 1, got p={a.size}, q={u.size}")
    length = float(np.linalg.norm(np.concatenate([a, u])))
    if abs(length - 1.0) > eps:
        raise ConeSpecError(f"hyperplane normal must have unit norm, got {length!r}")
    return matches_isotone_pattern(a, u, eps)


def generator_isotonicity_condition(a: Sequence[float], K_gens: Sequence[np.ndarray],
                                    Kstar_gens: Sequence[np.ndarray], eps: TolLike = None) -> bool:
    """<x, y> >= <a, x><a, y> - eps for every generator x of K and y of K*"""
    eps = resolve_eps(eps)
    if len(K_gens) == 0 or len(Kstar_gens) == 0:
        raise ConeSpecError("generator lists must be nonempty")
    a = to_float(a)
    if abs(float(np.linalg.norm(a)) - 1.0) > max(eps, config.tolerance.EPS):
        raise ConeSpecError(f"normal must have unit norm, got {np.linalg.norm(a)!r}")
    X = to_float(K_gens)
    Y = to_float(Kstar_gens)
    gap = X @ Y.T - np.outer(X @ a, Y @ a)
    return bool(gap.min() >= -eps)


# ------------------------------------------------------- sampled isotonicity

def sample_ordered_pairs(p: int, q: int, count: int, rng: np.random.Generator):
    """Pairs z1 <=_L z2: z1 standard normal, z2 = z1 + a random member of L"""
    z1 = rng.standard_normal((count, p + q))
    return z1, z1 + sample_lorentz(p, q, count, rng)


def test_isotonicity(F: Mapping, p: int, q: int, samples: Optional[int] = None,
                     seed: Optional[int] = None, eps: TolLike = None,
                     stop_at_first: bool = False, max_witnesses: int = 10) -> IsotonicityReport:
    """
    Sampling refutation of L-isotonicity of F.

    Draws ordered pairs z1 <=_L z2 and records every pair where
    F(z2) - F(z1) falls outside L by more than eps.
    """
    samples = samples if samples is not None else config.sampling.SAMPLES
    seed = seed if seed is not None else config.sampling.SEED
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    eps = resolve_eps(eps)
    rng = np.random.default_rng(seed)
    Z1, Z2 = sample_ordered_pairs(p, q, samples, rng)

    report = IsotonicityReport(samples=samples, seed=seed)
    for z1, z2 in zip(Z1, Z2):
        difference = to_float(F(z2)) - to_float(F(z1))
        slack = float(lorentz_slack_batch(difference, p)[0])
        if slack < -eps:
            report.violations += 1
            if len(report.witnesses) < max_witnesses:
                report.witnesses.append(Witness(z1, z2, slack))
            if stop_at_first:
                break
    if report.violations:
        logger.info(f"Isotonicity refuted: {report.violations} of {samples} pairs violate (seed {seed})")
    return report


test_isotonicity.__test__ = False


def segment_monotonicity(fn: MonotoneScalarFn, p: int, q: int, segments: int = 1000,
                         points: int = 16, seed: Optional[int] = None,
                         eps: TolLike = None) -> int:
    """
    Number of random L-increasing segments z0 + s l, 0 <= s <= 1, along
    which fn fails to be nondecreasing.
    """
    eps = resolve_eps(eps)
    rng = np.random.default_rng(seed if seed is not None else config.sampling.SEED)
    starts = rng.standard_normal((segments, p + q))
    directions = sample_lorentz(p, q, segments, rng)
    grid = np.linspace(0.0, 1.0, points)
    failures = 0
    for z0, direction in zip(starts, directions):
        values = np.array([evaluate_scalar(fn, z0 + s * direction, p) for s in grid], dtype=float)
        if np.any(np.diff(values) < -eps * np.maximum(1.0, np.abs(values[1:]))):
            failures += 1
    return failures


def combine_maps(maps: Sequence[Mapping], coefficients: Sequence[float]) -> Mapping:
    """z -> sum_k c_k F_k(z)"""
    pairs = list(zip(coefficients, maps))
    return lambda z: sum(c * F(z) for c, F in pairs)

