"""
Extended Lorentz cone L(p, q), its dual M, the order <=_L, membership and
dual membership for every cone variant, and generator enumeration.

    L = {(x, u) : x >= ||u|| e}
    M = {(x, u) : x >= 0, <x, e> >= ||u||}
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize, nnls

from .config import config
from .errors import ConeSpecError, DimensionError, SingularMatrixError
from .models import (
    ConeSpec, HyperplaneCone, OrthantCone, Point, PolyhedralCone,
    ProductCone, SecondOrderCone, TolLike, resolve_eps,
)
from .numeric import is_exact, lift, norm, solve, to_float

logger = logging.getLogger(__name__)


# ------------------------------------------------------------ L and M tests

def lorentz_slack(z: Point) -> float:
    """min_i x_i - ||u||; nonnegative exactly on L"""
    return float(min(z.x) - norm(z.u))


def dual_lorentz_slack(z: Point) -> float:
    """min(min_i x_i, <x, e> - ||u||); nonnegative exactly on M"""
    return float(min(min(z.x), sum(z.x) - norm(z.u)))


def contains_L(z: Point, eps: TolLike = None) -> bool:
    return lorentz_slack(z) >= -resolve_eps(eps)


def contains_M(z: Point, eps: TolLike = None) -> bool:
    eps = resolve_eps(eps)
    return bool(float(min(z.x)) >= -eps and float(sum(z.x) - norm(z.u)) >= -eps)


def leq_order(z1: Point, z2: Point, eps: TolLike = None) -> bool:
    """z1 <=_L z2, i.e. z2 - z1 in L"""
    return contains_L(z2 - z1, eps)


def order_slack(z1: Point, z2: Point) -> float:
    return lorentz_slack(z2 - z1)


def lorentz_slack_batch(Z: np.ndarray, p: int) -> np.ndarray:
    """Row-wise lorentz_slack for a float (n, p+q) array"""
    Z = np.atleast_2d(Z)
    return Z[:, :p].min(axis=1) - np.linalg.norm(Z[:, p:], axis=1)


def dual_lorentz_slack_batch(Z: np.ndarray, p: int) -> np.ndarray:
    Z = np.atleast_2d(Z)
    X = Z[:, :p]
    return np.minimum(X.min(axis=1), X.sum(axis=1) - np.linalg.norm(Z[:, p:], axis=1))


# -------------------------------------------------------- generic membership

def _check_dim(spec: ConeSpec, v: np.ndarray) -> None:
    if v.ndim != 1 or v.size != spec.dim:
        raise DimensionError(f"vector of length {v.size} does not match {spec.kind} cone of dimension {spec.dim}")


def cone_slack(spec: ConeSpec, v: np.ndarray) -> float:
    """
    Signed slack of the worst defining inequality of spec at v.

    Nonnegative means member. Generator-form polyhedral cones report minus
    the distance to the cone.
    """
    _check_dim(spec, v)
    if isinstance(spec, OrthantCone):
        return float(min(v))
    if isinstance(spec, SecondOrderCone):
        return float(v[-1] - norm(v[:-1]))
    if isinstance(spec, HyperplaneCone):
        return -abs(float(lift(spec.normal, v).dot(v)))
    if isinstance(spec, PolyhedralCone):
        if spec.by_halfspaces:
            return -float(max(lift(spec.normals, v).dot(v)))
        _, distance = nnls(spec.generator_matrix(), to_float(v))
        return -float(distance)
    if isinstance(spec, ProductCone):
        return cone_slack(spec.inner, v[spec.p:])
    raise ConeSpecError(f"unsupported cone variant: {type(spec).__name__}")


def contains(spec: ConeSpec, v: np.ndarray, eps: TolLike = None) -> bool:
    """Membership of v in the cone described by spec, within eps"""
    return cone_slack(spec, v) >= -resolve_eps(eps)


def dual_slack(spec: ConeSpec, y: np.ndarray) -> float:
    """Signed slack of y against the dual cone of spec"""
    _check_dim(spec, y)
    if isinstance(spec, (OrthantCone, SecondOrderCone)):
        return cone_slack(spec, y)
    if isinstance(spec, HyperplaneCone):
        # dual of a hyperplane is its normal line
        a = lift(spec.normal, y)
        return -float(np.max(np.abs(to_float(y - a.dot(y) * a))))
    if isinstance(spec, PolyhedralCone):
        if not spec.by_halfspaces:
            return float(min(lift(spec.generators, y).dot(y)))
        return _halfspace_dual_slack(spec, y)
    if isinstance(spec, ProductCone):
        x_block = -float(np.max(np.abs(to_float(y[:spec.p]))))
        return min(x_block, dual_slack(spec.inner, y[spec.p:]))
    raise ConeSpecError(f"unsupported cone variant: {type(spec).__name__}")


def _halfspace_dual_slack(spec: PolyhedralCone, y: np.ndarray) -> float:
    # {v : N v <= 0}* = cone{-n_j}
    N = spec.normal_matrix(exact=is_exact(y))
    if N.shape[0] == N.shape[1] and np.linalg.matrix_rank(to_float(N)) == N.shape[0]:
        # simplicial: coefficients are unique, so solve for them
        coefficients = solve(-N.T, y)
        return float(min(coefficients))
    _, distance = nnls(-to_float(N).T, to_float(y))
    return -float(distance)


def dual_contains(spec: ConeSpec, y: np.ndarray, eps: TolLike = None) -> bool:
    """Membership of y in the dual cone of spec, within eps"""
    return dual_slack(spec, y) >= -resolve_eps(eps)


# ---------------------------------------------------------------- generators

def generators_q1(p: int) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    Minimal generator lists of L(p, 1) and of its dual M(p, 1).

    Returns (L generators, M generators) as length p+1 vectors.
    """
    if p < 1:
        raise DimensionError(f"p must be positive, got {p}")
    e = np.ones(p)
    if p == 1:
        l_gens = [np.array([1.0, 1.0]), np.array([1.0, -1.0])]
    else:
        l_gens = [np.append(e, 1.0), np.append(e, -1.0)]
        l_gens += [np.append(row, 0.0) for row in np.eye(p)]
    m_gens = []
    for row in np.eye(p):
        m_gens += [np.append(row, 1.0), np.append(row, -1.0)]
    return l_gens, m_gens


def generator_counts(p: int) -> Tuple[int, int]:
    """(number of L generators, number of M generators) for q = 1"""
    l_gens, m_gens = generators_q1(p)
    return len(l_gens), len(m_gens)


def expected_generator_counts(p: int) -> Tuple[int, int]:
    """(p+2)(1 - delta_p1) + 2 delta_p1 and 2p"""
    return (2 if p == 1 else p + 2), 2 * p


def dual_simplicial(U, condition_limit: Optional[float] = None) -> np.ndarray:
    """
    Dual generators of the simplicial cone spanned by the columns of U.

    Returns V = (U^T)^{-1}, whose columns v^j satisfy <u^i, v^j> = delta_ij.
    """
    U = to_float(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] == 0:
        raise DimensionError(f"generator matrix must be square and nonempty, got shape {U.shape}")
    limit = condition_limit if condition_limit is not None else config.tolerance.CONDITION_LIMIT
    condition = np.linalg.cond(U)
    if not np.isfinite(condition) or condition > limit:
        raise SingularMatrixError(f"generator matrix condition estimate {condition:.3e} exceeds {limit:.1e}")
    return np.linalg.inv(U.T)


# ------------------------------------------------------------------ sampling

def sample_points(p: int, q: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Standard normal points of R^p x R^q, one per row"""
    return rng.standard_normal((count, p + q))


def sample_lorentz(p: int, q: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Random members of L(p, q), one per row.

    Mass is put on the boundary: a share of rows has x = ||u|| e exactly in
    some coordinates, or u on the sphere of radius t.
    """
    if q == 1:
        # nonnegative combinations of the minimal generators, sparse
        gens = np.array(generators_q1(p)[0])
        coefficients = rng.exponential(size=(count, len(gens)))
        coefficients *= rng.random((count, len(gens))) < 0.5
        return coefficients @ gens
    t = rng.exponential(size=count) * (rng.random(count) < 0.8)
    r = rng.exponential(size=(count, p)) * (rng.random((count, p)) < 0.5)
    direction = rng.standard_normal((count, q))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    rho = np.where(rng.random(count) < 0.5, 1.0, rng.random(count))
    u = (t * rho)[:, None] * direction
    x = t[:, None] + r
    return np.hstack([x, u])


def sample_dual_testers(p: int, q: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm L members used to test dual membership; includes the rays (e^i, 0)"""
    members = sample_lorentz(p, q, count, rng)
    rays = np.hstack([np.eye(p), np.zeros((p, q))])
    members = np.vstack([rays, members])
    lengths = np.linalg.norm(members, axis=1)
    members = members[lengths > 0]
    return members / np.linalg.norm(members, axis=1, keepdims=True)


def _worst_boundary_ray(z: np.ndarray, p: int, start: np.ndarray) -> float:
    """Minimise <z, (e, w/||w||)> over w, from a sampled starting direction"""
    x, u = z[:p], z[p:]
    base = x.sum()

    def value(w):
        return base + u.dot(w) / np.linalg.norm(w)

    def gradient(w):
        length = np.linalg.norm(w)
        w_hat = w / length
        return (u - u.dot(w_hat) * w_hat) / length

    if not np.any(start):
        start = np.ones_like(u)
    result = minimize(value, start, jac=gradient, method='BFGS')
    return float(min(result.fun, value(start)))


def dual_by_sampling(z: np.ndarray, p: int, testers: np.ndarray, eps: TolLike = None,
                     refine: bool = True) -> bool:
    """
    Sampling oracle for z in L*: <z, g> >= -eps for every sampled g in L.

    For q > 1 a claimed membership is refined by a local search over the
    boundary rays (e, w), ||w|| = 1, started at the worst sampled member.
    """
    eps = resolve_eps(eps)
    z = to_float(z)
    values = testers @ z
    worst = int(np.argmin(values))
    if values[worst] < -eps:
        return False
    q = z.size - p
    if not refine or q == 1:
        return True
    start = testers[worst, p:]
    return _worst_boundary_ray(z, p, start) >= -eps


def dual_by_generators(z: np.ndarray, generators: Sequence[np.ndarray], eps: TolLike = None) -> bool:
    """<z, g> >= -eps for every generator; exact for polyhedral cones"""
    eps = resolve_eps(eps)
    return all(float(np.dot(g, z)) >= -eps for g in generators)
