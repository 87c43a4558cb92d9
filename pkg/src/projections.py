"""
Metric projections onto the supported cone variants.

Every projection works in the arithmetic of its input: float64 arrays give
float64 results, Decimal object arrays give Decimal results (except the
generator-form polyhedral cone, which needs NNLS).
"""

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls

from .config import config
from .errors import (
    ConeSpecError, DimensionError, EnumerationLimitError,
    ExactArithmeticError, ProjectionError,
)
from .models import (
    ConeSpec, HyperplaneCone, OrthantCone, Point, PolyhedralCone,
    ProductCone, ProjectionResult, SecondOrderCone, TolLike, resolve_eps,
)
from .numeric import is_exact, lift, matrix_rank, norm, scalar, solve, to_float

logger = logging.getLogger(__name__)


def project(spec: ConeSpec, v: np.ndarray, eps: TolLike = None) -> ProjectionResult:
    """
    Nearest point of the cone described by spec to v

    Args:
        spec: Target cone
        v: Vector of length spec.dim (float64 or Decimal object array)
        eps: Feasibility slack, used by the polyhedral enumeration

    Returns:
        ProjectionResult with the projected point, its distance to v and,
        for halfspace-form polyhedral cones, the active constraint indices
    """
    if v.ndim != 1 or v.size != spec.dim:
        raise DimensionError(f"vector of length {v.size} does not match {spec.kind} cone of dimension {spec.dim}")

    if isinstance(spec, OrthantCone):
        point = _clamp(v)
    elif isinstance(spec, SecondOrderCone):
        point = _project_second_order(v)
    elif isinstance(spec, HyperplaneCone):
        a = lift(spec.normal, v)
        point = v - a.dot(v) * a
    elif isinstance(spec, PolyhedralCone):
        if spec.by_halfspaces:
            return project_polyhedral(spec.normals, v, eps)
        point = _project_generators(spec, v)
    elif isinstance(spec, ProductCone):
        inner = project(spec.inner, v[spec.p:], eps)
        point = np.concatenate([v[:spec.p], inner.point])
        return ProjectionResult(point, float(inner.distance), inner.active_set)
    else:
        raise ConeSpecError(f"unsupported cone variant: {type(spec).__name__}")

    return ProjectionResult(point, float(norm(v - point)))


def _clamp(v: np.ndarray) -> np.ndarray:
    zero = scalar(0, v)
    return np.array([value if value > 0 else zero for value in v], dtype=v.dtype)


def _project_second_order(v: np.ndarray) -> np.ndarray:
    # layout (w_1, ..., w_{m-1}, t)
    w, t = v[:-1], v[-1]
    length = norm(w)
    if length <= t:
        return v.copy()
    zero = scalar(0, v)
    if length <= -t:
        return np.array([zero] * v.size, dtype=v.dtype)
    if float(length) < config.tolerance.DIRECTION_FLOOR:
        # |t| < ||w|| below the floor: treat w as zero
        result = np.array([zero] * v.size, dtype=v.dtype)
        result[-1] = t if t > 0 else zero
        return result
    half = (t + length) / 2
    return np.concatenate([w * (half / length), np.array([half], dtype=v.dtype)])


def _project_generators(spec: PolyhedralCone, v: np.ndarray) -> np.ndarray:
    if is_exact(v):
        raise ExactArithmeticError("generator-form polyhedral projection has no exact implementation")
    G = spec.generator_matrix()
    coefficients, _ = nnls(G, v)
    return G @ coefficients


def project_polyhedral(normals: Sequence[Sequence], v: np.ndarray, eps: TolLike = None,
                       limit: Optional[int] = None) -> ProjectionResult:
    """
    Projection onto {z : <n_j, z> <= 0 for all j} by active-set enumeration.

    Every subset A of at most m constraints with independent normals gives the
    candidate z = v - N_A^T lam, lam solving (N_A N_A^T) lam = N_A v. A
    candidate is kept when it is feasible and lam >= 0, both up to eps * ||v||;
    v itself is returned only when it is exactly feasible. Among kept candidates
    the nearest wins, ties going to the lexicographically smallest A.
    """
    eps = resolve_eps(eps)
    limit = limit if limit is not None else config.tolerance.ENUMERATION_LIMIT
    if len(normals) == 0:
        raise ConeSpecError("polyhedral cone needs at least one halfspace")
    if len(normals) > limit:
        raise EnumerationLimitError(f"{len(normals)} halfspaces exceed the enumeration limit of {limit}")
    N = lift(normals, v)
    if N.ndim != 2 or N.shape[1] != v.size:
        raise DimensionError(f"normals of length {N.shape[-1]} do not match vector of length {v.size}")

    # only an exactly feasible v is its own projection; eps applies to candidates
    if max(N.dot(v)) <= 0:
        return ProjectionResult(v.copy(), 0.0, ())

    # KKT slack relative to the size of v, so tiny vectors keep their nearest face
    slack = eps * float(norm(v))
    k, m = N.shape
    candidates: List[Tuple[float, Tuple[int, ...], np.ndarray]] = []
    skipped = 0
    for size in range(1, min(k, m) + 1):
        for active in combinations(range(k), size):
            rows = N[list(active)]
            if matrix_rank(rows) < size:
                skipped += 1
                continue
            multipliers = solve(rows.dot(rows.T), rows.dot(v))
            if float(min(multipliers)) < -slack:
                continue
            candidate = v - rows.T.dot(multipliers)
            if not _feasible(N, candidate, slack):
                continue
            candidates.append((float(norm(v - candidate)), active, candidate))

    logger.debug(f"Polyhedral enumeration: {k} halfspaces, {len(candidates)} candidates, "
                 f"{skipped} dependent subsets skipped")
    if not candidates:
        raise ProjectionError(f"no feasible KKT point among {k} halfspaces in dimension {m}")

    best = min(distance for distance, _, _ in candidates)
    # equal points reached through different active sets
    tie = 1e-12 * max(1.0, best)
    distance, active, point = min((c for c in candidates if c[0] <= best + tie), key=lambda c: c[1])
    return ProjectionResult(point, distance, active)


def _feasible(N: np.ndarray, z: np.ndarray, eps: float) -> bool:
    return float(max(N.dot(z))) <= eps


def project_product(x: np.ndarray, u: np.ndarray, inner: ConeSpec, eps: TolLike = None) -> Point:
    """P_K(x, u) = (x, P_C u) for K = R^p x C; x is returned untouched"""
    if u.size != inner.dim:
        raise DimensionError(f"u has length {u.size}, cone C has dimension {inner.dim}")
    return Point(x, project(inner, u, eps).point)


def translate_project(y: np.ndarray, spec: ConeSpec, x: np.ndarray, eps: TolLike = None) -> np.ndarray:
    """Projection onto the translated set y + C: y + P_C(x - y)"""
    if y.shape != x.shape:
        raise DimensionError(f"translation of length {y.size} does not match vector of length {x.size}")
    return y + project(spec, x - y, eps).point


def projector(spec: ConeSpec, shift: Optional[np.ndarray] = None):
    """Projection onto spec (or spec translated by shift) as a plain vector map"""
    if shift is None:
        return lambda v: project(spec, v).point
    return lambda v: translate_project(shift, spec, v)


def hyperplane_through(a: Sequence[float]) -> HyperplaneCone:
    """Hyperplane cone with normal a rescaled to unit length"""
    a = to_float(a)
    length = np.linalg.norm(a)
    if length == 0:
        raise ConeSpecError("hyperplane normal is the zero vector")
    return HyperplaneCone(tuple(a / length))
