"""
Picard iteration for NCP(F, K) and MiCP(G, H, C, p, q), K = R^p x C.

    z^{n+1} = P_K(z^n - F(z^n))
    x^{n+1} = x^n - G(x^n, u^n),  u^{n+1} = P_C(u^n - H(x^n, u^n))

plus membership oracles for Omega = K n L n F^{-1}(L) and
Gamma = {z in K n L : P_K(z - F(z)) <=_L z}.
"""

import logging
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .config import config
from .cone_core import (
    contains, dual_contains, lorentz_slack, order_slack, sample_lorentz,
)
from .errors import DimensionError, HypothesisError
from .isotone_maps import Mapping, build_map, step_map, test_isotonicity
from .models import (
    ConeSpec, Point, Problem, PropertyResult, SolutionCertificate, SolveOptions,
    SolveReport, StartCheck, TolLike, TraceRow, resolve_eps,
)
from .numeric import as_array, exact_context, inf_norm, to_float
from .projections import project

logger = logging.getLogger(__name__)

INCREASING = "increasing"
DECREASING = "decreasing"
STATIONARY = "stationary"

BlockMap = Callable[[np.ndarray, np.ndarray], np.ndarray]


@lru_cache(maxsize=32)
def problem_mapping(problem: Problem) -> Mapping:
    """F for a problem; problems are immutable, so the built mapping is reused"""
    return build_map(problem.map_spec, problem.p, problem.q)


def split_map(F: Mapping, p: int) -> Tuple[BlockMap, BlockMap]:
    """Blocks G, H of F = (G, H) as functions of (x, u)"""
    def G(x, u):
        return F(np.concatenate([x, u]))[:p]

    def H(x, u):
        return F(np.concatenate([x, u]))[p:]
    return G, H


def _vector(problem: Problem, z) -> np.ndarray:
    z = z if isinstance(z, np.ndarray) else as_array(z)
    if z.ndim != 1 or z.size != problem.dim:
        raise DimensionError(f"point of length {z.size} does not match p+q={problem.dim}")
    return z


# ---------------------------------------------------------------- iteration

def picard_step(F: Mapping, K_spec: ConeSpec, z: np.ndarray) -> np.ndarray:
    """P_K(z - F(z))"""
    return project(K_spec, z - F(z)).point


def mixed_picard_step(G: BlockMap, H: BlockMap, C_spec: ConeSpec,
                      x: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(x - G(x, u), P_C(u - H(x, u)))"""
    return x - G(x, u), project(C_spec, u - H(x, u)).point


def residual(F: Mapping, K_spec: ConeSpec, z: np.ndarray) -> float:
    """Natural-map residual ||z - P_K(z - F(z))||_inf"""
    return inf_norm(z - picard_step(F, K_spec, z))


class PicardSolver:
    """Runs the Picard iteration on one problem"""

    def __init__(self, problem: Problem, options: Optional[SolveOptions] = None,
                 F: Optional[Mapping] = None):
        self.problem = problem
        self.options = options or problem.options or SolveOptions()
        self.F = F or problem_mapping(problem)
        self.K = problem.K

    def step(self, z: np.ndarray) -> np.ndarray:
        return picard_step(self.F, self.K, z)

    def solve(self, z0=None) -> SolveReport:
        """
        Iterate from z0 (default: the origin) until a stopping rule fires

        Returns:
            SolveReport; max-iter exhaustion and monotonicity violations are
            reported through its termination field
        """
        digits = self.options.exact_digits
        if digits is None:
            return self._run(z0)
        with exact_context(digits):
            return self._run(z0)

    def _run(self, z0) -> SolveReport:
        opts = self.options
        exact = opts.exact_digits is not None
        start = np.zeros(self.problem.dim) if z0 is None else z0
        z = as_array(_vector(self.problem, start), exact=exact)

        logger.info(f"Solving {self.problem.name} (p={self.problem.p}, q={self.problem.q}, "
                    f"{'exact ' + str(opts.exact_digits) + ' digits' if exact else 'float64'})")

        next_z = self.step(z)
        res = inf_norm(z - next_z)
        trace = [TraceRow(0, z, res, 0.0)] if opts.trace else []

        n = 0
        direction: Optional[str] = None
        certificate = True
        termination = None

        while termination is None:
            if res <= opts.tol_residual:
                termination = SolveReport.RESIDUAL_TOL
                break
            if n >= opts.max_iter:
                termination = SolveReport.MAX_ITER
                logger.warning(f"{self.problem.name}: no convergence after {n} iterations (residual {res:.3e})")
                break

            previous, z = z, next_z
            n += 1
            step_norm = res

            violated = False
            if opts.monotone_check:
                direction, violated = self._track_direction(previous, z, direction)

            next_z = self.step(z)
            res = inf_norm(z - next_z)
            if opts.trace:
                trace.append(TraceRow(n, z, res, step_norm))
            logger.debug(f"n={n} residual={res:.6e} step={step_norm:.6e}")

            if violated:
                certificate = False
                logger.warning(f"{self.problem.name}: iterate {n} breaks the {direction} L-order")
            # a converged run keeps its residual-tol verdict, with the certificate withdrawn
            if res <= opts.tol_residual:
                termination = SolveReport.RESIDUAL_TOL
            elif violated:
                termination = SolveReport.MONOTONICITY_VIOLATION
            elif step_norm <= opts.tol_step:
                termination = SolveReport.STEP_TOL

        gamma = in_gamma(self.problem, z, opts.order_eps, F=self.F)
        logger.info(f"{self.problem.name}: {termination} after {n} iterations, residual {res:.3e}")
        return SolveReport(
            problem_name=self.problem.name,
            p=self.problem.p,
            q=self.problem.q,
            solution=z,
            residual=res,
            iterations=n,
            termination=termination,
            monotone_certificate=certificate and opts.monotone_check,
            direction=direction or STATIONARY,
            gamma_member=gamma,
            trace=trace,
            exact_digits=opts.exact_digits,
        )

    def _track_direction(self, previous: np.ndarray, z: np.ndarray,
                         direction: Optional[str]) -> Tuple[Optional[str], bool]:
        # the first non-trivial step fixes the direction; later steps must keep it
        p, q = self.problem.p, self.problem.q
        eps = self.options.order_eps
        up = order_slack(Point.from_vector(previous, p, q), Point.from_vector(z, p, q)) >= -eps
        down = order_slack(Point.from_vector(z, p, q), Point.from_vector(previous, p, q)) >= -eps
        if direction is None:
            if up and down:
                return None, False
            if up:
                return INCREASING, False
            if down:
                return DECREASING, False
            return INCREASING, True
        if direction == INCREASING:
            return direction, not up
        return direction, not down


def solve(problem: Problem, z0=None, opts: Optional[SolveOptions] = None) -> SolveReport:
    return PicardSolver(problem, opts).solve(z0)


# ------------------------------------------------------------------ oracles

def in_omega(problem: Problem, z, eps: TolLike = None, F: Optional[Mapping] = None) -> bool:
    """z in K, z in L and F(z) in L"""
    eps = resolve_eps(eps)
    z = _vector(problem, z)
    F = F or problem_mapping(problem)
    p, q = problem.p, problem.q
    return bool(contains(problem.cone, z[p:], eps)
                and lorentz_slack(Point.from_vector(z, p, q)) >= -eps
                and lorentz_slack(Point.from_vector(F(z), p, q)) >= -eps)


def in_gamma(problem: Problem, z, eps: TolLike = None, F: Optional[Mapping] = None) -> bool:
    """z in K n L and P_K(z - F(z)) <=_L z"""
    eps = resolve_eps(eps)
    z = _vector(problem, z)
    F = F or problem_mapping(problem)
    p, q = problem.p, problem.q
    point = Point.from_vector(z, p, q)
    if not (contains(problem.cone, z[p:], eps) and lorentz_slack(point) >= -eps):
        return False
    stepped = Point.from_vector(picard_step(F, problem.K, z), p, q)
    return order_slack(stepped, point) >= -eps


def in_gamma_mixed(problem: Problem, z, eps: TolLike = None, F: Optional[Mapping] = None) -> bool:
    """Mixed form of Gamma: x >= ||u|| e, u in C and G(x, u) >= ||u - P_C(u - H(x, u))|| e"""
    eps = resolve_eps(eps)
    z = _vector(problem, z)
    G, H = split_map(F or problem_mapping(problem), problem.p)
    x, u = z[:problem.p], z[problem.p:]
    if not (contains(problem.cone, u, eps) and lorentz_slack(Point(x, u)) >= -eps):
        return False
    gap = u - project(problem.cone, u - H(x, u)).point
    return lorentz_slack(Point(G(x, u), gap)) >= -eps


def check_start(problem: Problem, z0, eps: TolLike = None, F: Optional[Mapping] = None) -> StartCheck:
    """Whether z0 <=_L z1, and the sufficient start conditions z0 in K, -F(z0) in L"""
    eps = resolve_eps(eps)
    z0 = _vector(problem, z0)
    F = F or problem_mapping(problem)
    p, q = problem.p, problem.q
    z1 = picard_step(F, problem.K, z0)
    slack = order_slack(Point.from_vector(z0, p, q), Point.from_vector(z1, p, q))
    return StartCheck(
        ordered=slack >= -eps,
        z0_in_K=contains(problem.K, z0, eps),
        minus_F_in_L=lorentz_slack(Point.from_vector(-F(z0), p, q)) >= -eps,
        slack=slack,
        z1=z1,
    )


def verify_lower_bound(problem: Problem, zstar, omega_samples: Sequence, eps: TolLike = None,
                       F: Optional[Mapping] = None) -> bool:
    """zstar <=_L w for every w in omega_samples; each sample must lie in Omega"""
    eps = resolve_eps(eps)
    zstar = _vector(problem, zstar)
    lower = Point.from_vector(zstar, problem.p, problem.q)
    ok = True
    for index, w in enumerate(omega_samples):
        w = _vector(problem, w)
        if not in_omega(problem, w, eps, F):
            raise HypothesisError(f"sample {index} = {to_float(w).tolist()} is not in Omega")
        if order_slack(lower, Point.from_vector(w, problem.p, problem.q)) < -eps:
            ok = False
    return ok


def certify_solution(problem: Problem, z, tol: Optional[float] = None,
                     F: Optional[Mapping] = None) -> SolutionCertificate:
    """Mixed complementarity conditions G = 0, u in C, H in C*, <u, H> = 0 at z"""
    tol = tol if tol is not None else config.solver.TOL_RESIDUAL
    z = _vector(problem, z)
    F = F or problem_mapping(problem)
    value = F(z)
    p = problem.p
    G, H, u = value[:p], value[p:], z[p:]
    return SolutionCertificate(
        G_inf_norm=inf_norm(G),
        u_in_C=contains(problem.cone, u, tol),
        H_in_C_dual=dual_contains(problem.cone, H, tol),
        complementarity_gap=abs(float(u.dot(H))),
    )


def check_hypotheses(problem: Problem, samples: Optional[int] = None, seed: Optional[int] = None,
                     omega_points: Sequence = (), eps: TolLike = None) -> List[PropertyResult]:
    """
    Sampled evidence for the convergence hypotheses: I - F is L-isotone,
    the origin is a valid start, and any listed points lie in Omega.
    """
    seed = seed if seed is not None else config.sampling.SEED
    F = problem_mapping(problem)
    results = []

    report = test_isotonicity(step_map(F), problem.p, problem.q, samples, seed, eps)
    results.append(PropertyResult(
        name="I - F is L-isotone",
        passed=report.passed,
        detail=f"{report.violations} violations in {report.samples} ordered pairs (seed {seed})",
        witnesses=[f"z1={w.z1.tolist()} z2={w.z2.tolist()} slack={w.slack:.3e}" for w in report.witnesses],
    ))

    start = check_start(problem, np.zeros(problem.dim), eps, F)
    results.append(PropertyResult(
        name="origin starts an increasing sequence",
        passed=start.ordered,
        detail=f"z0 <=_L z1 slack {start.slack:.3e}; z0 in K: {start.z0_in_K}; -F(z0) in L: {start.minus_F_in_L}",
    ))

    for point in omega_points:
        point = _vector(problem, point)
        results.append(PropertyResult(
            name=f"{to_float(point).tolist()} in Omega",
            passed=in_omega(problem, point, eps, F),
        ))
    return results


def sample_gamma_members(problem: Problem, zstar, count: int = 100, seed: Optional[int] = None,
                         eps: TolLike = None, max_draws: Optional[int] = None) -> List[np.ndarray]:
    """Members of Gamma of the form zstar + l, l in L, found by rejection sampling"""
    rng = np.random.default_rng(seed if seed is not None else config.sampling.SEED)
    zstar = to_float(_vector(problem, zstar))
    F = problem_mapping(problem)
    max_draws = max_draws or 50 * count
    members = []
    draws = 0
    while len(members) < count and draws < max_draws:
        batch = sample_lorentz(problem.p, problem.q, count, rng)
        batch *= rng.exponential(10.0, size=(count, 1))
        for offset in batch:
            draws += 1
            candidate = zstar + offset
            if in_gamma(problem, candidate, eps, F):
                members.append(candidate)
                if len(members) == count:
                    break
    logger.info(f"Gamma sampling: {len(members)} members from {draws} draws")
    return members


def verify_least_element(problem: Problem, zstar, members: Sequence, eps: TolLike = None) -> bool:
    """zstar <=_L w for every sampled Gamma member w"""
    eps = resolve_eps(eps)
    lower = Point.from_vector(_vector(problem, zstar), problem.p, problem.q)
    return all(order_slack(lower, Point.from_vector(_vector(problem, w), problem.p, problem.q)) >= -eps
               for w in members)