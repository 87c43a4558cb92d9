"""
Property suites behind the verify command.
Each suite samples with a fixed seed and returns one PropertyResult per property.
"""

import logging
from itertools import permutations
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .builtin_problems import WORKED_EXAMPLE_NORMALS, worked_example_combination, worked_example_cone
from .config import config
from .cone_core import (
    contains_L, contains_M, dual_by_generators, dual_by_sampling,
    expected_generator_counts, generator_counts, generators_q1,
    lorentz_slack_batch, sample_dual_testers, sample_lorentz, sample_points,
)
from .isotone_maps import (
    HALF_SQRT2, CombinationMapping, build_combination, classify_hyperplane, combine_maps,
    generator_isotonicity_condition, lift_scalar, matches_isotone_pattern,
    segment_monotonicity, test_isotonicity,
)
from .models import (
    ArctanDescriptor, CombinationTerm, Composed, ConeSpec, ExpDescriptor,
    IsotoneCombination, LorentzAffine, OrthantCone, Point,
    Problem, PropertyResult, SecondOrderCone, TolLike, resolve_eps,
)
from .numeric import to_float
from .projections import (
    hyperplane_through, project, project_polyhedral, project_product,
    projector, translate_project,
)
from .solver import in_gamma, in_gamma_mixed, in_omega, problem_mapping

logger = logging.getLogger(__name__)

SUITES = ("duality", "hyperplane", "projection", "isotone")


def _witness(z) -> str:
    return "[" + ", ".join(f"{v:.6g}" for v in to_float(z)) + "]"


# ------------------------------------------------------- projection oracle

def grid_projection_oracle(normals: Sequence[Sequence[float]], v: np.ndarray,
                           resolution: float = 1e-3, points_per_axis: Optional[int] = None) -> np.ndarray:
    """
    Brute-force nearest point of {z : N z <= 0} to v.

    A grid over the box v +- ||v|| is refined around the best feasible node
    until the cell size reaches resolution, then polished by a local solve.
    """
    N = to_float(normals)
    v = to_float(v)
    m = v.size
    points_per_axis = points_per_axis or (41 if m <= 2 else 21)

    radius = max(float(np.linalg.norm(v)), resolution)
    center = v.copy()
    best = np.zeros(m)
    best_distance = float(np.linalg.norm(v))
    while True:
        axes = [np.linspace(c - radius, c + radius, points_per_axis) for c in center]
        grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, m)
        feasible = grid[(grid @ N.T).max(axis=1) <= 1e-12]
        if feasible.size:
            distances = np.linalg.norm(feasible - v, axis=1)
            index = int(np.argmin(distances))
            if distances[index] < best_distance:
                best, best_distance = feasible[index], float(distances[index])
        cell = 2 * radius / (points_per_axis - 1)
        if cell <= resolution:
            break
        center = best
        radius = 2 * cell

    result = minimize(
        lambda z: 0.5 * np.sum((z - v) ** 2),
        best,
        jac=lambda z: z - v,
        constraints=[{'type': 'ineq', 'fun': lambda z: -(N @ z), 'jac': lambda z: -N}],
        method='SLSQP',
    )
    if result.success and (N @ result.x).max() <= 1e-9 and np.linalg.norm(result.x - v) <= best_distance + 1e-12:
        return result.x
    return best


def fat_random_cone(m: int, rng: np.random.Generator) -> List[List[float]]:
    """m halfspaces with normals -(e^j + 0.3 noise); the cone is a perturbed orthant"""
    return [list(-(row + 0.3 * rng.standard_normal(m))) for row in np.eye(m)]


# --------------------------------------------------------------- verifier

class PropertyVerifier:
    """Runs the sampled property suites for one (p, q) split"""

    def __init__(self, p: int, q: int, samples: Optional[int] = None, seed: Optional[int] = None,
                 eps: TolLike = None):
        self.p = p
        self.q = q
        self.samples = samples if samples is not None else config.sampling.SAMPLES
        self.seed = seed if seed is not None else config.sampling.SEED
        self.eps = resolve_eps(eps)

    def run(self, suite: str) -> List[PropertyResult]:
        runners: Dict[str, Callable[[], List[PropertyResult]]] = {
            "duality": self.duality,
            "hyperplane": self.hyperplane,
            "projection": self.projection,
            "isotone": self.isotone,
        }
        if suite not in runners:
            raise ValueError(f"unknown suite '{suite}', expected one of {list(SUITES)}")
        logger.info(f"Running {suite} suite (p={self.p}, q={self.q}, samples={self.samples}, seed={self.seed})")
        results = runners[suite]()
        failed = sum(not r.passed for r in results)
        logger.info(f"{suite} suite finished: {len(results) - failed} passed, {failed} failed")
        return results

    def _rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    # ---------------------------------------------------------- duality

    def duality(self) -> List[PropertyResult]:
        p, q, eps = self.p, self.q, self.eps
        rng = self._rng()
        points = sample_points(p, q, self.samples, rng)
        results = []

        if q == 1:
            l_gens = generators_q1(p)[0]
            oracle = lambda z: dual_by_generators(z, l_gens, eps)
            oracle_name = "the generators of L"
        else:
            testers = sample_dual_testers(p, q, config.sampling.DUAL_SAMPLES, rng)
            oracle = lambda z: dual_by_sampling(z, p, testers, eps)
            oracle_name = f"{len(testers)} sampled members of L"

        disagreements = []
        in_L = in_M = 0
        subdual_failures = []
        m_not_l = None
        for z in points:
            point = Point.from_vector(z, p, q)
            member_M = contains_M(point, eps)
            member_L = contains_L(point, eps)
            in_M += member_M
            in_L += member_L
            if member_M != oracle(z):
                disagreements.append(z)
            if member_L and not member_M:
                subdual_failures.append(z)
            if member_M and not member_L and m_not_l is None:
                m_not_l = z

        results.append(PropertyResult(
            name="M = L* (sampled)",
            passed=not disagreements,
            detail=f"{len(disagreements)} disagreements against {oracle_name} on {len(points)} points",
            witnesses=[_witness(z) for z in disagreements[:5]],
        ))
        results.append(PropertyResult(
            name="L is contained in M",
            passed=not subdual_failures,
            detail=f"{in_L} points in L, {in_M} in M",
            witnesses=[_witness(z) for z in subdual_failures[:5]],
        ))
        if p == 1:
            mismatches = [z for z in points
                          if contains_L(Point.from_vector(z, p, q), eps) != contains_M(Point.from_vector(z, p, q), eps)]
            results.append(PropertyResult(
                name="L is self-dual for p = 1",
                passed=not mismatches,
                detail=f"{len(mismatches)} points separate L from M",
                witnesses=[_witness(z) for z in mismatches[:5]],
            ))
        else:
            results.append(PropertyResult(
                name="M strictly larger than L",
                passed=m_not_l is not None,
                detail="witness in M but not in L" if m_not_l is not None else "no witness sampled",
                witnesses=[_witness(m_not_l)] if m_not_l is not None else [],
            ))
        if q == 1 and p <= 3:
            results.append(self._generator_check())
        return results

    def _generator_check(self) -> PropertyResult:
        p = self.p
        l_gens, m_gens = generators_q1(p)
        counts = generator_counts(p)
        expected = expected_generator_counts(p)
        members = all(contains_L(Point.from_vector(g, p, 1)) for g in l_gens) and \
            all(contains_M(Point.from_vector(h, p, 1)) for h in m_gens)
        cross = min(float(np.dot(g, h)) for g in l_gens for h in m_gens)
        coincide = (counts[0] == counts[1]) == (p + 1 <= 3)
        return PropertyResult(
            name="generator enumeration for q = 1",
            passed=counts == expected and members and cross >= -self.eps and coincide,
            detail=f"counts {counts} (expected {expected}), memberships {'ok' if members else 'FAIL'}, "
                   f"min cross product {cross:g}",
        )

    # -------------------------------------------------------- hyperplane

    def hyperplane(self) -> List[PropertyResult]:
        if self.q == 1:
            return self._hyperplane_q1()
        p, q = self.p, self.q
        rng = self._rng(1)
        budget = config.sampling.REFUTATION_SAMPLES
        normals = self._patterned_normals(rng)
        patterned = len(normals)
        for _ in range(config.sampling.HYPERPLANE_NORMALS):
            a = rng.standard_normal(p + q)
            normals.append(a / np.linalg.norm(a))

        mismatches = []
        refuted = 0
        for index, normal in enumerate(normals):
            expected = classify_hyperplane(normal[:p], normal[p:], self.eps)
            spec = hyperplane_through(normal)
            report = test_isotonicity(projector(spec), p, q, budget, self.seed + index,
                                      self.eps, stop_at_first=True)
            refuted += not report.passed
            if expected != report.passed:
                mismatches.append(normal)

        return [PropertyResult(
            name="hyperplane classification vs projection isotonicity",
            passed=not mismatches,
            detail=f"{patterned} patterned and {len(normals) - patterned} random normals, "
                   f"{refuted} refuted by sampling, {len(mismatches)} mismatches",
            witnesses=[_witness(a) for a in mismatches[:5]],
        )]

    def _patterned_normals(self, rng: np.random.Generator) -> List[np.ndarray]:
        p, q = self.p, self.q
        normals = []
        for _ in range(3):
            u = rng.standard_normal(q)
            normals.append(np.concatenate([np.zeros(p), u / np.linalg.norm(u)]))
        for i, j in permutations(range(p), 2):
            a = np.zeros(p + q)
            a[i], a[j] = HALF_SQRT2, -HALF_SQRT2
            normals.append(a)
        return normals

    def _hyperplane_q1(self) -> List[PropertyResult]:
        p = self.p
        rng = self._rng(1)
        l_gens, m_gens = generators_q1(p)
        normals = []
        for i, j in permutations(range(p), 2):
            a = np.zeros(p + 1)
            a[i], a[j] = HALF_SQRT2, -HALF_SQRT2
            normals.append(a)
        normals.append(np.append(np.zeros(p), 1.0))
        for _ in range(config.sampling.HYPERPLANE_NORMALS):
            a = rng.standard_normal(p + 1)
            normals.append(a / np.linalg.norm(a))
        mismatches = [a for a in normals
                      if generator_isotonicity_condition(a, l_gens, m_gens, self.eps)
                      != matches_isotone_pattern(a[:p], a[p:], self.eps)]
        return [PropertyResult(
            name="hyperplane condition on generators vs pattern (q = 1)",
            passed=not mismatches,
            detail=f"{len(normals)} normals, {len(mismatches)} mismatches",
            witnesses=[_witness(a) for a in mismatches[:5]],
        )]

    # -------------------------------------------------------- projection

    def projection_cones(self) -> Dict[str, ConeSpec]:
        cones: Dict[str, ConeSpec] = {"orthant": OrthantCone(self.q), "second-order": SecondOrderCone(self.q)}
        if self.q == 2:
            cones["worked-example"] = worked_example_cone()
        return cones

    def projection(self) -> List[PropertyResult]:
        results = []
        for offset, (label, cone) in enumerate(self.projection_cones().items()):
            results.extend(self._projection_properties(label, cone, self._rng(10 + offset)))
        results.append(self._hyperplane_translation())
        results.extend(self._oracle_agreement())
        return results

    def _projection_properties(self, label: str, cone: ConeSpec, rng: np.random.Generator) -> List[PropertyResult]:
        p, q, eps, n = self.p, self.q, self.eps, self.samples
        results = []

        Z1 = rng.standard_normal((n, p + q))
        Z2 = Z1 + sample_lorentz(p, q, n, rng)
        images = np.array([np.concatenate([z1[:p], project(cone, z1[p:]).point]) for z1 in Z1])
        upper = np.array([project_product(z2[:p], z2[p:], cone).z for z2 in Z2])
        slack = lorentz_slack_batch(upper - images, p)
        bad = np.flatnonzero(slack < -eps)
        results.append(PropertyResult(
            name=f"{label}: product projection is L-isotone",
            passed=bad.size == 0,
            detail=f"{bad.size} violations in {n} ordered pairs",
            witnesses=[f"z1={_witness(Z1[i])} z2={_witness(Z2[i])}" for i in bad[:5]],
        ))

        V = rng.standard_normal((n, q)) * 2
        W = rng.standard_normal((n, q)) * 2
        PV = np.array([project(cone, v).point for v in V])
        PW = np.array([project(cone, w).point for w in W])
        expansion = np.linalg.norm(PV - PW, axis=1) - np.linalg.norm(V - W, axis=1)
        bad = np.flatnonzero(expansion > eps)
        results.append(PropertyResult(
            name=f"{label}: nonexpansive",
            passed=bad.size == 0,
            detail=f"{bad.size} expanding pairs out of {n}",
        ))

        again = np.array([project(cone, v).point for v in PV])
        drift = np.abs(again - PV).max(axis=1)
        bad = np.flatnonzero(drift > eps)
        results.append(PropertyResult(
            name=f"{label}: idempotent",
            passed=bad.size == 0,
            detail=f"{bad.size} of {n} projections move when projected again",
        ))

        members = PW[:config.sampling.DUAL_SAMPLES]
        angles = [float(np.max((members - pv) @ (v - pv))) for v, pv in zip(V[:1000], PV[:1000])]
        worst = max(angles)
        results.append(PropertyResult(
            name=f"{label}: obtuse angle at the projection",
            passed=worst <= eps * max(1.0, 10 * float(np.abs(V).max())),
            detail=f"max <v - Pv, c - Pv> = {worst:.3e}",
        ))

        shifts = rng.standard_normal((min(n, 1000), q))
        gaps = [float(np.max(np.abs(translate_project(y, cone, x) - y - project(cone, x - y).point)))
                / (1.0 + float(np.max(np.abs(y)))) for y, x in zip(shifts, V)]
        results.append(PropertyResult(
            name=f"{label}: translated projection",
            passed=max(gaps) <= 1e-12,
            detail=f"P_{{y+C}}(x) - y against P_C(x - y): max relative gap {max(gaps):.1e}",
        ))
        return results

    def _hyperplane_translation(self) -> PropertyResult:
        # translating an isotone projection set keeps its projection isotone
        p, q = self.p, self.q
        rng = self._rng(20)
        normal = np.zeros(p + q)
        if p > 1:
            normal[0], normal[1] = HALF_SQRT2, -HALF_SQRT2
        else:
            normal[p:] = rng.standard_normal(q)
        spec = hyperplane_through(normal)
        shift = rng.standard_normal(p + q)
        report = test_isotonicity(projector(spec, shift), p, q, min(self.samples, 2000), self.seed, self.eps)
        return PropertyResult(
            name="translated isotone hyperplane stays isotone",
            passed=report.passed,
            detail=f"{report.violations} violations in {report.samples} pairs",
            witnesses=[f"z1={_witness(w.z1)} z2={_witness(w.z2)}" for w in report.witnesses[:5]],
        )

    def _oracle_agreement(self, count: int = 100, tolerance: float = 2e-3) -> List[PropertyResult]:
        rng = self._rng(30)
        instances = {"worked-example cone": [list(map(float, row)) for row in WORKED_EXAMPLE_NORMALS],
                     "random 3-halfspace cone": fat_random_cone(3, rng)}
        results = []
        for label, normals in instances.items():
            m = len(normals[0])
            worst = 0.0
            for v in rng.standard_normal((count, m)) * 2:
                exact = project_polyhedral(normals, v, self.eps).point
                oracle = grid_projection_oracle(normals, v)
                worst = max(worst, float(np.linalg.norm(exact - oracle, ord=np.inf)))
            results.append(PropertyResult(
                name=f"{label}: enumeration agrees with grid search",
                passed=worst <= tolerance,
                detail=f"max deviation {worst:.2e} over {count} points (tolerance {tolerance:g})",
            ))
        return results

    # ----------------------------------------------------------- isotone

    def isotone(self) -> List[PropertyResult]:
        p, q, eps = self.p, self.q, self.eps
        rng = self._rng(40)
        n = self.samples
        results = []

        def check(name: str, F, expect_pass: bool = True, samples: int = n) -> PropertyResult:
            report = test_isotonicity(F, p, q, samples, self.seed, eps, stop_at_first=not expect_pass)
            return PropertyResult(
                name=name,
                passed=report.passed == expect_pass,
                detail=f"{report.violations} violations in {report.samples} ordered pairs",
                witnesses=[f"z1={_witness(w.z1)} z2={_witness(w.z2)}" for w in report.witnesses[:5]]
                if expect_pass else [],
            )

        results.append(check("identity is isotone", lambda z: z))
        results.append(check("negation is not isotone", lambda z: -z, expect_pass=False))

        F1 = self._random_combination(rng)
        F2 = self._random_combination(rng)
        results.append(check("random Lorentz-affine combination is isotone", F1))
        results.append(check("nonnegative sum of isotone maps is isotone", combine_maps([F1, F2], [0.7, 2.5])))

        fn = LorentzAffine(d=tuple(rng.random(p)), beta=0.0, gamma=float(rng.standard_normal()))
        fn = LorentzAffine(d=fn.d, beta=float(sum(fn.d)) * rng.uniform(-1, 1), gamma=fn.gamma)
        weight = sample_lorentz(p, q, 1, rng)[0]
        results.append(check("valid scalar function times a weight in L is isotone",
                             lift_scalar(fn, weight, p), samples=min(n, 1000)))

        composed = Composed(Composed(fn, ExpDescriptor(scale=0.5, rate=0.3)), ArctanDescriptor(scale=2.0, rate=1.0))
        failures = segment_monotonicity(composed, p, q, segments=min(n, 1000), seed=self.seed)
        results.append(PropertyResult(
            name="composition with monotone descriptors stays monotone",
            passed=failures == 0,
            detail=f"{failures} decreasing segments",
        ))

        if (p, q) == (2, 2):
            results.append(check("worked example step map is isotone",
                                 build_combination(worked_example_combination())))
        return results

    def _random_combination(self, rng: np.random.Generator) -> CombinationMapping:
        p, q = self.p, self.q
        terms = []
        for _ in range(3):
            d = rng.random(p)
            beta = float(d.sum()) * rng.uniform(-1, 1)
            weight = sample_lorentz(p, q, 1, rng)[0]
            terms.append(CombinationTerm(LorentzAffine(d=tuple(d), beta=beta, gamma=float(rng.standard_normal())),
                                         tuple(weight)))
        return build_combination(IsotoneCombination(p=p, q=q, terms=tuple(terms)))


def run_suite(suite: str, p: int, q: int, samples: Optional[int] = None, seed: Optional[int] = None,
              eps: TolLike = None) -> List[PropertyResult]:
    return PropertyVerifier(p, q, samples, seed, eps).run(suite)


def check_points(problem: Problem, points: Sequence, eps: TolLike = None) -> List[PropertyResult]:
    """Omega and Gamma membership of the listed points"""
    F = problem_mapping(problem)
    results = []
    for point in points:
        z = to_float(point)
        label = _witness(z)
        value = F(z)
        omega = in_omega(problem, z, eps, F)
        gamma = in_gamma(problem, z, eps, F)
        mixed = in_gamma_mixed(problem, z, eps, F)
        results.append(PropertyResult(
            name=f"Omega membership of {label}",
            passed=omega,
            detail=f"G={_witness(value[:problem.p])}, H={_witness(value[problem.p:])}",
        ))
        results.append(PropertyResult(
            name=f"Gamma membership of {label}",
            passed=gamma and mixed == gamma,
            detail=f"Picard form {gamma}, mixed form {mixed}",
        ))
    return results
