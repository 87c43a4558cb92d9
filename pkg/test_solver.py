"""
Tests for the Picard iteration and the Omega / Gamma oracles on the worked example
"""

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from decimal import Decimal

import numpy as np
import pytest

from src.builtin_problems import (
    OMEGA_POINT, WORKED_EXAMPLE_FIRST_ITERATE, WORKED_EXAMPLE_SOLUTION,
    lorentz_affine_demo, worked_example, zero_map,
)
from src.errors import DimensionError, HypothesisError
from src.models import Point, Problem, SolveOptions, SolveReport
from src.numeric import to_float
from src.cone_core import leq_order
from src.solver import (
    PicardSolver, certify_solution, check_hypotheses, check_start, in_gamma,
    in_gamma_mixed, in_omega, mixed_picard_step, picard_step, problem_mapping,
    residual, sample_gamma_members, solve, split_map, verify_least_element,
    verify_lower_bound,
)

ZSTAR = to_float(WORKED_EXAMPLE_SOLUTION)
OMEGA = to_float(OMEGA_POINT)


def test_first_step_from_origin():
    problem = worked_example()
    F = problem_mapping(problem)
    z1 = picard_step(F, problem.K, np.zeros(4))
    assert np.allclose(z1, to_float(WORKED_EXAMPLE_FIRST_ITERATE), atol=1e-15)
    assert residual(F, problem.K, np.zeros(4)) == pytest.approx(0.4)


def test_mixed_step_agrees():
    problem = worked_example()
    G, H = split_map(problem_mapping(problem), 2)
    x, u = mixed_picard_step(G, H, problem.cone, np.zeros(2), np.zeros(2))
    assert np.allclose(np.concatenate([x, u]), to_float(WORKED_EXAMPLE_FIRST_ITERATE))


def test_mixed_step_agrees_on_random_states():
    problem = worked_example()
    F = problem_mapping(problem)
    G, H = split_map(F, 2)
    rng = np.random.default_rng(42)
    for z in rng.normal(scale=5.0, size=(1000, 4)):
        x, u = mixed_picard_step(G, H, problem.cone, z[:2], z[2:])
        assert np.array_equal(np.concatenate([x, u]), picard_step(F, problem.K, z))


def test_iterates_stay_in_C():
    report = PicardSolver(worked_example(), SolveOptions(trace=True)).solve()
    for row in report.trace[1:]:
        assert row.z[2] == 0.0, (row.n, row.z.tolist())
        assert row.z[3] >= 0.0
    assert report.solution[2] == 0.0


def test_gamma_members_trap_the_iterates():
    problem = worked_example()
    report = PicardSolver(problem, SolveOptions(trace=True)).solve()
    members = sample_gamma_members(problem, report.solution, count=30, seed=7)
    assert members
    for y in members:
        upper = Point.from_vector(y, 2, 2)
        for row in report.trace:
            assert leq_order(Point.from_vector(row.z, 2, 2), upper), (row.n, y.tolist())
    print(f"✅ {len(report.trace)} iterates below {len(members)} Gamma members")


def test_residual_at_solution():
    problem = worked_example()
    assert residual(problem_mapping(problem), problem.K, ZSTAR) <= 1e-12


def test_solve_from_origin():
    report = solve(worked_example())
    assert report.termination == SolveReport.RESIDUAL_TOL
    assert report.converged
    assert report.iterations <= 60
    assert np.max(np.abs(report.solution - ZSTAR)) <= 1e-9
    assert report.residual <= 1e-10
    assert report.monotone_certificate
    assert report.direction == "increasing"
    assert report.gamma_member
    print(f"✅ Converged to {report.solution.tolist()} in {report.iterations} iterations")


def test_solve_from_omega_point_decreases():
    problem = worked_example()
    report = PicardSolver(problem, SolveOptions(trace=True)).solve(OMEGA)
    assert report.converged
    assert report.direction == "decreasing"
    assert report.monotone_certificate
    assert certify_solution(problem, report.solution).holds(1e-8)
    assert leq_order(Point.from_vector(report.solution, 2, 2), Point.from_vector(OMEGA, 2, 2))
    assert report.trace[0].n == 0
    assert report.trace[0].step_norm == 0.0


def test_trace_rows_and_recurrence():
    report = PicardSolver(worked_example(), SolveOptions(trace=True)).solve()
    rows = report.trace
    assert [row.n for row in rows] == list(range(len(rows)))
    assert rows[-1].residual == report.residual
    for before, after in zip(rows[1:], rows[2:]):
        assert after.z[0] == pytest.approx(5 / 24 * before.z[0] + 19 / 45, abs=1e-12)
        assert after.z[3] == pytest.approx(5 / 24 * before.z[3] + 19 / 90, abs=1e-12)


def test_exact_iteration():
    options = SolveOptions(max_iter=5, trace=True, exact_digits=50)
    report = PicardSolver(worked_example(), options).solve()
    assert report.termination == SolveReport.MAX_ITER
    assert report.exact_digits == 50
    assert isinstance(report.trace[1].z[0], Decimal)
    assert report.trace[1].z[0] == Decimal("0.4")


def test_zero_map_stops_immediately():
    report = solve(zero_map(), [1.0, -2.0, 0.5, 3.0])
    assert report.converged
    assert report.iterations == 0
    assert report.solution.tolist() == [1.0, -2.0, 0.5, 3.0]


def test_zero_map_outside_K_projects_once():
    report = solve(zero_map(), [1.0, -2.0, 3.0, 0.5])
    assert report.converged
    assert report.iterations <= 2
    assert np.allclose(report.solution, [1.0, -2.0, 1.75, 1.75])


def test_max_iter_termination():
    report = solve(worked_example(), opts=SolveOptions(max_iter=3))
    assert report.termination == SolveReport.MAX_ITER
    assert not report.converged
    assert report.iterations == 3


def test_omega_and_gamma_oracles():
    problem = worked_example()
    F = problem_mapping(problem)
    value = F(OMEGA)
    assert np.allclose(value[:2], [24.6, 24.6])
    assert np.allclose(value[2:], [23 / 15, 34 / 15])
    assert in_omega(problem, OMEGA)
    assert in_gamma(problem, OMEGA)
    assert in_gamma_mixed(problem, OMEGA)
    assert not in_omega(problem, np.zeros(4))
    assert in_omega(problem, ZSTAR)
    assert in_gamma(problem, ZSTAR)
    with pytest.raises(DimensionError):
        in_omega(problem, [1.0, 2.0])


def test_start_conditions():
    problem = worked_example()
    start = check_start(problem, np.zeros(4))
    assert start.ordered
    assert start.sufficient

    F = problem_mapping(problem)
    flipped = check_start(problem, np.zeros(4), F=lambda z: -F(z))
    assert not flipped.minus_F_in_L
    assert not flipped.sufficient

    assert check_start(zero_map(), [1.0, 0.0, 0.0, 1.0]).ordered


def test_lower_bound_and_least_element():
    problem = worked_example()
    assert verify_lower_bound(problem, ZSTAR, [OMEGA])
    assert verify_lower_bound(problem, ZSTAR, [ZSTAR])
    assert not verify_lower_bound(problem, OMEGA + 1.0, [OMEGA])
    with pytest.raises(HypothesisError):
        verify_lower_bound(problem, ZSTAR, [np.zeros(4)])

    members = sample_gamma_members(problem, ZSTAR, count=20, seed=42)
    assert members
    assert verify_least_element(problem, ZSTAR, members)


def test_certificate_at_solution():
    certificate = certify_solution(worked_example(), ZSTAR)
    assert certificate.G_inf_norm <= 1e-12
    assert certificate.u_in_C
    assert certificate.H_in_C_dual
    assert certificate.holds(1e-10)


def test_hypotheses_hold_for_worked_example():
    results = check_hypotheses(worked_example(), samples=2000, seed=42, omega_points=[OMEGA])
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_second_order_demo_converges():
    problem = lorentz_affine_demo()
    report = solve(problem)
    assert report.converged
    assert report.monotone_certificate
    assert certify_solution(problem, report.solution).holds(1e-8)


def test_problem_validation():
    with pytest.raises(DimensionError):
        Problem("bad", 2, 3, worked_example().cone, worked_example().map_spec)
    with pytest.raises(ValueError):
        SolveOptions(max_iter=0)
    with pytest.raises(ValueError):
        SolveOptions(exact_digits=10)


if __name__ == "__main__":
    print("🧪 Testing Picard solver")
    print("=" * 50)
    test_first_step_from_origin()
    test_mixed_step_agrees()
    test_mixed_step_agrees_on_random_states()
    test_iterates_stay_in_C()
    test_gamma_members_trap_the_iterates()
    test_residual_at_solution()
    test_solve_from_origin()
    test_solve_from_omega_point_decreases()
    test_trace_rows_and_recurrence()
    test_exact_iteration()
    test_zero_map_stops_immediately()
    test_zero_map_outside_K_projects_once()
    test_max_iter_termination()
    test_omega_and_gamma_oracles()
    test_start_conditions()
    test_lower_bound_and_least_element()
    test_certificate_at_solution()
    test_hypotheses_hold_for_worked_example()
    test_second_order_demo_converges()
    test_problem_validation()
    print("\n✅ All solver tests passed!")
