"""
Result formatting: human-readable summaries, machine-readable JSON and CSV traces.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .config import config
from .models import PropertyResult, SolveReport
from .numeric import to_float
from .reproduction import ReproductionReport

logger = logging.getLogger(__name__)


def _floats(values) -> List[float]:
    # float() keeps the shortest round-trip repr when dumped by json
    return [float(v) for v in to_float(values)]


class ReportFormatter:
    """Formats solver, verification and reproduction results for display"""

    @staticmethod
    def format_number(value: float) -> str:
        return f"{value:.{config.output.SIGNIFICANT_DIGITS}g}"

    @staticmethod
    def format_vector(values) -> str:
        return "(" + ", ".join(ReportFormatter.format_number(v) for v in _floats(values)) + ")"

    @staticmethod
    def format_solve_report(report: SolveReport, start=None) -> str:
        """Format a solver run"""
        lines = []
        status = "✅" if report.converged else "❌"
        lines.append(f"=== PICARD ITERATION: {report.problem_name} ===")
        lines.append("")
        lines.append(f"{status} Termination: {report.termination} after {report.iterations} iterations")
        lines.append(f"   Residual: {report.residual:.3e}")
        if start is not None:
            lines.append(f"   Start: {ReportFormatter.format_vector(start)}")
        lines.append(f"   Solution x: {ReportFormatter.format_vector(report.x)}")
        lines.append(f"   Solution u: {ReportFormatter.format_vector(report.u)}")
        lines.append("")
        lines.append("📊 DIAGNOSTICS:")
        certificate = "✅" if report.monotone_certificate else "❌"
        lines.append(f"   {certificate} Monotone ({report.direction}) iterates")
        gamma = "✅" if report.gamma_member else "❌"
        lines.append(f"   {gamma} Limit in Gamma")
        if report.exact_digits:
            lines.append(f"   Arithmetic: Decimal, {report.exact_digits} digits")
        return "\n".join(lines)

    @staticmethod
    def solve_report_to_dict(report: SolveReport, seed: Optional[int] = None) -> Dict[str, Any]:
        data = {
            "problem": report.problem_name,
            "p": report.p,
            "q": report.q,
            "termination": report.termination,
            "iterations": report.iterations,
            "residual": float(report.residual),
            "solution": _floats(report.solution),
            "monotone_certificate": report.monotone_certificate,
            "direction": report.direction,
            "gamma_member": report.gamma_member,
            "exact_digits": report.exact_digits,
        }
        if seed is not None:
            data["seed"] = seed
        return data

    @staticmethod
    def write_trace(report: SolveReport, path: Union[str, Path]) -> None:
        """CSV with columns n, x_1..x_p, u_1..u_q, residual, step_norm"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = (["n"] + [f"x_{i + 1}" for i in range(report.p)]
                  + [f"u_{i + 1}" for i in range(report.q)] + ["residual", "step_norm"])
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in report.trace:
                values = _floats(row.z) + [row.residual, row.step_norm]
                writer.writerow([row.n] + [f"{v:.17g}" for v in values])
        logger.info(f"Wrote {len(report.trace)} trace rows to {path}")

    @staticmethod
    def format_property_results(results: Sequence[PropertyResult], title: str) -> str:
        lines = [f"=== {title} ===", ""]
        for result in results:
            status = "✅ PASS" if result.passed else "❌ FAIL"
            lines.append(f"{status}  {result.name}")
            if result.detail:
                lines.append(f"        {result.detail}")
            for witness in result.witnesses:
                lines.append(f"        witness: {witness}")
        passed = sum(r.passed for r in results)
        lines.append("")
        lines.append(f"{passed}/{len(results)} properties hold")
        return "\n".join(lines)

    @staticmethod
    def property_results_to_dict(results: Sequence[PropertyResult], seed: int, **context) -> Dict[str, Any]:
        return {
            **context,
            "seed": seed,
            "passed": all(r.passed for r in results),
            "properties": [
                {"name": r.name, "passed": r.passed, "detail": r.detail, "witnesses": list(r.witnesses)}
                for r in results
            ],
        }

    @staticmethod
    def format_reproduction(report: ReproductionReport) -> str:
        lines = ["=== WORKED EXAMPLE REPRODUCTION ===", ""]
        width = max(len(row.name) for row in report.rows)
        lines.append(f"     {'quantity'.ljust(width)}  {'measured':>24}  {'expected':>24}  {'tolerance':>9}")
        for row in report.rows:
            status = "✅" if row.passed else "❌"
            if row.informational:
                status = "📊"
            lines.append(f"{status}   {row.name.ljust(width)}  {ReportFormatter.format_number(row.measured):>24}  "
                         f"{ReportFormatter.format_number(row.expected):>24}  {row.tolerance:>9.0e}")
        lines.append("")
        for verdict in report.verdicts:
            lines.append(f"📊 {verdict}")
        lines.append(f"   Limit: {ReportFormatter.format_vector(report.solution)} after {report.iterations} iterations")
        lines.append(f"   Seed: {report.seed}")
        passed = sum(row.passed for row in report.rows)
        lines.append(f"{passed}/{len(report.rows)} rows within tolerance")
        return "\n".join(lines)

    @staticmethod
    def reproduction_to_dict(report: ReproductionReport) -> Dict[str, Any]:
        return {
            "seed": report.seed,
            "passed": report.passed,
            "iterations": report.iterations,
            "solution": _floats(report.solution),
            "rows": [
                {"name": row.name, "measured": row.measured, "expected": row.expected,
                 "tolerance": row.tolerance, "passed": row.passed, "informational": row.informational}
                for row in report.rows
            ],
            "verdicts": list(report.verdicts),
        }


def to_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2)
