"""
Extended Lorentz cone toolkit: cone membership, projections, isotone maps and
a Picard solver for mixed complementarity problems over L.
"""

from .models import Point, Problem, SolveOptions, SolveReport
from .cone_core import contains_L, contains_M, leq_order
from .projections import project, project_product
from .solver import PicardSolver, solve, in_omega, in_gamma, certify_solution
from .property_suites import PropertyVerifier, run_suite
from .reproduction import reproduce
from .builtin_problems import get_builtin, worked_example
from .logging_config import setup_logging

__version__ = "1.0.0"
__author__ = "Lorentz Picard"

__all__ = [
    'Point',
    'Problem',
    'SolveOptions',
    'SolveReport',
    'contains_L',
    'contains_M',
    'leq_order',
    'project',
    'project_product',
    'PicardSolver',
    'solve',
    'in_omega',
    'in_gamma',
    'certify_solution',
    'PropertyVerifier',
    'run_suite',
    'reproduce',
    'get_builtin',
    'worked_example',
    'setup_logging'
]
