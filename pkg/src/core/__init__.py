"""
Core solvers for geo-sublinear.
"""

from .kernels import Kernel, center_sq_distances, center_distances
from .frank_wolfe import DualSolution, solve_meb_dual
from .meb_core import approx_center, farthest_point, badoiu_clarkson, eval_distance
from .stable_meb import meb_alg1, meb_alg2, radius_range
from .meb_outliers import bicriteria_linear, bicriteria_sublinear, full_coverage
from .shapes import ShapeFamily, BallFamily, KBallFamily, LineCenter, SlabFamily, HalfSpaceFamily
from .generalized import generalized_rank, generalized_uniform_adaptive, generalized_sandwich
from .hybrid import hybrid_meb, hybrid_meb_outliers, infer_stability
from .mex import kcenter_outliers, line_fit_outliers
from .svm import MarginVector, gilbert, svm_one_class_outliers, svm_two_class_outliers
from .oracle import exact_meb, exact_meb_outliers_tiny, exact_polytope_distance_tiny
from .instance_generator import FAMILIES, FAMILY_DEFAULTS, generate
from .verification import CheckResult, ContractVerifier, all_passed, kernel_from_report

__all__ = [
    'Kernel',
    'center_sq_distances',
    'center_distances',
    'DualSolution',
    'solve_meb_dual',
    'approx_center',
    'farthest_point',
    'badoiu_clarkson',
    'eval_distance',
    'meb_alg1',
    'meb_alg2',
    'radius_range',
    'bicriteria_linear',
    'bicriteria_sublinear',
    'full_coverage',
    'ShapeFamily',
    'BallFamily',
    'KBallFamily',
    'LineCenter',
    'SlabFamily',
    'HalfSpaceFamily',
    'generalized_rank',
    'generalized_uniform_adaptive',
    'generalized_sandwich',
    'hybrid_meb',
    'hybrid_meb_outliers',
    'infer_stability',
    'kcenter_outliers',
    'line_fit_outliers',
    'MarginVector',
    'gilbert',
    'svm_one_class_outliers',
    'svm_two_class_outliers',
    'exact_meb',
    'exact_meb_outliers_tiny',
    'exact_polytope_distance_tiny',
    'FAMILIES',
    'FAMILY_DEFAULTS',
    'generate',
    'CheckResult',
    'ContractVerifier',
    'all_passed',
    'kernel_from_report',
]
