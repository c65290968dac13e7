"""
Command-line controllers for geo-sublinear.
"""

from .solve_controller import SolveController, SolveSettings, Dataset, load_dataset
from .generate_controller import GenerateController
from .verify_controller import VerifyController
from .bench_controller import BenchController, BenchCell, result_size
from .cli_controller import CliController, build_parser, main, EXIT_OK, EXIT_ERROR, EXIT_REFUSED

__all__ = [
    'SolveController',
    'SolveSettings',
    'Dataset',
    'load_dataset',
    'GenerateController',
    'VerifyController',
    'BenchController',
    'BenchCell',
    'result_size',
    'CliController',
    'build_parser',
    'main',
    'EXIT_OK',
    'EXIT_ERROR',
    'EXIT_REFUSED',
]
