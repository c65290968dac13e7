"""
Command-line controller.

Parses the command line, applies the configuration and logging settings and
dispatches to the generate / solve / verify / bench controllers.

Exit codes: 0 success, 1 error (including usage errors and failed
verification), 2 principled refusal (budget exceeded or infeasible input).
"""

import argparse
import json
import sys
from pathlib import Path

from ..models import SolverConfig, to_jsonable
from ..core import Kernel, FAMILY_DEFAULTS
from ..utils import (
    get_logger,
    setup_root_logger,
    parse_level,
    GeoSublinearError,
    UsageError,
)
from .. import __version__
from .generate_controller import GenerateController, PARAMETER_FLAGS
from .solve_controller import SolveController, SolveSettings, load_dataset
from .verify_controller import VerifyController
from .bench_controller import BenchController, BASELINE

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUSED = 2

ALGORITHMS = [
    'bc-meb', 'meb-alg1', 'meb-alg2', 'outliers-linear', 'outliers-sublinear',
    'hybrid-meb', 'hybrid-outliers', 'kcenter', 'linefit', 'svm1', 'svm2',
]


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _add_family_flags(parser: argparse.ArgumentParser, skip: tuple[str, ...] = ()) -> None:
    for name in PARAMETER_FLAGS:
        if name in skip:
            continue
        kind = int if name in ('n', 'd', 'k') else float
        parser.add_argument(f'--{name}', type=kind, default=None, help=f"family parameter {name}")


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--format', choices=['dense', 'sparse'], default=None,
                        help="dataset format (default: from the extension)")
    parser.add_argument('--header', action='store_true', help="CSV file has a header line")
    parser.add_argument('--truth', default=None, help="planted-truth JSON (default: sidecar next to the dataset)")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--epsilon', type=float, default=None)
    parser.add_argument('--delta', type=float, default=None)
    parser.add_argument('--gamma', type=float, default=None, help="outlier fraction (default: from truth, else 0)")
    parser.add_argument('--gamma2', type=float, default=None, help="second-class outlier fraction (svm2)")
    parser.add_argument('--beta0', type=float, default=None)
    parser.add_argument('--eta', type=float, default=0.1, help="failure probability (eta0 for meb-alg2, hybrid-meb)")
    parser.add_argument('--eta1', type=float, default=None)
    parser.add_argument('--k', type=int, default=None)
    parser.add_argument('--s', type=float, default=None, help="core-set accuracy split (bc-meb)")
    parser.add_argument('--rounds', type=int, default=None, help="round cap z")
    parser.add_argument('--repetitions', type=int, default=None)
    parser.add_argument('--candidate-budget', type=int, default=None)
    parser.add_argument('--sublinear', action='store_true', help="sampling variant (kcenter, linefit, svm1, svm2)")
    parser.add_argument('--kernel', choices=['linear', 'rbf'], default='linear')
    parser.add_argument('--bandwidth', type=float, default=1.0)
    parser.add_argument('--seed', type=int, default=0)


def build_parser() -> CliParser:
    """Build the argument parser with its four subcommands."""
    parser = CliParser(prog='geo-sublinear', description="Sublinear-time geometric optimization with outliers")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--config', default=None, help="JSON configuration file")
    parser.add_argument('--log-level', default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument('--log-dir', default=None, help="directory for log files ('' disables file logging)")
    commands = parser.add_subparsers(dest='command', parser_class=CliParser)

    gen = commands.add_parser('generate', help="write a synthetic dataset and its truth sidecar")
    gen.add_argument('--family', required=True, choices=list(FAMILY_DEFAULTS))
    gen.add_argument('--out', required=True)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--format', choices=['dense', 'sparse'], default=None)
    _add_family_flags(gen)

    solve = commands.add_parser('solve', help="run one solver and print its JSON report")
    solve.add_argument('dataset')
    solve.add_argument('--algo', required=True, choices=ALGORITHMS)
    solve.add_argument('--out', default=None, help="also write the report to this file")
    solve.add_argument('--verify-coverage', action='store_true', help="add a full-scan verification pass")
    _add_dataset_flags(solve)
    _add_solver_flags(solve)

    verify = commands.add_parser('verify', help="check a report against its dataset")
    verify.add_argument('report')
    verify.add_argument('dataset')
    verify.add_argument('--gamma', type=float, default=None)
    _add_dataset_flags(verify)

    bench = commands.add_parser('bench', help="sweep algorithms over generated instances, CSV out")
    bench.add_argument('--family', required=True, choices=list(FAMILY_DEFAULTS))
    bench.add_argument('--algos', required=True, help=f"comma-separated algorithm ids, '{BASELINE}' included")
    bench.add_argument('--ns', type=_int_list, required=True, help="comma-separated instance sizes")
    bench.add_argument('--epsilons', type=_float_list, default=[0.2])
    bench.add_argument('--deltas', type=_float_list, default=[0.1])
    bench.add_argument('--seeds', type=int, default=3, help="seeds 0..N-1")
    bench.add_argument('--out', default=None, help="CSV path (default: stdout)")
    bench.add_argument('--k', type=int, default=None)
    bench.add_argument('--beta0', type=float, default=None)
    bench.add_argument('--sublinear', action='store_true')
    _add_family_flags(bench, skip=('n', 'k'))
    return parser


def _family_params(args: argparse.Namespace, skip: tuple[str, ...] = ()) -> dict:
    return {
        name: getattr(args, name)
        for name in PARAMETER_FLAGS
        if name not in skip and getattr(args, name, None) is not None
    }


def _settings_from_args(args: argparse.Namespace) -> SolveSettings:
    try:
        kernel = Kernel(args.kernel, args.bandwidth)
    except ValueError as e:
        raise UsageError(str(e)) from e
    return SolveSettings(
        epsilon=args.epsilon,
        delta=args.delta,
        beta0=args.beta0,
        eta=args.eta,
        eta1=args.eta1,
        k=args.k,
        s=args.s,
        gamma=args.gamma,
        gamma2=args.gamma2,
        rounds=args.rounds,
        repetitions=args.repetitions,
        candidate_budget=args.candidate_budget,
        sublinear=args.sublinear,
        kernel=kernel,
        seed=args.seed,
        verify=args.verify_coverage,
    )


def _print_json(data: dict, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(to_jsonable(data), indent=2, sort_keys=True, ensure_ascii=False) + '\n')


class CliController:
    """
    Entry point behind main.py.

    run() never raises: errors are logged and mapped onto exit codes.
    """

    def __init__(self, stdout=None):
        self._stdout = stdout or sys.stdout
        self._config = SolverConfig()

    @property
    def config(self) -> SolverConfig:
        return self._config

    def _load_config(self, args: argparse.Namespace) -> None:
        if args.config:
            if not Path(args.config).is_file():
                raise UsageError(f"Configuration file not found: {args.config}")
            config = SolverConfig.load_from_file(args.config)
            if config is None:
                raise UsageError(f"Invalid configuration file: {args.config}")
            self._config = config

        runtime = self._config.runtime
        level_name = args.log_level or runtime.log_level
        try:
            level = parse_level(level_name)
        except ValueError as e:
            raise UsageError(str(e)) from e
        log_dir = runtime.log_dir if args.log_dir is None else (args.log_dir or None)
        setup_root_logger(log_dir, level)

    def run(self, argv: list[str] | None = None) -> int:
        """
        Run one command.

        Args:
            argv: Arguments without the program name (default: sys.argv[1:]).

        Returns:
            Process exit code.
        """
        try:
            args = build_parser().parse_args(argv)
            if args.command is None:
                raise UsageError("missing command (generate, solve, verify or bench)")
            self._load_config(args)
            handler = {
                'generate': self._cmd_generate,
                'solve': self._cmd_solve,
                'verify': self._cmd_verify,
                'bench': self._cmd_bench,
            }[args.command]
            return handler(args)
        except UsageError as e:
            logger.error(f"Usage error: {e}")
            sys.stderr.write(f"error: {e}\n")
            return EXIT_ERROR
        except (GeoSublinearError, ValueError, OSError) as e:
            logger.error(f"{type(e).__name__}: {e}")
            sys.stderr.write(f"error: {e}\n")
            return EXIT_ERROR

    def _cmd_generate(self, args: argparse.Namespace) -> int:
        summary = GenerateController(self._config).generate(
            args.family, _family_params(args), args.out, args.seed, args.format
        )
        _print_json(summary, self._stdout)
        return EXIT_OK

    def _cmd_solve(self, args: argparse.Namespace) -> int:
        dataset = load_dataset(args.dataset, args.format, args.header, args.truth)
        report = SolveController(self._config).solve(args.algo, dataset, _settings_from_args(args))
        self._stdout.write(report.to_json() + '\n')
        if args.out and not report.save_to_file(args.out):
            return EXIT_ERROR
        if report.status != 'ok':
            return EXIT_REFUSED
        return EXIT_OK

    def _cmd_verify(self, args: argparse.Namespace) -> int:
        controller = VerifyController(self._config)
        verdict = controller.verify(args.report, args.dataset, args.truth, args.format, args.header, args.gamma)
        self._stdout.write(controller.render(verdict) + '\n')
        return EXIT_OK if verdict['passed'] else EXIT_ERROR

    def _cmd_bench(self, args: argparse.Namespace) -> int:
        algorithms = [a.strip() for a in args.algos.split(',') if a.strip()]
        base = SolveSettings(k=args.k, beta0=args.beta0, sublinear=args.sublinear)
        family_params = _family_params(args, skip=('n', 'k'))
        if args.family == 'k-clusters' and args.k is not None:
            family_params['k'] = args.k
        frame = BenchController(self._config).run(
            args.family,
            family_params,
            algorithms,
            args.ns,
            args.epsilons,
            args.deltas,
            list(range(args.seeds)),
            base,
            args.out,
        )
        if args.out is None:
            frame.to_csv(self._stdout, index=False)
        return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Console entry point."""
    return CliController().run(argv)
