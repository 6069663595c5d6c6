"""
Command-line parsing and the resolved run configuration

Precedence: Settings defaults < --config key=value file < explicit flags.
"""
import argparse
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from dotenv import dotenv_values

from algebra.eigen_spec import EigenSpec
from config.settings import settings
from utils.exceptions import InvalidSpecError
from utils.helpers import parse_factor_list, parse_float_list
from utils.logger import setup_logger

logger = setup_logger('RunConfig')

SUBCOMMANDS = ('profile', 'rationality', 'verify-ma', 'bundle-check', 'selftest')
MA_MODELS = ('egg', 'product_ball')
BUNDLE_MODELS = ('disk', 'sum-disk', 'flat', 'positive', 'gaussian', 'poly')
FORMATS = ('csv', 'json')


class UsageError(Exception):
    """Command line or config file cannot be parsed"""


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors"""

    def error(self, message):
        self.print_usage(sys.stderr)
        logger.error(f"❌ Usage error: {message}")
        sys.exit(1)


@dataclass
class RunConfig:
    """Fully resolved parameters of one CLI run"""
    subcommand: str
    n: Optional[int] = None
    k: Optional[int] = None
    lambda_value: Optional[float] = None
    eigs: Optional[Tuple[float, ...]] = None
    model: Optional[str] = None
    p: Optional[float] = None
    factors: Optional[Tuple[Tuple[int, float], ...]] = None
    powers: Optional[Tuple[float, ...]] = None
    json_path: Optional[str] = None
    z: Optional[Tuple[complex, ...]] = None
    rel_tol: float = settings.PROFILE_REL_TOL
    abs_tol: float = settings.PROFILE_ABS_TOL
    method: str = settings.PROFILE_METHOD
    max_step: float = settings.PROFILE_MAX_STEP
    grid_points: int = settings.PROFILE_POINTS
    points: int = settings.SAMPLE_POINTS
    normal_points: int = settings.NORMAL_POINTS
    trials: int = settings.GRIFFITHS_TRIALS
    sweep: bool = False
    samples: int = 1000
    generic_metric: bool = False
    seed: int = settings.RNG_SEED
    threads: int = settings.THREADS
    output: Optional[str] = None
    format: Optional[str] = None
    log_level: str = settings.LOG_LEVEL
    log_file: Optional[str] = None
    config_path: Optional[str] = None

    def eigen_spec(self) -> EigenSpec:
        """
        EigenSpec from --n/--k and either --lambda or --eigs

        Raises:
            InvalidSpecError: missing or conflicting eigenvalue flags, invalid values
        """
        if self.n is None or self.k is None:
            raise InvalidSpecError("--n and --k are required")
        if self.lambda_value is not None and self.eigs is not None:
            raise InvalidSpecError("give either --lambda or --eigs, not both")
        if self.lambda_value is not None:
            spec = EigenSpec.equal(self.n, self.k, self.lambda_value)
        elif self.eigs is not None:
            spec = EigenSpec.from_values(self.n, self.k, list(self.eigs))
        else:
            raise InvalidSpecError("one of --lambda or --eigs is required")
        spec.require_below_one()
        return spec

    def as_dict(self) -> dict:
        return asdict(self)


def _complex_list(text: str) -> Tuple[complex, ...]:
    return tuple(complex(item.strip().replace(' ', '')) for item in text.split(',') if item.strip())


# dest -> converter, shared by flags and config-file values
FIELD_TYPES = {
    'n': int,
    'k': int,
    'lambda_value': float,
    'eigs': lambda text: tuple(parse_float_list(text)),
    'model': str,
    'p': float,
    'factors': lambda text: tuple(parse_factor_list(text)),
    'powers': lambda text: tuple(parse_float_list(text)),
    'json_path': str,
    'z': _complex_list,
    'rel_tol': float,
    'abs_tol': float,
    'method': str,
    'max_step': float,
    'grid_points': int,
    'points': int,
    'normal_points': int,
    'trials': int,
    'samples': int,
    'seed': int,
    'threads': int,
    'output': str,
    'format': str,
    'log_level': str,
    'log_file': str,
}
BOOLEAN_FIELDS = ('sweep', 'generic_metric')
FILE_KEY_ALIASES = {'lambda': 'lambda_value', 'json': 'json_path'}
# A flag for one key of a pair also drops the other key from the config file
EXCLUSIVE_KEYS = (('lambda_value', 'eigs'),)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('--config', dest='config_path', help='key=value file; flags override it')
    parser.add_argument('--log-level', dest='log_level', type=str.upper,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--log-file', dest='log_file')
    parser.add_argument('--threads', type=int)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--output', help="output file ('-' for stdout)")
    parser.add_argument('--format', choices=FORMATS)


def _add_spec(parser: argparse.ArgumentParser):
    parser.add_argument('--n', type=int, help='base dimension n >= 1')
    parser.add_argument('--k', type=int, help='fiber rank k >= 1')
    parser.add_argument('--lambda', dest='lambda_value', type=float, help='equal eigenvalue')
    parser.add_argument('--eigs', type=FIELD_TYPES['eigs'], help='comma separated eigenvalues')


def _add_solver(parser: argparse.ArgumentParser):
    parser.add_argument('--rel-tol', dest='rel_tol', type=float)
    parser.add_argument('--abs-tol', dest='abs_tol', type=float)
    parser.add_argument('--method', choices=['RK45', 'DOP853'])
    parser.add_argument('--max-step', dest='max_step', type=float)


def build_parser() -> UsageArgumentParser:
    """Argument parser for all subcommands"""
    parser = UsageArgumentParser(prog='main.py', description='Kähler-Einstein potentials on ball bundles')
    sub = parser.add_subparsers(dest='subcommand', parser_class=UsageArgumentParser)
    sub.required = True

    profile = sub.add_parser('profile', help='solve Z and export Z, W, φ, Y as CSV')
    _add_spec(profile)
    _add_solver(profile)
    profile.add_argument('--grid-points', dest='grid_points', type=int, help='uniform radii in the table')
    _add_common(profile)

    rationality = sub.add_parser('rationality', help='closed-form criteria for equal eigenvalues')
    _add_spec(rationality)
    _add_solver(rationality)
    rationality.add_argument('--sweep', action='store_true', default=None, help='tabulate c and beta over λ')
    rationality.add_argument('--samples', type=int, help='λ grid size for --sweep')
    _add_common(rationality)

    verify = sub.add_parser('verify-ma', help='Monge-Ampère and Hessian block checks on model bundles')
    verify.add_argument('--model', choices=MA_MODELS)
    verify.add_argument('--n', type=int)
    verify.add_argument('--k', type=int)
    verify.add_argument('--p', type=float)
    verify.add_argument('--factors', type=FIELD_TYPES['factors'], help="product factors 'n1:p1,n2:p2'")
    verify.add_argument('--points', type=int, help='interior sample points')
    verify.add_argument('--normal-points', dest='normal_points', type=int)
    verify.add_argument('--generic-metric', dest='generic_metric', action='store_true', default=None)
    _add_common(verify)

    bundle = sub.add_parser('bundle-check', help='curvature audit of a bundle metric')
    bundle.add_argument('--model', choices=BUNDLE_MODELS)
    bundle.add_argument('--n', type=int)
    bundle.add_argument('--k', type=int)
    bundle.add_argument('--powers', type=FIELD_TYPES['powers'])
    bundle.add_argument('--json', dest='json_path')
    bundle.add_argument('--z', type=_complex_list, help="base point, e.g. '0.1+0.2j,0'")
    bundle.add_argument('--trials', type=int)
    bundle.add_argument('--points', type=int, help='Ricci sample points')
    _add_common(bundle)

    selftest = sub.add_parser('selftest', help='run the built-in examples')
    _add_common(selftest)
    return parser


def _read_config_file(path: str) -> dict:
    """
    Parse a key=value file

    Raises:
        OSError: unreadable file
        UsageError: unknown key or unparsable value
    """
    if not Path(path).is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    values = {}
    for raw_key, raw_value in dotenv_values(path).items():
        key = raw_key.strip().lower().replace('-', '_')
        key = FILE_KEY_ALIASES.get(key, key)
        if raw_value is None:
            raise UsageError(f"config key {raw_key!r} has no value")
        if key in BOOLEAN_FIELDS:
            values[key] = raw_value.strip().lower() in ('1', 'true', 'yes', 'on')
        elif key in FIELD_TYPES:
            try:
                values[key] = FIELD_TYPES[key](raw_value)
            except ValueError as exc:
                raise UsageError(f"config key {raw_key!r}: {exc}") from exc
        else:
            raise UsageError(f"unknown config key {raw_key!r}")
    return values


def resolve_config(argv: Optional[List[str]] = None) -> RunConfig:
    """
    Parse argv into a RunConfig

    Raises:
        SystemExit(1): argparse usage error
        UsageError: bad config file content
        OSError: config file unreadable
    """
    args = build_parser().parse_args(argv)
    explicit = {key: value for key, value in vars(args).items() if value is not None}

    merged = {}
    if explicit.get('config_path'):
        merged.update(_read_config_file(explicit['config_path']))
        logger.debug(f"Loaded {len(merged)} keys from {explicit['config_path']}")
        for first, second in EXCLUSIVE_KEYS:
            if first in explicit:
                merged.pop(second, None)
            if second in explicit:
                merged.pop(first, None)
    merged.update(explicit)

    config = RunConfig(subcommand=merged.pop('subcommand'))
    for key, value in merged.items():
        setattr(config, key, value)
    if config.threads < 1:
        raise UsageError("--threads must be at least 1")
    return config
