"""
Subcommand implementations

Each command returns an exit code: 0 ok, 3 threshold violation. Library
exceptions propagate to main.py, which maps them to exit codes 1, 2 and 4.
"""
import sys
from typing import Dict, List

import numpy as np
from tabulate import tabulate

from algebra.profile_polynomials import beta_identity_residual, compute_c, is_rational_case, rationality_sweep
from cli.config import RunConfig, UsageError
from config.settings import VERSION, settings
from geometry.bundle import (
    chern_curvature,
    determinant_ricci_gap,
    griffiths_negativity_sample,
    induced_base_metric,
    ricci_eigenvalues,
    split_griffiths_gap,
    split_residual,
)
from geometry.models import named_metric
from radial.phi import PhiProfile, eval_phi, samples
from radial.solver import closed_form_Z, solve_profile, z_eval
from utils.exceptions import NotNegativeBundleError
from utils.helpers import make_rng, max_abs, random_unit_vector
from utils.logger import setup_logger
from utils.report_storage import ReportStorage
from verification.hessian_blocks import (
    block_cross_validation,
    capital_phi_check,
    fiber_determinant_check,
    metric_lower_bound_check,
)
from verification.models import ModelGeometry
from verification.monge_ampere import (
    bergman_compare_p1,
    model_ricci_audit,
    sample_normal_points,
    solve_ma_profile,
    verify_ma,
)

logger = setup_logger('Commands')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_THRESHOLD = 3
EXIT_IO = 4

CLOSED_FORM_TOLERANCE = 1e-8
PHI_RELATIVE_TOLERANCE = 1e-5
HERMITIAN_DEFECT_TOLERANCE = 1e-6
BUNDLE_SAMPLE_RADIUS = 0.5


def print_summary(title: str, rows: List[list], headers=('check', 'value', 'status')):
    """Tabulated run summary on stderr"""
    print("=" * 60, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    print(tabulate(rows, headers=list(headers), floatfmt='.3e'), file=sys.stderr)


def _status(ok: bool) -> str:
    return '✅' if ok else '❌'


def _report_header(config: RunConfig) -> Dict:
    return {'version': VERSION, 'config': config.as_dict(), 'settings': settings.as_dict()}


# ----------------------------------------------------------------------
# profile
# ----------------------------------------------------------------------

def cmd_profile(config: RunConfig) -> int:
    """Solve the profile and write the r, Z, W, φ, φ′, Y, residual table"""
    spec = config.eigen_spec()
    sol = solve_profile(spec, rel_tol=config.rel_tol, abs_tol=config.abs_tol,
                        method=config.method, max_step=config.max_step)
    profile = PhiProfile(sol)
    table = samples(profile, config.grid_points)

    ode_max = max_abs(table['ode_residual'])
    phi_max = max_abs(table['phi_ode_residual'])
    tolerance = settings.ODE_RESIDUAL_TOLERANCE
    passed = ode_max <= tolerance and phi_max <= tolerance

    metadata = {
        **_report_header(config),
        'spec': spec.as_dict(),
        'steps': sol.steps,
        'a': sol.a,
        'max_ode_residual': ode_max,
        'max_phi_ode_residual': phi_max,
        'tolerance': tolerance,
        'passed': passed,
    }
    storage = ReportStorage()
    if (config.format or 'csv') == 'csv':
        storage.save_csv(table, metadata, config.output, default_name='profile.csv')
    else:
        storage.save_json({**metadata, 'table': table.to_dict(orient='list')}, config.output,
                          default_name='profile.json')

    print_summary(f"PROFILE {spec}", [
        ['solver steps', sol.steps, ''],
        ['a = W(0)', sol.a, ''],
        ['max |ODE residual|', ode_max, _status(ode_max <= tolerance)],
        ['max |φ ODE residual|', phi_max, _status(phi_max <= tolerance)],
    ])
    return EXIT_OK if passed else EXIT_THRESHOLD


# ----------------------------------------------------------------------
# rationality
# ----------------------------------------------------------------------

def cmd_rationality(config: RunConfig) -> int:
    """c, the beta residual and the rational-case verdict for equal eigenvalues"""
    storage = ReportStorage()

    if config.sweep:
        if config.n is None or config.k is None:
            raise UsageError("--sweep needs --n and --k")
        table, summary = rationality_sweep(config.n, config.k, config.samples)
        document = {**_report_header(config), **summary}
        if (config.format or 'json') == 'csv':
            storage.save_csv(table, document, config.output, default_name='rationality_sweep.csv')
        else:
            storage.save_json({**document, 'table': table.to_dict(orient='list')}, config.output,
                              default_name='rationality_sweep.json')
        print_summary(f"RATIONALITY SWEEP n={config.n} k={config.k}", [
            ['c sign changes', str(summary['c_sign_changes']), ''],
            ['beta sign changes', str(summary['beta_sign_changes']), ''],
            ['consistent', summary['consistent'], _status(summary['consistent'])],
        ])
        return EXIT_OK if summary['consistent'] else EXIT_THRESHOLD

    spec = config.eigen_spec()
    c, _ = compute_c(spec)
    beta = beta_identity_residual(spec)
    rational = is_rational_case(spec)
    document = {
        **_report_header(config),
        'spec': spec.as_dict(),
        'c': c,
        'beta_residual': beta,
        'is_rational': rational,
    }
    passed = True
    rows = [['c = Q(μ)', c, ''], ['beta residual', beta, ''], ['is_rational', rational, '']]

    if rational:
        sol = solve_profile(spec, rel_tol=config.rel_tol, abs_tol=config.abs_tol,
                            method=config.method, max_step=config.max_step)
        r = np.linspace(0.0, 1.0, config.grid_points)
        z_gap = max_abs(z_eval(sol, r) - closed_form_Z(spec, r))
        phi_gap = max_abs(eval_phi(sol, r) - (1.0 - r * r))
        document['closed_form_sup_gap'] = z_gap
        document['phi_sup_gap'] = phi_gap
        passed = z_gap <= CLOSED_FORM_TOLERANCE and phi_gap <= CLOSED_FORM_TOLERANCE
        rows += [['sup |Z − closed form|', z_gap, _status(z_gap <= CLOSED_FORM_TOLERANCE)],
                 ['sup |φ − (1 − r²)|', phi_gap, _status(phi_gap <= CLOSED_FORM_TOLERANCE)]]

    document['passed'] = passed
    storage.save_json(document, config.output, default_name='rationality.json')
    print_summary(f"RATIONALITY {spec}", rows)
    return EXIT_OK if passed else EXIT_THRESHOLD


# ----------------------------------------------------------------------
# verify-ma
# ----------------------------------------------------------------------

def build_model(config: RunConfig) -> ModelGeometry:
    """
    ModelGeometry from --model and its parameters

    Raises:
        UsageError: missing parameters for the chosen model
    """
    model = config.model or 'egg'
    if model == 'egg':
        if config.n is None or config.k is None or config.p is None:
            raise UsageError("--model egg needs --n, --k and --p")
        return ModelGeometry.egg(config.n, config.k, config.p)
    if not config.factors or config.k is None:
        raise UsageError("--model product_ball needs --factors and --k")
    return ModelGeometry.product_ball(config.factors, config.k)


def cmd_verify_ma(config: RunConfig) -> int:
    """Monge-Ampère residuals, block formulas, Φ, lower bound and (p = 1) the unit-ball comparison"""
    model = build_model(config)
    profile = solve_ma_profile(model)
    report = verify_ma(model, profile, count=config.points, seed=config.seed, threads=config.threads,
                       generic_metric=config.generic_metric)

    normal = sample_normal_points(model, config.normal_points, make_rng(config.seed + 1))
    block_gaps = block_cross_validation(model, profile, normal)
    phi_rows = []
    for w in normal:
        formula, numeric = capital_phi_check(model, profile, w[model.n:])
        fiber_numeric, fiber_formula, _ = fiber_determinant_check(model, profile, w[model.n:])
        phi_rows.append({
            'X': float(np.linalg.norm(w[model.n:])),
            'phi_formula': formula,
            'phi_numeric': numeric,
            'relative_gap': abs(formula - numeric) / abs(formula),
            'fiber_det': fiber_numeric,
            'fiber_det_formula': fiber_formula,
        })
    lower = metric_lower_bound_check(model, profile, normal)
    ricci = model_ricci_audit(model, count=config.normal_points, seed=config.seed, threads=config.threads)
    ricci_ok = ricci.extra['max_deviation'] <= settings.RICCI_TOLERANCE

    max_block_gap = max(block_gaps, default=0.0)
    max_phi_gap = max((row['relative_gap'] for row in phi_rows), default=0.0)
    blocks_ok = max_block_gap <= settings.BLOCK_TOLERANCE
    phi_ok = max_phi_gap <= PHI_RELATIVE_TOLERANCE

    document = {
        **_report_header(config),
        **report.to_dict(),
        'blocks': {'max_gap': max_block_gap, 'gaps': block_gaps, 'tolerance': settings.BLOCK_TOLERANCE},
        'capital_phi': {'max_relative_gap': max_phi_gap, 'points': phi_rows},
        'lower_bound': lower.to_dict(),
        'ricci_audit': ricci.to_dict(),
    }
    document['config'] = config.as_dict()
    rows = [
        ['max MA residual', report.max_residual, _status(report.pass_fraction >= 0.95)],
        ['mean MA residual', report.mean_residual, ''],
        ['max |log form − J form|', report.max_identity_gap, _status(report.max_identity_gap <= settings.IDENTITY_TOLERANCE)],
        ['geometry violations', report.geometry_violations, _status(report.geometry_violations == 0)],
        ['max block gap', max_block_gap, _status(blocks_ok)],
        ['max Φ relative gap', max_phi_gap, _status(phi_ok)],
        ['lower bound min eig', lower.min_eig, _status(lower.passed)],
        ['Ricci deviation from spec', ricci.extra['max_deviation'], _status(ricci_ok)],
    ]
    passed = report.passed and blocks_ok and phi_ok and lower.passed and ricci_ok

    if model.kind == 'egg' and model.factors[0][1] == 1.0:
        bergman = bergman_compare_p1(model.n, model.k, config.normal_points, profile=profile, seed=config.seed)
        document['bergman'] = bergman.to_dict()
        rows.append(['unit-ball max |ratio − 1|', bergman.max_deviation, _status(bergman.passed)])
        passed = passed and bergman.passed

    document['passed'] = passed
    ReportStorage().save_json(document, config.output, default_name='verify_ma.json')
    print_summary(f"MONGE-AMPÈRE {model.name}", rows)
    return EXIT_OK if passed else EXIT_THRESHOLD


# ----------------------------------------------------------------------
# bundle-check
# ----------------------------------------------------------------------

def _ricci_points(n: int, count: int, seed: int) -> List[np.ndarray]:
    rng = make_rng(seed)
    return [rng.uniform(0.0, BUNDLE_SAMPLE_RADIUS) * random_unit_vector(rng, n) for _ in range(count)]


def cmd_bundle_check(config: RunConfig) -> int:
    """Curvature, splitting, Griffiths sign and Ricci constancy of a bundle metric"""
    n = config.n or 1
    metric = named_metric(config.model or 'disk', n=n, k=config.k or 1,
                          powers=config.powers or (1.0,), json_path=config.json_path)
    z = np.zeros(metric.n, dtype=complex) if config.z is None else np.asarray(config.z, dtype=complex)

    theta = chern_curvature(metric, z)
    defect = theta.hermitian_defect()
    split = split_residual(metric, z)
    griffiths = griffiths_negativity_sample(metric, z, trials=config.trials, rng_seed=config.seed)
    split_gap = split_griffiths_gap(metric, z, trials=config.trials, rng_seed=config.seed)
    det_gap = determinant_ricci_gap(metric, z)

    document = {
        **_report_header(config),
        'metric': metric.name,
        'n': metric.n,
        'k': metric.k,
        'z': z,
        'hermitian_defect': defect,
        'split_residual': split,
        'curvature_split': split <= settings.SPLIT_TOLERANCE,
        'split_griffiths_gap': split_gap,
        'griffiths': griffiths.to_dict(),
        'determinant_ricci_gap': det_gap,
    }
    rows = [
        ['hermitian defect', defect, _status(defect <= HERMITIAN_DEFECT_TOLERANCE)],
        ['split residual', split, 'split' if split <= settings.SPLIT_TOLERANCE else 'not split'],
        ['Griffiths max quartic', griffiths.max_value, griffiths.verdict],
        ['det-bundle Ricci gap', det_gap, _status(det_gap <= settings.RICCI_TOLERANCE)],
    ]
    passed = defect <= HERMITIAN_DEFECT_TOLERANCE and det_gap <= settings.RICCI_TOLERANCE

    try:
        g, G = induced_base_metric(metric, z)
        points = _ricci_points(metric.n, config.points, config.seed)
        ricci = ricci_eigenvalues(metric, points, threads=config.threads)
        document['induced_metric'] = {'g': g, 'G': G}
        document['ricci'] = ricci.to_dict()
        rows.append(['Ricci eigenvalue spread', ricci.spread, 'constant' if ricci.constant else 'not constant'])
        rows.append(['Ricci eigenvalues (mean)', str(np.round(ricci.mean_eigenvalues, 6).tolist()), ''])
    except NotNegativeBundleError as exc:
        logger.warning(f"⚠️ {exc}")
        document['induced_metric'] = {'error': str(exc)}
        rows.append(['induced metric', 'not positive definite', ''])

    document['passed'] = passed
    ReportStorage().save_json(document, config.output, default_name='bundle_check.json')
    print_summary(f"BUNDLE CHECK {metric.name}", rows)
    return EXIT_OK if passed else EXIT_THRESHOLD
