"""
Self test: the worked examples of every module, each with its acceptance tolerance
"""
import sys
import time
from typing import Callable, List, Tuple

import numpy as np
from tabulate import tabulate

from algebra.eigen_spec import EigenSpec
from algebra.profile_polynomials import build_polynomials, compute_c, is_rational_case, rationality_sweep
from geometry.bundle import ricci_eigenvalues, split_residual
from geometry.models import disk_metric, sum_disk_metric
from radial.phi import PhiProfile
from radial.solver import closed_form_Z, solve_profile, z_eval, z_prime
from utils.exceptions import DomainError, FiberSingularityError, UnsupportedModelError
from utils.logger import setup_logger
from verification.hessian_blocks import capital_phi_check, fd_blocks, hessian_blocks_closed_form
from verification.models import ModelGeometry
from verification.monge_ampere import bergman_compare_p1, solve_ma_profile, u_value, verify_ma

logger = setup_logger('SelfTest')

Check = Tuple[str, Callable[[], bool]]


def _close(a, b, tol) -> bool:
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol)


def _raises(exc_type, func) -> bool:
    try:
        func()
    except exc_type:
        return True
    return False


def _rational_profile_checks() -> List[Check]:
    checks = []
    for n, k, lam in [(1, 1, -2.0), (1, 2, -1.0), (2, 3, -1.0), (3, 2, -2.0)]:
        def check(n=n, k=k, lam=lam):
            spec = EigenSpec.equal(n, k, lam)
            profile = PhiProfile(solve_profile(spec))
            r = np.linspace(0.0, 1.0, 1001)
            return (_close(z_eval(profile.sol, r), closed_form_Z(spec, r), 1e-8)
                    and _close(profile.phi(r), 1.0 - r * r, 1e-8))
        checks.append((f"closed-form profile ({n},{k},{lam:g})", check))
    return checks


def _endpoint_check() -> bool:
    spec = EigenSpec.from_values(2, 1, [-1.0, 0.5])
    profile = PhiProfile(solve_profile(spec))
    return (abs(z_eval(profile.sol, 0.0) - spec.lambda_star) <= 1e-8
            and abs(z_prime(profile.sol, 1.0) + 1.0) <= 1e-8
            and abs(profile.phi(1.0)) <= 1e-10
            and abs(profile.phi_prime(1.0) + 2.0) <= 1e-6)


def _polynomial_checks() -> List[Check]:
    def factor():
        polys = build_polynomials(EigenSpec.equal(2, 3, -1.0))
        return _close(polys.h(polys.spec.lambda_star) * 2.0 + polys.g(polys.spec.lambda_star), 0.0, 1e-10)

    def c_value():
        c, _ = compute_c(EigenSpec.equal(1, 1, -2.0))
        return abs(c) <= 1e-10 and is_rational_case(EigenSpec.equal(3, 2, -2.0))

    def sweep():
        return rationality_sweep(1, 1, 1000)[1]['consistent']

    return [('g(λ★) + 2h(λ★) = 0', factor), ('c vanishes at λ = −(n+1)/k', c_value),
            ('rationality sweep sign changes agree', sweep),
            ('not rational at λ = −1.5', lambda: not is_rational_case(EigenSpec.equal(1, 1, -1.5)))]


def _egg_spot_checks() -> List[Check]:
    model = ModelGeometry.egg(1, 1, 1.0)
    holder = {}

    def profile():
        if 'profile' not in holder:
            holder['profile'] = solve_ma_profile(model)
        return holder['profile']

    xi = np.array([0.5 + 0.0j])

    def u_values():
        return (abs(u_value(model, profile(), [0.0, 0.5]) - 0.75) <= 1e-8
                and abs(u_value(model, profile(), [0.5, 0.0]) - 0.75) <= 1e-8)

    def blocks():
        closed = hessian_blocks_closed_form(model, profile(), xi)
        numeric = fd_blocks(model, profile(), xi)
        return (_close(closed.base, 4.0 / 3.0, 1e-8) and _close(closed.fiber, 16.0 / 9.0, 1e-8)
                and _close(numeric.base, 4.0 / 3.0, 1e-8) and _close(numeric.fiber, 16.0 / 9.0, 1e-8))

    def capital_phi():
        formula, numeric = capital_phi_check(model, profile(), xi)
        return abs(formula - 64.0 / 27.0) <= 1e-8 and abs(numeric - 64.0 / 27.0) <= 1e-8

    def errors():
        return (_raises(FiberSingularityError, lambda: hessian_blocks_closed_form(model, profile(), [0.0]))
                and _raises(DomainError, lambda: u_value(model, profile(), [0.0, 1.0]))
                and _raises(UnsupportedModelError, lambda: bergman_compare_p1(1, 1, 10, p=2.0)))

    return [('u = 3/4 on egg(1,1,1)', u_values), ('blocks 4/3 and 16/9', blocks),
            ('Φ = 64/27', capital_phi), ('domain errors', errors)]


def _ma_checks() -> List[Check]:
    checks = []
    models = [ModelGeometry.egg(1, 1, 1.0), ModelGeometry.egg(1, 2, 2.0), ModelGeometry.egg(2, 2, 3.0),
              ModelGeometry.product_ball([(1, 1.0), (1, 2.0)], 1)]
    for model in models:
        limit = 1e-8 if model.name == 'egg(n=1, k=1, p=1)' else 1e-5

        def check(model=model, limit=limit):
            report = verify_ma(model, count=20)
            return report.max_residual <= limit and report.passed
        checks.append((f"Monge-Ampère {model.name}", check))
    for n, k in [(1, 1), (2, 3)]:
        checks.append((f"unit ball comparison ({n},{k})", lambda n=n, k=k: bergman_compare_p1(n, k, 10).passed))
    return checks


def _bundle_checks() -> List[Check]:
    points = [np.array([0.0j]), np.array([0.2 + 0.1j]), np.array([-0.3j]), np.array([0.1 - 0.25j]),
              np.array([0.35 + 0.0j])]

    def ricci(metric, expected):
        report = ricci_eigenvalues(metric, points)
        return report.constant and _close(report.mean_eigenvalues, [expected], 1e-4)

    return [
        ('split residual, equal powers', lambda: split_residual(sum_disk_metric([1.0, 1.0]), [0.0]) <= 1e-6),
        ('split residual, powers (1,2)', lambda: split_residual(sum_disk_metric([1.0, 2.0]), [0.0]) >= 0.4),
        ('Ricci −2 for the disk line bundle', lambda: ricci(disk_metric(1.0), -2.0)),
        ('Ricci −1 for two copies of the disk bundle', lambda: ricci(sum_disk_metric([1.0, 1.0]), -1.0)),
    ]


def collect_checks() -> List[Check]:
    return (_polynomial_checks() + _rational_profile_checks() + [('endpoint data', _endpoint_check)]
            + _egg_spot_checks() + _ma_checks() + _bundle_checks())


def run_selftest() -> int:
    """
    Run every check; exit code 0 iff all pass

    A check that raises counts as a failure and its exception is logged.
    """
    rows = []
    failures = 0
    for name, check in collect_checks():
        start = time.perf_counter()
        try:
            ok = bool(check())
        except Exception as exc:
            logger.error(f"❌ {name} raised {type(exc).__name__}: {exc}")
            ok = False
        failures += 0 if ok else 1
        rows.append([name, '✅' if ok else '❌', f"{time.perf_counter() - start:.2f}s"])

    print("=" * 80, file=sys.stderr)
    print("SELFTEST", file=sys.stderr)
    print("=" * 80, file=sys.stderr)
    print(tabulate(rows, headers=['check', 'status', 'time']), file=sys.stderr)
    logger.info(f"{'✅' if failures == 0 else '❌'} {len(rows) - failures}/{len(rows)} checks passed")
    return 0 if failures == 0 else 3
