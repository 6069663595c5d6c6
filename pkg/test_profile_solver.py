"""
Tests for the radial profile solver
"""
import sys

import numpy as np
import pytest

from algebra.eigen_spec import EigenSpec
from algebra.profile_polynomials import build_polynomials
from radial.phi import PhiProfile
from radial.solver import (
    check_radius,
    closed_form_Z,
    concavity_estimate,
    node_spacing,
    ode_residual,
    solve_profile,
    w_rhs,
    w_second_derivative,
    z_eval,
    z_prime,
)
from test_polynomial_core import MIXED_SPECS, banner
from utils.exceptions import DomainError, InvalidSpecError, PreconditionError

RATIONAL_CASES = [(1, 1, -2.0), (1, 2, -1.0), (2, 3, -1.0), (3, 2, -2.0)]
RESIDUAL_FLOOR = 1e-13


@pytest.fixture(scope="module")
def rational_solution():
    return solve_profile(EigenSpec.equal(1, 1, -2.0))


@pytest.fixture(scope="module")
def mixed_solutions():
    return [solve_profile(spec) for spec in MIXED_SPECS]


# ----------------------------------------------------------------------
# Right-hand side
# ----------------------------------------------------------------------

def closed_form_W(r):
    return -3.0 / (2.0 / 3.0 + 4.0 / 3.0 * r * r)


def test_w_rhs_values():
    banner("W right-hand side")
    spec = EigenSpec.equal(1, 1, -2.0)
    polys = build_polynomials(spec)
    assert w_rhs(0.0, -1.3, spec, polys.h, polys.g) == 0.0
    assert w_rhs(0.7, 0.0, spec, polys.h, polys.g) == 0.0
    assert w_rhs(1.0, -1.5, spec, polys.h, polys.g) == pytest.approx(2.0, rel=1e-12)


def test_w_rhs_matches_closed_form_derivative():
    spec = EigenSpec.equal(1, 1, -2.0)
    polys = build_polynomials(spec)
    for r in (0.1, 0.45, 0.8):
        B = 2.0 / 3.0 + 4.0 / 3.0 * r * r
        expected = 3.0 * (8.0 / 3.0) * r / B ** 2
        assert w_rhs(r, closed_form_W(r), spec, polys.h, polys.g) == pytest.approx(expected, rel=1e-12)


def test_w_second_derivative_matches_finite_difference():
    spec = EigenSpec.from_values(2, 1, [-1.0, 0.5])
    polys = build_polynomials(spec)
    r, W, delta = 0.6, -1.2, 1e-5
    f = lambda rr, ww: w_rhs(rr, ww, spec, polys.h, polys.g)
    slope = f(r, W)
    numeric = (f(r + delta, W + delta * slope) - f(r - delta, W - delta * slope)) / (2.0 * delta)
    assert w_second_derivative(r, W, spec, polys.h, polys.g) == pytest.approx(numeric, rel=1e-6)


# ----------------------------------------------------------------------
# Solver
# ----------------------------------------------------------------------

def test_rational_profile_values(rational_solution):
    banner("Profile solver: rational case")
    sol = rational_solution
    assert z_eval(sol, 0.0) == pytest.approx(1.5, abs=1e-8)
    assert z_eval(sol, 0.5) == pytest.approx(0.75, abs=1e-8)
    assert z_eval(sol, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert z_prime(sol, 1.0) == pytest.approx(-1.0, abs=1e-8)
    assert z_prime(sol, 0.0) == 0.0


@pytest.mark.parametrize("n, k, lam", RATIONAL_CASES)
def test_closed_form_agreement(n, k, lam):
    spec = EigenSpec.equal(n, k, lam)
    sol = solve_profile(spec)
    r = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(z_eval(sol, r) - closed_form_Z(spec, r))) <= 1e-8


def test_endpoint_data(mixed_solutions):
    banner("Profile solver: endpoint data")
    for sol in mixed_solutions:
        spec = sol.spec
        assert z_eval(sol, 0.0) == pytest.approx(spec.lambda_star, abs=1e-8)
        assert z_prime(sol, 1.0) == pytest.approx(-1.0, abs=1e-8)
        assert sol.a < 0.0


def test_solution_is_monotone_and_in_range(mixed_solutions):
    for sol in mixed_solutions:
        r = np.linspace(0.0, 1.0, 501)
        Z = z_eval(sol, r)
        assert np.all(np.diff(Z) <= 1e-12)
        assert np.all(Z >= -1e-12) and np.all(Z <= sol.spec.lambda_star + 1e-12)
        assert np.all(sol.W_values < 0.0)


def max_residual(sol) -> float:
    r = np.linspace(0.0, 1.0, 1001)
    return float(np.max(np.abs(ode_residual(sol, r))))


def test_ode_residual_small(mixed_solutions):
    for sol in mixed_solutions:
        assert max_residual(sol) <= 1e-8, str(sol.spec)


@pytest.mark.parametrize("spec", MIXED_SPECS, ids=str)
def test_residual_halves_with_rel_tol(spec):
    coarse = max_residual(solve_profile(spec, rel_tol=1e-8))
    fine = max_residual(solve_profile(spec, rel_tol=5e-9))
    # both at round-off level leaves nothing to compare
    if coarse <= RESIDUAL_FLOOR:
        return
    assert fine <= coarse / 2.0, f"{spec}: {coarse:.3e} -> {fine:.3e}"


def test_node_spacing_follows_rel_tol():
    assert node_spacing(1e-4) == 0.05
    assert node_spacing(1e-8) == pytest.approx(1e-2)
    assert node_spacing(1e-12) == pytest.approx(1e-3)
    sol = solve_profile(EigenSpec.equal(1, 1, -2.0), rel_tol=1e-8, abs_tol=1e-6, method='DOP853')
    assert np.max(-np.diff(sol.grid)) <= 1e-2 + 1e-15
    assert sol.abs_tol == pytest.approx(1e-10)


def test_concavity_at_origin(rational_solution):
    # Z = (1 − r²)/(2/3 + 4/3 r²) has Z''(0) = 2·W(0) = −9
    assert concavity_estimate(rational_solution) == pytest.approx(-9.0, abs=1e-5)


def test_concavity_matches_twice_a(mixed_solutions):
    banner("Profile solver: concavity at the origin")
    for sol in mixed_solutions:
        estimate = concavity_estimate(sol)
        assert estimate < 0.0
        assert abs(estimate - 2.0 * sol.a) <= 1e-5, f"{sol.spec}: {estimate!r} vs 2a = {2.0 * sol.a!r}"


def test_concavity_rejects_bad_delta(rational_solution):
    with pytest.raises(DomainError):
        concavity_estimate(rational_solution, delta=0.0)
    with pytest.raises(DomainError):
        concavity_estimate(rational_solution, delta=1.5)


def test_dop853_agrees_with_rk45():
    spec = EigenSpec.from_values(2, 2, [-2.9, 0.8])
    rk45 = solve_profile(spec)
    dop = solve_profile(spec, method='DOP853')
    r = np.linspace(0.0, 1.0, 201)
    assert np.max(np.abs(z_eval(rk45, r) - z_eval(dop, r))) <= 1e-8
    assert max_residual(dop) <= 1e-8


@pytest.mark.parametrize("n, k, lam", RATIONAL_CASES)
def test_dop853_closed_form_agreement(n, k, lam):
    spec = EigenSpec.equal(n, k, lam)
    profile = PhiProfile(solve_profile(spec, method='DOP853'))
    r = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(z_eval(profile.sol, r) - closed_form_Z(spec, r))) <= 1e-8
    assert np.max(np.abs(profile.phi(r) - (1.0 - r * r))) <= 1e-8


def test_solver_rejects_eigenvalue_at_one():
    with pytest.raises(InvalidSpecError):
        solve_profile(EigenSpec.equal(1, 1, 1.0))


# ----------------------------------------------------------------------
# Closed form and domain checks
# ----------------------------------------------------------------------

def test_closed_form_Z():
    spec = EigenSpec.equal(1, 1, -2.0)
    assert closed_form_Z(spec, 1.0) == 0.0
    assert closed_form_Z(spec, 0.5) == pytest.approx(0.75)
    for n, k, lam in RATIONAL_CASES:
        rational = EigenSpec.equal(n, k, lam)
        assert closed_form_Z(rational, 0.0) == pytest.approx(rational.lambda_star, rel=1e-14)
    with pytest.raises(PreconditionError):
        closed_form_Z(EigenSpec.equal(1, 1, -1.5), 0.5)


def test_radius_domain(rational_solution):
    with pytest.raises(DomainError):
        z_eval(rational_solution, 1.5)
    with pytest.raises(DomainError):
        z_eval(rational_solution, -0.1)
    assert check_radius(1.0 + 1e-15) == 1.0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
