"""
Tests for φ, φ′ and Y
"""
import sys

import numpy as np
import pytest

from algebra.eigen_spec import EigenSpec
from radial.phi import CSV_COLUMNS, PhiProfile, eval_phi, phi_ode_residual, samples
from radial.solver import solve_profile
from test_polynomial_core import MIXED_SPECS, banner
from test_profile_solver import RATIONAL_CASES
from utils.exceptions import DomainError, ProfileOverflowError


@pytest.fixture(scope="module")
def rational_profile():
    return PhiProfile(solve_profile(EigenSpec.equal(1, 1, -2.0)))


@pytest.fixture(scope="module")
def mixed_profiles():
    return [PhiProfile(solve_profile(spec)) for spec in MIXED_SPECS]


def test_phi_closed_form_values(rational_profile):
    banner("φ in the rational case")
    assert rational_profile.phi(0.0) == pytest.approx(1.0, abs=1e-8)
    assert rational_profile.phi(0.5) == pytest.approx(0.75, abs=1e-8)
    assert rational_profile.phi(1.0) == pytest.approx(0.0, abs=1e-10)
    assert rational_profile.phi_prime(0.5) == pytest.approx(-1.0, abs=1e-8)
    assert rational_profile.phi_prime(0.0) == 0.0


@pytest.mark.parametrize("n, k, lam", RATIONAL_CASES)
def test_phi_is_one_minus_r_squared(n, k, lam):
    profile = PhiProfile(solve_profile(EigenSpec.equal(n, k, lam)))
    r = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(profile.phi(r) - (1.0 - r * r))) <= 1e-8


def test_phi_differs_from_one_minus_r_squared_off_the_rational_line():
    profile = PhiProfile(solve_profile(EigenSpec.equal(1, 1, -1.0)))
    r = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(profile.phi(r) - (1.0 - r * r))) >= 1e-3


def test_phi_endpoint_data(mixed_profiles):
    banner("φ endpoint data")
    for profile in mixed_profiles:
        assert abs(profile.phi(1.0)) <= 1e-10
        assert profile.phi_prime(1.0) == pytest.approx(-2.0, abs=1e-6)
        r = np.linspace(0.0, 0.999, 400)
        assert np.all(profile.phi(r) > 0.0)


def test_phi_prime_matches_difference_quotient(mixed_profiles):
    delta = 1e-6
    for profile in mixed_profiles:
        for r in (0.2, 0.55, 0.9):
            numeric = (profile.phi(r + delta) - profile.phi(r - delta)) / (2.0 * delta)
            assert profile.phi_prime(r) == pytest.approx(numeric, rel=1e-6, abs=1e-8)


def test_Y_values(rational_profile):
    banner("Y = 1/Z")
    assert rational_profile.Y(0.5) == pytest.approx(4.0 / 3.0, rel=1e-8)
    assert rational_profile.Y(0.0) == pytest.approx(rational_profile.spec.nu, rel=1e-8)
    assert rational_profile.Y_prime(0.5) == pytest.approx(32.0 / 9.0, rel=1e-7)


def test_Y_overflow(rational_profile):
    with pytest.raises(ProfileOverflowError):
        rational_profile.Y(1.0)


def test_Y_at_least_nu(mixed_profiles):
    for profile in mixed_profiles:
        Y = profile.Y(np.linspace(0.0, 0.99, 100))
        assert np.all(Y >= profile.spec.nu - 1e-10)


def test_Y_from_logarithmic_derivative_of_phi(mixed_profiles):
    r = np.linspace(0.0, 0.98, 99)
    for profile in mixed_profiles:
        expected = profile.spec.nu - r * profile.phi_prime(r) / profile.phi(r)
        assert np.allclose(profile.Y(r), expected, rtol=1e-10, atol=1e-12), str(profile.spec)


def test_phi_ode_residual(mixed_profiles, rational_profile):
    assert phi_ode_residual(rational_profile, 0.5) == pytest.approx(0.0, abs=1e-10)
    for profile in mixed_profiles:
        assert phi_ode_residual(profile, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert phi_ode_residual(profile, 1.0) == pytest.approx(0.0, abs=1e-10)
        r = np.linspace(0.0, 1.0, 201)
        assert np.max(np.abs(phi_ode_residual(profile, r))) <= 1e-8


def test_phi_domain(rational_profile):
    with pytest.raises(DomainError):
        eval_phi(rational_profile.sol, 1.2)


def test_samples_table(rational_profile):
    banner("Sample table")
    table = samples(rational_profile, 1001)
    assert list(table.columns) == CSV_COLUMNS
    assert len(table) == 1001
    row = table.iloc[500]
    assert row['r'] == 0.5
    assert row['Z'] == pytest.approx(0.75, abs=1e-8)
    assert row['phi'] == pytest.approx(0.75, abs=1e-8)
    assert np.isinf(table['Y'].iloc[-1])
    assert table['phi_prime'].iloc[-1] == pytest.approx(-2.0, abs=1e-6)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
