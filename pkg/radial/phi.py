"""
φ, φ′ and Y = 1/Z from a solved profile

φ(r) = 2·ρ(r)^{1/(m+1)}·Z(r) with the regular radicand
ρ = 1/(−(2W + rW′)·W^{k−1}·h(Z)), finite on all of [0, 1].
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd

from radial.solver import (
    ProfileSolution,
    Radius,
    check_radius,
    ode_residual,
    w_rhs,
    z_eval,
    z_prime,
)
from utils.exceptions import ProfileOverflowError, SignViolationError
from utils.logger import setup_logger

logger = setup_logger('PhiProfile')

RADICAND_FLOOR = -1e-12
Z_FLOOR = 1e-13
CSV_COLUMNS = ['r', 'Z', 'W', 'phi', 'phi_prime', 'Y', 'ode_residual', 'phi_ode_residual']


def _as_output(value, like):
    return float(value) if np.ndim(like) == 0 else np.asarray(value, dtype=float)


def _radicand_root(sol: ProfileSolution, r: Radius) -> Radius:
    """ρ(r)^{1/(m+1)}, positive real branch"""
    spec = sol.spec
    W = sol.W(r)
    Z = spec.lambda_star + r * r * W
    W_prime = w_rhs(r, W, spec, sol.polys.h, sol.polys.g)
    denominator = -(2.0 * W + r * W_prime) * W ** (spec.k - 1) * sol.polys.h(Z)

    with np.errstate(divide='ignore'):
        radicand = np.where(denominator != 0.0, 1.0 / np.where(denominator != 0.0, denominator, 1.0), -np.inf)
    if np.any(radicand < RADICAND_FLOOR):
        worst = float(np.min(radicand))
        raise SignViolationError(f"phi radicand {worst:.3e} is negative for {spec}; profile is corrupted")
    radicand = np.maximum(radicand, 0.0)
    return radicand ** (1.0 / (spec.m + 1))


def eval_phi(sol: ProfileSolution, r: Radius) -> Radius:
    """
    φ(r) on [0, 1]; φ(1) = 0 and φ > 0 on [0, 1)

    Raises:
        DomainError: r outside [0, 1]
        SignViolationError: radicand below −1e-12
    """
    r = check_radius(r)
    root = _radicand_root(sol, r)
    return _as_output(2.0 * root * z_eval(sol, r), r)


@dataclass(frozen=True, eq=False)
class PhiProfile:
    """φ and Y built on a ProfileSolution"""
    sol: ProfileSolution

    @property
    def spec(self):
        return self.sol.spec

    def phi(self, r: Radius) -> Radius:
        return eval_phi(self.sol, r)

    def phi_prime(self, r: Radius) -> Radius:
        return eval_phi_prime(self, r)

    def Y(self, r: Radius) -> Radius:
        return eval_Y(self, r)

    def Y_prime(self, r: Radius) -> Radius:
        return eval_Y_prime(self, r)

    @cached_property
    def samples(self) -> pd.DataFrame:
        """Dense samples on the default 1001-point grid"""
        return samples(self, 1001)


def eval_phi_prime(profile: PhiProfile, r: Radius) -> Radius:
    """
    φ′ = φ·(ν − 1/Z)/r, evaluated as 2ν·r·W·ρ^{1/(m+1)}

    The two agree since ν − 1/Z = ν·r²W/Z; the second form has no cancellation
    at r → 0 and no 0/0 at r = 1 (φ′(1) = −2).
    """
    sol = profile.sol
    r = check_radius(r)
    value = 2.0 * sol.spec.nu * r * sol.W(r) * _radicand_root(sol, r)
    return _as_output(value, r)


def eval_Y(profile: PhiProfile, r: Radius) -> Radius:
    """
    Y = 1/Z; Y ≥ ν

    Raises:
        ProfileOverflowError: Z(r) < 1e-13 (r at or too close to 1)
    """
    Z = z_eval(profile.sol, r)
    if np.any(Z < Z_FLOOR):
        raise ProfileOverflowError(f"Y = 1/Z overflows: Z({r}) = {np.min(Z):.3e}")
    return _as_output(1.0 / Z, r)


def eval_Y_prime(profile: PhiProfile, r: Radius) -> Radius:
    """dY/dr = −Z′/Z²"""
    Z = z_eval(profile.sol, r)
    if np.any(Z < Z_FLOOR):
        raise ProfileOverflowError(f"Y' overflows: Z({r}) = {np.min(Z):.3e}")
    return _as_output(-z_prime(profile.sol, r) / (Z * Z), r)


def phi_ode_residual(profile: PhiProfile, r: Radius) -> Radius:
    """(m+1)·r·Z·φ′ + (m+1 − 2kZ)·φ"""
    spec = profile.spec
    r = check_radius(r)
    Z = z_eval(profile.sol, r)
    phi = eval_phi(profile.sol, r)
    phi_prime = eval_phi_prime(profile, r)
    value = (spec.m + 1) * r * Z * phi_prime + (spec.m + 1 - 2 * spec.k * Z) * phi
    return _as_output(value, r)


def samples(profile: PhiProfile, count: int) -> pd.DataFrame:
    """
    Table of r, Z, W, φ, φ′, Y and both ODE residuals on `count` uniform radii

    Y is +inf where Z vanishes (r = 1).
    """
    sol = profile.sol
    r = np.linspace(0.0, 1.0, count)
    Z = z_eval(sol, r)
    with np.errstate(divide='ignore'):
        Y = np.where(Z < Z_FLOOR, np.inf, 1.0 / np.where(Z < Z_FLOOR, 1.0, Z))
    table = pd.DataFrame({
        'r': r,
        'Z': Z,
        'W': sol.W(r),
        'phi': eval_phi(sol, r),
        'phi_prime': eval_phi_prime(profile, r),
        'Y': Y,
        'ode_residual': ode_residual(sol, r),
        'phi_ode_residual': phi_ode_residual(profile, r),
    }, columns=CSV_COLUMNS)
    logger.debug(f"Sampled profile for {sol.spec} at {count} radii")
    return table
