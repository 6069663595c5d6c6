"""
Radial profile solver

Solves r·Z′·P̂(Z) + Q̂(Z) = 0, Z(1) = 0 on [0, 1] through the regular
substitution Z = λ★ + r²·W. W satisfies a non-singular ODE with W(1) = −λ★,
integrated backward from r = 1 to r = 0 with an embedded Runge–Kutta pair.
The dense solution is a C² quintic Hermite spline through the accepted steps.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from algebra.eigen_spec import EigenSpec
from algebra.polynomial import RealPolynomial
from algebra.profile_polynomials import ProfilePolynomials, build_polynomials
from config.settings import settings
from utils.exceptions import (
    ConsistencyError,
    DomainError,
    NearSingularError,
    PreconditionError,
    ProfileSolverError,
)
from utils.helpers import richardson_extrapolate
from utils.logger import setup_logger

logger = setup_logger('ProfileSolver')

Radius = Union[float, np.ndarray]

SINGULAR_DENOMINATOR = 1e-13
ENDPOINT_SLOPE_TOLERANCE = 1e-8
RADIUS_SLACK = 1e-14
MAX_NODE_SPACING = 0.05
ABS_TOL_RATIO = 1e-2
CONCAVITY_LEVELS = 3


@dataclass(frozen=True, eq=False)
class ProfileSolution:
    """Solved W (and hence Z) on [0, 1]; immutable after construction"""
    spec: EigenSpec
    polys: ProfilePolynomials
    grid: np.ndarray           # strictly decreasing, grid[0] = 1, grid[-1] = 0
    W_values: np.ndarray
    W_prime_values: np.ndarray
    dense_eval: BPoly          # quintic Hermite interpolant of W on [0, 1]
    dense_derivative: BPoly
    a: float                   # W(0) < 0
    rel_tol: float
    abs_tol: float
    method: str

    def W(self, r: Radius) -> Radius:
        return _scalar_or_array(self.dense_eval(r), r)

    def W_prime_interp(self, r: Radius) -> Radius:
        return _scalar_or_array(self.dense_derivative(r), r)

    @property
    def steps(self) -> int:
        return len(self.grid) - 1


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return np.asarray(value, dtype=float)


# ----------------------------------------------------------------------
# Right-hand side
# ----------------------------------------------------------------------

@lru_cache(maxsize=128)
def desingularized_numerator(h: RealPolynomial, g: RealPolynomial, lambda_star: float) -> RealPolynomial:
    """
    S(s) = Σ_{j≥1} b_j s^{j−1} where (2h + g)(λ★ + s) = Σ_j b_j s^j

    The constant b₀ vanishes because g(λ★) = −2h(λ★).
    """
    numerator = h * 2.0 + g
    shifted = numerator.taylor_shift(lambda_star)
    b0 = shifted.coefficients[0]
    if abs(b0) > 1e-10 * numerator.eval_scale(lambda_star):
        raise ConsistencyError(f"g(λ★) + 2h(λ★) = {b0:.3e} is not zero")
    tail = shifted.coefficients[1:]
    return RealPolynomial(tail if tail else [0.0])


def _denominator(r, W, spec: EigenSpec, h: RealPolynomial):
    denominator = h(spec.lambda_star + r * r * W)
    if np.any(np.abs(denominator) < SINGULAR_DENOMINATOR * h.scale()):
        raise NearSingularError(
            f"h(λ★ + r²W) = {np.min(np.abs(denominator)):.3e} near r={np.min(r):.17g}; Z left [0, λ★]"
        )
    return denominator


def w_rhs(r: float, W: float, spec: EigenSpec, h: RealPolynomial, g: RealPolynomial) -> float:
    """
    W′ = −W · Σ_j b_j r^{2j−1} W^j / h(λ★ + r²W)

    Elementwise for numpy arrays of (r, W).

    Raises:
        NearSingularError: |h(λ★ + r²W)| < 1e-13 · scale(h)
    """
    S = desingularized_numerator(h, g, spec.lambda_star)
    s = r * r * W
    return -r * W * W * S(s) / _denominator(r, W, spec, h)


def w_second_derivative(r: float, W: float, spec: EigenSpec, h: RealPolynomial, g: RealPolynomial) -> float:
    """Total derivative W″ = ∂_r f + ∂_W f · f of f = w_rhs"""
    S = desingularized_numerator(h, g, spec.lambda_star)
    dS = S.derivative()
    dh = h.derivative()
    s = r * r * W
    Z = spec.lambda_star + s

    A = -r * W * W * S(s)
    B = _denominator(r, W, spec, h)
    A_r = -W * W * S(s) - 2.0 * r * r * W ** 3 * dS(s)
    A_W = -2.0 * r * W * S(s) - r ** 3 * W * W * dS(s)
    B_r = dh(Z) * 2.0 * r * W
    B_W = dh(Z) * r * r

    f = A / B
    f_r = (A_r * B - A * B_r) / (B * B)
    f_W = (A_W * B - A * B_W) / (B * B)
    return f_r + f_W * f


# ----------------------------------------------------------------------
# Solver
# ----------------------------------------------------------------------

def node_spacing(rel_tol: float) -> float:
    """
    Largest step allowed between dense-output nodes

    The Hermite residual between nodes is O(step⁵), so with step = rel_tol^{1/4}
    it shrinks faster than rel_tol. Without the cap DOP853 covers [0, 1] in
    about ten steps.
    """
    return min(MAX_NODE_SPACING, rel_tol ** 0.25)


def solve_profile(spec: EigenSpec, rel_tol: Optional[float] = None, abs_tol: Optional[float] = None,
                  method: Optional[str] = None, max_step: Optional[float] = None) -> ProfileSolution:
    """
    Integrate W from r=1 (W = −λ★) backward to r=0

    Args:
        spec: Eigenvalue specification (all λᵢ < 1)
        rel_tol: Relative tolerance (default settings.PROFILE_REL_TOL)
        abs_tol: Absolute tolerance (default settings.PROFILE_ABS_TOL)
        method: 'RK45' (Dormand–Prince 5(4)) or 'DOP853'
        max_step: Optional cap on the step size; never above node_spacing(rel_tol)

    Returns:
        ProfileSolution with a C² dense interpolant

    Raises:
        ProfileSolverError: integration failure or postcondition violation
    """
    spec.require_below_one()
    rel_tol = settings.PROFILE_REL_TOL if rel_tol is None else rel_tol
    abs_tol = settings.PROFILE_ABS_TOL if abs_tol is None else abs_tol
    abs_tol = min(abs_tol, rel_tol * ABS_TOL_RATIO)
    method = method or settings.PROFILE_METHOD
    max_step = settings.PROFILE_MAX_STEP if max_step is None else max_step
    max_step = min(max_step, node_spacing(rel_tol))

    polys = build_polynomials(spec)
    h, g = polys.h, polys.g

    def fun(r, y):
        return [w_rhs(r, y[0], spec, h, g)]

    logger.debug(f"Solving profile for {spec} with {method} rtol={rel_tol:g} atol={abs_tol:g}")
    try:
        result = solve_ivp(fun, (1.0, 0.0), [-spec.lambda_star], method=method,
                           rtol=rel_tol, atol=abs_tol, max_step=max_step)
    except NearSingularError as exc:
        raise ProfileSolverError(f"integration left the admissible range for {spec}: {exc}") from exc

    if not result.success or result.t[-1] != 0.0:
        last_r = float(result.t[-1]) if result.t.size else 1.0
        last_w = float(result.y[0, -1]) if result.t.size else -spec.lambda_star
        raise ProfileSolverError(f"solver failed for {spec}: {result.message}", last_r, last_w)

    grid = np.asarray(result.t, dtype=float)
    W_values = np.asarray(result.y[0], dtype=float)
    W_values[0] = -spec.lambda_star

    W_prime = np.array([w_rhs(r, w, spec, h, g) for r, w in zip(grid, W_values)])
    W_second = np.array([w_second_derivative(r, w, spec, h, g) for r, w in zip(grid, W_values)])

    # BPoly needs increasing breakpoints
    nodes = grid[::-1]
    derivatives = np.column_stack([W_values, W_prime, W_second])[::-1]
    dense = BPoly.from_derivatives(nodes, derivatives)

    solution = ProfileSolution(
        spec=spec,
        polys=polys,
        grid=grid,
        W_values=W_values,
        W_prime_values=W_prime,
        dense_eval=dense,
        dense_derivative=dense.derivative(),
        a=float(W_values[-1]),
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        method=method,
    )
    _check_postconditions(solution)

    logger.info(f"✅ Profile solved for {spec}: {solution.steps} steps, a = W(0) = {solution.a:.12g}")
    return solution


def _check_postconditions(sol: ProfileSolution):
    spec = sol.spec
    grid, W = sol.grid, sol.W_values

    def fail(reason: str, index: int):
        raise ProfileSolverError(f"postcondition failed for {spec}: {reason}",
                                 float(grid[index]), float(W[index]))

    positive = np.nonzero(W >= 0.0)[0]
    if positive.size:
        fail("W must stay negative", int(positive[0]))

    Z = spec.lambda_star + grid * grid * W
    # grid runs from r=1 down to r=0, so Z must increase along it
    bad = np.nonzero(np.diff(Z) <= 0.0)[0]
    if bad.size:
        fail("Z is not strictly decreasing in r", int(bad[0]) + 1)

    if abs(Z[-1] - spec.lambda_star) > 10.0 * sol.rel_tol * spec.lambda_star:
        fail(f"Z(0) = {Z[-1]:.17g} differs from λ★ = {spec.lambda_star:.17g}", len(grid) - 1)

    slope = 2.0 * W[0] + sol.W_prime_values[0]
    if abs(slope + 1.0) > ENDPOINT_SLOPE_TOLERANCE:
        fail(f"Z'(1) = {slope:.17g}, expected -1", 0)


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------

def check_radius(r: Radius, lower: float = 0.0, upper: float = 1.0) -> Radius:
    """Validate r ∈ [lower, upper], clipping round-off sized excursions"""
    values = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values < lower - RADIUS_SLACK) or np.any(values > upper + RADIUS_SLACK):
        raise DomainError(f"radius outside [{lower}, {upper}]: {r}")
    clipped = np.clip(values, lower, upper)
    return float(clipped) if np.ndim(r) == 0 else clipped


def z_eval(sol: ProfileSolution, r: Radius) -> Radius:
    """Z(r) = λ★ + r²·W(r) for r ∈ [0, 1]"""
    r = check_radius(r)
    return sol.spec.lambda_star + r * r * sol.W(r)


def z_prime(sol: ProfileSolution, r: Radius) -> Radius:
    """Z′(r) = 2r·W + r²·W′ from the dense interpolant; Z′(0) = 0"""
    r = check_radius(r)
    return 2.0 * r * sol.W(r) + r * r * sol.W_prime_interp(r)


def ode_residual(sol: ProfileSolution, r: Radius) -> Radius:
    """r·Z′·P̂(Z) + Q̂(Z)"""
    Z = z_eval(sol, r)
    r = check_radius(r)
    return r * z_prime(sol, r) * sol.polys.P_hat(Z) + sol.polys.Q_hat(Z)


def concavity_estimate(sol: ProfileSolution, delta: float = 1e-3) -> float:
    """
    Second difference of Z at 0 using the even extension Z(−δ) = Z(δ)

    Z is even in r, so the differences at δ, δ/2, δ/4 carry only even powers
    of δ in their error and are Richardson-extrapolated to Z″(0).
    """
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    z0 = z_eval(sol, 0.0)
    steps = [delta / 2 ** j for j in range(CONCAVITY_LEVELS)]
    differences = [2.0 * (z_eval(sol, s) - z0) / (s * s) for s in steps]
    return richardson_extrapolate(differences, p=2)


def is_rational_spec(spec: EigenSpec) -> bool:
    return spec.has_equal_eigenvalues and abs(spec.eigenvalues[0] - spec.rational_eigenvalue) <= 1e-12


def closed_form_Z(spec: EigenSpec, r: Radius) -> Radius:
    """
    (1 − r²)/(2 + μ − μr²), valid only for λ = −(n+1)/k

    Raises:
        PreconditionError: spec is not the rational case
    """
    if not is_rational_spec(spec):
        raise PreconditionError(f"closed form needs equal eigenvalues -(n+1)/k, got {spec}")
    mu = spec.mu[0]
    r = np.asarray(r, dtype=float) if np.ndim(r) else float(r)
    return (1.0 - r * r) / (2.0 + mu - mu * r * r)
