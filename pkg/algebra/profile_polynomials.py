"""
Polynomial families of the profile equation

P(y) = (y − ν)^{k−1} ∏ (y − μᵢ),   Q′ = (m+1)·y·P,  Q(ν) = 0,
P̂ = x^{m−1}P(1/x),  Q̂ = x^{m+1}Q(1/x),
P̂ = (x − λ★)^{k−1}·h,  Q̂ = (x − λ★)^k·g.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from scipy.special import gammaln

from algebra.eigen_spec import EigenSpec
from algebra.polynomial import RealPolynomial
from utils.exceptions import ConsistencyError, FactorizationError, PreconditionError
from utils.logger import setup_logger

logger = setup_logger('ProfilePolynomials')

DIVISION_TOLERANCE = 1e-10
RATIONAL_LAMBDA_TOLERANCE = 1e-12
RATIONAL_C_TOLERANCE = 1e-10
# Below this gap in λ the two rationality criteria may legitimately disagree
CONSISTENCY_GAP = 1e-8
# Sweep samples this small relative to the column maximum are exact roots
SWEEP_ZERO_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ProfilePolynomials:
    """Every polynomial the profile ODE needs, built once per spec"""
    spec: EigenSpec
    P: RealPolynomial
    Q: RealPolynomial
    P_hat: RealPolynomial
    Q_hat: RealPolynomial
    h: RealPolynomial
    g: RealPolynomial


def build_P(spec: EigenSpec) -> RealPolynomial:
    """P(y) = (y − ν)^{k−1} ∏ (y − μᵢ), monic of degree m − 1"""
    roots = [spec.nu] * (spec.k - 1) + list(spec.mu)
    return RealPolynomial.from_roots(roots)


def build_Q(P: RealPolynomial, spec: EigenSpec) -> RealPolynomial:
    """Antiderivative of (m+1)·y·P(y) vanishing at ν"""
    integrand = RealPolynomial([0.0, float(spec.m + 1)]) * P
    return integrand.antiderivative((spec.nu, 0.0))


def hat_transform(p: RealPolynomial, d: int) -> RealPolynomial:
    """x^d · p(1/x)"""
    return p.hat(d)


def divide_repeatedly(p: RealPolynomial, root: float, times: int, label: str) -> RealPolynomial:
    """
    Divide p by (x − root)^times, requiring exact divisibility up to round-off

    Raises:
        FactorizationError: a remainder exceeds 1e-10 times the larger of
            max|coefficient| and Σ|cᵢ||root|^i
    """
    tolerance = DIVISION_TOLERANCE * p.eval_scale(root)
    quotient = p
    for step in range(times):
        quotient, remainder = quotient.divide_linear(root)
        if abs(remainder) > tolerance:
            raise FactorizationError(
                f"{label}: remainder {remainder:.3e} at division {step + 1}/{times} "
                f"by (x - {root:.17g}) exceeds {tolerance:.3e}"
            )
    return quotient


def factor_h_g(spec: EigenSpec) -> Tuple[RealPolynomial, RealPolynomial]:
    """
    Split off the (x − λ★) factors of P̂ and Q̂

    Returns:
        (h, g) with P̂ = (x − λ★)^{k−1} h and Q̂ = (x − λ★)^k g
    """
    polys = _factored(spec)
    return polys.h, polys.g


def _factored(spec: EigenSpec) -> ProfilePolynomials:
    P = build_P(spec)
    Q = build_Q(P, spec)
    P_hat = hat_transform(P, spec.m - 1)
    Q_hat = hat_transform(Q, spec.m + 1)
    h = divide_repeatedly(P_hat, spec.lambda_star, spec.k - 1, 'P_hat')
    g = divide_repeatedly(Q_hat, spec.lambda_star, spec.k, 'Q_hat')
    return ProfilePolynomials(spec=spec, P=P, Q=Q, P_hat=P_hat, Q_hat=Q_hat, h=h, g=g)


def build_polynomials(spec: EigenSpec) -> ProfilePolynomials:
    """
    All profile polynomials for a spec, with the sign condition on h checked

    Raises:
        FactorizationError: division remainder above tolerance, or
            (−1)^{k−1}·h(λ★) ≤ 0
    """
    polys = _factored(spec)
    h, g = polys.h, polys.g

    h_star = h(spec.lambda_star)
    if (-1) ** (spec.k - 1) * h_star <= 0.0:
        raise FactorizationError(f"sign condition (-1)^(k-1) h(λ★) > 0 fails: h(λ★)={h_star:.6g}")

    logger.debug(f"Polynomials for {spec}: h(λ★)={h_star:.12g}, g(λ★)={g(spec.lambda_star):.12g}")
    return polys


def _require_equal(spec: EigenSpec):
    if not spec.has_equal_eigenvalues:
        raise PreconditionError(f"operation needs equal eigenvalues, got {list(spec.eigenvalues)}")


def compute_c(spec: EigenSpec) -> Tuple[float, RealPolynomial]:
    """
    Constant term of Q in powers of (y − μ)

    Q = (y − μ)^{n+1}·T + c for equal eigenvalues λ; c = Q(μ).

    Returns:
        (c, T)
    """
    _require_equal(spec)
    mu = spec.mu[0]
    Q = build_Q(build_P(spec), spec)
    quotient, c = Q.divide_linear(mu)
    T = divide_repeatedly(quotient, mu, spec.n, 'Q - c')
    return float(c), T


def _log_factorial(value: int) -> float:
    return float(gammaln(value + 1))


def beta_identity_residual(spec: EigenSpec) -> float:
    """
    μ·k!n!/(m+1)! + ν·(k−1)!(n+1)!/(m+1)!

    Exact integer factorials while m+1 ≤ 20, log-gamma above.
    """
    _require_equal(spec)
    n, k, m = spec.n, spec.k, spec.m
    mu, nu = spec.mu[0], spec.nu

    if m + 1 <= 20:
        first = math.factorial(k) * math.factorial(n) / math.factorial(m + 1)
        second = math.factorial(k - 1) * math.factorial(n + 1) / math.factorial(m + 1)
    else:
        first = math.exp(_log_factorial(k) + _log_factorial(n) - _log_factorial(m + 1))
        second = math.exp(_log_factorial(k - 1) + _log_factorial(n + 1) - _log_factorial(m + 1))

    return mu * first + nu * second


def is_rational_case(spec: EigenSpec) -> bool:
    """
    λ = −(n+1)/k, cross-checked against c = Q(μ) = 0

    Raises:
        ConsistencyError: the λ criterion and the c criterion disagree away
            from the boundary between them
    """
    _require_equal(spec)
    gap = abs(spec.eigenvalues[0] - spec.rational_eigenvalue)
    by_lambda = gap <= RATIONAL_LAMBDA_TOLERANCE

    Q = build_Q(build_P(spec), spec)
    c, _ = compute_c(spec)
    by_c = abs(c) <= RATIONAL_C_TOLERANCE * Q.eval_scale(spec.mu[0])

    if by_lambda != by_c and (by_lambda or gap > CONSISTENCY_GAP):
        raise ConsistencyError(
            f"rationality criteria disagree for {spec}: |λ + (n+1)/k|={gap:.3e}, c={c:.3e}"
        )
    return by_lambda


def vanishing_points(grid: np.ndarray, values: np.ndarray) -> List[float]:
    """
    Locations where a sampled column vanishes

    A sample with |value| <= SWEEP_ZERO_TOLERANCE · max|value| is a root at its
    own grid point. A strict sign change between adjacent nonzero samples is
    placed at their midpoint.
    """
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    zero = np.abs(values) <= SWEEP_ZERO_TOLERANCE * scale
    roots = [float(grid[i]) for i in np.nonzero(zero)[0]]

    nonzero = np.nonzero(~zero)[0]
    for left, right in zip(nonzero[:-1], nonzero[1:]):
        # non-adjacent means exact roots sit between them, already recorded
        if right == left + 1 and values[left] * values[right] < 0:
            roots.append(0.5 * float(grid[left] + grid[right]))
    return sorted(roots)


def rationality_sweep(n: int, k: int, samples: int = 1000) -> Tuple[pd.DataFrame, Dict]:
    """
    Tabulate c and the beta residual over λ ∈ (−2(n+1)/k, 0)

    Returns:
        (table with columns lambda, c, beta_residual; summary of sign changes)
    """
    lower = -2.0 * (n + 1) / k
    grid = np.linspace(lower, 0.0, samples + 2)[1:-1]
    rows = []
    for value in grid:
        spec = EigenSpec.equal(n, k, float(value))
        c, _ = compute_c(spec)
        rows.append({'lambda': float(value), 'c': c, 'beta_residual': beta_identity_residual(spec)})
    table = pd.DataFrame(rows, columns=['lambda', 'c', 'beta_residual'])

    c_changes = vanishing_points(grid, table['c'].to_numpy())
    beta_changes = vanishing_points(grid, table['beta_residual'].to_numpy())
    spacing = float(grid[1] - grid[0]) if len(grid) > 1 else 0.0
    summary = {
        'n': n,
        'k': k,
        'samples': samples,
        'grid_spacing': spacing,
        'expected_root': -(n + 1) / k,
        'c_sign_changes': c_changes,
        'beta_sign_changes': beta_changes,
        'consistent': (
            len(c_changes) == 1 and len(beta_changes) == 1
            and abs(c_changes[0] - beta_changes[0]) <= spacing
        ),
    }
    logger.info(f"🔎 Rationality sweep n={n} k={k}: c changes sign at {c_changes}, "
                f"beta residual at {beta_changes}")
    return table, summary
