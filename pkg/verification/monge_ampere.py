"""
Monge-Ampère verification of the explicit potential on model ball bundles

    u(w) = k^{n/(m+1)} (G·H)^{−1/(m+1)} φ(|ξ|_h)

must satisfy J(u) = (−1)^m det[[u, u_t̄], [u_s, u_st̄]] = 1, equivalently
u^{m+1}·det((−log u)_{st̄}) = 1. Both forms are checked at each sample with
independent finite-difference Hessians.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from config.settings import VERSION, settings
from geometry.bundle import induced_base_metric, ricci_eigenvalues
from geometry.wirtinger import as_complex_point, wirtinger_derivs, wirtinger_hessian_m
from radial.phi import PhiProfile
from radial.solver import solve_profile
from utils.exceptions import DomainError, UnsupportedModelError
from utils.helpers import make_rng, random_unit_vector
from utils.logger import setup_logger
from verification.models import ModelGeometry

logger = setup_logger('MongeAmpere')

X_RANGE = (0.05, 0.9)
BASE_RADIUS = 0.5
GENERIC_METRIC_TOLERANCE = 1e-3
PASS_FRACTION = 0.95


def solve_ma_profile(model: ModelGeometry) -> PhiProfile:
    """φ for the model's derived spec at the tight tolerances FD Hessians need"""
    sol = solve_profile(model.spec, rel_tol=settings.MA_PROFILE_REL_TOL, abs_tol=settings.MA_PROFILE_ABS_TOL)
    return PhiProfile(sol)


# ----------------------------------------------------------------------
# Sample points
# ----------------------------------------------------------------------

def sample_interior_points(model: ModelGeometry, count: int, rng: np.random.Generator,
                           x_range=X_RANGE, base_radius: float = BASE_RADIUS) -> List[np.ndarray]:
    """
    Random w = (z, ξ) with |zⁱ| ≤ base_radius per factor and X(w) uniform in x_range
    """
    points = []
    for _ in range(count):
        parts = []
        for dim, _ in model.factors:
            parts.append(rng.uniform(0.0, base_radius) * random_unit_vector(rng, dim))
        z = np.concatenate(parts)
        X = rng.uniform(*x_range)
        xi = X * np.exp(-0.5 * model.log_h(z)) * random_unit_vector(rng, model.k)
        points.append(np.concatenate([z, xi]))
    return points


def sample_normal_points(model: ModelGeometry, count: int, rng: np.random.Generator,
                         x_range=X_RANGE) -> List[np.ndarray]:
    """Random normal points w = (0, ξ), X = |ξ| uniform in x_range"""
    points = []
    for _ in range(count):
        xi = rng.uniform(*x_range) * random_unit_vector(rng, model.k)
        points.append(np.concatenate([np.zeros(model.n, dtype=complex), xi]))
    return points


# ----------------------------------------------------------------------
# The potential
# ----------------------------------------------------------------------

def _generic_log_G(model: ModelGeometry, z: np.ndarray) -> float:
    _, G = induced_base_metric(model.bundle_metric(), z, settings.RICCI_INNER_STEP)
    return float(np.log(G))


def neg_log_u(model: ModelGeometry, profile: PhiProfile, w, generic_metric: bool = False) -> float:
    """
    −log u(w)

    Raises:
        DomainError: w outside the ball bundle (X ≥ 1 or a base factor outside its ball)
    """
    z, xi = model.split_point(w)
    log_h = model.log_h(z)
    X = float(np.linalg.norm(xi) * np.exp(0.5 * log_h))
    if X >= 1.0:
        raise DomainError(f"{model.name}: X(w) = {X:.6g} is not below 1")

    log_G = _generic_log_G(model, z) if generic_metric else model.log_G(z)
    m1 = model.m + 1
    log_u = (model.n / m1) * np.log(model.k) - (log_G + model.k * log_h) / m1 + np.log(profile.phi(X))
    return float(-log_u)


def u_value(model: ModelGeometry, profile: PhiProfile, w, generic_metric: bool = False) -> float:
    """
    u(w) > 0 inside the ball bundle

    Raises:
        DomainError: X(w) ≥ 1
    """
    z, xi = model.split_point(w)
    X = model.X(w)
    if X >= 1.0:
        raise DomainError(f"{model.name}: X(w) = {X:.6g} is not below 1")
    if profile.phi(X) == 0.0:
        return 0.0
    return float(np.exp(-neg_log_u(model, profile, w, generic_metric)))


def hessian_step(model: ModelGeometry, w, base_step: Optional[float] = None) -> float:
    """FD step for m-dimensional Hessians: HESSIAN_STEP × boundary margin"""
    base_step = settings.HESSIAN_STEP if base_step is None else base_step
    return base_step * model.margin(w)


# ----------------------------------------------------------------------
# Residuals
# ----------------------------------------------------------------------

@dataclass
class MAPoint:
    """Per-point outcome of the Monge-Ampère check"""
    w: np.ndarray
    X: float
    residual_log: float
    residual_J: float
    min_eig: float
    step: float

    @property
    def geometry_violation(self) -> bool:
        return not self.min_eig > 0.0

    def to_dict(self) -> dict:
        return {
            'w': [complex(c) for c in self.w],
            'X': self.X,
            'residual_log': self.residual_log,
            'residual_J': self.residual_J,
            'min_eig': self.min_eig,
        }


def bordered_determinant(model: ModelGeometry, profile: PhiProfile, w, step: float,
                         generic_metric: bool = False) -> float:
    """J(u) = (−1)^m det[[u, u_t̄], [u_s, u_st̄]] from FD derivatives of u itself"""
    derivs = wirtinger_derivs(lambda point: u_value(model, profile, point, generic_metric), w, step)
    m = model.m
    bordered = np.empty((m + 1, m + 1), dtype=complex)
    bordered[0, 0] = derivs.value
    bordered[0, 1:] = derivs.d_dzbar
    bordered[1:, 0] = derivs.d_dz
    bordered[1:, 1:] = derivs.d2
    return float(((-1) ** m * np.linalg.det(bordered)).real)


def ma_point(model: ModelGeometry, profile: PhiProfile, w, step: Optional[float] = None,
             generic_metric: bool = False) -> MAPoint:
    """Both residual forms and the smallest Hessian eigenvalue of −log u at w"""
    w = as_complex_point(w)
    step = hessian_step(model, w) if step is None else step

    hessian = wirtinger_hessian_m(lambda point: neg_log_u(model, profile, point, generic_metric), w, step)
    eigenvalues = np.linalg.eigvalsh(hessian)
    min_eig = float(np.min(eigenvalues))

    u = u_value(model, profile, w, generic_metric)
    log_form = u ** (model.m + 1) * float(np.prod(eigenvalues))
    J = bordered_determinant(model, profile, w, step, generic_metric)

    point = MAPoint(w=w, X=model.X(w), residual_log=abs(log_form - 1.0), residual_J=abs(J - 1.0),
                    min_eig=min_eig, step=step)
    if point.geometry_violation:
        logger.warning(f"⚠️ Hessian of −log u is not positive definite at {w} (min eigenvalue {min_eig:.3e})")
    logger.debug(f"MA point X={point.X:.4f}: log-form {point.residual_log:.3e}, J-form {point.residual_J:.3e}")
    return point


def ma_residual(model: ModelGeometry, profile: PhiProfile, w, step: Optional[float] = None):
    """
    (|u^{m+1}·det(Hess(−log u)) − 1|, |J(u) − 1|) at an interior point

    Args:
        step: FD step; defaults to HESSIAN_STEP × boundary margin
    """
    point = ma_point(model, profile, w, step)
    return point.residual_log, point.residual_J


# ----------------------------------------------------------------------
# Report
# ----------------------------------------------------------------------

@dataclass
class MAReport:
    """Monge-Ampère residuals over a seeded sample"""
    model: ModelGeometry
    seed: int
    base_step: float           # HESSIAN_STEP before the boundary-margin scaling
    points: List[MAPoint]
    tolerance: float
    identity_tolerance: float
    generic_metric: bool = False
    config: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        """Largest FD step actually used at a sample point"""
        return max((p.step for p in self.points), default=self.base_step)

    @property
    def min_step(self) -> float:
        return min((p.step for p in self.points), default=self.base_step)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([p.residual_log for p in self.points])

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.points else 0.0

    @property
    def mean_residual(self) -> float:
        return float(np.mean(self.residuals)) if self.points else 0.0

    @property
    def max_identity_gap(self) -> float:
        if not self.points:
            return 0.0
        return float(max(abs(p.residual_log - p.residual_J) for p in self.points))

    @property
    def pass_fraction(self) -> float:
        if not self.points:
            return 1.0
        return float(np.mean(self.residuals <= self.tolerance))

    @property
    def geometry_violations(self) -> int:
        return sum(1 for p in self.points if p.geometry_violation)

    @property
    def passed(self) -> bool:
        return (self.pass_fraction >= PASS_FRACTION
                and self.max_identity_gap <= self.identity_tolerance
                and self.geometry_violations == 0)

    def to_dict(self) -> dict:
        return {
            'model': self.model.as_dict(),
            'spec': self.model.spec.as_dict(),
            'seed': self.seed,
            'step': self.step,
            'min_step': self.min_step,
            'base_step': self.base_step,
            'generic_metric': self.generic_metric,
            'points': [p.to_dict() for p in self.points],
            'max_residual': self.max_residual,
            'mean_residual': self.mean_residual,
            'max_identity_gap': self.max_identity_gap,
            'pass_fraction': self.pass_fraction,
            'geometry_violations': self.geometry_violations,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'version': VERSION,
            'config': self.config,
        }


def verify_ma(model: ModelGeometry, profile: Optional[PhiProfile] = None, points: Optional[Sequence] = None,
              count: Optional[int] = None, seed: Optional[int] = None, threads: int = 1,
              generic_metric: bool = False, tolerance: Optional[float] = None) -> MAReport:
    """
    Monge-Ampère residuals at seeded interior samples

    Points are evaluated independently and reported in sample order, so the report
    does not depend on the thread count.

    Args:
        model: Egg or product-of-balls model
        profile: Solved φ for model.spec (solved at MA tolerances when omitted)
        points: Explicit sample points; otherwise `count` seeded interior samples
        seed: RNG seed (default settings.RNG_SEED)
        threads: Worker threads for per-point evaluation
        generic_metric: Take G from nested FD of the bundle metric
        tolerance: Residual threshold (default MA_TOLERANCE, 1e-3 in generic-metric mode)
    """
    seed = settings.RNG_SEED if seed is None else seed
    count = settings.SAMPLE_POINTS if count is None else count
    if tolerance is None:
        tolerance = GENERIC_METRIC_TOLERANCE if generic_metric else settings.MA_TOLERANCE
    profile = profile or solve_ma_profile(model)
    if points is None:
        points = sample_interior_points(model, count, make_rng(seed))
    points = [as_complex_point(w) for w in points]

    def evaluate(w):
        return ma_point(model, profile, w, generic_metric=generic_metric)

    logger.info(f"🔎 Verifying Monge-Ampère on {model.name} at {len(points)} points")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, points))
    else:
        results = [evaluate(w) for w in points]

    report = MAReport(model=model, seed=seed, base_step=settings.HESSIAN_STEP, points=results,
                      tolerance=tolerance, identity_tolerance=settings.IDENTITY_TOLERANCE,
                      generic_metric=generic_metric)
    logger.info(f"{'✅' if report.passed else '❌'} {model.name}: max residual {report.max_residual:.3e}, "
                f"mean {report.mean_residual:.3e}, pass fraction {report.pass_fraction:.2f}")
    return report


# ----------------------------------------------------------------------
# Unit-ball comparison and model audit
# ----------------------------------------------------------------------

@dataclass
class BergmanReport:
    """u^{−(m+1)}·(1 − |z|² − |ξ|²)^{m+1} over samples; 1 for p = 1"""
    n: int
    k: int
    seed: int
    ratios: List[float]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return float(max((abs(r - 1.0) for r in self.ratios), default=0.0))

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'k': self.k,
            'seed': self.seed,
            'ratios': self.ratios,
            'max_deviation': self.max_deviation,
            'tolerance': self.tolerance,
            'passed': self.passed,
        }


def bergman_compare_p1(n: int, k: int, sample_points=None, p: float = 1.0,
                       profile: Optional[PhiProfile] = None, seed: Optional[int] = None) -> BergmanReport:
    """
    Compare u on E_1 (the unit ball of ℂ^{n+k}) with 1 − |z|² − |ξ|²

    Args:
        sample_points: Explicit points, or a count of seeded interior samples (default 10)

    Raises:
        UnsupportedModelError: p ≠ 1
    """
    if p != 1.0:
        raise UnsupportedModelError(f"unit-ball comparison needs p = 1 (got p={p:g})")
    seed = settings.RNG_SEED if seed is None else seed
    model = ModelGeometry.egg(n, k, 1.0)
    profile = profile or solve_ma_profile(model)

    if sample_points is None or isinstance(sample_points, (int, np.integer)):
        count = settings.NORMAL_POINTS if sample_points is None else int(sample_points)
        sample_points = sample_interior_points(model, count, make_rng(seed))

    ratios = []
    for w in sample_points:
        w = as_complex_point(w)
        log_ball = np.log1p(-float(np.sum(np.abs(w) ** 2)))
        ratios.append(float(np.exp((model.m + 1) * (neg_log_u(model, profile, w) + log_ball))))

    report = BergmanReport(n=n, k=k, seed=seed, ratios=ratios, tolerance=settings.BERGMAN_TOLERANCE)
    logger.info(f"{'✅' if report.passed else '❌'} Unit-ball comparison (n={n}, k={k}): "
                f"max |ratio − 1| = {report.max_deviation:.3e}")
    return report


def model_ricci_audit(model: ModelGeometry, points: Optional[Sequence] = None, count: Optional[int] = None,
                      seed: Optional[int] = None, threads: int = 1):
    """
    FD Ricci eigenvalues of the model base against the derived spec eigenvalues

    Returns:
        RicciReport with 'expected' and 'max_deviation' extras
    """
    seed = settings.RNG_SEED if seed is None else seed
    if points is None:
        count = settings.NORMAL_POINTS if count is None else count
        rng = make_rng(seed)
        points = []
        for _ in range(count):
            points.append(np.concatenate([rng.uniform(0.0, BASE_RADIUS) * random_unit_vector(rng, dim)
                                          for dim, _ in model.factors]))

    report = ricci_eigenvalues(model.bundle_metric(), points, threads=threads)
    expected = sorted(model.spec.eigenvalues)
    deviation = float(np.max(np.abs(np.asarray(report.eigenvalues) - np.asarray(expected)))) if points else 0.0
    report.extra.update({'expected': expected, 'max_deviation': deviation})
    logger.info(f"📊 Ricci audit of {model.name}: expected {expected}, max deviation {deviation:.3e}")
    return report
