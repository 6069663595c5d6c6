"""
Block structure of Hess(−log u) at normal points w = (0, ξ)

At z = 0 (h(0) = I, dh(0) = 0 in the model charts) the complex Hessian splits into

    base  = −R(0)/(m+1) + (Y/2k)·g(0)
    fiber = (Y − ν)/(2X²)·δ + (XY′/4 − Y/2 + k/(m+1))·ξ̄ξᵀ/X⁴
    cross = 0

with X = |ξ|, Y = 1/Z(X), Y′ = dY/dX. These are compared with the FD Hessian,
together with the determinant identity Φ = P(Y)Y′/(2^{m+1}kⁿX^{2k−1}).
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from config.settings import settings
from geometry.wirtinger import as_complex_point, wirtinger_hessian_m
from radial.phi import PhiProfile
from utils.exceptions import DomainError, FiberSingularityError
from utils.logger import setup_logger
from verification.models import ModelGeometry
from verification.monge_ampere import hessian_step, neg_log_u

logger = setup_logger('HessianBlocks')

XI_FLOOR = 1e-12
PHI_CHECK_MAX_X = 0.95
FIBER_DET_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class HessianBlocks:
    """Base (n×n), fiber (k×k) and cross (n×k) blocks of Hess(−log u) at (0, ξ)"""
    base: np.ndarray
    fiber: np.ndarray
    cross: np.ndarray
    X: float
    Y: float
    Y_prime: float

    def full(self) -> np.ndarray:
        return np.block([[self.base, self.cross], [self.cross.conj().T, self.fiber]])

    def max_difference(self, other: 'HessianBlocks') -> float:
        return float(np.max(np.abs(self.full() - other.full())))


def _normal_point(model: ModelGeometry, xi) -> np.ndarray:
    xi = as_complex_point(xi)
    if xi.size != model.k:
        raise DomainError(f"{model.name}: fiber vector needs {model.k} components, got {xi.size}")
    return np.concatenate([np.zeros(model.n, dtype=complex), xi])


def hessian_blocks_closed_form(model: ModelGeometry, profile: PhiProfile, xi) -> HessianBlocks:
    """
    Blocks assembled from R(0), g(0) and the profile values Y, Y′ at X = |ξ|

    Raises:
        FiberSingularityError: ξ = 0 (the fiber formula divides by |ξ|²)
        DomainError: X ≥ 1
    """
    w = _normal_point(model, xi)
    xi = w[model.n:]
    X = float(np.linalg.norm(xi))
    if X < XI_FLOOR:
        raise FiberSingularityError(f"{model.name}: fiber block formula is singular at ξ = 0")
    if X >= 1.0:
        raise DomainError(f"{model.name}: X = {X:.6g} is not below 1")

    spec = model.spec
    m1 = spec.m + 1
    Y = profile.Y(X)
    Y_prime = profile.Y_prime(X)

    base = -model.ricci_at_origin() / m1 + (Y / (2.0 * spec.k)) * model.base_metric_at_origin()
    rank_one = np.outer(xi.conj(), xi)
    fiber = ((Y - spec.nu) / (2.0 * X * X)) * np.eye(spec.k, dtype=complex)
    fiber = fiber + (X * Y_prime / 4.0 - Y / 2.0 + spec.k / m1) * rank_one / X ** 4
    cross = np.zeros((spec.n, spec.k), dtype=complex)
    return HessianBlocks(base=base, fiber=fiber, cross=cross, X=X, Y=Y, Y_prime=Y_prime)


def fd_hessian(model: ModelGeometry, profile: PhiProfile, w, step: Optional[float] = None) -> np.ndarray:
    """Full m×m FD Hessian of −log u"""
    step = hessian_step(model, w) if step is None else step
    return wirtinger_hessian_m(lambda point: neg_log_u(model, profile, point), w, step)


def fd_blocks(model: ModelGeometry, profile: PhiProfile, xi, step: Optional[float] = None) -> HessianBlocks:
    """The same blocks cut out of the FD Hessian at (0, ξ)"""
    w = _normal_point(model, xi)
    hessian = fd_hessian(model, profile, w, step)
    n = model.n
    X = float(np.linalg.norm(w[n:]))
    return HessianBlocks(base=hessian[:n, :n], fiber=hessian[n:, n:], cross=hessian[:n, n:],
                         X=X, Y=profile.Y(X), Y_prime=profile.Y_prime(X))


def fiber_determinant(model: ModelGeometry, blocks: HessianBlocks) -> float:
    """Y′(Y − ν)^{k−1} / (2^{k+1} X^{2k−1})"""
    k = model.k
    return float(blocks.Y_prime * (blocks.Y - model.spec.nu) ** (k - 1) / (2.0 ** (k + 1) * blocks.X ** (2 * k - 1)))


def fiber_determinant_check(model: ModelGeometry, profile: PhiProfile, xi):
    """
    (det of the closed-form fiber block, matrix-determinant-lemma value, passed)
    """
    blocks = hessian_blocks_closed_form(model, profile, xi)
    numeric = float(np.linalg.det(blocks.fiber).real)
    formula = fiber_determinant(model, blocks)
    passed = abs(numeric - formula) <= FIBER_DET_TOLERANCE * abs(formula)
    return numeric, formula, passed


def capital_phi_check(model: ModelGeometry, profile: PhiProfile, xi, step: Optional[float] = None):
    """
    (Φ_formula, Φ_numeric) at the normal point (0, ξ)

    Φ_numeric = det(FD Hessian of −log u)/(G·H) with G, H taken at z = 0.

    Raises:
        DomainError: X > 0.95 (Φ has a pole at the boundary)
    """
    w = _normal_point(model, xi)
    X = float(np.linalg.norm(w[model.n:]))
    if X > PHI_CHECK_MAX_X:
        raise DomainError(f"Φ check refuses X = {X:.4f} > {PHI_CHECK_MAX_X} (Φ → ∞ at the boundary)")

    spec = model.spec
    Y = profile.Y(X)
    Y_prime = profile.Y_prime(X)
    P = profile.sol.polys.P
    formula = float(P(Y) * Y_prime / (2.0 ** (spec.m + 1) * spec.k ** spec.n * X ** (2 * spec.k - 1)))

    origin = np.zeros(model.n, dtype=complex)
    determinant = float(np.linalg.det(fd_hessian(model, profile, w, step)).real)
    numeric = determinant / (model.G(origin) * model.H(origin))

    logger.debug(f"Φ at X={X:.4f}: formula {formula:.12g}, numeric {numeric:.12g}")
    return formula, numeric


@dataclass
class LowerBoundPoint:
    X: float
    min_eig: float
    intermediate_min_eig: float
    intermediate_expected: float


@dataclass
class LowerBoundReport:
    """min eigenvalues of base − ((1 − λ_max)/(m+1))·g(0) at normal points"""
    points: List[LowerBoundPoint]
    lambda_max: float
    tolerance: float

    @property
    def min_eig(self) -> float:
        return float(min((p.min_eig for p in self.points), default=0.0))

    @property
    def passed(self) -> bool:
        return self.min_eig >= -self.tolerance

    def to_dict(self) -> dict:
        return {
            'lambda_max': self.lambda_max,
            'tolerance': self.tolerance,
            'min_eig': self.min_eig,
            'passed': self.passed,
            'points': [
                {
                    'X': p.X,
                    'min_eig': p.min_eig,
                    'intermediate_min_eig': p.intermediate_min_eig,
                    'intermediate_expected': p.intermediate_expected,
                }
                for p in self.points
            ],
        }


def metric_lower_bound_check(model: ModelGeometry, profile: PhiProfile, sample_points: Sequence,
                             step: Optional[float] = None, tolerance: Optional[float] = None) -> LowerBoundReport:
    """
    Lower bound of the base block at normal points

    The intermediate bound base − (−R(0) + g(0))/(m+1) equals (Y − ν)/(2k)·g(0),
    positive semidefinite since Y ≥ ν.

    Args:
        sample_points: Normal points w = (0, ξ) or bare fiber vectors ξ
    """
    tolerance = settings.LOWER_BOUND_TOLERANCE if tolerance is None else tolerance
    spec = model.spec
    m1 = spec.m + 1
    g0 = model.base_metric_at_origin()
    R0 = model.ricci_at_origin()
    lambda_max = spec.lambda_max

    points = []
    for w in sample_points:
        w = as_complex_point(w)
        xi = w[model.n:] if w.size == model.m else w
        blocks = fd_blocks(model, profile, xi, step)
        bound = blocks.base - ((1.0 - lambda_max) / m1) * g0
        intermediate = blocks.base - (-R0 + g0) / m1
        points.append(LowerBoundPoint(
            X=blocks.X,
            min_eig=float(np.min(np.linalg.eigvalsh(0.5 * (bound + bound.conj().T)))),
            intermediate_min_eig=float(np.min(np.linalg.eigvalsh(0.5 * (intermediate + intermediate.conj().T)))),
            intermediate_expected=float((blocks.Y - spec.nu) / (2.0 * spec.k) * np.min(np.diag(g0).real)),
        ))

    report = LowerBoundReport(points=points, lambda_max=lambda_max, tolerance=tolerance)
    logger.info(f"{'✅' if report.passed else '❌'} Metric lower bound on {model.name}: "
                f"min eigenvalue {report.min_eig:.3e} over {len(points)} points")
    return report


def block_cross_validation(model: ModelGeometry, profile: PhiProfile, sample_points: Sequence,
                           step: Optional[float] = None) -> List[float]:
    """Entrywise max |closed form − FD| per normal point"""
    gaps = []
    for w in sample_points:
        w = as_complex_point(w)
        xi = w[model.n:] if w.size == model.m else w
        closed = hessian_blocks_closed_form(model, profile, xi)
        gaps.append(closed.max_difference(fd_blocks(model, profile, xi, step)))
    return gaps
