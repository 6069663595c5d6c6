"""
Finite-difference audit of Hermitian bundle metrics on a coordinate chart

Chern curvature in a holomorphic frame:

    Θ_{αβ̄ij̄} = −∂_i∂_j̄ h_{αβ̄} + h^{γδ̄} ∂_i h_{αδ̄} ∂_j̄ h_{γβ̄}

(as matrices in α, β: Θ_{ij̄} = −∂_i∂_j̄ H + ∂_i H · H⁻¹ · ∂_j̄ H), bundle
Ricci R_{ij̄} = h^{αβ̄} Θ_{αβ̄ij̄}, and the Kähler metric g = ∂∂̄ log det h
induced by −Ric(E).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import eigh

from config.settings import settings
from geometry.wirtinger import as_complex_point, wirtinger_derivs
from utils.exceptions import CompositionError, DomainError, MetricError, NotNegativeBundleError
from utils.helpers import make_rng, random_unit_vector
from utils.logger import setup_logger

logger = setup_logger('BundleGeometry')

HERMITIAN_TOLERANCE = 1e-12
POSITIVITY_FLOOR = 1e-10
NEGATIVITY_THRESHOLD = -1e-10


def _everywhere(z: np.ndarray) -> bool:
    return True


def _unit_margin(z: np.ndarray) -> float:
    return 1.0


@dataclass(frozen=True, eq=False)
class ChartBundleMetric:
    """Hermitian metric h_{αβ̄}(z) of a rank-k bundle over a chart in ℂⁿ"""
    n: int
    k: int
    h_fn: Callable[[np.ndarray], np.ndarray]
    domain_membership: Callable[[np.ndarray], bool] = _everywhere
    margin_fn: Callable[[np.ndarray], float] = _unit_margin   # distance to the chart boundary
    name: str = 'metric'
    domain_key: str = ''

    def h(self, z) -> np.ndarray:
        """
        Validated k×k metric at z

        Raises:
            DomainError: z outside the chart domain
            MetricError: output not Hermitian or not positive definite
        """
        z = as_complex_point(z)
        if z.size != self.n:
            raise DomainError(f"{self.name}: expected a point in C^{self.n}, got {z.size} coordinates")
        if not self.domain_membership(z):
            raise DomainError(f"{self.name}: point {z} outside the domain")
        H = np.atleast_2d(np.asarray(self.h_fn(z), dtype=complex))
        if H.shape != (self.k, self.k):
            raise MetricError(f"{self.name}: h has shape {H.shape}, expected ({self.k}, {self.k})")
        scale = max(1.0, float(np.max(np.abs(H))))
        if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOLERANCE * scale:
            raise MetricError(f"{self.name}: h is not Hermitian at {z}")
        if np.min(np.linalg.eigvalsh(H)) <= 0.0:
            raise MetricError(f"{self.name}: h is not positive definite at {z}")
        return H

    def margin(self, z) -> float:
        return float(self.margin_fn(as_complex_point(z)))


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """Θ_{αβ̄ij̄} at a point, stored with axes (α, β, i, j)"""
    components: np.ndarray
    z: np.ndarray
    h: np.ndarray

    def hermitian_defect(self) -> float:
        """max |Θ_{αβ̄ij̄} − conj(Θ_{βᾱjī})|"""
        swapped = np.transpose(self.components, (1, 0, 3, 2)).conj()
        return float(np.max(np.abs(self.components - swapped)))

    def quartic(self, xi: np.ndarray, v: np.ndarray) -> float:
        """Θ(ξ ⊗ v, ξ ⊗ v) = Σ Θ_{αβ̄ij̄} ξ_α ξ̄_β v_i v̄_j"""
        value = np.einsum('abij,a,b,i,j->', self.components, xi, xi.conj(), v, v.conj())
        return float(value.real)


@dataclass
class GriffithsReport:
    """Quartic-form samples; a verdict is evidence, never a proof"""
    min_value: float
    max_value: float
    verdict: str
    samples: int
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return {
            'min_value': self.min_value,
            'max_value': self.max_value,
            'verdict': self.verdict,
            'samples': self.samples,
            'trials': self.trials,
            'seed': self.seed,
        }


@dataclass
class RicciReport:
    """Eigenvalues of Ric(g)·g⁻¹ per sample point and their spread"""
    points: List[np.ndarray]
    eigenvalues: List[List[float]]
    spread: float
    tolerance: float
    constant: bool
    step: float
    inner_step: float
    extra: dict = field(default_factory=dict)

    @property
    def mean_eigenvalues(self) -> List[float]:
        return [float(v) for v in np.mean(np.asarray(self.eigenvalues), axis=0)]

    def to_dict(self) -> dict:
        return {
            'points': [list(p) for p in self.points],
            'eigenvalues': self.eigenvalues,
            'mean_eigenvalues': self.mean_eigenvalues,
            'spread': self.spread,
            'tolerance': self.tolerance,
            'verdict': 'constant-evidence' if self.constant else 'not-constant',
            'step': self.step,
            'inner_step': self.inner_step,
            **self.extra,
        }


def _check_margin(metric: ChartBundleMetric, z: np.ndarray, step: float):
    if metric.margin(z) < 2.0 * step:
        raise DomainError(f"{metric.name}: point {z} is closer than 2·step={2 * step:g} to the boundary")


def chern_curvature(metric: ChartBundleMetric, z, step: Optional[float] = None) -> CurvatureTensor:
    """
    Chern curvature from FD derivatives of h and the inverse metric

    Raises:
        MetricError: h not positive definite at z
    """
    step = settings.FD_STEP if step is None else step
    z = as_complex_point(z)
    H = metric.h(z)
    _check_margin(metric, z, step)
    H_inv = np.linalg.inv(H)

    derivs = wirtinger_derivs(lambda point: np.asarray(metric.h_fn(point), dtype=complex), z, step)
    n = metric.n
    theta = np.zeros((metric.k, metric.k, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            theta[:, :, i, j] = -derivs.d2[i, j] + derivs.d_dz[i] @ H_inv @ derivs.d_dzbar[j]

    return CurvatureTensor(components=theta, z=z, h=H)


def bundle_ricci(theta: CurvatureTensor, h: Optional[np.ndarray] = None) -> np.ndarray:
    """R_{ij̄} = h^{αβ̄} Θ_{αβ̄ij̄} (trace of H⁻¹Θ_{ij̄})"""
    H = theta.h if h is None else np.atleast_2d(h)
    H_inv = np.linalg.inv(H)
    ricci = np.einsum('ba,abij->ij', H_inv, theta.components)
    return 0.5 * (ricci + ricci.conj().T)


def split_residual(metric: ChartBundleMetric, z, step: Optional[float] = None) -> float:
    """max |Θ_{αβ̄ij̄} − (1/k)·h_{αβ̄}·R_{ij̄}|"""
    theta = chern_curvature(metric, z, step)
    ricci = bundle_ricci(theta)
    split = np.einsum('ab,ij->abij', theta.h, ricci) / metric.k
    return float(np.max(np.abs(theta.components - split)))


def _sample_pairs(metric: ChartBundleMetric, trials: int, rng_seed: int):
    rng = make_rng(rng_seed)
    for _ in range(trials):
        yield random_unit_vector(rng, metric.k), random_unit_vector(rng, metric.n)
    for alpha in range(metric.k):
        for i in range(metric.n):
            xi = np.zeros(metric.k, dtype=complex)
            v = np.zeros(metric.n, dtype=complex)
            xi[alpha] = 1.0
            v[i] = 1.0
            yield xi, v


def griffiths_negativity_sample(metric: ChartBundleMetric, z, step: Optional[float] = None,
                                trials: Optional[int] = None, rng_seed: Optional[int] = None) -> GriffithsReport:
    """
    Evaluate the curvature quartic form on random unit pairs plus all axis pairs

    Verdict is 'negative-evidence' iff every value is below −1e-10.
    """
    trials = settings.GRIFFITHS_TRIALS if trials is None else trials
    rng_seed = settings.RNG_SEED if rng_seed is None else rng_seed
    if trials < 1:
        raise ValueError("trials must be at least 1")

    theta = chern_curvature(metric, z, step)
    values = [theta.quartic(xi, v) for xi, v in _sample_pairs(metric, trials, rng_seed)]
    max_value = max(values)
    verdict = 'negative-evidence' if max_value < NEGATIVITY_THRESHOLD else 'not-negative'

    logger.debug(f"Griffiths sample for {metric.name}: min={min(values):.6g} max={max_value:.6g} → {verdict}")
    return GriffithsReport(min_value=min(values), max_value=max_value, verdict=verdict,
                           samples=len(values), trials=trials, seed=rng_seed)


def split_griffiths_gap(metric: ChartBundleMetric, z, step: Optional[float] = None,
                        trials: Optional[int] = None, rng_seed: Optional[int] = None) -> float:
    """max |Θ(ξ⊗v, ξ⊗v) − (1/k)·h(ξ,ξ)·R(v,v)| over sampled pairs"""
    trials = settings.GRIFFITHS_TRIALS if trials is None else trials
    rng_seed = settings.RNG_SEED if rng_seed is None else rng_seed
    theta = chern_curvature(metric, z, step)
    ricci = bundle_ricci(theta)
    gap = 0.0
    for xi, v in _sample_pairs(metric, trials, rng_seed):
        fiber = float(np.real(xi @ theta.h @ xi.conj()))
        base = float(np.real(v @ ricci @ v.conj()))
        gap = max(gap, abs(theta.quartic(xi, v) - fiber * base / metric.k))
    return gap


def _log_det(metric: ChartBundleMetric) -> Callable[[np.ndarray], float]:
    def log_det(point):
        det = np.linalg.det(np.asarray(metric.h_fn(point), dtype=complex))
        if det.real <= 0.0:
            raise MetricError(f"{metric.name}: det h = {det} is not positive at {point}")
        return float(np.log(det.real))
    return log_det


def induced_base_metric(metric: ChartBundleMetric, z, step: Optional[float] = None):
    """
    g_{ij̄} = ∂²log H/∂z_i∂z̄_j with H = det h, and G = det g

    Raises:
        NotNegativeBundleError: g is not positive definite
    """
    step = settings.FD_STEP if step is None else step
    z = as_complex_point(z)
    g = wirtinger_derivs(_log_det(metric), z, step).d2
    g = 0.5 * (g + g.conj().T)
    smallest = float(np.min(np.linalg.eigvalsh(g)))
    if smallest <= POSITIVITY_FLOOR:
        raise NotNegativeBundleError(
            f"{metric.name}: induced metric not positive definite at {z} (min eigenvalue {smallest:.3e})"
        )
    return g, float(np.linalg.det(g).real)


def determinant_ricci_gap(metric: ChartBundleMetric, z, step: Optional[float] = None) -> float:
    """max |R_{ij̄} − (−∂∂̄ log H)_{ij̄}|; the determinant line bundle carries the same Ricci form"""
    step = settings.FD_STEP if step is None else step
    z = as_complex_point(z)
    ricci = bundle_ricci(chern_curvature(metric, z, step))
    det_ricci = -wirtinger_derivs(_log_det(metric), z, step).d2
    return float(np.max(np.abs(ricci - det_ricci)))


def ricci_eigenvalues_at(metric: ChartBundleMetric, z, step: Optional[float] = None,
                         inner_step: Optional[float] = None) -> List[float]:
    """
    Sorted eigenvalues of Ric(g)·g⁻¹ at z

    Ric(g) = −∂∂̄ log det g with g itself from FD (nested differences); the
    outer step defaults to RICCI_STEP × boundary margin.
    """
    z = as_complex_point(z)
    inner_step = settings.RICCI_INNER_STEP if inner_step is None else inner_step
    step = settings.RICCI_STEP * min(1.0, metric.margin(z)) if step is None else step

    def log_G(point):
        _, G = induced_base_metric(metric, point, inner_step)
        return float(np.log(G))

    g, _ = induced_base_metric(metric, z, inner_step)
    ricci = -wirtinger_derivs(log_G, z, step).d2
    ricci = 0.5 * (ricci + ricci.conj().T)
    values = eigh(ricci, g, eigvals_only=True)
    return sorted(float(v) for v in values)


def ricci_eigenvalues(metric: ChartBundleMetric, sample_points: Sequence, step: Optional[float] = None,
                      inner_step: Optional[float] = None, tolerance: Optional[float] = None,
                      threads: int = 1) -> RicciReport:
    """
    Ricci eigenvalues at every sample point plus a constancy verdict

    The verdict holds iff the largest point-to-point spread of any eigenvalue is
    within tolerance (default settings.RICCI_TOLERANCE).
    """
    tolerance = settings.RICCI_TOLERANCE if tolerance is None else tolerance
    inner_step = settings.RICCI_INNER_STEP if inner_step is None else inner_step
    points = [as_complex_point(z) for z in sample_points]

    def evaluate(z):
        return ricci_eigenvalues_at(metric, z, step, inner_step)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            eigenvalues = list(pool.map(evaluate, points))
    else:
        eigenvalues = [evaluate(z) for z in points]

    table = np.asarray(eigenvalues)
    spread = float(np.max(table.max(axis=0) - table.min(axis=0))) if len(points) else 0.0
    constant = spread <= tolerance

    logger.info(f"{'✅' if constant else '⚠️'} Ricci eigenvalues of {metric.name}: "
                f"mean {np.round(table.mean(axis=0), 8).tolist()} spread {spread:.3e}")
    return RicciReport(points=points, eigenvalues=eigenvalues, spread=spread, tolerance=tolerance,
                       constant=constant, step=step if step is not None else settings.RICCI_STEP,
                       inner_step=inner_step)


def direct_sum(metrics: Sequence[ChartBundleMetric]) -> ChartBundleMetric:
    """
    Block-diagonal metric of rank-1 summands

    Raises:
        CompositionError: summands differ in base dimension or domain, or are not line bundles
    """
    if not metrics:
        raise CompositionError("direct sum needs at least one summand")
    first = metrics[0]
    for metric in metrics:
        if metric.k != 1:
            raise CompositionError(f"{metric.name} has rank {metric.k}; direct_sum takes line bundles")
        if metric.n != first.n or metric.domain_key != first.domain_key:
            raise CompositionError(
                f"cannot sum {metric.name} (n={metric.n}, domain {metric.domain_key!r}) with "
                f"{first.name} (n={first.n}, domain {first.domain_key!r})"
            )

    summands = list(metrics)

    def h_fn(z):
        return np.diag([complex(np.asarray(metric.h_fn(z)).reshape(-1)[0]) for metric in summands])

    def margin_fn(z):
        return min(metric.margin_fn(z) for metric in summands)

    return ChartBundleMetric(
        n=first.n,
        k=len(summands),
        h_fn=h_fn,
        domain_membership=first.domain_membership,
        margin_fn=margin_fn,
        name=' ⊕ '.join(metric.name for metric in summands),
        domain_key=first.domain_key,
    )
