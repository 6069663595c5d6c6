"""
Model ball bundles with analytic base data

A model is a product of complex hyperbolic balls B^{nᵢ} with line metric
h = ∏ (1 − |zⁱ|²)^{−1/pᵢ}, carrying the rank-k bundle (h·I_k). The egg domain
E_p is the single-factor case. With g = ∂∂̄ log h^k:

    G = ∏ (k/pᵢ)^{nᵢ} (1 − |zⁱ|²)^{−(nᵢ+1)},   H = h^k,
    Ric(g) has eigenvalue −pᵢ(nᵢ+1)/k with multiplicity nᵢ.
"""
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from algebra.eigen_spec import EigenSpec
from geometry.bundle import ChartBundleMetric
from utils.exceptions import DomainError, InvalidSpecError


@dataclass(frozen=True, eq=False)
class ModelGeometry:
    """Egg domain or product of balls, with derived eigenvalue spec"""
    kind: str                                  # 'egg' or 'product_ball'
    factors: Tuple[Tuple[int, float], ...]     # (nᵢ, pᵢ)
    k: int
    spec: EigenSpec = field(init=False)

    def __post_init__(self):
        if self.kind not in ('egg', 'product_ball'):
            raise InvalidSpecError(f"unknown model kind {self.kind!r}")
        if not self.factors:
            raise InvalidSpecError("a model needs at least one ball factor")
        for dim, power in self.factors:
            if int(dim) < 1 or not power > 0.0:
                raise InvalidSpecError(f"ball factor needs dimension >= 1 and power > 0 (got {dim}, {power})")
        if self.k < 1:
            raise InvalidSpecError(f"fiber rank k must be >= 1 (got {self.k})")

        eigenvalues = []
        for dim, power in self.factors:
            eigenvalues.extend([-power * (dim + 1) / self.k] * dim)
        object.__setattr__(self, 'spec', EigenSpec(sum(d for d, _ in self.factors), int(self.k), tuple(eigenvalues)))

    @classmethod
    def egg(cls, n: int, k: int, p: float) -> 'ModelGeometry':
        return cls('egg', ((int(n), float(p)),), int(k))

    @classmethod
    def product_ball(cls, factors: Sequence[Tuple[int, float]], k: int) -> 'ModelGeometry':
        return cls('product_ball', tuple((int(d), float(p)) for d, p in factors), int(k))

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def name(self) -> str:
        if self.kind == 'egg':
            n, p = self.factors[0]
            return f"egg(n={n}, k={self.k}, p={p:g})"
        parts = ','.join(f"({d},{p:g})" for d, p in self.factors)
        return f"product_ball([{parts}], k={self.k})"

    def as_dict(self) -> dict:
        return {
            'kind': self.kind,
            'factors': [[d, p] for d, p in self.factors],
            'k': self.k,
            'name': self.name,
        }

    # ------------------------------------------------------------------
    # Coordinates
    # ------------------------------------------------------------------

    def split_point(self, w) -> Tuple[np.ndarray, np.ndarray]:
        """w = (z, ξ) with z ∈ ℂⁿ, ξ ∈ ℂ^k"""
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        if w.size != self.m:
            raise DomainError(f"{self.name}: expected {self.m} coordinates, got {w.size}")
        return w[:self.n], w[self.n:]

    def _factor_norms(self, z: np.ndarray) -> List[float]:
        norms, start = [], 0
        for dim, _ in self.factors:
            norms.append(float(np.sum(np.abs(z[start:start + dim]) ** 2)))
            start += dim
        return norms

    # ------------------------------------------------------------------
    # Analytic base data
    # ------------------------------------------------------------------

    def log_h(self, z) -> float:
        norms = self._factor_norms(np.asarray(z, dtype=complex))
        if any(norm >= 1.0 for norm in norms):
            raise DomainError(f"{self.name}: base point outside the product of balls")
        return float(sum(-np.log1p(-norm) / power for norm, (_, power) in zip(norms, self.factors)))

    def h(self, z) -> float:
        return float(np.exp(self.log_h(z)))

    def log_G(self, z) -> float:
        norms = self._factor_norms(np.asarray(z, dtype=complex))
        if any(norm >= 1.0 for norm in norms):
            raise DomainError(f"{self.name}: base point outside the product of balls")
        return float(sum(
            dim * np.log(self.k / power) - (dim + 1) * np.log1p(-norm)
            for norm, (dim, power) in zip(norms, self.factors)
        ))

    def G(self, z) -> float:
        return float(np.exp(self.log_G(z)))

    def H(self, z) -> float:
        return float(np.exp(self.k * self.log_h(z)))

    def base_metric_at_origin(self) -> np.ndarray:
        """g_{ij̄}(0) = diag(k/pᵢ repeated nᵢ)"""
        return np.diag([self.k / power for dim, power in self.factors for _ in range(dim)]).astype(complex)

    def ricci_at_origin(self) -> np.ndarray:
        """R_{ij̄}(0) = diag(−(nᵢ+1) repeated nᵢ)"""
        return np.diag([-(dim + 1.0) for dim, _ in self.factors for _ in range(dim)]).astype(complex)

    # ------------------------------------------------------------------
    # Total space
    # ------------------------------------------------------------------

    def X(self, w) -> float:
        """|ξ|_h = |ξ|·h(z)^{1/2}"""
        z, xi = self.split_point(w)
        return float(np.linalg.norm(xi) * np.exp(0.5 * self.log_h(z)))

    def contains(self, w) -> bool:
        z, _ = self.split_point(w)
        if any(norm >= 1.0 for norm in self._factor_norms(z)):
            return False
        return self.X(w) < 1.0

    def margin(self, w) -> float:
        """Distance-like margin to the boundary of the ball bundle, capped at 1"""
        z, _ = self.split_point(w)
        fiber = (1.0 - self.X(w)) * np.exp(-0.5 * self.log_h(z))
        base = min(1.0 - np.sqrt(norm) for norm in self._factor_norms(z))
        return float(min(1.0, fiber, base))

    def bundle_metric(self) -> ChartBundleMetric:
        """The fiber metric h(z)·I_k as a chart metric over the base"""
        identity = np.eye(self.k, dtype=complex)
        model = self

        def h_fn(z):
            return model.h(z) * identity

        def membership(z):
            return all(norm < 1.0 for norm in model._factor_norms(z))

        def margin_fn(z):
            return min(1.0 - np.sqrt(norm) for norm in model._factor_norms(z))

        return ChartBundleMetric(n=self.n, k=self.k, h_fn=h_fn, domain_membership=membership,
                                 margin_fn=margin_fn, name=self.name,
                                 domain_key='balls' + ''.join(str(d) for d, _ in self.factors))
