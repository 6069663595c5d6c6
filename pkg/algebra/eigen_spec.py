"""
Eigenvalue specification of a ball bundle: base dimension, fiber rank and
the constant Ricci eigenvalues of the base
"""
import numbers
from dataclasses import dataclass, field
from typing import Sequence, Tuple

from utils.exceptions import InvalidSpecError


@dataclass(frozen=True)
class EigenSpec:
    """(n, k, λ₁ ≤ … ≤ λₙ) with derived constants m, ν, μᵢ, λ★"""
    n: int
    k: int
    eigenvalues: Tuple[float, ...]
    m: int = field(init=False)
    nu: float = field(init=False)            # 2k/(m+1)
    mu: Tuple[float, ...] = field(init=False)  # 2kλᵢ/(m+1)
    lambda_star: float = field(init=False)   # (m+1)/(2k)

    def __post_init__(self):
        if not isinstance(self.n, numbers.Integral) or self.n < 1:
            raise InvalidSpecError(f"base dimension n must be a positive integer (got {self.n})")
        if not isinstance(self.k, numbers.Integral) or self.k < 1:
            raise InvalidSpecError(f"fiber rank k must be a positive integer (got {self.k})")
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'k', int(self.k))
        eigenvalues = tuple(sorted(float(value) for value in self.eigenvalues))
        if len(eigenvalues) != self.n:
            raise InvalidSpecError(f"expected {self.n} eigenvalues, got {len(eigenvalues)}")

        m = self.n + self.k
        object.__setattr__(self, 'eigenvalues', eigenvalues)
        object.__setattr__(self, 'm', m)
        object.__setattr__(self, 'nu', 2.0 * self.k / (m + 1))
        object.__setattr__(self, 'mu', tuple(2.0 * self.k * value / (m + 1) for value in eigenvalues))
        object.__setattr__(self, 'lambda_star', (m + 1) / (2.0 * self.k))

    @classmethod
    def equal(cls, n: int, k: int, eigenvalue: float) -> 'EigenSpec':
        """Spec with all n eigenvalues equal"""
        return cls(n, k, tuple([float(eigenvalue)] * n))

    @classmethod
    def from_values(cls, n: int, k: int, eigenvalues: Sequence[float]) -> 'EigenSpec':
        return cls(n, k, tuple(eigenvalues))

    @property
    def all_below_one(self) -> bool:
        return all(value < 1.0 for value in self.eigenvalues)

    @property
    def has_equal_eigenvalues(self) -> bool:
        return self.eigenvalues[0] == self.eigenvalues[-1]

    @property
    def lambda_max(self) -> float:
        return self.eigenvalues[-1]

    @property
    def rational_eigenvalue(self) -> float:
        """The eigenvalue −(n+1)/k for which Z and φ^{m+1} are rational"""
        return -(self.n + 1) / self.k

    def require_below_one(self):
        """Global profile existence needs every λᵢ < 1"""
        if not self.all_below_one:
            raise InvalidSpecError(f"all eigenvalues must be < 1 (got {list(self.eigenvalues)})")

    def as_dict(self) -> dict:
        return {
            'n': self.n,
            'k': self.k,
            'eigenvalues': list(self.eigenvalues),
            'm': self.m,
            'nu': self.nu,
            'mu': list(self.mu),
            'lambda_star': self.lambda_star,
        }

    def __str__(self) -> str:
        values = ','.join(f'{value:g}' for value in self.eigenvalues)
        return f"EigenSpec(n={self.n}, k={self.k}, λ=[{values}])"
