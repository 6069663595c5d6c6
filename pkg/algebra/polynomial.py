"""
Dense real-coefficient univariate polynomials

Coefficients are stored in ascending degree order. Trailing (leading-degree)
zeros are stripped so the leading coefficient is nonzero unless the polynomial
is identically zero, which is stored as the single coefficient 0.0.
"""
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import InvalidDegreeError

Number = Union[float, np.ndarray]


def _normalize(coefficients: Iterable[float]) -> Tuple[float, ...]:
    coeffs = [float(c) for c in coefficients]
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
    if not coeffs:
        coeffs = [0.0]
    return tuple(coeffs)


@dataclass(frozen=True)
class RealPolynomial:
    """Immutable polynomial c0 + c1 x + … + cd x^d"""
    coefficients: Tuple[float, ...]

    def __init__(self, coefficients: Sequence[float]):
        object.__setattr__(self, 'coefficients', _normalize(coefficients))

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> 'RealPolynomial':
        return cls([value])

    @classmethod
    def zero(cls) -> 'RealPolynomial':
        return cls([0.0])

    @classmethod
    def monomial(cls, degree: int, coefficient: float = 1.0) -> 'RealPolynomial':
        return cls([0.0] * degree + [coefficient])

    @classmethod
    def from_roots(cls, roots: Sequence[float]) -> 'RealPolynomial':
        """Monic ∏ (x − root), multiplied in the given order"""
        coeffs = np.array([1.0])
        for root in roots:
            coeffs = np.convolve(coeffs, np.array([-float(root), 1.0]))
        return cls(coeffs)

    # ------------------------------------------------------------------
    # Basic properties
    # ------------------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> float:
        return self.coefficients[-1]

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (0.0,)

    def scale(self) -> float:
        """max |coefficient|, used to make tolerances relative (1.0 for the zero polynomial)"""
        largest = max(abs(c) for c in self.coefficients)
        return largest if largest > 0.0 else 1.0

    def eval_scale(self, x: float) -> float:
        """Σ |cᵢ|·|x|^i, the magnitude Horner round-off is proportional to at x"""
        total = 0.0
        for c in reversed(self.coefficients):
            total = total * abs(x) + abs(c)
        return max(total, self.scale())

    # ------------------------------------------------------------------
    # Evaluation and calculus
    # ------------------------------------------------------------------

    def eval(self, x: Number) -> Number:
        """Horner evaluation; works elementwise on numpy arrays"""
        result = np.zeros_like(x, dtype=np.result_type(x, float)) if isinstance(x, np.ndarray) else 0.0
        for c in reversed(self.coefficients):
            result = result * x + c
        return result

    def __call__(self, x: Number) -> Number:
        return self.eval(x)

    def derivative(self) -> 'RealPolynomial':
        if self.degree == 0:
            return RealPolynomial.zero()
        return RealPolynomial([i * c for i, c in enumerate(self.coefficients) if i > 0])

    def antiderivative(self, anchor: Tuple[float, float] = (0.0, 0.0)) -> 'RealPolynomial':
        """
        Antiderivative F with F' = self and F(x0) = y0

        Args:
            anchor: (x0, y0)
        """
        x0, y0 = anchor
        integrated = RealPolynomial([0.0] + [c / (i + 1) for i, c in enumerate(self.coefficients)])
        shift = float(y0) - float(integrated.eval(float(x0)))
        coeffs = list(integrated.coefficients)
        coeffs[0] += shift
        return RealPolynomial(coeffs)

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: 'RealPolynomial') -> 'RealPolynomial':
        a, b = self.coefficients, other.coefficients
        size = max(len(a), len(b))
        return RealPolynomial([
            (a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0)
            for i in range(size)
        ])

    def __neg__(self) -> 'RealPolynomial':
        return RealPolynomial([-c for c in self.coefficients])

    def __sub__(self, other: 'RealPolynomial') -> 'RealPolynomial':
        return self + (-other)

    def __mul__(self, other) -> 'RealPolynomial':
        if isinstance(other, RealPolynomial):
            return RealPolynomial(np.convolve(self.coefficients, other.coefficients))
        return RealPolynomial([c * float(other) for c in self.coefficients])

    __rmul__ = __mul__

    def power(self, exponent: int) -> 'RealPolynomial':
        result = RealPolynomial.constant(1.0)
        for _ in range(exponent):
            result = result * self
        return result

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------

    def hat(self, d: int) -> 'RealPolynomial':
        """x^d · p(1/x): coefficient reversal of p padded to degree d"""
        if d < self.degree:
            raise InvalidDegreeError(f"hat degree {d} is below polynomial degree {self.degree}")
        padded = list(self.coefficients) + [0.0] * (d - self.degree)
        return RealPolynomial(padded[::-1])

    def divide_linear(self, c: float) -> Tuple['RealPolynomial', float]:
        """
        Synthetic division by (x − c)

        Returns:
            (quotient, remainder) with self = (x − c)·quotient + remainder
        """
        a = self.coefficients
        d = len(a) - 1
        if d == 0:
            return RealPolynomial.zero(), a[0]
        quotient = [0.0] * d
        quotient[d - 1] = a[d]
        for j in range(d - 1, 0, -1):
            quotient[j - 1] = a[j] + c * quotient[j]
        remainder = a[0] + c * quotient[0]
        return RealPolynomial(quotient), remainder

    def taylor_shift(self, c: float) -> 'RealPolynomial':
        """Coefficients of s ↦ p(c + s)"""
        b = list(self.coefficients)
        d = len(b) - 1
        for i in range(d):
            for j in range(d - 1, i - 1, -1):
                b[j] += c * b[j + 1]
        return RealPolynomial(b)

    def __repr__(self) -> str:
        terms = ', '.join(f'{c:.17g}' for c in self.coefficients)
        return f'RealPolynomial([{terms}])'
