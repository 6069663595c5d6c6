"""
Wirtinger derivatives by central finite differences

A field f on ℂⁿ is sampled in real coordinates x = (Re z, Im z). Gradient and
Hessian are taken by central differences at steps s and s/2 and Richardson
extrapolated (error order 2 → 4), then assembled as

    ∂f/∂z_i      = ½(∂_{x_i} − i∂_{y_i}) f
    ∂f/∂z̄_i      = ½(∂_{x_i} + i∂_{y_i}) f
    ∂²f/∂z_i∂z̄_j = ¼[(f_{x_i x_j} + f_{y_i y_j}) + i(f_{x_i y_j} − f_{y_i x_j})]

f may be scalar or array valued (e.g. a k×k metric); trailing axes are kept.
"""
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from utils.exceptions import DomainError, EvaluationError
from utils.helpers import richardson_extrapolate


@dataclass(frozen=True, eq=False)
class WirtingerDerivatives:
    """Value and Wirtinger derivatives of a field at one point"""
    value: np.ndarray
    d_dz: np.ndarray      # shape (n, *field)
    d_dzbar: np.ndarray   # shape (n, *field)
    d2: np.ndarray        # shape (n, n, *field), d2[i, j] = ∂²f/∂z_i∂z̄_j


def as_complex_point(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex)).ravel()


def _sample(func: Callable, x: np.ndarray) -> np.ndarray:
    try:
        value = np.asarray(func(x))
    except (ArithmeticError, ValueError) as exc:
        raise EvaluationError(f"field evaluation failed at x={x}: {exc}") from exc
    if not np.all(np.isfinite(value)):
        raise EvaluationError(f"non-finite field value at x={x}")
    return value


def central_differences(func: Callable, x0: np.ndarray, step: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Central-difference gradient and Hessian of func at x0 (real coordinates)

    Returns:
        (f(x0), gradient (d, *field), hessian (d, d, *field))
    """
    f0 = _sample(func, x0)
    dim = x0.size
    dtype = np.result_type(f0, float)
    grad = np.zeros((dim,) + f0.shape, dtype=dtype)
    hess = np.zeros((dim, dim) + f0.shape, dtype=dtype)
    E = step * np.eye(dim)

    for i in range(dim):
        fp = _sample(func, x0 + E[i])
        fm = _sample(func, x0 - E[i])
        grad[i] = (fp - fm) / (2.0 * step)
        hess[i, i] = (fp - 2.0 * f0 + fm) / (step * step)

    for i in range(dim):
        for j in range(i + 1, dim):
            pij = _sample(func, x0 + E[i] + E[j])
            pij = pij - _sample(func, x0 + E[i] - E[j])
            pij = pij - _sample(func, x0 - E[i] + E[j])
            pij = pij + _sample(func, x0 - E[i] - E[j])
            hess[i, j] = pij / (4.0 * step * step)
            hess[j, i] = hess[i, j]

    return f0, grad, hess


def wirtinger_derivs(f: Callable, z, step: float) -> WirtingerDerivatives:
    """
    First and mixed second Wirtinger derivatives of f at z

    Args:
        f: Callable of a complex point (length-n array) returning a scalar or array
        z: Complex point
        step: Base step s; Richardson combines s and s/2

    Raises:
        DomainError: step is not positive
        EvaluationError: NaN/Inf among the samples
    """
    if not step > 0.0:
        raise DomainError(f"finite-difference step must be positive (got {step})")
    z = as_complex_point(z)
    n = z.size
    x0 = np.concatenate([z.real, z.imag])

    def real_field(x):
        return f(x[:n] + 1j * x[n:])

    f0, grad_s, hess_s = central_differences(real_field, x0, step)
    _, grad_h, hess_h = central_differences(real_field, x0, step / 2.0)
    grad = richardson_extrapolate([grad_s, grad_h], p=2)
    hess = richardson_extrapolate([hess_s, hess_h], p=2)

    gx, gy = grad[:n], grad[n:]
    d_dz = 0.5 * (gx - 1j * gy)
    d_dzbar = 0.5 * (gx + 1j * gy)

    hxx = hess[:n, :n]
    hyy = hess[n:, n:]
    hxy = hess[:n, n:]   # hxy[i, j] = f_{x_i y_j}
    hyx = hess[n:, :n]   # hyx[i, j] = f_{y_i x_j}
    d2 = 0.25 * ((hxx + hyy) + 1j * (hxy - hyx))

    return WirtingerDerivatives(value=f0, d_dz=d_dz, d_dzbar=d_dzbar, d2=d2)


def wirtinger_hessian_m(f: Callable, w, step: float) -> np.ndarray:
    """
    Complex Hessian ∂²f/∂w_s∂w̄_t of a real function on ℂ^m

    Returns:
        m×m Hermitian matrix (symmetrised to remove round-off asymmetry)
    """
    hessian = wirtinger_derivs(lambda point: float(f(point)), w, step).d2
    return 0.5 * (hessian + hessian.conj().T)
