"""
Helper utility functions
"""
import math
from typing import Iterable, List, Sequence, Union

import numpy as np
from numpy.typing import NDArray

ArrayLike = Union[float, complex, NDArray]


def richardson_extrapolate(base_values: Sequence[ArrayLike], p: int, r: float = 2.0) -> ArrayLike:
    """
    Richardson extrapolation on approximations taken at steps s, s/r, s/r², …

    Complex-valued entries are supported (Wirtinger derivatives of matrix fields).

    Args:
        base_values: Approximations at successively smaller steps
        p: Order of the leading error term
        r: Step reduction factor between entries

    Returns:
        Extrapolated value (scalar when the inputs are scalar)
    """
    n = len(base_values)
    if n < 2:
        raise ValueError("richardson_extrapolate requires at least two base values")

    vals = [np.asarray(v) for v in base_values]
    dtype = np.result_type(*vals, float)
    vals = [v.astype(dtype) for v in vals]

    for j in range(1, n):
        factor = r ** (p * j)
        for i in range(n - 1, j - 1, -1):
            vals[i] = (factor * vals[i] - vals[i - 1]) / (factor - 1.0)

    result = vals[-1]
    if result.ndim == 0:
        return complex(result) if np.iscomplexobj(result) else float(result)
    return result


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator (PCG64, 64-bit output) used for every sampled report"""
    return np.random.default_rng(int(seed))


def random_unit_vector(rng: np.random.Generator, dim: int) -> NDArray:
    """
    Uniform random unit vector in C^dim

    Radii and angles are drawn per complex coordinate, then normalised.
    """
    radii = rng.uniform(0.0, 1.0, size=dim)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=dim)
    vector = radii * np.exp(1j * angles)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        vector = np.zeros(dim, dtype=complex)
        vector[0] = 1.0
        return vector
    return vector / norm


def parse_float_list(text: str) -> List[float]:
    """
    Parse '1,2,-0.5' into floats

    Args:
        text: Comma separated numbers

    Returns:
        List of floats (empty for an empty string)
    """
    text = text.strip()
    if not text:
        return []
    return [float(item) for item in text.split(',') if item.strip()]


def parse_factor_list(text: str) -> List[tuple]:
    """
    Parse product-of-balls factors '1:1,1:2' into [(1, 1.0), (1, 2.0)]

    Args:
        text: Comma separated dim:power pairs

    Returns:
        List of (dimension, power) tuples
    """
    factors = []
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        dim, _, power = item.partition(':')
        if not power:
            raise ValueError(f"factor '{item}' must look like dim:power")
        factors.append((int(dim), float(power)))
    return factors


def to_jsonable(value):
    """
    Convert numpy/complex values into plain JSON types

    Complex numbers become [re, im]; non-finite floats become strings.
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def max_abs(values: Iterable[float]) -> float:
    """Largest absolute value (0.0 for an empty iterable)"""
    values = list(values)
    if not values:
        return 0.0
    return float(np.max(np.abs(np.asarray(values))))
