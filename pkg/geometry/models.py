"""
Built-in chart metrics and the JSON polynomial-potential loader
"""
import json
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from geometry.bundle import ChartBundleMetric, direct_sum
from utils.exceptions import InvalidSpecError
from utils.logger import setup_logger

logger = setup_logger('MetricModels')


def _ball_membership(z: np.ndarray) -> bool:
    return float(np.sum(np.abs(z) ** 2)) < 1.0


def _ball_margin(z: np.ndarray) -> float:
    return 1.0 - float(np.linalg.norm(z))


def disk_metric(power: float = 1.0, n: int = 1) -> ChartBundleMetric:
    """Line metric h = (1 − |z|²)^{−power} on the unit ball of ℂⁿ"""
    def h_fn(z):
        return np.array([[(1.0 - np.sum(np.abs(z) ** 2)) ** (-power)]], dtype=complex)

    return ChartBundleMetric(n=n, k=1, h_fn=h_fn, domain_membership=_ball_membership,
                             margin_fn=_ball_margin, name=f'disk^{power:g}', domain_key=f'ball{n}')


def sum_disk_metric(powers: Sequence[float], n: int = 1) -> ChartBundleMetric:
    """Direct sum of disk line metrics with the given powers"""
    return direct_sum([disk_metric(power, n) for power in powers])


def positive_line_metric(n: int = 1) -> ChartBundleMetric:
    """Griffiths-positive line metric h = (1 + |z|²)^{−1}"""
    def h_fn(z):
        return np.array([[1.0 / (1.0 + np.sum(np.abs(z) ** 2))]], dtype=complex)

    return ChartBundleMetric(n=n, k=1, h_fn=h_fn, name='positive', domain_key=f'C{n}')


def gaussian_line_metric(n: int = 1) -> ChartBundleMetric:
    """h = e^{|z|²}; the induced base metric is Euclidean"""
    def h_fn(z):
        return np.array([[np.exp(np.sum(np.abs(z) ** 2))]], dtype=complex)

    return ChartBundleMetric(n=n, k=1, h_fn=h_fn, name='gaussian', domain_key=f'C{n}')


def flat_metric(n: int = 1, k: int = 1) -> ChartBundleMetric:
    """Identity metric on the trivial bundle"""
    identity = np.eye(k, dtype=complex)

    def h_fn(z):
        return identity

    return ChartBundleMetric(n=n, k=k, h_fn=h_fn, name='flat', domain_key=f'C{n}')


class PolynomialPotential:
    """ψ(z) = Re Σ c_{IJ} z^I z̄^J"""

    def __init__(self, n: int, k: int, terms: List[dict]):
        self.n = n
        self.k = k
        self.i_multi = np.array([term['i_multi'] for term in terms], dtype=int).reshape(len(terms), n)
        self.j_multi = np.array([term['j_multi'] for term in terms], dtype=int).reshape(len(terms), n)
        self.coefficients = np.array([complex(term.get('re', 0.0), term.get('im', 0.0)) for term in terms])

    def __call__(self, z: np.ndarray) -> float:
        holomorphic = np.prod(z[None, :] ** self.i_multi, axis=1)
        antiholomorphic = np.prod(np.conj(z)[None, :] ** self.j_multi, axis=1)
        return float(np.real(np.sum(self.coefficients * holomorphic * antiholomorphic)))


def polynomial_potential_metric(document: dict) -> ChartBundleMetric:
    """
    Metric h = exp(ψ/k)·I_k, so that log det h = ψ

    Args:
        document: {"n":…, "k":…, "terms":[{"i_multi":[…],"j_multi":[…],"re":…,"im":…}]}

    Raises:
        InvalidSpecError: malformed document
    """
    try:
        n = int(document['n'])
        k = int(document['k'])
        terms = list(document['terms'])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpecError(f"polynomial potential needs integer n, k and a terms list: {exc}") from exc
    if n < 1 or k < 1:
        raise InvalidSpecError(f"polynomial potential needs n, k >= 1 (got n={n}, k={k})")
    for index, term in enumerate(terms):
        for key in ('i_multi', 'j_multi'):
            multi = term.get(key)
            if not isinstance(multi, list) or len(multi) != n or any(int(e) < 0 for e in multi):
                raise InvalidSpecError(f"term {index}: {key} must list {n} nonnegative exponents")

    potential = PolynomialPotential(n, k, terms)
    identity = np.eye(k, dtype=complex)

    def h_fn(z):
        return np.exp(potential(np.asarray(z, dtype=complex)) / k) * identity

    logger.info(f"📄 Loaded polynomial potential: n={n}, k={k}, {len(terms)} terms")
    return ChartBundleMetric(n=n, k=k, h_fn=h_fn, name='poly', domain_key=f'C{n}')


def load_polynomial_potential(path: Union[str, Path]) -> ChartBundleMetric:
    """Read a polynomial-potential JSON document (OSError/JSONDecodeError propagate)"""
    with open(path, 'r', encoding='utf-8') as handle:
        document = json.load(handle)
    return polynomial_potential_metric(document)


def named_metric(model: str, n: int = 1, k: int = 1, powers: Sequence[float] = (1.0,),
                 json_path: str = None) -> ChartBundleMetric:
    """
    Resolve a bundle-check model name

    Names: disk, sum-disk, flat, positive, gaussian, poly
    """
    if model == 'disk':
        return disk_metric(powers[0] if powers else 1.0, n)
    if model == 'sum-disk':
        return sum_disk_metric(powers, n)
    if model == 'flat':
        return flat_metric(n, k)
    if model == 'positive':
        return positive_line_metric(n)
    if model == 'gaussian':
        return gaussian_line_metric(n)
    if model == 'poly':
        if not json_path:
            raise InvalidSpecError("model 'poly' needs --json PATH")
        return load_polynomial_potential(json_path)
    raise InvalidSpecError(f"unknown bundle model {model!r}")
