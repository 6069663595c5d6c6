"""
Tests for Wirtinger finite differences and bundle curvature
"""
import json
import sys

import numpy as np
import pytest

from geometry.bundle import (
    ChartBundleMetric,
    bundle_ricci,
    chern_curvature,
    determinant_ricci_gap,
    direct_sum,
    griffiths_negativity_sample,
    induced_base_metric,
    ricci_eigenvalues,
    split_griffiths_gap,
    split_residual,
)
from geometry.models import (
    disk_metric,
    flat_metric,
    gaussian_line_metric,
    load_polynomial_potential,
    named_metric,
    positive_line_metric,
    sum_disk_metric,
)
from geometry.wirtinger import wirtinger_derivs, wirtinger_hessian_m
from test_polynomial_core import banner
from utils.exceptions import (
    CompositionError,
    DomainError,
    EvaluationError,
    InvalidSpecError,
    MetricError,
    NotNegativeBundleError,
)

ORIGIN = np.array([0.0j])
RICCI_POINTS = [np.array([0.0j]), np.array([0.2 + 0.1j]), np.array([-0.3j]),
                np.array([0.1 - 0.25j]), np.array([0.35 + 0.0j])]


# ----------------------------------------------------------------------
# Wirtinger derivatives
# ----------------------------------------------------------------------

def test_wirtinger_basic_fields():
    banner("Wirtinger derivatives")
    z = np.array([0.3 - 0.2j, 0.1 + 0.4j])
    modulus = wirtinger_derivs(lambda w: abs(w[0]) ** 2, z, 1e-3)
    assert modulus.d2[0, 0] == pytest.approx(1.0, abs=1e-8)
    assert modulus.d2[1, 1] == pytest.approx(0.0, abs=1e-8)
    assert modulus.d_dz[0] == pytest.approx(np.conj(z[0]), abs=1e-8)
    assert modulus.d_dzbar[0] == pytest.approx(z[0], abs=1e-8)

    holomorphic = wirtinger_derivs(lambda w: (w[0] ** 2).real, z, 1e-3)
    assert holomorphic.d2[0, 0] == pytest.approx(0.0, abs=1e-8)


def test_wirtinger_mixed_entry():
    # f = Re(z₁ z̄₂) has ∂²f/∂z₁∂z̄₂ = 1/2
    d2 = wirtinger_derivs(lambda w: (w[0] * np.conj(w[1])).real, [0.1j, 0.2], 1e-3).d2
    assert d2[0, 1] == pytest.approx(0.5, abs=1e-8)
    assert d2[1, 0] == pytest.approx(0.5, abs=1e-8)


def test_wirtinger_disk_potential():
    d2 = wirtinger_derivs(lambda w: -np.log(1.0 - abs(w[0]) ** 2), ORIGIN, 1e-3).d2
    assert d2[0, 0] == pytest.approx(1.0, abs=1e-8)


def test_wirtinger_hessian_on_ball():
    hessian = wirtinger_hessian_m(lambda w: -np.log(1.0 - np.sum(np.abs(w) ** 2)), [0.0, 0.5], 2.5e-3)
    assert np.allclose(hessian, np.diag([4.0 / 3.0, 16.0 / 9.0]), atol=1e-8)
    assert np.allclose(wirtinger_hessian_m(lambda w: 3.0, [0.2, 0.1], 1e-3), 0.0)


def test_wirtinger_errors():
    with pytest.raises(EvaluationError):
        wirtinger_derivs(lambda w: np.nan, ORIGIN, 1e-3)
    with pytest.raises(DomainError):
        wirtinger_derivs(lambda w: 0.0, ORIGIN, 0.0)


# ----------------------------------------------------------------------
# Curvature
# ----------------------------------------------------------------------

def test_chern_curvature_disk():
    banner("Chern curvature")
    assert chern_curvature(disk_metric(1.0), ORIGIN).components[0, 0, 0, 0] == pytest.approx(-1.0, abs=1e-8)
    assert chern_curvature(disk_metric(2.0), ORIGIN).components[0, 0, 0, 0] == pytest.approx(-2.0, abs=1e-8)
    assert np.allclose(chern_curvature(flat_metric(1, 2), ORIGIN).components, 0.0)


def test_chern_curvature_is_hermitian_away_from_origin():
    theta = chern_curvature(sum_disk_metric([1.0, 2.0]), [0.3 + 0.2j])
    assert theta.hermitian_defect() <= 1e-8


def test_bundle_ricci():
    assert bundle_ricci(chern_curvature(disk_metric(1.0), ORIGIN))[0, 0] == pytest.approx(-1.0, abs=1e-8)
    assert np.allclose(bundle_ricci(chern_curvature(flat_metric(1, 1), ORIGIN)), 0.0)
    summed = bundle_ricci(chern_curvature(sum_disk_metric([1.0, 2.0]), ORIGIN))
    assert summed[0, 0] == pytest.approx(-3.0, abs=1e-8)


def test_split_residual():
    banner("Curvature splitting")
    assert split_residual(disk_metric(1.5), [0.2 - 0.1j]) <= 1e-8
    assert split_residual(sum_disk_metric([1.0, 1.0]), ORIGIN) <= 1e-6
    assert split_residual(sum_disk_metric([1.0, 2.0]), ORIGIN) >= 0.4
    assert split_residual(sum_disk_metric([1.0, 2.0]), ORIGIN) == pytest.approx(0.5, abs=1e-6)


def test_split_griffiths_gap():
    assert split_griffiths_gap(sum_disk_metric([1.0, 1.0]), ORIGIN) <= 1e-6
    assert split_griffiths_gap(sum_disk_metric([1.0, 2.0]), ORIGIN) > 0.1


def test_determinant_ricci_gap():
    for metric in (disk_metric(1.0), sum_disk_metric([1.0, 2.0])):
        assert determinant_ricci_gap(metric, [0.15 + 0.1j]) <= 1e-6


def test_griffiths_sign():
    banner("Griffiths sign")
    disk = griffiths_negativity_sample(disk_metric(1.0), ORIGIN, trials=32, rng_seed=7)
    assert disk.verdict == 'negative-evidence'
    assert disk.max_value < 0.0
    assert griffiths_negativity_sample(flat_metric(1, 1), ORIGIN).verdict == 'not-negative'
    positive = griffiths_negativity_sample(positive_line_metric(), ORIGIN)
    assert positive.verdict == 'not-negative'
    assert positive.min_value > 0.0


def test_griffiths_sample_is_deterministic():
    first = griffiths_negativity_sample(sum_disk_metric([1.0, 2.0]), [0.1j], trials=16, rng_seed=3)
    second = griffiths_negativity_sample(sum_disk_metric([1.0, 2.0]), [0.1j], trials=16, rng_seed=3)
    assert first.to_dict() == second.to_dict()


# ----------------------------------------------------------------------
# Induced metric and Ricci eigenvalues
# ----------------------------------------------------------------------

def test_induced_base_metric():
    g, G = induced_base_metric(disk_metric(1.0), ORIGIN)
    assert g[0, 0] == pytest.approx(1.0, abs=1e-8)
    assert G == pytest.approx(1.0, abs=1e-8)
    g, _ = induced_base_metric(sum_disk_metric([1.0, 1.0]), ORIGIN)
    assert g[0, 0] == pytest.approx(2.0, abs=1e-8)
    with pytest.raises(NotNegativeBundleError):
        induced_base_metric(flat_metric(1, 1), ORIGIN)
    with pytest.raises(NotNegativeBundleError):
        induced_base_metric(positive_line_metric(), ORIGIN)


@pytest.mark.parametrize("metric, expected", [
    (disk_metric(1.0), -2.0),
    (sum_disk_metric([1.0, 1.0]), -1.0),
    (gaussian_line_metric(), 0.0),
], ids=['disk', 'two-disks', 'gaussian'])
def test_ricci_eigenvalues_constant(metric, expected):
    banner(f"Ricci eigenvalues: {metric.name}")
    report = ricci_eigenvalues(metric, RICCI_POINTS)
    assert report.constant
    assert report.spread <= 1e-4
    assert report.mean_eigenvalues == pytest.approx([expected], abs=1e-4)


def test_ricci_eigenvalues_threads_do_not_change_result():
    serial = ricci_eigenvalues(disk_metric(1.0), RICCI_POINTS[:3])
    threaded = ricci_eigenvalues(disk_metric(1.0), RICCI_POINTS[:3], threads=3)
    assert serial.eigenvalues == threaded.eigenvalues


# ----------------------------------------------------------------------
# Metric construction
# ----------------------------------------------------------------------

def test_direct_sum():
    total = sum_disk_metric([1.0, 1.0])
    z = np.array([0.3 + 0.1j])
    assert np.allclose(total.h(z), np.eye(2) / (1.0 - abs(z[0]) ** 2))
    with pytest.raises(CompositionError):
        direct_sum([disk_metric(1.0, n=1), disk_metric(1.0, n=2)])
    with pytest.raises(CompositionError):
        direct_sum([disk_metric(1.0), positive_line_metric()])
    with pytest.raises(CompositionError):
        direct_sum([flat_metric(1, 2)])


def test_metric_validation():
    with pytest.raises(DomainError):
        disk_metric(1.0).h([1.2])
    skew = ChartBundleMetric(n=1, k=2, h_fn=lambda z: np.array([[1.0, 1.0], [0.0, 1.0]]), name='skew')
    with pytest.raises(MetricError):
        skew.h(ORIGIN)
    indefinite = ChartBundleMetric(n=1, k=1, h_fn=lambda z: np.array([[-1.0]]), name='indefinite')
    with pytest.raises(MetricError):
        indefinite.h(ORIGIN)


def test_polynomial_potential_model(tmp_path):
    path = tmp_path / 'potential.json'
    path.write_text(json.dumps({'n': 1, 'k': 1, 'terms': [{'i_multi': [1], 'j_multi': [1], 're': 1.0}]}))
    metric = load_polynomial_potential(path)
    g, _ = induced_base_metric(metric, [0.3j])
    assert g[0, 0] == pytest.approx(1.0, abs=1e-8)

    bad = tmp_path / 'bad.json'
    bad.write_text(json.dumps({'n': 1, 'k': 1, 'terms': [{'i_multi': [1, 0], 'j_multi': [1]}]}))
    with pytest.raises(InvalidSpecError):
        load_polynomial_potential(bad)


def test_named_metric():
    assert named_metric('sum-disk', powers=[1.0, 2.0]).k == 2
    assert named_metric('flat', n=2, k=3).n == 2
    with pytest.raises(InvalidSpecError):
        named_metric('poly')
    with pytest.raises(InvalidSpecError):
        named_metric('torus')


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
