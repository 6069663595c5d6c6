"""
Tests for the Monge-Ampère verification on eggs and products of balls
"""
import sys

import numpy as np
import pytest

from config.settings import settings
from test_polynomial_core import banner
from utils.exceptions import DomainError, FiberSingularityError, InvalidSpecError, UnsupportedModelError
from utils.helpers import make_rng
from verification.hessian_blocks import (
    block_cross_validation,
    capital_phi_check,
    fd_blocks,
    fiber_determinant_check,
    hessian_blocks_closed_form,
    metric_lower_bound_check,
)
from verification.models import ModelGeometry
from verification.monge_ampere import (
    bergman_compare_p1,
    ma_residual,
    model_ricci_audit,
    sample_interior_points,
    sample_normal_points,
    solve_ma_profile,
    u_value,
    verify_ma,
)

EGG_111 = ModelGeometry.egg(1, 1, 1.0)
MA_MODELS = [
    ModelGeometry.egg(1, 2, 2.0),
    ModelGeometry.egg(2, 2, 3.0),
    ModelGeometry.product_ball([(1, 1.0), (1, 2.0)], 1),
]


@pytest.fixture(scope="module")
def egg_profile():
    return solve_ma_profile(EGG_111)


@pytest.fixture(scope="module")
def model_profiles():
    return {model.name: solve_ma_profile(model) for model in MA_MODELS}


# ----------------------------------------------------------------------
# Models
# ----------------------------------------------------------------------

def test_model_spec():
    banner("Model geometry")
    assert EGG_111.spec.eigenvalues == pytest.approx((-2.0,))
    assert ModelGeometry.egg(2, 2, 3.0).spec.eigenvalues == pytest.approx((-4.5, -4.5))
    product = ModelGeometry.product_ball([(1, 1.0), (2, 0.5)], 2)
    assert product.n == 3 and product.m == 5
    assert product.spec.eigenvalues == pytest.approx((-1.0, -0.75, -0.75))
    assert np.allclose(np.diag(product.base_metric_at_origin()).real, [2.0, 4.0, 4.0])


def test_model_rejects_invalid():
    with pytest.raises(InvalidSpecError):
        ModelGeometry.egg(1, 1, 0.0)
    with pytest.raises(InvalidSpecError):
        ModelGeometry.product_ball([], 1)
    with pytest.raises(DomainError):
        EGG_111.split_point([0.1, 0.2, 0.3])


def test_model_base_data():
    z = np.array([0.5 + 0.0j])
    assert EGG_111.h(z) == pytest.approx(4.0 / 3.0)
    assert EGG_111.G(z) == pytest.approx(16.0 / 9.0)
    assert EGG_111.X([0.5, 0.5]) == pytest.approx(0.5 * np.sqrt(4.0 / 3.0))
    assert EGG_111.contains([0.0, 0.99])
    assert not EGG_111.contains([0.0, 1.0])


# ----------------------------------------------------------------------
# The potential u
# ----------------------------------------------------------------------

def test_u_value_spot_values(egg_profile):
    banner("u on egg(1,1,1)")
    assert u_value(EGG_111, egg_profile, [0.0, 0.5]) == pytest.approx(0.75, abs=1e-8)
    assert u_value(EGG_111, egg_profile, [0.5, 0.0]) == pytest.approx(0.75, abs=1e-8)
    with pytest.raises(DomainError):
        u_value(EGG_111, egg_profile, [0.0, 1.0])


def test_ma_residual_rational_egg(egg_profile):
    for w in ([0.0, 0.5], [0.2 + 0.1j, 0.3 - 0.2j], [-0.4j, 0.1]):
        residual_log, residual_J = ma_residual(EGG_111, egg_profile, w)
        assert residual_log <= 1e-8
        assert residual_J <= 1e-8


@pytest.mark.parametrize("model", MA_MODELS, ids=lambda model: model.name)
def test_verify_ma(model, model_profiles):
    banner(f"Monge-Ampère: {model.name}")
    report = verify_ma(model, model_profiles[model.name], count=20, seed=11)
    assert len(report.points) == 20
    assert report.max_residual <= 1e-5
    assert report.max_identity_gap <= 1e-6
    assert report.geometry_violations == 0
    assert report.passed
    document = report.to_dict()
    assert document['seed'] == 11
    assert document['spec']['n'] == model.n


@pytest.mark.parametrize("n, k, p", [(1, 2, 1.0), (1, 1, 2.0)])
def test_verify_ma_small_eggs(n, k, p):
    model = ModelGeometry.egg(n, k, p)
    report = verify_ma(model, count=10, seed=7)
    assert report.max_residual <= 1e-5
    assert report.max_identity_gap <= 1e-6
    assert report.passed


def test_report_records_effective_step(model_profiles):
    model = MA_MODELS[0]
    report = verify_ma(model, model_profiles[model.name], count=5, seed=3)
    steps = [p.step for p in report.points]
    assert report.base_step == settings.HESSIAN_STEP
    assert report.step == max(steps)
    assert report.min_step == min(steps)
    # the margin scaling makes every effective step smaller than the base step
    assert report.step < report.base_step
    document = report.to_dict()
    assert document['step'] == max(steps)
    assert document['base_step'] == settings.HESSIAN_STEP


def test_verify_ma_thread_count_does_not_change_report(model_profiles):
    model = MA_MODELS[0]
    profile = model_profiles[model.name]
    serial = verify_ma(model, profile, count=4, seed=5)
    threaded = verify_ma(model, profile, count=4, seed=5, threads=2)
    assert [p.residual_log for p in serial.points] == [p.residual_log for p in threaded.points]


def test_seeded_samples_are_deterministic():
    first = sample_interior_points(MA_MODELS[2], 5, make_rng(3))
    second = sample_interior_points(MA_MODELS[2], 5, make_rng(3))
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    for w in first:
        assert 0.05 <= MA_MODELS[2].X(w) <= 0.9


# ----------------------------------------------------------------------
# Hessian blocks
# ----------------------------------------------------------------------

def test_closed_form_blocks_rational_egg(egg_profile):
    banner("Hessian blocks")
    closed = hessian_blocks_closed_form(EGG_111, egg_profile, [0.5])
    assert closed.base[0, 0].real == pytest.approx(4.0 / 3.0, abs=1e-8)
    assert closed.fiber[0, 0].real == pytest.approx(16.0 / 9.0, abs=1e-8)
    numeric = fd_blocks(EGG_111, egg_profile, [0.5])
    assert numeric.base[0, 0].real == pytest.approx(4.0 / 3.0, abs=1e-8)
    assert numeric.fiber[0, 0].real == pytest.approx(16.0 / 9.0, abs=1e-8)
    assert abs(numeric.cross[0, 0]) <= 1e-8


@pytest.mark.parametrize("model", MA_MODELS, ids=lambda model: model.name)
def test_block_cross_validation(model, model_profiles):
    points = sample_normal_points(model, 10, make_rng(21))
    gaps = block_cross_validation(model, model_profiles[model.name], points)
    assert max(gaps) <= 1e-5


def test_closed_form_blocks_singular_at_zero_section(egg_profile):
    with pytest.raises(FiberSingularityError):
        hessian_blocks_closed_form(EGG_111, egg_profile, [0.0])
    with pytest.raises(DomainError):
        hessian_blocks_closed_form(EGG_111, egg_profile, [1.0])


def test_capital_phi(egg_profile, model_profiles):
    formula, numeric = capital_phi_check(EGG_111, egg_profile, [0.5])
    assert formula == pytest.approx(64.0 / 27.0, rel=1e-8)
    assert numeric == pytest.approx(64.0 / 27.0, rel=1e-6)

    model = MA_MODELS[0]
    formula, numeric = capital_phi_check(model, model_profiles[model.name], [0.3, 0.4j])
    assert numeric == pytest.approx(formula, rel=1e-5)

    with pytest.raises(DomainError):
        capital_phi_check(EGG_111, egg_profile, [0.96])


def test_fiber_determinant(egg_profile, model_profiles):
    numeric, formula, passed = fiber_determinant_check(EGG_111, egg_profile, [0.5])
    assert formula == pytest.approx(16.0 / 9.0, rel=1e-8)
    assert passed
    model = MA_MODELS[1]
    assert fiber_determinant_check(model, model_profiles[model.name], [0.2, 0.5 - 0.1j])[2]


def test_metric_lower_bound(egg_profile, model_profiles):
    report = metric_lower_bound_check(EGG_111, egg_profile, [[0.0, 0.5]])
    assert report.min_eig == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert report.points[0].intermediate_min_eig == pytest.approx(report.points[0].intermediate_expected, abs=1e-6)
    for model in MA_MODELS:
        points = sample_normal_points(model, 5, make_rng(8))
        assert metric_lower_bound_check(model, model_profiles[model.name], points).passed


# ----------------------------------------------------------------------
# Unit ball and Ricci audit
# ----------------------------------------------------------------------

@pytest.mark.parametrize("n, k", [(1, 1), (2, 3)])
def test_bergman_unit_ball(n, k):
    banner(f"Unit ball comparison n={n} k={k}")
    report = bergman_compare_p1(n, k, sample_points=10, seed=4)
    assert len(report.ratios) == 10
    assert report.max_deviation <= 1e-8
    assert report.passed


def test_bergman_needs_p_one():
    with pytest.raises(UnsupportedModelError):
        bergman_compare_p1(1, 1, p=2.0)


def test_model_ricci_audit():
    report = model_ricci_audit(MA_MODELS[2], count=3, seed=2)
    assert report.extra['expected'] == pytest.approx([-4.0, -2.0])
    assert report.extra['max_deviation'] <= 1e-4
    assert report.constant


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
