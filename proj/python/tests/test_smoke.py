import math

import numpy as np
import pytest

import comodep


def test_sorted_sample_is_fully_comonotone():
    y = np.sort(np.random.default_rng(0).random((50, 3)), axis=0)
    assert comodep.rho_hat_general(y) == 1.0


def test_three_point_law_is_uncorrelated():
    pts = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]])
    assert comodep.discrete_rho(pts, [1 / 3] * 3) == 0.0
    assert comodep.rho_hat_general(pts) == 0.0


def test_closed_forms():
    assert comodep.fgm_rho_closed(1.0, "exp1") == pytest.approx(0.25)
    assert comodep.egm3_kappa(0, 0, 0, 1) == pytest.approx(1 / 27)
    assert comodep.pareto3_rho_c(2.0, 4.0) == pytest.approx(1 / 6)


def test_quadrature_matches_closed_form():
    r = comodep.rho_from_copula(comodep.fgm2_model(0.8))
    assert r["value"] == pytest.approx(0.8 / 3, abs=1e-8)
    t = comodep.tail_integral_rho(comodep.fgm2_model(0.8), tolerance=1e-8)
    assert t["value"] == pytest.approx(0.8 / 3, abs=1e-6)


def test_sample_is_reproducible():
    model = comodep.fgm2_model(0.5)
    a = comodep.sample(model, 1000, 42)
    b = comodep.sample(model, 1000, 42)
    assert a.shape == (1000, 2)
    assert np.array_equal(a, b)


def test_classical_on_comonotone_sample():
    x = np.linspace(0.0, 1.0, 20)
    c = comodep.classical_hat(np.column_stack([x, x ** 3]))
    for key in ("kendall", "spearman", "gini"):
        assert c[key] == pytest.approx(1.0)


def test_errors_are_typed():
    with pytest.raises(comodep.DegenerateDenominator):
        comodep.rho_hat_general(np.array([[1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]))
    with pytest.raises(comodep.ModelNotSamplable):
        comodep.sample(comodep.pareto3_model(4.0, 1.0), 10, 1)
    with pytest.raises(comodep.InadmissibleCopula):
        comodep.egm3_model(2.0, 0.0, 0.0, 0.0)
    assert issubclass(comodep.MomentUndefined, comodep.Error)


def test_gaussian_moment():
    cov = np.array([[1.0, 0.3], [0.3, 1.0]])
    assert comodep.gaussian_product_moment(np.zeros(2), cov) == pytest.approx(0.3)
    assert math.isclose(comodep.gaussian_rho_c(cov), 0.3)
