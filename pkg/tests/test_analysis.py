import math

import numpy as np
import pytest

from photoatom.analysis import (
    epc,
    epc_curve_fit,
    grid_policy,
    k_slope,
    linear_fit,
    spontaneous_slope,
    sweep,
)
from photoatom.params import default_grid

import support

SMALL = grid_policy(200)


def test_linear_fit_exact_line():
    f = linear_fit([1, 2, 3, 4], [5, 7, 9, 11])
    assert f.slope == pytest.approx(2, abs=1e-12)
    assert f.intercept == pytest.approx(3, abs=1e-12)
    assert f.rms_residual == pytest.approx(0, abs=1e-12)
    assert f.n_points == 4
    assert f(10) == pytest.approx(23)


def test_linear_fit_minimizes_squares():
    rng = np.random.default_rng(1)
    x = np.linspace(0, 1, 30)
    y = 3 * x - 1 + 0.1 * rng.normal(size=30)
    f = linear_fit(x, y)
    sse = np.sum((y - f(x)) ** 2)
    for ds, di in [(1e-3, 0), (-1e-3, 0), (0, 1e-3), (0, -1e-3)]:
        assert np.sum((y - ((f.slope + ds) * x + f.intercept + di)) ** 2) > sse
    assert f.rms_residual == pytest.approx(math.sqrt(sse / 30))


@pytest.mark.parametrize("xs,ys", [([1, 2], [1, 2]), ([2, 2, 2], [1, 2, 3]), ([1, 2, 3], [1, 2])])
def test_linear_fit_rejects_degenerate(xs, ys):
    with pytest.raises(ValueError):
        linear_fit(xs, ys)


def test_epc_curve_fit_exact():
    taus = np.array([0.1, 0.2, 0.3, 0.5, 0.7, 1.0])
    a, b, rms = epc_curve_fit(taus, 1.1 / taus + 1.5)
    assert a == pytest.approx(1.1, abs=1e-12)
    assert b == pytest.approx(1.5, abs=1e-12)
    assert rms == pytest.approx(0, abs=1e-12)


def test_epc_curve_fit_outlier_raises_rms_only():
    taus = np.array([0.1, 0.2, 0.3, 0.5, 0.7, 1.0])
    y = 1.1 / taus + 1.5
    y[3] += 2.0
    a, b, rms = epc_curve_fit(taus, y)
    assert rms > 0.1 and math.isfinite(a) and math.isfinite(b)


@pytest.mark.parametrize("taus", [[0.1, 0.2, 0.3], [0.1, 0.2, 1.5, 0.5], [0, 0.2, 0.3, 0.5], [0.5] * 4])
def test_epc_curve_fit_validation(taus):
    with pytest.raises(ValueError):
        epc_curve_fit(taus, np.ones(len(taus)))


def test_sweep_without_measures_lists_parameters():
    t = sweep([2, 1], [0.5, 0.1], set(), SMALL)
    assert [(r.eta, r.tau) for r in t.rows] == [(1, 0.1), (1, 0.5), (2, 0.1), (2, 0.5)]
    assert all(math.isnan(r.R) and math.isnan(r.K) and not r.error for r in t.rows)


def test_sweep_rows_unique_and_sorted():
    t = sweep([5, 1, 5], [1, 1], {"R"}, SMALL)
    assert [(r.eta, r.tau) for r in t.rows] == [(1, 1), (5, 1)]


def test_sweep_deterministic_and_thread_independent():
    a = sweep([1, 3], [0.5, 2], {"R", "K"}, SMALL)
    b = sweep([1, 3], [0.5, 2], {"R", "K"}, SMALL)
    c = sweep([1, 3], [0.5, 2], {"R", "K"}, SMALL, workers=3)
    assert a.rows == b.rows == c.rows
    for r in a.rows:
        assert r.R >= 1 - 1e-6 and r.K >= 1 and math.isfinite(r.R) and math.isfinite(r.K)


def test_sweep_records_point_failures():
    def policy(ctrl):
        if ctrl.eta == 2:
            raise ValueError("no grid for this point")
        return default_grid(ctrl, 64)

    t = sweep([1, 2, 3], [1], {"K"}, policy)
    assert [bool(r.error) for r in t.rows] == [False, True, False]
    assert "no grid" in t.rows[1].error and math.isnan(t.rows[1].K)


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep([1], [1], {"entropy"}, SMALL)
    with pytest.raises(ValueError):
        sweep([-1], [1], {"R"}, SMALL)


def test_sweep_spontaneous_kind():
    t = sweep([5], [1], {"K"}, SMALL, kind="spontaneous")
    assert t.provenance["kind"] == "spontaneous" and t.rows[0].K > 1
    with pytest.raises(ValueError):
        sweep([5], [1], {"K"}, SMALL, kind="transmitted")


def test_fig3_ordering():
    t = sweep([1, 5, 10, 20], [1], {"R"})
    assert np.all(np.diff(t.column("R")) > 0)


def test_fig4_inset_ordering():
    ks = [support.K("scattered", 10.0, t) for t in (0.1, 1.0, 10.0)]
    rs = [support.R("scattered", 10.0, t) for t in (0.1, 1.0, 10.0)]
    assert ks[0] > ks[1] > ks[2]
    assert all(k > r for k, r in zip(ks, rs))


@pytest.mark.parametrize("tau", [0.1, 1.0, 10.0])
def test_k_slope_exceeds_r_slope(tau):
    etas = (5.0, 10.0, 20.0)
    kfit = linear_fit(etas, [support.K("scattered", e, tau) for e in etas])
    rfit = linear_fit(etas, [support.R("scattered", e, tau) for e in etas])
    assert kfit.slope > rfit.slope


@pytest.fixture(scope="module")
def baseline():
    return spontaneous_slope([5, 10, 15, 20])


def test_epc_values(baseline):
    etas = [5, 10, 15, 20]
    e1 = epc(1.0, etas, baseline=baseline)
    e05 = epc(0.5, etas, baseline=baseline)
    e02 = epc(0.2, etas, baseline=baseline)
    assert e1 == pytest.approx(1.1 + 1.5, rel=0.15)
    assert e05 == pytest.approx(1.1 / 0.5 + 1.5, rel=0.15)
    assert e02 > e05 > e1


def test_epc_independent_of_eta_window():
    low = epc(1.0, [5, 7, 9, 11])
    high = epc(1.0, [15, 20, 25, 30])
    assert low == pytest.approx(high, rel=0.05)


def test_epc_validation():
    with pytest.raises(ValueError):
        epc(1.0, [1, 5, 10])
    with pytest.raises(ValueError):
        epc(0.0, [5, 10, 15])


def test_k_slope_reports_failures():
    def policy(ctrl):
        raise ValueError("broken")

    with pytest.raises(ArithmeticError):
        k_slope([5, 10, 15], 1.0, policy)


def test_squeezed_r_fit_intercept():
    etas = (5.0, 10.0, 15.0, 20.0)
    fit = linear_fit(etas, [support.R("scattered", e, 0.1) for e in etas])
    assert fit.slope == pytest.approx(1.58, abs=0.16)
    assert fit.intercept == pytest.approx(1.39, abs=0.5)


def test_k_slope_at_unit_tau():
    etas = (5.0, 10.0, 15.0, 20.0, 30.0)
    fit = linear_fit(etas, [support.K("scattered", e, 1.0) for e in etas])
    assert fit.slope == pytest.approx(0.75, abs=0.05)
