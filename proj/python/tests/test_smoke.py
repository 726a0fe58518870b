import math

import numpy as np
import pytest

import brokenpde as bp


def test_expression_and_sampling():
    e = bp.parse("2*x^2 - y")
    assert e(1.5, 2.0) == pytest.approx(2.5)
    g = bp.Grid.square(-1, 1, 9)
    f = bp.sample("x*y", g)
    assert f.values.shape == (9, 9)
    assert f.values[0, 0] == pytest.approx(1.0)
    assert f(0.5, 0.5) == pytest.approx(0.25)
    with pytest.raises(bp.ExprSyntaxError):
        bp.parse("2*")
    with pytest.raises(bp.Error):
        bp.parse("q+1")


def test_field_round_trip():
    g = bp.Grid.square(0, 1, 5)
    values = np.arange(25, dtype=float).reshape(5, 5)
    f = bp.Field(g, values)
    assert np.array_equal(f.values, values)
    with pytest.raises(bp.InvalidArgument):
        bp.Field(g, np.zeros(7))


def test_solve_matches_oracle():
    g = bp.Grid.square(-1, 1, 33)
    model = bp.CoefficientModel.heaviside(2, 1)
    report = bp.picard_solve(bp.Problem(g, model, "x"))
    assert report.converged
    u_exact, _ = bp.harmonic_inversion_exact(model, "x", g)
    err = np.max(np.abs(report.u.values - u_exact.values))
    assert err <= 3 * g.h()


def test_solver_reports_non_convergence():
    p = bp.Problem(bp.Grid.square(-1, 1, 17), bp.CoefficientModel.heaviside(2, 1), "x")
    p.max_picard_iterations = 1
    assert not bp.picard_solve(p).converged


def test_config_errors_name_the_key():
    with pytest.raises(bp.ConfigError, match="coefficients.b"):
        bp.parse_config('{"grid": {"n": 9}, "coefficients": {"s": 0, "b": 1}, "boundary": "x"}')
    p = bp.parse_config('{"grid": {"n": 9}, "coefficients": {"s": 1, "a": 1, "b": 1}, "boundary": "x"}')
    assert p.model.s == 1.0


def test_transforms():
    for s in (0.5, 1.0, 2.0):
        for u in (-1.3, 0.0, 0.7):
            v = bp.phi_s(u, 1.0, 0.5, s)
            assert bp.phi_s_inverse(v, 1.0, 0.5, s) == pytest.approx(u, abs=1e-12)
    g = bp.Grid.square(-1, 1, 9)
    u = bp.sample("x", g)
    w = bp.w_transform(u, bp.CoefficientModel.heaviside(2, 1))
    assert w.v(0.5, 0.0) == pytest.approx(1.0)
    assert w.v(-0.5, 0.0) == pytest.approx(-0.5)


def test_nodal_and_measures():
    g = bp.Grid.square(-1, 1, 65)
    u = bp.sample("x^2+y^2-0.25", g)
    ns = bp.extract_nodal(u)
    assert ns.segments.shape[1] == 4
    assert ns.total_length() == pytest.approx(math.pi, rel=1e-2)
    assert bp.nodal_length(ns, (0, 0), 1.0) == pytest.approx(math.pi, rel=1e-2)
    pos, neg = bp.sign_measures(u, (0, 0), 1.0)
    assert neg == pytest.approx(math.pi / 4, rel=1e-2)
    assert pos + neg == pytest.approx(math.pi, rel=1e-3)


def test_analysis():
    g = bp.Grid.square(-1, 1, 257)
    v = bp.sample("x^2-y^2", g)
    assert bp.vanishing_order(v, (0, 0), 0.4, 5).d_hat == pytest.approx(2.0, abs=0.03)
    fit = bp.harmonic_fit(v, (0, 0), 2, 0.4)
    assert fit.re[2] == pytest.approx(1.0)
    prof = bp.harmonic_frequency_profile(v, (0, 0), bp.linspace(0.1, 0.4, 4))
    assert all(abs(e["N"] - 2.0) <= 0.03 for e in prof)
    with pytest.raises(bp.RadiiTooSmall):
        bp.vanishing_order(bp.sample("x", bp.Grid.square(-1, 1, 17)), (0, 0), 0.4, 5)


def test_transmission_oracle():
    o = bp.transmission_1d(2.0, 1.0, -1.0, 1.0)
    assert o["field"](o["interface"]) == pytest.approx(0.0, abs=1e-14)
    assert 2.0 * o["slope_plus"] == pytest.approx(o["flux"])
    assert 1.0 * o["slope_minus"] == pytest.approx(o["flux"])


def test_verify_transforms_suite():
    results = bp.verify("transforms")
    assert [r["id"] for r in results] == ["AC-8"]
    assert results[0]["passed"]
