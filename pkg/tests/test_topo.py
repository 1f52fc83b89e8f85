import warnings

import numpy as np
import pytest

from solnorm import kcao, topo
from solnorm.curv import Convention, hodge_block_decompose, random_trace_free, trace_free
from solnorm.normform import DegenerateSpectrum, normal_form
from solnorm.soliton import SolitonPoint, einstein_point, normal_data_point, random_soliton_point

COMM = Convention.COMMUTING


def _nf(p):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        return normal_form(p, COMM)


def test_round_s4_density():
    p = SolitonPoint(np.eye(6), np.zeros((4, 4)), 3.0)
    assert topo.chi_density(p, _nf(p)) == pytest.approx(3 / (4 * np.pi ** 2), rel=1e-14)
    assert topo.chi_tensor_density(p.curv) == pytest.approx(3 / (4 * np.pi ** 2), rel=1e-14)
    assert topo.tau_density(p, _nf(p)) == 0.0


def test_einstein_density_is_curvature_only(rng):
    p = einstein_point(random_trace_free(rng), random_trace_free(rng), 5.0)
    nf = _nf(p)
    expect = (np.sum(nf.a ** 2) + np.sum(nf.b ** 2)) / (4 * np.pi ** 2)
    assert topo.chi_density(p, nf) == pytest.approx(expect, abs=1e-14)


def test_dual_formulas(rng):
    for _ in range(2000):
        p = random_soliton_point(rng)
        nf = normal_form(p, COMM)
        rep = topo.density_report(p, nf)
        assert rep.besse_cross_check <= 1e-10
        assert rep.combined_residual <= 1e-10
        assert abs(rep.tau_density - topo.tau_tensor_density(p.curv)) <= 1e-10
        assert abs(topo.chi_hodge_trace(p.curv) - topo.chi_tensor_density(p.curv)) <= 1e-10


def test_trace_cct_and_ricci(rng):
    for _ in range(2000):
        p = random_soliton_point(rng)
        h0 = np.sum(trace_free(p.hess) ** 2)
        assert abs(topo.trace_cct(p.hess) - h0) <= 1e-12
        assert abs(h0 - np.sum(trace_free(p.ric) ** 2)) <= 1e-12


def test_tau_examples(rng):
    pure = normal_data_point([2.0, 1.0, -1.0], [0.0, 0.0, 0.0], np.diag([0.1, 0.2, 0.3, 0.4]))
    assert abs(topo.tau_density(pure, _nf(pure))) <= 1e-15
    sd = einstein_point(random_trace_free(rng), np.zeros((3, 3)), 6.0)
    assert topo.tau_density(sd, _nf(sd)) > 0


def test_orientation_reversal(rng):
    for _ in range(200):
        p = random_soliton_point(rng)
        q = p.reversed_orientation()
        b0, b1 = hodge_block_decompose(p.curv), hodge_block_decompose(q.curv)
        assert np.allclose(np.linalg.eigvalsh(b0.wplus), np.linalg.eigvalsh(b1.wminus), atol=1e-12)
        t0 = topo.tau_density(p, normal_form(p, COMM))
        t1 = topo.tau_density(q, normal_form(q, COMM))
        assert t1 == pytest.approx(-t0, abs=1e-12)
        assert topo.chi_density(q, normal_form(q, COMM)) == pytest.approx(
            topo.chi_density(p, normal_form(p, COMM)), abs=1e-12)


def test_round_s4_integral():
    chi = topo.integrate_profile(kcao.round_s4_profile(2001), topo.chi_of_point)
    assert chi == pytest.approx(2.0, abs=0.01)


def test_quadrature_order():
    density = lambda p: topo.chi_tensor_density(p.curv)  # noqa: E731
    errs = [abs(topo.integrate_profile(kcao.round_s4_profile(n), density) - 2) for n in (201, 401, 801)]
    assert errs[0] / errs[1] >= 8 and errs[1] / errs[2] >= 8


def test_grid_checks():
    s4 = kcao.round_s4_profile(51)
    density = lambda p: topo.chi_tensor_density(p.curv)  # noqa: E731
    with pytest.raises(topo.GridTooCoarse):
        topo.integrate_profile(s4, density, tol=1e-12)
    with pytest.raises(topo.GridTooCoarse):
        topo.integrate_profile(kcao.round_s4_profile(50), density)
