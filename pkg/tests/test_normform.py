import warnings

import numpy as np
import pytest

from solnorm.bivec import STAR, Frame4, random_rotation, wedge
from solnorm.curv import Convention, random_symmetric, random_trace_free
from solnorm.normform import (
    OFFDIAG,
    PLANES,
    CommutationTooLarge,
    DegenerateSpectrum,
    criticality_obstructions,
    is_pure,
    kernel_slice,
    normal_form,
    star_partner_criticality,
)
from solnorm.soliton import (
    einstein_point,
    normal_data_point,
    random_soliton_point,
    s_hat,
)

COMM = Convention.COMMUTING
A0 = np.array([3.0, 1.0, -0.5])
B0 = np.array([0.4, -0.1, -0.3])


def _hess_with(entries, diag=(0.3, -0.2, 0.5, 0.1)):
    h = np.diag(np.array(diag, dtype=float))
    for (i, j), v in entries.items():
        h[i, j] = h[j, i] = v
    return h


def _nf_quiet(p, conv=COMM):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        return normal_form(p, conv)


def test_isotropic_operator(rng):
    p = normal_data_point([2.0] * 3, [0.0] * 3, np.diag([0.1, 0.2, 0.3, 0.4]))
    with pytest.warns(DegenerateSpectrum):
        nf = normal_form(p, COMM)
    assert np.allclose(nf.frame.matrix, np.eye(4))
    assert np.allclose(nf.a, 2.0) and np.allclose(nf.b, 0.0)


def test_standard_frame_recovered():
    p = normal_data_point(A0, B0, _hess_with({(0, 1): 0.7}))
    nf = normal_form(p, COMM)
    assert np.allclose(nf.frame.matrix, np.eye(4), atol=1e-12)
    assert np.allclose(nf.a, A0) and np.allclose(nf.b, B0)


def test_einstein_scramble_recover(rng):
    for _ in range(100):
        p = einstein_point(random_trace_free(rng), random_trace_free(rng), rng.uniform(1, 10))
        nf0 = normal_form(p, COMM)
        q = p.in_frame(Frame4(random_rotation(4, rng)))
        nf1 = normal_form(q, COMM)
        assert np.allclose(nf1.a, nf0.a, atol=1e-10) and np.allclose(nf1.b, nf0.b, atol=1e-10)
        assert abs(nf1.b.sum()) <= 1e-10


def test_reconstruction_and_residual(rng):
    for _ in range(300):
        p = random_soliton_point(rng)
        nf = normal_form(p, COMM)
        assert nf.offdiag_residual <= 1e-9
        assert np.allclose(nf.operator(), s_hat(p, COMM), atol=1e-9)
        local = nf.frame.express(s_hat(p, COMM))
        # S restricted to P_i and *P_i acts by a_i I + b_i *
        for i, (idx, sidx, _) in enumerate(PLANES):
            assert local[idx, idx] == pytest.approx(nf.a[i], abs=1e-9)
            assert local[sidx, idx] == pytest.approx(nf.b[i] * STAR[sidx, idx], abs=1e-9)


def test_rotation_covariance(rng):
    for _ in range(200):
        p = random_soliton_point(rng)
        r = random_rotation(4, rng)
        nf0 = normal_form(p, COMM)
        nf1 = normal_form(p.in_frame(Frame4(r)), COMM)
        assert np.allclose(nf0.a, nf1.a, atol=1e-9) and np.allclose(nf0.b, nf1.b, atol=1e-9)
        # eigenvector signs may flip in pairs, which can swap P_i with *P_i
        b0 = nf0.frame.bivector_basis
        b1 = Frame4(nf1.frame.matrix @ r).bivector_basis
        for idx, sidx, _ in PLANES:
            cands = (b0[:, idx], b0[:, sidx])
            assert min(np.linalg.norm(b1[:, idx] - sg * c) for c in cands for sg in (1, -1)) < 1e-8


def test_commutation_gate(rng):
    with pytest.raises(CommutationTooLarge):
        normal_form(random_soliton_point(rng), Convention.PAPER)


def test_is_pure():
    p = normal_data_point(A0, np.zeros(3), np.eye(4))
    assert is_pure(normal_form(p, COMM))
    nf = normal_form(normal_data_point(A0, [0.1, -0.1, 0.0], np.eye(4)), COMM)
    assert not is_pure(nf, 1e-6)


def test_obstructions_diagonal_hessian():
    p = normal_data_point(A0, B0, np.diag([0.4, -0.3, 0.2, 0.9]))
    obs = criticality_obstructions(p, normal_form(p, COMM))
    assert np.allclose(obs.o_sq, 0) and np.allclose(obs.o_sq_projection, 0, atol=1e-24)
    assert all(all(c) for c in obs.critical)


def test_obstructions_f12():
    p = normal_data_point(A0, B0, _hess_with({(0, 1): 1.0}))
    obs = criticality_obstructions(p, normal_form(p, COMM))
    assert np.allclose(obs.o_sq, [0, 0.25, 0.25])
    assert np.allclose(obs.o_sq_projection, [0, 0.25, 0.25], atol=1e-12)
    assert obs.o_sq.sum() == pytest.approx(0.5)
    assert obs.critical[0] == (True, True, True)
    assert obs.critical[1] == (False, False, False)


def test_obstructions_random(rng):
    for _ in range(1000):
        p = random_soliton_point(rng)
        obs = criticality_obstructions(p, normal_form(p, COMM))
        assert abs(obs.o_sq.sum() - 0.5 * np.sum(obs.offdiag_hess ** 2)) <= 1e-12
        assert np.allclose(obs.o_sq, obs.o_sq_projection, atol=1e-10)
        assert np.allclose(obs.offdiag_ric, -obs.offdiag_hess, atol=1e-12)


@pytest.mark.parametrize("i", range(3))
def test_criticality_equivalence(i):
    rng = np.random.default_rng(10 + i)
    _, _, ents = PLANES[i]
    others = [e for e in OFFDIAG if e not in ents]
    # positive case: only the entries that do not obstruct P_i are nonzero
    pos = normal_data_point(A0, B0, _hess_with({e: rng.uniform(0.2, 1) for e in others}))
    c = criticality_obstructions(pos, normal_form(pos, COMM)).critical[i]
    assert c == (True, True, True)
    # negative cases: any single obstructing entry breaks all three
    for e in ents:
        neg = normal_data_point(A0, B0, _hess_with({e: 0.3}))
        c = criticality_obstructions(neg, normal_form(neg, COMM)).critical[i]
        assert c == (False, False, False)


def test_star_partner_examples():
    p = normal_data_point(A0, B0, _hess_with({(0, 2): 1.0}))
    rep = star_partner_criticality(p, normal_form(p, COMM), 0)
    assert rep["same_set"]
    assert rep["o_sq"] == pytest.approx(0.25) and rep["o_sq_star"] == pytest.approx(0.25)
    p = normal_data_point(A0, B0, np.diag([1.0, 2, 3, 4]))
    nf = normal_form(p, COMM)
    for i in range(3):
        rep = star_partner_criticality(p, nf, i)
        assert rep["o_sq"] < 1e-24 and rep["o_sq_star"] < 1e-24


def test_star_partner_random(rng):
    for _ in range(1000):
        p = random_soliton_point(rng)
        nf = normal_form(p, COMM)
        for i in range(3):
            rep = star_partner_criticality(p, nf, i)
            assert rep["same_set"]
            assert abs(rep["o_sq"] - rep["o_sq_star"]) <= 1e-10


def test_kernel_slice_generic(rng):
    for _ in range(20):
        p = random_soliton_point(rng)
        nf = normal_form(p, COMM)
        for i in range(3):
            ks = kernel_slice(p, nf, i)
            assert ks.simple and ks.kernel.shape[1] == 2
            assert len(ks.elements) == 4
            assert ks.max_match_error <= 1e-8
            # each expected element is hit exactly once
            hits = [min(range(4), key=lambda k: np.linalg.norm(e - ks.elements[k])) for e in ks.expected]
            assert sorted(hits) == [0, 1, 2, 3]


def test_kernel_slice_isotropic():
    p = normal_data_point([1.5] * 3, [0.0] * 3, np.eye(4))
    nf = _nf_quiet(p)
    ks = kernel_slice(p, nf, 0)
    assert not ks.simple and ks.kernel.shape[1] == 6


def test_kernel_mixed_elements_not_decomposable():
    from solnorm.bivec import is_decomposable

    pp = wedge([1, 0, 0, 0], [0, 1, 0, 0])
    for x, y in ((0.6, 0.8), (-0.3, 0.2), (1.0, -1.0)):
        assert not is_decomposable(x * pp + y * (STAR @ pp))
