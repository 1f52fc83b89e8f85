import warnings

import numpy as np
import pytest

from solnorm import kcao
from solnorm.bivec import PAIRS, random_rotation
from solnorm.curv import Convention
from solnorm.normform import DegenerateSpectrum, normal_form
from solnorm.soliton import STANDARD_J, kahler_pattern_check

sp = pytest.importorskip("sympy")


def _chart():
    """Invariant metric on an Euler-angle chart with generic f, h and potential u."""
    t, psi, th, ph = sp.symbols("t psi theta phi")
    x = (t, psi, th, ph)
    f = sp.Rational(7, 10) + t / 5 + t ** 2 / 10
    h = sp.Rational(11, 10) + sp.Rational(3, 10) * sp.sin(t)
    u = sp.cos(t) + t ** 3 / 7
    # left-invariant forms with d s1 = -s2^s3; halving and negating gives d s1 = 2 s2^s3
    euler = sp.Matrix([
        [0, 1, 0, sp.cos(th)],
        [0, 0, sp.cos(psi), sp.sin(psi) * sp.sin(th)],
        [0, 0, -sp.sin(psi), sp.cos(psi) * sp.sin(th)],
    ])
    s = -euler / 2
    co = sp.Matrix.vstack(sp.Matrix([[1, 0, 0, 0]]), f * s[0, :], h * s[1, :], h * s[2, :])
    return x, f, h, u, co


@pytest.fixture(scope="module")
def chart_oracle():
    x, f, h, u, co = _chart()
    g = sp.simplify(co.T * co)
    ginv = g.inv()
    gam = [[[sum(ginv[r, l] * (sp.diff(g[l, a], x[b]) + sp.diff(g[l, b], x[a]) - sp.diff(g[a, b], x[l]))
                 for l in range(4)) / 2 for b in range(4)] for a in range(4)] for r in range(4)]
    pt = dict(zip(x, (0.8, 0.3, 1.1, 0.5)))

    def num(e):
        return float(e.subs(pt))

    gn = np.array([[[num(gam[r][a][b]) for b in range(4)] for a in range(4)] for r in range(4)])
    dgam = np.array([[[[num(sp.diff(gam[r][a][b], x[m])) for m in range(4)] for b in range(4)]
                      for a in range(4)] for r in range(4)])
    # R(d_m, d_v) d_s = R[r, s, m, v] d_r
    R = (np.einsum("rvsm->rsmv", dgam) - np.einsum("rmsv->rsmv", dgam)
         + np.einsum("rml,lvs->rsmv", gn, gn) - np.einsum("rvl,lms->rsmv", gn, gn))
    metric = np.array(g.subs(pt).evalf(), dtype=float)
    frame = np.linalg.inv(np.array(co.subs(pt).evalf(), dtype=float)).T
    rm = np.einsum("rsmv,am,bv,cs,rq,dq->abcd", R, frame, frame, frame, metric, frame)
    op = np.array([[rm[i, j, l, k] for (k, l) in PAIRS] for (i, j) in PAIRS])
    du = np.array([num(sp.diff(u, y)) for y in x])
    ddu = np.array([[num(sp.diff(u, y, z)) for z in x] for y in x])
    hess = frame @ (ddu - np.einsum("rab,r->ab", gn, du)) @ frame.T
    t = x[0]

    def d(e, k=1):
        return num(sp.diff(e, t, k))

    jet = (num(f), d(f), d(f, 2), num(h), d(h), d(h, 2))
    return op, hess, jet, (d(u), d(u, 2))


def test_frame_curvature_matches_chart(chart_oracle):
    op, _, jet, _ = chart_oracle
    assert np.max(np.abs(kcao.curvature_from_jet(*jet)[0] - op)) < 1e-12


def test_invariant_hessian_matches_chart(chart_oracle):
    _, hess, jet, ujet = chart_oracle
    assert np.max(np.abs(kcao.hessian_from_jet(*jet, *ujet)[0] - hess)) < 1e-12


def test_kahler_closure_symbolic():
    # d(E1^E2 + E3^E4) vanishes identically once f = h h'
    x, _, _, _, co = _chart()
    t = x[0]
    hh = sp.Function("h")(t)
    co = co.subs(sp.Rational(11, 10) + sp.Rational(3, 10) * sp.sin(t), hh)
    co = co.subs(sp.Rational(7, 10) + t / 5 + t ** 2 / 10, hh * sp.diff(hh, t))
    e = [co[k, :] for k in range(4)]
    w = (e[0].T * e[1] - e[1].T * e[0]) + (e[2].T * e[3] - e[3].T * e[2])
    for a in range(4):
        for b in range(4):
            for c in range(4):
                dw = sp.diff(w[b, c], x[a]) + sp.diff(w[c, a], x[b]) + sp.diff(w[a, b], x[c])
                assert sp.simplify(dw) == 0


def test_round_s4_calibration():
    pr = kcao.round_s4_profile(2001)
    curv, _ = kcao.grid_geometry(pr)
    assert np.max(np.abs(curv - np.eye(6))) <= 1e-6
    p = kcao.frame_curvature(pr, 1.0)
    assert np.allclose(p.ric, 3 * np.eye(4), atol=1e-6)


def test_flat_truncated():
    pr = kcao.analytic_profile(lambda t: t, np.ones_like, lambda t: t, np.ones_like, 1.0, 201, 0.0, eps=0.5)
    curv, _ = kcao.grid_geometry(pr)
    assert np.max(np.abs(curv)) <= 1e-6


def test_too_close_to_endpoint(kc_profile):
    with pytest.raises(kcao.TooCloseToEndpoint):
        kcao.frame_curvature(kc_profile, 0.0)
    with pytest.raises(kcao.TooCloseToEndpoint):
        kcao.frame_curvature(kc_profile, kc_profile.T)


def test_profile_residuals(kc_profile):
    res = kcao.check_profile(kc_profile)
    assert res["soliton_residual"] <= 1e-6
    assert res["trace_residual"] <= 1e-6
    assert res["kahler_residual"] <= 1e-8 and res["kahler_closure"] <= 1e-8
    assert res["nabla_j"] <= 1e-8 and res["j_invariance"] <= 1e-8
    assert res["ric_min_eigenvalue"] > 0
    assert res["hess_offdiag"] <= 1e-8


def test_profile_boundary_data(kc_profile):
    pr = kc_profile
    assert pr.df[0] == pytest.approx(1, abs=1e-10) and pr.df[-1] == pytest.approx(-1, abs=1e-10)
    assert abs(pr.du[0]) <= 1e-10 and abs(pr.du[-1]) <= 1e-10
    assert pr.h[0] ** 2 == pytest.approx(2, abs=1e-9) and pr.h[-1] ** 2 == pytest.approx(6, abs=1e-8)
    pr.validate()


def test_shooting_parameter_matches_closed_form(kc_profile):
    assert kc_profile.meta["mu"] == pytest.approx(kcao.koiso_cao_constant(), abs=1e-9)


def test_resolve_from_other_guess(kc_profile):
    other = kcao.solve_soliton(kcao.SolverConfig(grid=2001, h0_guess=1.6, mu_guess=0.6))
    assert other.meta["mu"] == pytest.approx(kc_profile.meta["mu"], abs=1e-9)
    assert other.meta["h0"] == pytest.approx(kc_profile.meta["h0"], abs=1e-9)


def test_shooting_diverged():
    with pytest.raises(kcao.ShootingDiverged):
        kcao.solve_soliton(kcao.SolverConfig(max_iter=0))
    with pytest.raises(kcao.ShootingDiverged):
        kcao.solve_soliton(kcao.SolverConfig(h0_guess=0.2, mu_guess=5.0, t_max=2.0))


def test_scaling_covariance(kc_profile):
    c = 1.7
    big = kcao.scaled(kc_profile, c)
    assert big.lam == pytest.approx(1 / c ** 2)
    idx = np.arange(100, len(big.t) - 100, 97)
    assert np.max(kcao.soliton_residuals(big, idx)) <= 1e-6 / c ** 2 * 2
    big.validate(kahler_tol=1e-8 * c)


def test_invariant_function_hessian_diagonal(kc_profile):
    idx = np.arange(5, len(kc_profile.t) - 5, 50)
    jet = [np.asarray(a)[idx] for a in kc_profile.jet()]
    t = kc_profile.t[idx]
    for u1, u2 in ((jet[6], jet[7]), (2 * t, 2 * np.ones_like(t)), (np.cos(t), -np.sin(t))):
        hess = kcao.hessian_from_jet(*jet[:6], u1, u2)
        off = hess - np.einsum("nii->ni", hess)[:, :, None] * np.eye(4)
        assert np.max(np.abs(off)) <= 1e-8


def test_kahler_pattern_on_profile(kc_profile):
    p = kcao.frame_curvature(kc_profile, kc_profile.T / 3)
    rep = kahler_pattern_check(p, STANDARD_J, Convention.COMMUTING, tol=1e-6)
    assert rep["gap"] > 1e-3 and rep["omega_leak"] <= 1e-6


def test_normal_form_on_profile(kc_profile):
    p = kcao.frame_curvature(kc_profile, kc_profile.T / 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        nf = normal_form(p, Convention.COMMUTING, tol=1e-5)
    assert nf.offdiag_residual <= 1e-6


def test_verify_midpoint(kc_profile):
    k = len(kc_profile.t) // 2
    rep = kcao.check_point(kcao.frame_points(kc_profile, [k])[k])
    assert all(rep["passed"].values())


def test_verify_near_endpoints(kc_profile):
    rep = kcao.verify_theorem_kc(kc_profile, n=20, tol=1e-4, obstruction_tol=1e-4, margin=1e-3)
    assert rep["ok"]


def test_verify_common_normal_form(kc_profile):
    rep = kcao.verify_theorem_kc(kc_profile, n=100)
    assert rep["n"] >= 100 and rep["ok"]


def test_scrambled_frame(kc_profile, rng):
    p = kcao.frame_curvature(kc_profile, kc_profile.T / 2)
    nf0 = kcao.frame_normal_form(p)
    for _ in range(5):
        q, nf = kcao.scrambled_recovery(p, random_rotation(4, rng))
        rep = kcao.check_point(q)
        assert not rep["passed"]["a"] and not rep["passed"]["b"]
        assert np.allclose(np.sort(nf.a), np.sort(nf0.a), atol=1e-6)
        assert np.allclose(np.sort(nf.b), np.sort(nf0.b), atol=1e-6)


def test_csv_round_trip(kc_profile, kc_csv):
    back = kcao.import_profile(kc_csv)
    for name in kcao.CohomProfile.ARRAYS:
        assert np.array_equal(getattr(back, name), getattr(kc_profile, name))
    assert back.lam == kc_profile.lam and back.meta["mu"] == kc_profile.meta["mu"]


def test_csv_truncated(kc_csv, tmp_path):
    lines = kc_csv.read_text().splitlines()
    bad = tmp_path / "cut.csv"
    bad.write_text("\n".join(lines[:50] + [lines[50][:20]]) + "\n")
    with pytest.raises(kcao.FormatError):
        kcao.import_profile(bad)
    bad.write_text("t,f\n1,2\n")
    with pytest.raises(kcao.FormatError):
        kcao.import_profile(bad)


def test_csv_negative_f(kc_csv, tmp_path):
    lines = kc_csv.read_text().splitlines()
    row = lines[100].split(",")
    row[1] = "-" + row[1]
    lines[100] = ",".join(row)
    bad = tmp_path / "neg.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(kcao.InvariantViolation):
        kcao.import_profile(bad)
