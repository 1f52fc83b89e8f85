"""U(2)-invariant Kahler-Ricci soliton on the one-point blow-up of CP^2.

Metrics are ``dt^2 + f(t)^2 s1^2 + h(t)^2 (s2^2 + s3^2)`` on ``(0, T) x S^3``,
written in the orthonormal frame ``E1 = d/dt, E2 = X/f, E3 = Y/h, E4 = Z/h``
where ``X, Y, Z`` are invariant fields on the unit 3-sphere with
``[X, Y] = -2 Z`` (and cyclically). With this bracket sign the form
``E1^E2 + E3^E4`` is closed exactly when ``f = h h'``.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .bivec import STAR, Frame4, to_hodge
from .curv import Convention, operator_from_tensor, ricci_of
from .normform import (
    DegenerateSpectrum,
    NormalForm,
    criticality_obstructions,
    normal_form,
    star_partner_criticality,
)
from .soliton import STANDARD_J, NotKahler, SolitonPoint, kahler_pattern_check, s_hat

BRACKET_SIGN = -1.0
CSV_HEADER = ["t", "f", "h", "u", "df", "dh", "du", "d2u", "lambda"]


class FormatError(ValueError):
    pass


class InvariantViolation(ValueError):
    pass


class TooCloseToEndpoint(ValueError):
    pass


class ShootingDiverged(RuntimeError):
    pass


class ConstraintDrift(RuntimeError):
    pass


@dataclass
class CohomProfile:
    t: np.ndarray
    f: np.ndarray
    h: np.ndarray
    u: np.ndarray
    df: np.ndarray
    dh: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    lam: float = 1.0
    kahler: bool = True
    meta: dict = field(default_factory=dict)

    ARRAYS = ("t", "f", "h", "u", "df", "dh", "du", "d2u")

    def __post_init__(self):
        for name in self.ARRAYS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        self.lam = float(self.lam)

    @property
    def T(self):
        return float(self.t[-1])

    @property
    def step(self):
        return float(np.max(np.diff(self.t)))

    @cached_property
    def _ddf(self):
        return CubicSpline(self.t, self.df).derivative()

    @cached_property
    def _ddh(self):
        return CubicSpline(self.t, self.dh).derivative()

    @cached_property
    def _interp(self):
        return {
            "f": CubicHermiteSpline(self.t, self.f, self.df),
            "h": CubicHermiteSpline(self.t, self.h, self.dh),
            "df": CubicSpline(self.t, self.df),
            "dh": CubicSpline(self.t, self.dh),
            "du": CubicSpline(self.t, self.du),
            "d2u": CubicSpline(self.t, self.d2u),
        }

    def jet(self, t=None):
        """``(f, f', f'', h, h', h'', u', u'')`` at grid nodes (``t=None``) or at given times.

        Second derivatives of ``f`` and ``h`` come from a cubic spline through
        the stored first derivatives, not from the ODE.
        """
        if t is None:
            return (self.f, self.df, self._ddf(self.t), self.h, self.dh, self._ddh(self.t),
                    self.du, self.d2u)
        t = np.asarray(t, dtype=float)
        ip = self._interp
        return (ip["f"](t), ip["df"](t), self._ddf(t), ip["h"](t), ip["dh"](t), self._ddh(t),
                ip["du"](t), ip["d2u"](t))

    def interior(self):
        return np.arange(1, len(self.t) - 1)

    def validate(self, bvp_tol=1e-8, kahler_tol=1e-8, ode_tol=1e-6, check_soliton=True):
        n = len(self.t)
        if any(len(getattr(self, k)) != n for k in self.ARRAYS) or n < 5:
            raise InvariantViolation("profile arrays have inconsistent or too short length")
        if np.any(np.diff(self.t) <= 0) or self.t[0] != 0.0:
            raise InvariantViolation("time grid must start at 0 and increase")
        inner = slice(1, n - 1)
        if np.any(self.f[inner] <= 0) or np.any(self.h[inner] <= 0):
            raise InvariantViolation("f and h must be positive on the open interval")
        if self.f[0] != 0.0 or self.f[-1] != 0.0:
            raise InvariantViolation("f must vanish at both ends")
        if abs(self.df[0] - 1) > bvp_tol or abs(self.df[-1] + 1) > bvp_tol:
            raise InvariantViolation("fibre does not close smoothly (f' != +-1 at the ends)")
        if abs(self.du[0]) > bvp_tol or abs(self.du[-1]) > bvp_tol:
            raise InvariantViolation("u' must vanish at both ends")
        if self.kahler:
            k = kahler_residual(self)
            if k > kahler_tol:
                raise InvariantViolation(f"Kahler residual {k:.3e} exceeds {kahler_tol:.1e}")
        if check_soliton:
            r = soliton_residuals(self).max()
            if r > ode_tol:
                raise InvariantViolation(f"soliton residual {r:.3e} exceeds {ode_tol:.1e}")
        return self


def kahler_residual(profile):
    return float(np.max(np.abs(profile.f - profile.h * profile.dh)))


# ---- frame geometry -------------------------------------------------------

def structure_constants(f, f1, f2, h, h1, h2):
    """``c[i,j,k] = <[E_i, E_j], E_k>`` and its t-derivative, batched over the leading axis."""
    f, f1, f2, h, h1, h2 = np.broadcast_arrays(*map(np.atleast_1d, (f, f1, f2, h, h1, h2)))
    n = f.shape[0]
    c = np.zeros((n, 4, 4, 4))
    dc = np.zeros((n, 4, 4, 4))
    eps = BRACKET_SIGN
    entries = [
        ((0, 1, 1), -f1 / f, -(f2 * f - f1 ** 2) / f ** 2),
        ((0, 2, 2), -h1 / h, -(h2 * h - h1 ** 2) / h ** 2),
        ((0, 3, 3), -h1 / h, -(h2 * h - h1 ** 2) / h ** 2),
        ((1, 2, 3), 2 * eps / f, -2 * eps * f1 / f ** 2),
        ((2, 3, 1), 2 * eps * f / h ** 2, 2 * eps * (f1 / h ** 2 - 2 * f * h1 / h ** 3)),
        ((3, 1, 2), 2 * eps / f, -2 * eps * f1 / f ** 2),
    ]
    for (i, j, k), v, dv in entries:
        c[:, i, j, k] = v
        c[:, j, i, k] = -v
        dc[:, i, j, k] = dv
        dc[:, j, i, k] = -dv
    return c, dc


def connection(c):
    """Koszul formula in an orthonormal frame: ``G[i,j,k] = <nabla_{E_i} E_j, E_k>``."""
    return 0.5 * (c - np.einsum("njki->nijk", c) + np.einsum("nkij->nijk", c))


def curvature_from_jet(f, f1, f2, h, h1, h2):
    """Batched curvature operators (N, 6, 6) of the invariant metric in the frame."""
    c, dc = structure_constants(f, f1, f2, h, h1, h2)
    g = connection(c)
    dg = connection(dc)
    n = g.shape[0]
    # E_i acts on functions of t only through E_1 = d/dt
    d_dir = np.zeros((n, 4, 4, 4, 4))
    d_dir[:, 0] = dg
    # R(E_i,E_j)E_k = sum_n rt[i,j,k,n] E_n
    rt = (d_dir - np.einsum("njiko->nijko", d_dir)
          + np.einsum("njkm,nimo->nijko", g, g) - np.einsum("nikm,njmo->nijko", g, g)
          - np.einsum("nijm,nmko->nijko", c, g))
    # <R(e_i^e_j), e_k^e_l> = <R(E_i,E_j)E_l, E_k>
    riem = np.einsum("nijlk->nijkl", rt)
    return operator_from_tensor(riem)


def hessian_from_jet(f, f1, f2, h, h1, h2, u1, u2):
    """Hessian of an invariant function ``u(t)`` in the frame."""
    c, _ = structure_constants(f, f1, f2, h, h1, h2)
    g = connection(c)
    u1 = np.atleast_1d(u1)
    u2 = np.atleast_1d(u2)
    hess = -g[:, :, :, 0] * u1[:, None, None]
    hess[:, 0, 0] += u2
    return 0.5 * (hess + np.transpose(hess, (0, 2, 1)))


def ricci_batch(curv):
    """Ricci tensors of a batch of curvature operators."""
    return ricci_of(curv)


def grid_geometry(profile, idx=None):
    """Curvature operators and Hessians at grid nodes ``idx`` (default: interior)."""
    if idx is None:
        idx = profile.interior()
    jet = [np.asarray(a)[idx] for a in profile.jet()]
    curv = curvature_from_jet(*jet[:6])
    hess = hessian_from_jet(*jet)
    return curv, hess


def soliton_residuals(profile, idx=None):
    curv, hess = grid_geometry(profile, idx)
    ric = ricci_batch(curv)
    res = ric + hess - profile.lam * np.eye(4)
    return np.max(np.abs(res), axis=(1, 2))


def frame_curvature(profile, t):
    """:class:`SolitonPoint` at time ``t`` in the frame ``(d/dt, X/f, Y/h, Z/h)``."""
    if t < profile.t[0] + profile.step or t > profile.t[-1] - profile.step:
        raise TooCloseToEndpoint(f"t={t} is within one grid step of an end")
    jet = [np.atleast_1d(a) for a in profile.jet(np.array([t]))]
    curv = curvature_from_jet(*jet[:6])[0]
    hess = hessian_from_jet(*jet)[0]
    return SolitonPoint(0.5 * (curv + curv.T), hess, profile.lam)


def frame_points(profile, idx=None):
    if idx is None:
        idx = profile.interior()
    curv, hess = grid_geometry(profile, idx)
    return {int(k): SolitonPoint(0.5 * (c + c.T), hm, profile.lam) for k, c, hm in zip(idx, curv, hess)}


def kahler_form_closure(profile, idx=None):
    """Max over nodes of the components of ``d(E1^E2 + E3^E4)``, from the structure constants."""
    if idx is None:
        idx = profile.interior()
    jet = [np.asarray(a)[idx] for a in profile.jet()]
    c, _ = structure_constants(*jet[:6])
    omega = np.zeros((4, 4))
    omega[0, 1], omega[1, 0], omega[2, 3], omega[3, 2] = 1, -1, 1, -1
    # constant frame components: d omega(X,Y,Z) = -w([X,Y],Z) + w([X,Z],Y) - w([Y,Z],X)
    w_br = np.einsum("nijk,kl->nijl", c, omega)
    out = 0.0
    for a, b, cc in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        val = -w_br[:, a, b, cc] + w_br[:, a, cc, b] - w_br[:, b, cc, a]
        out = max(out, float(np.max(np.abs(val))))
    return out


def complex_structure_parallel(profile, idx=None):
    """Max of ``|nabla J|`` for ``J E1 = E2, J E3 = E4`` over the nodes."""
    if idx is None:
        idx = profile.interior()
    jet = [np.asarray(a)[idx] for a in profile.jet()]
    c, _ = structure_constants(*jet[:6])
    g = connection(c)
    # nabla_i E_j = sum_k g[i,j,k] E_k; J matrix acts on component vectors
    conn = np.einsum("nijk->nikj", g)
    comm = np.einsum("nikj,jl->nikl", conn, STANDARD_J) - np.einsum("kj,nijl->nikl", STANDARD_J, conn)
    return float(np.max(np.abs(comm)))


def j_invariance(profile, idx=None):
    curv, hess = grid_geometry(profile, idx)
    ric = ricci_batch(curv)
    J = STANDARD_J
    rj = np.einsum("ji,njk,kl->nil", J, ric, J) - ric
    hj = np.einsum("ji,njk,kl->nil", J, hess, J) - hess
    return float(max(np.max(np.abs(rj)), np.max(np.abs(hj))))


# ---- construction ----------------------------------------------------------

@dataclass
class SolverConfig:
    grid: int = 10_001
    rtol: float = 1e-12
    atol: float = 1e-14
    bvp_tol: float = 1e-10
    max_iter: int = 50
    h0_guess: float = 1.2
    mu_guess: float = 0.3
    t_max: float = 50.0
    kahler_tol: float = 1e-8


def _rhs(mu):
    # lambda = 1; u' = mu f makes J grad u a multiple of the fibre field
    def rhs(t, y):
        h, f, u = y
        return [f / h, 2 - f * f / (h * h) + mu * f * f / 2 - h * h / 2, mu * f]
    return rhs


def _closing_event(t, y):
    return y[1]


_closing_event.terminal = True
_closing_event.direction = -1


def _shoot(theta, cfg, dense=False):
    h0, mu = theta
    rhs = _rhs(mu)
    sol = solve_ivp(rhs, (0.0, cfg.t_max), [h0, 0.0, 0.0], method="DOP853", rtol=cfg.rtol,
                    atol=cfg.atol, events=_closing_event, dense_output=dense, first_step=1e-4)
    if not sol.t_events[0].size:
        return None
    T = float(sol.t_events[0][0])
    yT = sol.y_events[0][0]
    f0_slope = rhs(0.0, [h0, 0.0, 0.0])[1]
    fT_slope = rhs(T, yT)[1]
    return np.array([f0_slope - 1.0, fT_slope + 1.0]), T, sol


def solve_soliton(cfg=None):
    """Shoot from the collapsing end for ``theta = (h(0), u''(0))`` by damped Newton."""
    cfg = cfg or SolverConfig()
    theta = np.array([cfg.h0_guess, cfg.mu_guess])
    out = _shoot(theta, cfg)
    if out is None:
        raise ShootingDiverged("initial guess never closes the fibre")
    res = out[0]
    history = [float(np.max(np.abs(res)))]
    for _ in range(cfg.max_iter):
        if np.max(np.abs(res)) <= cfg.bvp_tol:
            break
        jac = np.empty((2, 2))
        for k in range(2):
            d = np.zeros(2)
            d[k] = 1e-7 * max(1.0, abs(theta[k]))
            shifted = _shoot(theta + d, cfg)
            if shifted is None:
                shifted = _shoot(theta - d, cfg)
                d = -d
            if shifted is None:
                raise ShootingDiverged("Jacobian probe never closes the fibre")
            jac[:, k] = (shifted[0] - res) / d[k]
        step = np.linalg.solve(jac, -res)
        scale = 1.0
        while True:
            trial = _shoot(theta + scale * step, cfg)
            if trial is not None and np.max(np.abs(trial[0])) < np.max(np.abs(res)):
                break
            scale /= 2
            if scale < 1e-6:
                raise ShootingDiverged("line search failed")
        theta = theta + scale * step
        res = trial[0]
        history.append(float(np.max(np.abs(res))))
    else:
        raise ShootingDiverged(f"no convergence after {cfg.max_iter} iterations")
    _, T, sol = _shoot(theta, cfg, dense=True)
    h0, mu = theta
    t = np.linspace(0.0, T, cfg.grid)
    h, f, u = sol.sol(t)
    f[0] = f[-1] = 0.0
    rhs = _rhs(mu)
    df = np.array([rhs(0.0, [hh, ff, 0.0])[1] for hh, ff in zip(h, f)])
    dh = f / h
    drift = float(np.max(np.abs(f - h * dh)))
    if drift > cfg.kahler_tol:
        raise ConstraintDrift(f"Kahler constraint drifted to {drift:.3e}")
    u = u - u[0]
    profile = CohomProfile(t, f, h, u, df, dh, mu * f, mu * df, lam=1.0)
    profile.meta = {
        "solver": {k: getattr(cfg, k) for k in cfg.__dataclass_fields__},
        "h0": float(h0),
        "mu": float(mu),
        "T": T,
        "newton_history": history,
    }
    return profile


def scaled(profile, c):
    """The profile of the metric ``c^2 g``; its soliton constant is ``lam / c^2``."""
    return CohomProfile(profile.t * c, profile.f * c, profile.h * c, profile.u, profile.df,
                        profile.dh, profile.du / c, profile.d2u / c ** 2, profile.lam / c ** 2,
                        profile.kahler, dict(profile.meta))


def analytic_profile(f_fn, df_fn, h_fn, dh_fn, T, n, lam, kahler=False, eps=0.0):
    """Profile with ``u = 0`` from closed-form ``f`` and ``h`` (calibration and flat tests)."""
    t = np.linspace(eps, T, n)
    t = t - t[0]
    tt = t + eps
    f = f_fn(tt)
    if eps == 0.0:
        f[0] = 0.0
    f[-1] = 0.0 if abs(f[-1]) < 1e-12 else f[-1]
    z = np.zeros(n)
    return CohomProfile(t, f, h_fn(tt), z, df_fn(tt), dh_fn(tt), z, z, lam, kahler)


def round_s4_profile(n=2001):
    """Unit round 4-sphere: ``f = h = sin t`` on ``[0, pi]``, Einstein with ``lam = 3``."""
    return analytic_profile(np.sin, np.cos, np.sin, np.cos, np.pi, n, 3.0)


# ---- verification ----------------------------------------------------------

def frame_normal_form(p, frame=None, convention=Convention.COMMUTING):
    """Read ``(a, b)`` off the Hodge diagonal of ``S`` in a given frame."""
    frame = frame or Frame4.standard()
    local = to_hodge(frame.express(s_hat(p, convention, tol=None)))
    d = np.diag(local)
    sp, sm = d[:3], d[3:]
    gaps = np.vstack([[min(abs(w[i] - w[j]) for j in range(3) if j != i) for i in range(3)]
                      for w in (sp, sm)])
    return NormalForm(frame, (sp + sm) / 2, (sp - sm) / 2,
                      float(np.max(np.abs(local - np.diag(d)))), gaps, convention)


def _offdiag(m):
    return float(np.max(np.abs(m - np.diag(np.diag(m)))))


def check_point(p, tol=1e-6, obstruction_tol=1e-8, gap_min=1e-3):
    """The five checks of the common-normal-form statement at one point."""
    conv = Convention.COMMUTING
    s = to_hodge(s_hat(p, conv, tol=None))
    r = to_hodge(p.curv)
    r_blocks = max(_offdiag(r[:3, :3]), _offdiag(r[3:, 3:]), _offdiag(r[:3, 3:]))
    try:
        pat = kahler_pattern_check(p, STANDARD_J, conv, tol=1e-6)
    except NotKahler:
        # reported as a failed check (c), e.g. in a scrambled frame
        pat = {"omega_leak": float("inf"), "repeat_spread": float("inf"), "gap": 0.0}
    sm = s[3:, 3:]
    s_minus_scalar = max(abs(sm[1, 1] - sm[2, 2]), abs(sm[1, 2]))
    nf = frame_normal_form(p, convention=conv)
    obs = criticality_obstructions(p, nf)
    star = [star_partner_criticality(p, nf, i)["o_sq_star"] for i in range(3)]
    worst_obs = float(max(np.max(obs.o_sq_projection), max(star)))
    out = {
        "s_diagonal": _offdiag(s),
        "r_block_diagonal": r_blocks,
        "kahler_leak": max(pat["omega_leak"], abs(pat["repeat_spread"])),
        "kahler_gap": pat["gap"],
        "s_minus_scalar": float(s_minus_scalar),
        "obstruction": worst_obs,
    }
    out["passed"] = {
        "a": out["s_diagonal"] <= tol,
        "b": out["r_block_diagonal"] <= tol,
        "c": out["kahler_leak"] <= tol and out["kahler_gap"] > gap_min,
        "d": out["s_minus_scalar"] <= tol,
        "e": out["obstruction"] <= obstruction_tol,
    }
    return out


def verify_theorem_kc(profile, n=100, tol=1e-6, obstruction_tol=1e-8, margin=0.02):
    """Run :func:`check_point` at ``n`` interior grid nodes spread over ``[margin T, (1-margin) T]``."""
    lo, hi = margin * profile.T, (1 - margin) * profile.T
    idx = np.unique(np.searchsorted(profile.t, np.linspace(lo, hi, n)))
    points = frame_points(profile, idx)
    samples = []
    for k in idx:
        rep = check_point(points[int(k)], tol, obstruction_tol)
        rep["t"] = float(profile.t[k])
        samples.append(rep)
    keys = ("s_diagonal", "r_block_diagonal", "kahler_leak", "s_minus_scalar", "obstruction")
    summary = {k: max(s[k] for s in samples) for k in keys}
    summary["kahler_gap_min"] = min(s["kahler_gap"] for s in samples)
    passed = {c: all(s["passed"][c] for s in samples) for c in "abcde"}
    return {"samples": samples, "summary": summary, "passed": passed, "ok": all(passed.values()),
            "n": len(samples), "tol": tol, "obstruction_tol": obstruction_tol}


def scrambled_recovery(p, rotation):
    """Express ``p`` in a rotated frame and recover the normal form there."""
    q = p.in_frame(Frame4(rotation))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        nf = normal_form(q, Convention.COMMUTING)
    return q, nf


def check_profile(profile, ode_tol=1e-6):
    """Residual summary used by the CLI and the acceptance suite."""
    idx = profile.interior()
    curv, hess = grid_geometry(profile, idx)
    ric = ricci_batch(curv)
    scal = np.trace(ric, axis1=1, axis2=2)
    lap = np.trace(hess, axis1=1, axis2=2)
    ric_eigs = np.linalg.eigvalsh(ric)
    return {
        "soliton_residual": float(np.max(np.abs(ric + hess - profile.lam * np.eye(4)))),
        "trace_residual": float(np.max(np.abs(scal + lap - 4 * profile.lam))),
        "kahler_residual": kahler_residual(profile),
        "kahler_closure": kahler_form_closure(profile, idx),
        "nabla_j": complex_structure_parallel(profile, idx),
        "j_invariance": j_invariance(profile, idx),
        "ric_min_eigenvalue": float(np.min(ric_eigs)),
        "hess_offdiag": float(np.max(np.abs(hess - np.einsum("nii->ni", hess)[:, :, None] * np.eye(4)))),
        "ode_tol": ode_tol,
    }


# ---- serialization ---------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


def export_profile(profile, path, extra_meta=None):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for k in range(len(profile.t)):
            w.writerow([_fmt(getattr(profile, a)[k]) for a in CohomProfile.ARRAYS] + [_fmt(profile.lam)])
    meta = dict(profile.meta)
    meta["kahler"] = profile.kahler
    if extra_meta:
        meta.update(extra_meta)
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, default=float))
    return path


def import_profile(path, validate=True, **tols):
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(str(exc)) from None
    if not rows or rows[0] != CSV_HEADER:
        raise FormatError(f"{path}: header must be {','.join(CSV_HEADER)}")
    data = []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise FormatError(f"{path}:{n}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            data.append([float(x) for x in row])
        except ValueError:
            raise FormatError(f"{path}:{n}: non-numeric field") from None
    if len(data) < 5:
        raise FormatError(f"{path}: need at least 5 rows")
    arr = np.array(data)
    lam = arr[:, -1]
    if np.any(lam != lam[0]):
        raise FormatError(f"{path}: lambda column is not constant")
    meta = {}
    side = Path(str(path) + ".json")
    if side.exists():
        meta = json.loads(side.read_text())
    kahler = bool(meta.get("kahler", True))
    profile = CohomProfile(*arr[:, :8].T, lam=lam[0], kahler=kahler, meta=meta)
    if validate:
        try:
            profile.validate(**tols)
        except InvariantViolation as exc:
            raise InvariantViolation(f"{path}: {exc}") from None
    return profile


def koiso_cao_constant():
    """Root of ``int_2^6 r (2 - r/2) exp(-mu r / 2) dr = 0`` (closed form in mu)."""
    from scipy.optimize import brentq

    def g(mu):
        # antiderivative of r(2 - r/2) e^{-a r}, a = mu/2
        a = mu / 2

        def prim(r):
            p = 2 * r - r * r / 2
            dp = 2 - r
            ddp = -1.0
            return -math.exp(-a * r) * (p / a + dp / a ** 2 + ddp / a ** 3)
        return prim(6.0) - prim(2.0)

    return brentq(g, 0.05, 3.0, xtol=1e-15, rtol=1e-15)
