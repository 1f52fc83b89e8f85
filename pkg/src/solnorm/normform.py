"""Normal form of the soliton operator and the criticality diagnostics built on it."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .bivec import HODGE, STAR, Frame4, lift_to_so4, plucker, to_hodge
from .config import resolve_convention
from .curv import Convention
from .soliton import commutation_residual, s_hat

COMMUTATION_TOL = 1e-8
DEGENERATE_GAP = 1e-8

# Bivector index of P_i = e1^e_{i+1}, of *P_i, and the Hessian entries obstructing it.
PLANES = (
    (0, 5, ((0, 2), (0, 3), (1, 2), (1, 3))),
    (1, 4, ((0, 1), (0, 3), (1, 2), (2, 3))),
    (2, 3, ((0, 1), (0, 2), (1, 3), (2, 3))),
)
OFFDIAG = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class CommutationTooLarge(ValueError):
    pass


class DegenerateSpectrum(UserWarning):
    pass


@dataclass
class NormalForm:
    frame: Frame4
    a: np.ndarray
    b: np.ndarray
    offdiag_residual: float
    eigen_gaps: np.ndarray
    convention: Convention

    @property
    def s_plus(self):
        return self.a + self.b

    @property
    def s_minus(self):
        return self.a - self.b

    def hodge_diagonal(self):
        return np.concatenate([self.s_plus, self.s_minus])

    def operator(self):
        """Rebuild ``S`` in the coordinates of the original point."""
        local = HODGE.T @ np.diag(self.hodge_diagonal()) @ HODGE
        p = self.frame.bivector_basis
        return p @ local @ p.T


@dataclass
class Obstructions:
    o_sq: np.ndarray
    o_sq_projection: np.ndarray
    offdiag_hess: np.ndarray
    offdiag_ric: np.ndarray
    critical: tuple


def _sorted_eigh(block):
    w, v = np.linalg.eigh(block)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    for k in range(3):
        lead = v[np.flatnonzero(np.abs(v[:, k]) > 1e-12)[0], k]
        if lead < 0:
            v[:, k] = -v[:, k]
    if np.linalg.det(v) < 0:
        v[:, 2] = -v[:, 2]
    return w, v


def _gaps(w):
    return np.array([min(abs(w[i] - w[j]) for j in range(3) if j != i) for i in range(3)])


def normal_form(p, convention=None, tol=COMMUTATION_TOL):
    """Frame in which ``S`` is diagonal in the Hodge basis, with its ``(a, b)`` data.

    Eigenvalues are sorted in decreasing order in each block and paired by
    index; ``a = (s+ + s-)/2`` and ``b = (s+ - s-)/2``. ``tol`` bounds the
    commutator with the Hodge star that is accepted before diagonalizing.
    """
    conv = resolve_convention(convention)
    res = commutation_residual(p, conv)
    if res > tol:
        raise CommutationTooLarge(f"|S* - *S| = {res:.3e} under the {conv.value} convention")
    s = s_hat(p, conv, tol=None)
    t = to_hodge(s)
    wp, qp = _sorted_eigh(t[:3, :3])
    wm, qm = _sorted_eigh(t[3:, 3:])
    gaps = np.vstack([_gaps(wp), _gaps(wm)])
    if np.min(gaps) < DEGENERATE_GAP:
        warnings.warn("repeated eigenvalue: normal-form frame is not unique", DegenerateSpectrum, stacklevel=2)
    frame = Frame4(lift_to_so4(qp, qm).T)
    local = to_hodge(frame.express(s))
    resid = float(np.max(np.abs(local - np.diag(np.diag(local)))))
    return NormalForm(frame, (wp + wm) / 2, (wp - wm) / 2, resid, gaps, conv)


def is_pure(nf, tol=1e-10):
    return bool(np.max(np.abs(nf.b)) <= tol)


def _projection_norm(op_local, idx):
    """Squared norm of ``op(P)`` after removing its components along ``P`` and ``*P``."""
    e = np.zeros(6)
    e[idx] = 1.0
    partner = STAR @ e
    v = op_local @ e
    v = v - (v @ e) * e - (v @ partner) * partner
    return float(v @ v)


def criticality_obstructions(p, nf, tol=1e-12):
    f = nf.frame.express_form(p.hess)
    ric = nf.frame.express_form(p.ric)
    r_local = nf.frame.express(p.curv)
    o_sq = np.array([0.25 * sum(f[i, j] ** 2 for i, j in ents) for _, _, ents in PLANES])
    proj = np.array([_projection_norm(r_local, idx) for idx, _, _ in PLANES])
    critical = []
    for (idx, _, ents), o in zip(PLANES, proj):
        critical.append((
            o <= tol,
            all(abs(f[i, j]) <= np.sqrt(tol) for i, j in ents),
            all(abs(ric[i, j]) <= np.sqrt(tol) for i, j in ents),
        ))
    return Obstructions(
        o_sq=o_sq,
        o_sq_projection=proj,
        offdiag_hess=np.array([f[i, j] for i, j in OFFDIAG]),
        offdiag_ric=np.array([ric[i, j] for i, j in OFFDIAG]),
        critical=tuple(critical),
    )


def star_partner_criticality(p, nf, i):
    idx, star_idx, ents = PLANES[i]
    r_local = nf.frame.express(p.curv)
    # *P_i has the same complementary index pairs as P_i
    pair = {0: (0, 1), 1: (0, 2), 2: (0, 3)}[i]
    comp = tuple(k for k in range(4) if k not in pair)
    star_ents = tuple((a, b) for a, b in OFFDIAG if {a, b} not in ({*pair}, {*comp}))
    return {
        "plane": i,
        "obstruction_set": ents,
        "star_obstruction_set": star_ents,
        "same_set": set(ents) == set(star_ents),
        "o_sq": _projection_norm(r_local, idx),
        "o_sq_star": _projection_norm(r_local, star_idx),
    }


@dataclass
class KernelSlice:
    kernel: np.ndarray
    simple: bool
    elements: list
    expected: list
    max_match_error: float


def kernel_slice(p, nf, i, tol=1e-9, samples=10_000):
    """Unit decomposable bivectors in ``ker(S - a_i - b_i *)``.

    In the simple case the kernel is two-dimensional and the Plucker quadric
    restricted to its unit circle is scanned for sign changes and polished
    with Brent's method. Otherwise the whole kernel is returned with
    ``simple=False``.
    """
    idx, star_idx, _ = PLANES[i]
    s = s_hat(p, nf.convention, tol=None)
    op = s - nf.a[i] * np.eye(6) - nf.b[i] * STAR
    _, sv, vt = np.linalg.svd(op)
    kernel = vt[sv < tol].T
    simple = bool(nf.eigen_gaps[0, i] > DEGENERATE_GAP and nf.eigen_gaps[1, i] > DEGENERATE_GAP)
    basis = nf.frame.bivector_basis
    expected = [sg * basis[:, k] for k in (idx, star_idx) for sg in (1, -1)]
    if not simple or kernel.shape[1] != 2:
        return KernelSlice(kernel, False, [], expected, float("nan"))
    v1, v2 = kernel[:, 0], kernel[:, 1]

    def q(t):
        return plucker(np.cos(t) * v1 + np.sin(t) * v2)

    grid = np.linspace(0.0, 2 * np.pi, samples + 1)
    vals = np.array([q(t) for t in grid])
    roots = []
    for t0, t1, q0, q1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if q0 == 0.0:
            roots.append(t0)
        elif q0 * q1 < 0:
            roots.append(brentq(q, t0, t1, xtol=1e-15))
    elements = [np.cos(t) * v1 + np.sin(t) * v2 for t in roots]
    err = max(min(np.linalg.norm(e - x) for x in expected) for e in elements) if elements else float("inf")
    return KernelSlice(kernel, True, elements, expected, float(err))
