"""Algebraic curvature operators on bivectors of R^4.

Sign convention: ``<R(x^y), x^y>`` is the sectional curvature of an
orthonormal pair, so the unit round sphere has ``R = identity`` and
``scal = 12``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bivec import HODGE, PAIRS, STAR, from_hodge, to_hodge

BIANCHI_TOL = 1e-8


class Convention(str, Enum):
    """Global sign of the curvature-type operator built from a symmetric form.

    ``PAPER`` uses ``h_il d_jk + h_jk d_il - h_ik d_jl - h_jl d_ik`` verbatim;
    ``COMMUTING`` is its negative (the Kulkarni-Nomizu product ``h o g``).
    """

    PAPER = "paper"
    COMMUTING = "commuting"

    @property
    def sign(self):
        return 1.0 if self is Convention.PAPER else -1.0


class BianchiViolation(ValueError):
    pass


@dataclass
class HodgeBlocks:
    wplus: np.ndarray
    wminus: np.ndarray
    offdiag: np.ndarray
    scal: float

    def assemble(self):
        t = np.zeros((6, 6))
        t[:3, :3] = self.wplus + self.scal / 12 * np.eye(3)
        t[3:, 3:] = self.wminus + self.scal / 12 * np.eye(3)
        t[:3, 3:] = self.offdiag
        t[3:, :3] = self.offdiag.T
        return from_hodge(t)


def symmetrize(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def _kn_coefficients():
    d = np.eye(4)
    out = np.zeros((6, 6, 4, 4))
    for r, (i, j) in enumerate(PAIRS):
        for c, (k, l) in enumerate(PAIRS):
            out[r, c, i, l] += d[j, k]
            out[r, c, j, k] += d[i, l]
            out[r, c, i, k] -= d[j, l]
            out[r, c, j, l] -= d[i, k]
    return out


_KN = _kn_coefficients()
_ROW = np.array([p[0] for p in PAIRS])
_COL = np.array([p[1] for p in PAIRS])


def kn_hat(h, convention=Convention.PAPER):
    """Operator on bivectors built from a symmetric form ``h`` and the metric.

    Under ``PAPER`` the entry at ``(e_i^e_j, e_k^e_l)`` is
    ``h_il d_jk + h_jk d_il - h_ik d_jl - h_jl d_ik``.
    """
    h = np.asarray(h, dtype=float)
    return Convention(convention).sign * np.einsum("rcab,...ab->...rc", _KN, h)


def c_matrix(hess):
    """Mixed self-dual/anti-self-dual block of ``kn_hat(hess, PAPER)``."""
    f = np.asarray(hess, dtype=float)
    return np.array([
        [(-f[0, 0] - f[1, 1] + f[2, 2] + f[3, 3]) / 2, f[0, 3] - f[1, 2], -f[0, 2] - f[1, 3]],
        [-f[0, 3] - f[1, 2], (-f[0, 0] + f[1, 1] - f[2, 2] + f[3, 3]) / 2, f[0, 1] - f[2, 3]],
        [f[0, 2] - f[1, 3], -f[0, 1] - f[2, 3], (-f[0, 0] + f[1, 1] + f[2, 2] - f[3, 3]) / 2],
    ])


def riemann_tensor(op):
    """Four-index tensor with ``T[..., i,j,k,l] = <R(e_i^e_j), e_k^e_l>``."""
    op = np.asarray(op, dtype=float)
    t = np.zeros(op.shape[:-2] + (4, 4, 4, 4))
    r, c = _ROW[:, None], _COL[:, None]
    k, l = _ROW[None, :], _COL[None, :]
    t[..., r, c, k, l] = op
    t[..., c, r, k, l] = -op
    t[..., r, c, l, k] = -op
    t[..., c, r, l, k] = op
    return t


def operator_from_tensor(t):
    return np.asarray(t)[..., _ROW[:, None], _COL[:, None], _ROW[None, :], _COL[None, :]]


def bianchi_residual(op):
    return abs(op[0, 5] - op[1, 4] + op[2, 3])


def ricci_of(op):
    t = riemann_tensor(op)
    return np.einsum("...kikj->...ij", t)


def scal_of(op):
    return float(np.trace(ricci_of(op)))


def hodge_block_decompose(op):
    op = np.asarray(op, dtype=float)
    res = bianchi_residual(op)
    if res > BIANCHI_TOL:
        raise BianchiViolation(f"Bianchi residual {res:.3e}")
    t = to_hodge(op)
    scal = 2 * np.trace(op)
    return HodgeBlocks(
        wplus=t[:3, :3] - scal / 12 * np.eye(3),
        wminus=t[3:, 3:] - scal / 12 * np.eye(3),
        offdiag=t[:3, 3:].copy(),
        scal=float(scal),
    )


def trace_free(h):
    h = np.asarray(h, dtype=float)
    return h - np.trace(h) / 4 * np.eye(4)


def assemble_from_parts(wplus, wminus, ric):
    """Bianchi-valid operator with the given Weyl blocks and Ricci tensor."""
    ric = symmetrize(ric)
    scal = np.trace(ric)
    t = np.zeros((6, 6))
    t[:3, :3] = wplus
    t[3:, 3:] = wminus
    weyl = from_hodge(t)
    return weyl + 0.5 * kn_hat(trace_free(ric), Convention.COMMUTING) + scal / 12 * np.eye(6)


def random_trace_free(rng, scale=1.0):
    a = rng.uniform(-scale, scale, (3, 3))
    a = 0.5 * (a + a.T)
    return a - np.trace(a) / 3 * np.eye(3)


def random_symmetric(rng, n=4, scale=1.0):
    a = rng.uniform(-scale, scale, (n, n))
    return np.triu(a) + np.triu(a, 1).T


def commutator_norm(op):
    return float(np.linalg.norm(op @ STAR - STAR @ op))


def hodge_matrix():
    return HODGE.copy()
