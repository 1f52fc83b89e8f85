"""The soliton operator ``S = R + H/2`` at a single point."""

from dataclasses import dataclass, field

import numpy as np

from .bivec import STAR, to_hodge
from .config import resolve_convention
from .curv import (
    Convention,
    assemble_from_parts,
    bianchi_residual,
    hodge_block_decompose,
    kn_hat,
    random_symmetric,
    random_trace_free,
    ricci_of,
    symmetrize,
    trace_free,
)

CONSTRAINT_TOL = 1e-9
IDENTITY_TOL = 1e-10
NEGATIVE_CONTROL = 1e-3


class InvalidSolitonPoint(ValueError):
    pass


class NotKahler(ValueError):
    pass


@dataclass
class SolitonPoint:
    """Curvature operator, Hessian of the potential and soliton constant at a point.

    All components are taken in an orthonormal frame, so ``metric`` is the
    identity unless stated otherwise.
    """

    curv: np.ndarray
    hess: np.ndarray
    lam: float
    metric: np.ndarray = field(default_factory=lambda: np.eye(4))

    def __post_init__(self):
        self.curv = np.asarray(self.curv, dtype=float)
        self.hess = np.asarray(self.hess, dtype=float)
        self.metric = np.asarray(self.metric, dtype=float)
        self.lam = float(self.lam)

    @property
    def ric(self):
        return ricci_of(self.curv)

    @property
    def scal(self):
        return float(np.trace(self.ric))

    @property
    def laplacian(self):
        return float(np.trace(self.hess))

    def soliton_residual(self):
        return float(np.max(np.abs(self.ric + self.hess - self.lam * self.metric)))

    def trace_residual(self):
        return abs(self.scal + self.laplacian - 4 * self.lam)

    def validate(self, tol=CONSTRAINT_TOL):
        if np.max(np.abs(self.metric - np.eye(4))) > tol:
            raise InvalidSolitonPoint("metric must be the identity in an orthonormal frame")
        if np.max(np.abs(self.curv - self.curv.T)) > 1e-12:
            raise InvalidSolitonPoint("curvature operator is not self-adjoint")
        if np.max(np.abs(self.hess - self.hess.T)) > 1e-14 * max(1.0, np.max(np.abs(self.hess))):
            raise InvalidSolitonPoint("Hessian is not symmetric")
        res = self.soliton_residual()
        if res > tol:
            raise InvalidSolitonPoint(f"soliton residual {res:.3e} exceeds {tol:.1e}")
        if self.trace_residual() > tol:
            raise InvalidSolitonPoint(f"trace residual {self.trace_residual():.3e} exceeds {tol:.1e}")
        return self

    def in_frame(self, frame):
        """The same point with components taken in ``frame`` (a :class:`Frame4`)."""
        return SolitonPoint(frame.express(self.curv), frame.express_form(self.hess), self.lam)

    def reversed_orientation(self):
        """Components in the frame ``(e2, e1, e3, e4)``, read with the original orientation."""
        from .bivec import lambda2

        m = np.eye(4)[[1, 0, 2, 3]]
        l2 = lambda2(m)
        return SolitonPoint(l2 @ self.curv @ l2.T, m @ self.hess @ m.T, self.lam)


def s_hat(p, convention=None, tol=CONSTRAINT_TOL):
    conv = resolve_convention(convention)
    if tol is not None:
        p.validate(tol)
    return p.curv + 0.5 * kn_hat(p.hess, conv)


def commutation_residual(p, convention=None):
    s = s_hat(p, convention, tol=None)
    return float(np.linalg.norm(s @ STAR - STAR @ s))


def _blocks(p, convention):
    t = to_hodge(s_hat(p, convention, tol=None))
    return t[:3, :3], t[3:, 3:]


def spectral_shift(p, convention=None, tol=IDENTITY_TOL):
    """Compare the diagonal blocks of ``S`` with the Weyl blocks of ``R``.

    The diagonal blocks always differ from the Weyl blocks by a multiple of
    the identity; the report gives that constant together with the two
    closed forms ``scal/3 - lam`` and ``lam - scal/6``.
    """
    conv = resolve_convention(convention)
    sp, sm = _blocks(p, conv)
    wb = hodge_block_decompose(p.curv)
    dp = sp - wb.wplus
    dm = sm - wb.wminus
    c = float(np.trace(dp) / 3)
    scalar_err = max(np.max(np.abs(dp - c * np.eye(3))), np.max(np.abs(dm - c * np.eye(3))))
    scal = p.scal
    paper_c = scal / 3 - p.lam
    commuting_c = p.lam - scal / 6
    return {
        "convention": conv.value,
        "s_plus": np.linalg.eigvalsh(sp)[::-1],
        "s_minus": np.linalg.eigvalsh(sm)[::-1],
        "wplus": np.linalg.eigvalsh(wb.wplus)[::-1],
        "wminus": np.linalg.eigvalsh(wb.wminus)[::-1],
        "shift": c,
        "scalar_residual": float(scalar_err),
        "paper_shift": paper_c,
        "commuting_shift": commuting_c,
        "matches_paper_shift": abs(c - paper_c) <= tol * max(1.0, abs(paper_c)),
        "matches_commuting_shift": abs(c - commuting_c) <= tol * max(1.0, abs(commuting_c)),
    }


def kahler_form(J):
    """Bivector components of ``omega(x, y) = <Jx, y>``."""
    from .bivec import PAIRS

    J = np.asarray(J, dtype=float)
    return np.array([J[j, i] for i, j in PAIRS])


STANDARD_J = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])


def check_kahler(p, J, tol=1e-8):
    """Raise :class:`NotKahler` unless ``J`` is a compatible complex structure for ``p``."""
    J = np.asarray(J, dtype=float)
    if np.max(np.abs(J @ J.T - np.eye(4))) > tol or np.max(np.abs(J @ J + np.eye(4))) > tol:
        raise NotKahler("J is not an orthogonal complex structure")
    omega = kahler_form(J)
    if np.max(np.abs(STAR @ omega - omega)) > tol:
        raise NotKahler("J does not induce the given orientation")
    for name, form in (("Ricci", p.ric), ("Hessian", p.hess)):
        if np.max(np.abs(J.T @ form @ J - form)) > tol:
            raise NotKahler(f"{name} tensor is not J-invariant")
    # Kahler curvature annihilates the self-dual forms orthogonal to omega.
    u = omega / np.linalg.norm(omega)
    proj = (np.eye(6) + STAR) / 2 - np.outer(u, u)
    if np.max(np.abs(p.curv @ proj)) > tol:
        raise NotKahler("curvature operator does not annihilate the (2,0)+(0,2) forms")
    return omega


def kahler_pattern_check(p, J=STANDARD_J, convention=None, tol=1e-8):
    """Eigenvalue of ``S_+`` on the Kahler form and on its complement in the self-dual part."""
    conv = resolve_convention(convention)
    omega = check_kahler(p, J, tol)
    u = omega / np.linalg.norm(omega)
    s = s_hat(p, conv, tol=None)
    simple = float(u @ s @ u)
    leak = float(np.linalg.norm(s @ u - simple * u))
    proj = (np.eye(6) + STAR) / 2 - np.outer(u, u)
    basis = np.linalg.svd(proj)[0][:, :2]
    block = basis.T @ s @ basis
    pair = np.linalg.eigvalsh(block)
    scal, lam = p.scal, p.lam
    paper = (scal / 2 - lam, scal / 4 - lam)
    commuting = (lam, lam - scal / 4)
    rep = float(pair.mean())
    return {
        "convention": conv.value,
        "simple": simple,
        "repeated": rep,
        "repeat_spread": float(pair[1] - pair[0]),
        "omega_leak": leak,
        "gap": abs(simple - rep),
        "paper_values": paper,
        "commuting_values": commuting,
        "matches_paper": max(abs(simple - paper[0]), abs(rep - paper[1])) <= tol * max(1.0, abs(scal)),
        "matches_commuting": max(abs(simple - commuting[0]), abs(rep - commuting[1])) <= tol * max(1.0, abs(scal)),
    }


def signature_density(p, nf=None, convention=None):
    """``|S_+|^2 - |S_-|^2``; checked against ``4 sum a_i b_i`` when a normal form is given."""
    sp, sm = _blocks(p, nf.convention if nf is not None else convention)
    val = float(np.sum(sp * sp) - np.sum(sm * sm))
    if nf is not None:
        alt = 4 * float(np.dot(nf.a, nf.b))
        if abs(val - alt) > IDENTITY_TOL * max(1.0, abs(val)):
            raise AssertionError(f"signature density mismatch {val} vs {alt}")
    return val


def random_soliton_point(rng, lam=None):
    """Soliton-consistent point: random Weyl blocks and Hessian, ``Ric = lam g - Hess``."""
    hess = random_symmetric(rng)
    if lam is None:
        lam = rng.uniform(0.5, 2.0)
    ric = lam * np.eye(4) - hess
    curv = assemble_from_parts(random_trace_free(rng), random_trace_free(rng), ric)
    return SolitonPoint(curv, hess, lam)


def random_nonsoliton_point(rng, lam=None):
    """Like :func:`random_soliton_point` but with a Hessian unrelated to the Ricci tensor."""
    p = random_soliton_point(rng, lam)
    hess = random_symmetric(rng)
    # keep the trace identity so only the trace-free mismatch remains
    hess = trace_free(hess) + p.laplacian / 4 * np.eye(4)
    return SolitonPoint(p.curv, hess, p.lam)


def kahler_operator(x_mix, d_minus):
    """Kahler-type operator in the standard frame: image inside ``R omega + anti-self-dual``.

    ``x_mix`` couples ``xi1+`` to the anti-self-dual part; ``d_minus`` is the
    anti-self-dual block. Bianchi fixes the ``xi1+`` eigenvalue to ``tr d_minus``.
    """
    from .bivec import from_hodge

    t = np.zeros((6, 6))
    t[0, 0] = np.trace(d_minus)
    t[0, 3:] = x_mix
    t[3:, 0] = x_mix
    t[3:, 3:] = d_minus
    return from_hodge(t)


def random_kahler_point(rng, lam=None, einstein=False):
    d = random_symmetric(rng, 3)
    # d_minus with positive trace keeps scal away from zero
    d = d + (abs(np.trace(d)) + 1.0) * np.eye(3)
    curv = kahler_operator(np.zeros(3) if einstein else rng.uniform(-1, 1, 3), d)
    if einstein:
        lam = float(np.trace(ricci_of(curv))) / 4
    elif lam is None:
        lam = rng.uniform(0.5, 2.0)
    hess = symmetrize(lam * np.eye(4) - ricci_of(curv))
    return SolitonPoint(curv, hess, lam)


def einstein_point(wplus, wminus, scal):
    lam = scal / 4
    curv = assemble_from_parts(wplus, wminus, lam * np.eye(4))
    return SolitonPoint(curv, np.zeros((4, 4)), lam)


def normal_data_point(a, b, hess, convention=Convention.COMMUTING):
    """Soliton point whose ``S`` is diagonal in the standard Hodge basis.

    ``S`` has entries ``a + b`` on the self-dual and ``a - b`` on the
    anti-self-dual part; ``sum(b)`` must vanish for Bianchi. The soliton
    constant is read off the trace identity.
    """
    from .bivec import from_hodge

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hess = symmetrize(hess)
    curv = from_hodge(np.diag(np.concatenate([a + b, a - b]))) - 0.5 * kn_hat(hess, convention)
    scal = float(np.trace(ricci_of(curv)))
    return SolitonPoint(curv, hess, (scal + np.trace(hess)) / 4)


def fubini_study_point(scal=24.0):
    """Kahler-Einstein point of complex projective plane type."""
    c = scal / 12
    curv = kahler_operator(np.zeros(3), c * np.eye(3))
    return SolitonPoint(curv, np.zeros((4, 4)), scal / 4)


__all__ = [
    "Convention",
    "InvalidSolitonPoint",
    "NotKahler",
    "SolitonPoint",
    "bianchi_residual",
    "commutation_residual",
    "kahler_pattern_check",
    "random_kahler_point",
    "random_soliton_point",
    "s_hat",
    "signature_density",
    "spectral_shift",
]
