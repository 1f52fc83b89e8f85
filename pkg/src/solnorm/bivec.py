"""Linear algebra of bivectors in four dimensions.

Components are always stored in the ordered basis
``(e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4)`` of some oriented orthonormal
frame; with this ordering the six basis bivectors are orthonormal.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {p: n for n, p in enumerate(PAIRS)}

SQRT2 = np.sqrt(2.0)

# *(e12) = e34, *(e13) = e42 = -e24, *(e14) = e23 and the inverse relations.
STAR = np.zeros((6, 6))
for _src, _dst, _sgn in ((0, 5, 1), (1, 4, -1), (2, 3, 1)):
    STAR[_dst, _src] = _sgn
    STAR[_src, _dst] = _sgn

# Rows are xi1+, xi2+, xi3+, xi1-, xi2-, xi3- in the standard frame.
HODGE = np.array([
    [1, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, -1, 0],
    [0, 0, 1, 1, 0, 0],
    [1, 0, 0, 0, 0, -1],
    [0, 1, 0, 0, 1, 0],
    [0, 0, 1, -1, 0, 0],
]) / SQRT2


class NonOrthonormalFrame(ValueError):
    pass


class NotARotation(ValueError):
    pass


class LiftMismatch(RuntimeError):
    pass


def wedge(x, y):
    """Components ``x_i y_j - x_j y_i`` of ``x ^ y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.array([x[i] * y[j] - x[j] * y[i] for i, j in PAIRS])


def inner(w, v):
    return float(np.dot(w, v))


def hodge_star(w):
    return STAR @ np.asarray(w, dtype=float)


def plucker(w):
    """Plucker quadratic ``p12 p34 - p13 p24 + p14 p23``; zero iff decomposable."""
    w = np.asarray(w, dtype=float)
    return w[0] * w[5] - w[1] * w[4] + w[2] * w[3]


def is_decomposable(w, tol=1e-10):
    return abs(plucker(w)) <= tol


def bivector_matrix(w):
    """Antisymmetric 4x4 matrix with entries ``p_ij`` above the diagonal."""
    m = np.zeros((4, 4))
    for n, (i, j) in enumerate(PAIRS):
        m[i, j] = w[n]
        m[j, i] = -w[n]
    return m


def lambda2(a):
    """6x6 matrix of the induced map ``x^y -> Ax ^ Ay``."""
    a = np.asarray(a, dtype=float)
    out = np.empty((6, 6))
    for r, (i, j) in enumerate(PAIRS):
        for c, (k, l) in enumerate(PAIRS):
            out[r, c] = a[i, k] * a[j, l] - a[i, l] * a[j, k]
    return out


@dataclass(frozen=True)
class Frame4:
    """Oriented orthonormal frame; row ``i`` holds the coordinates of ``e_{i+1}``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise NonOrthonormalFrame(f"frame must be 4x4, got {m.shape}")
        dev = np.max(np.abs(m @ m.T - np.eye(4)))
        if dev > 1e-10:
            raise NonOrthonormalFrame(f"Gram deviation {dev:.3e} exceeds 1e-10")
        if np.linalg.det(m) < 0:
            raise NonOrthonormalFrame("frame is not positively oriented")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def standard(cls):
        return cls(np.eye(4))

    @property
    def bivector_basis(self):
        """6x6 matrix whose column ``(ij)`` is ``e_i ^ e_j`` in ambient components."""
        return lambda2(self.matrix).T

    def express(self, op):
        """Components of a 6x6 operator in this frame's ``e_i ^ e_j`` basis."""
        p = self.bivector_basis
        return p.T @ op @ p

    def express_form(self, h):
        """Components of a symmetric bilinear form in this frame."""
        return self.matrix @ h @ self.matrix.T


@dataclass(frozen=True)
class HodgeBasis:
    """The six self-dual / anti-self-dual unit bivectors induced by a frame."""

    plus: np.ndarray
    minus: np.ndarray

    @property
    def matrix(self):
        return np.vstack([self.plus, self.minus])


def hodge_basis(frame=None):
    if frame is None:
        frame = Frame4.standard()
    elif not isinstance(frame, Frame4):
        frame = Frame4(frame)
    rows = HODGE @ frame.bivector_basis.T
    return HodgeBasis(rows[:3].copy(), rows[3:].copy())


def _check_rotation(r, n, tol=1e-10):
    r = np.asarray(r, dtype=float)
    if r.shape != (n, n):
        raise NotARotation(f"expected {n}x{n} matrix, got {r.shape}")
    if np.max(np.abs(r @ r.T - np.eye(n))) > tol or abs(np.linalg.det(r) - 1) > tol:
        raise NotARotation(f"matrix is not in SO({n})")
    return r


def to_hodge(op):
    """Conjugate a 6x6 operator into the standard Hodge basis."""
    return HODGE @ op @ HODGE.T


def from_hodge(blocks):
    return HODGE.T @ blocks @ HODGE


def induced_rotation(r):
    """Rotations ``(Q+, Q-)`` that ``R`` induces on the self-dual and anti-self-dual parts."""
    r = _check_rotation(r, 4)
    t = to_hodge(lambda2(r))
    return t[:3, :3].copy(), t[3:, 3:].copy()


# x -> p x conj(q) on the quaternions (e1 -> 1, e2 -> i, e3 -> j, e4 -> k)
# induces rot(p) on the self-dual part and rot(q) on the anti-self-dual
# part, with quaternion axes (i, j, k) mapped to (xi1, xi2, xi3).

def _left_mult(p):
    w, x, y, z = p
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def _right_mult(q):
    w, x, y, z = q
    return np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])


def _conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def _quat_of(q3):
    x, y, z, w = Rotation.from_matrix(q3).as_quat()
    quat = np.array([w, x, y, z])
    lead = quat[np.flatnonzero(np.abs(quat) > 1e-12)[0]]
    return quat if lead > 0 else -quat


def quaternion_rotation(p, q):
    """The SO(4) element ``x -> p x conj(q)`` for unit quaternions ``p, q``."""
    return _left_mult(p) @ _right_mult(_conj(q))


def lift_to_so4(q_plus, q_minus, tol=1e-8):
    """Rotation of R^4 inducing ``(q_plus, q_minus)``.

    The pair of unit quaternions is determined up to a common sign, which is
    fixed by making the first nonzero component of each positive.
    """
    q_plus = _check_rotation(q_plus, 3, 1e-8)
    q_minus = _check_rotation(q_minus, 3, 1e-8)
    r = quaternion_rotation(_quat_of(q_plus), _quat_of(q_minus))
    got_p, got_m = induced_rotation(r)
    err = max(np.max(np.abs(got_p - q_plus)), np.max(np.abs(got_m - q_minus)))
    if err > tol:
        raise LiftMismatch(f"round trip error {err:.3e}")
    return r


def axis_rotation(axis, theta):
    """3x3 rotation by ``theta`` about coordinate axis ``axis`` (0, 1 or 2)."""
    c, s = np.cos(theta), np.sin(theta)
    j, k = [(1, 2), (2, 0), (0, 1)][axis]
    m = np.eye(3)
    m[j, j] = m[k, k] = c
    m[k, j] = s
    m[j, k] = -s
    return m


def plane_rotation(i, j, theta):
    """4x4 rotation by ``theta`` in the ``e_i e_j`` plane (0-based indices)."""
    m = np.eye(4)
    c, s = np.cos(theta), np.sin(theta)
    m[i, i] = m[j, j] = c
    m[j, i] = s
    m[i, j] = -s
    return m


def random_rotation(n, rng):
    return Rotation.random(random_state=rng).as_matrix() if n == 3 else _random_so4(rng)


def _random_so4(rng):
    a = rng.standard_normal((4, 4))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
