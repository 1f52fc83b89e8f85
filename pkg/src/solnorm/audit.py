"""Which sign of the Hessian operator makes each displayed identity true.

Every identity is evaluated on random soliton-consistent points under both
conventions and the worst residual is recorded. Points are handled in
batches (leading array axis) so that 10^4 samples stay cheap.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bivec import STAR, from_hodge, to_hodge
from .curv import Convention, c_matrix, kn_hat, ricci_of
from .soliton import IDENTITY_TOL, NEGATIVE_CONTROL

I3 = np.eye(3)
I4 = np.eye(4)


@dataclass
class PointBatch:
    curv: np.ndarray
    hess: np.ndarray
    lam: np.ndarray

    @property
    def ric(self):
        return ricci_of(self.curv)

    @property
    def scal(self):
        return np.trace(self.ric, axis1=-2, axis2=-1)

    @property
    def laplacian(self):
        return np.trace(self.hess, axis1=-2, axis2=-1)

    def __len__(self):
        return len(self.lam)


def _sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def _trace_free3(a):
    return a - np.trace(a, axis1=-2, axis2=-1)[..., None, None] / 3 * I3


def _hess_batch(rng, n):
    a = rng.uniform(-1, 1, (n, 4, 4))
    return np.triu(a) + np.swapaxes(np.triu(a, 1), -1, -2)


def _assemble(wplus, wminus, ric):
    scal = np.trace(ric, axis1=-2, axis2=-1)
    t = np.zeros(ric.shape[:-2] + (6, 6))
    t[..., :3, :3] = wplus
    t[..., 3:, 3:] = wminus
    ric0 = ric - scal[..., None, None] / 4 * I4
    return from_hodge(t) + 0.5 * kn_hat(ric0, Convention.COMMUTING) + scal[..., None, None] / 12 * np.eye(6)


def soliton_batch(rng, n):
    """Batch counterpart of :func:`solnorm.soliton.random_soliton_point`."""
    hess = _hess_batch(rng, n)
    lam = rng.uniform(0.5, 2.0, n)
    wp = _trace_free3(_sym(rng.uniform(-1, 1, (n, 3, 3))))
    wm = _trace_free3(_sym(rng.uniform(-1, 1, (n, 3, 3))))
    ric = lam[:, None, None] * I4 - hess
    return PointBatch(_assemble(wp, wm, ric), hess, lam)


def einstein_batch(rng, n):
    lam = rng.uniform(0.5, 2.0, n)
    wp = _trace_free3(_sym(rng.uniform(-1, 1, (n, 3, 3))))
    wm = _trace_free3(_sym(rng.uniform(-1, 1, (n, 3, 3))))
    return PointBatch(_assemble(wp, wm, lam[:, None, None] * I4), np.zeros((n, 4, 4)), lam)


def kahler_batch(rng, n, einstein=False):
    """Kahler-type operators: image in ``R xi1+`` plus the anti-self-dual part."""
    d = _sym(rng.uniform(-1, 1, (n, 3, 3)))
    d = d + (np.abs(np.trace(d, axis1=1, axis2=2)) + 1.0)[:, None, None] * I3
    t = np.zeros((n, 6, 6))
    t[:, 0, 0] = np.trace(d, axis1=1, axis2=2)
    if not einstein:
        x = rng.uniform(-1, 1, (n, 3))
        t[:, 0, 3:] = x
        t[:, 3:, 0] = x
    t[:, 3:, 3:] = d
    curv = from_hodge(t)
    ric = ricci_of(curv)
    if einstein:
        lam = np.trace(ric, axis1=1, axis2=2) / 4
    else:
        lam = rng.uniform(0.5, 2.0, n)
    hess = _sym(lam[:, None, None] * I4 - ric)
    return PointBatch(curv, hess, lam)


def _s_hat(b, conv):
    return b.curv + 0.5 * kn_hat(b.hess, conv)


def _maxabs(a):
    return np.max(np.abs(a), axis=(-2, -1))


def _blocks(b, conv):
    t = to_hodge(_s_hat(b, conv))
    return t[:, :3, :3], t[:, 3:, 3:]


def _weyl(b):
    t = to_hodge(b.curv)
    c = (b.scal / 12)[:, None, None] * I3
    return t[:, :3, :3] - c, t[:, 3:, 3:] - c


def _block_ab(b, conv):
    sp, sm = _blocks(b, conv)
    wp = np.linalg.eigvalsh(sp)[:, ::-1]
    wm = np.linalg.eigvalsh(sm)[:, ::-1]
    return (wp + wm) / 2, (wp - wm) / 2


def _sq(a):
    return np.sum(a ** 2, axis=(-2, -1))


def res_commutation(b, conv):
    s = _s_hat(b, conv)
    return np.linalg.norm(s @ STAR - STAR @ s, axis=(-2, -1))


def res_mixed_block(b, conv):
    """Mixed Hodge block of R against minus one half of the mixed block of H."""
    h_mixed = to_hodge(kn_hat(b.hess, conv))[:, :3, 3:]
    return _maxabs(to_hodge(b.curv)[:, :3, 3:] + 0.5 * h_mixed)


def res_k_equals_minus2c(b, conv):
    """Relation ``-K/2 = C`` with ``C`` the mixed block of H in this convention."""
    h_mixed = to_hodge(kn_hat(b.hess, conv))[:, :3, 3:]
    return _maxabs(-0.5 * to_hodge(b.curv)[:, :3, 3:] - h_mixed)


def res_shift(b, conv):
    sp, sm = _blocks(b, conv)
    wp, wm = _weyl(b)
    c = (b.scal / 3 - b.lam)[:, None, None] * I3
    return np.maximum(_maxabs(sp - wp - c), _maxabs(sm - wm - c))


def res_kahler_values(b, conv):
    """Reference spectrum ``{scal/2 - lam, scal/4 - lam, scal/4 - lam}`` of the self-dual block."""
    sp, _ = _blocks(b, conv)
    want = np.zeros_like(sp)
    want[:, 0, 0] = b.scal / 2 - b.lam
    want[:, 1, 1] = want[:, 2, 2] = b.scal / 4 - b.lam
    return _maxabs(sp - want)


def _chi_tensor(b):
    wp, wm = _weyl(b)
    ric0 = b.ric - (b.scal / 4)[:, None, None] * I4
    return _sq(wp) + _sq(wm) + b.scal ** 2 / 24 - 0.5 * _sq(ric0)


def res_chi(b, conv):
    """Block-form Euler density (``+ Laplacian/4``), both sides scaled by ``8 pi^2``."""
    a, bb = _block_ab(b, conv)
    hess0 = b.hess - (b.laplacian / 4)[:, None, None] * I4
    block = 2 * (np.sum((a + b.laplacian[:, None] / 4) ** 2, axis=1) + np.sum(bb ** 2, axis=1)
                 - 0.25 * _sq(hess0))
    return np.abs(block - _chi_tensor(b))


def res_tau(b, conv):
    """Block-form signature density against ``|W+|^2 - |W-|^2``, scaled by ``12 pi^2``."""
    a, bb = _block_ab(b, conv)
    block = 4 * np.sum(bb * (a + b.laplacian[:, None] / 4 - b.scal[:, None] / 12), axis=1)
    wp, wm = _weyl(b)
    return np.abs(block - (_sq(wp) - _sq(wm)))


def res_trace(b, conv):
    return np.abs(b.scal + b.laplacian - 4 * b.lam)


IDENTITIES = {
    "commutation": (res_commutation, "generic"),
    "mixed_block_minus_half_C": (res_mixed_block, "generic"),
    "minus_half_K_equals_C": (res_k_equals_minus2c, "generic"),
    "shift_scal_over_3_minus_lambda": (res_shift, "generic"),
    "kahler_spectrum_values": (res_kahler_values, "kahler"),
    "chi_density_plus_laplacian_over_4": (res_chi, "generic"),
    "tau_density": (res_tau, "generic"),
    "trace_identity": (res_trace, "generic"),
}


@dataclass
class AuditReport:
    samples: int
    seed: int
    identities: dict = field(default_factory=dict)
    mixed_block_factor: float = float("nan")
    commuting_convention: str = ""
    negative_control_fraction: float = float("nan")

    def to_dict(self):
        return {
            "samples": self.samples,
            "seed": self.seed,
            "commuting_convention": self.commuting_convention,
            "negative_control_fraction": self.negative_control_fraction,
            "mixed_block_factor": self.mixed_block_factor,
            "tolerances": {"identity": IDENTITY_TOL, "negative_control": NEGATIVE_CONTROL},
            "identities": self.identities,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    def verdict(self, name):
        return self.identities[name]["verdict"]


def _verdict(paper_ok, comm_ok):
    if paper_ok and comm_ok:
        return "both"
    if paper_ok:
        return "paper"
    if comm_ok:
        return "commuting"
    return "neither"


def _scale(b):
    return np.maximum(1.0, np.maximum(_maxabs(b.curv), _maxabs(b.hess)))


def run_convention_audit(samples=10_000, seed=0, einstein_only=False, tol=IDENTITY_TOL, identities=None):
    """Evaluate each identity under both conventions on ``samples`` random points.

    Residuals are divided by the size of the sample's data (at least 1) so
    one tolerance applies across samples.
    """
    rng = np.random.default_rng(seed)
    generic = einstein_batch(rng, samples) if einstein_only else soliton_batch(rng, samples)
    kahler = kahler_batch(rng, max(1, samples // 10), einstein=einstein_only)
    report = AuditReport(samples=samples, seed=seed)
    names = identities or list(IDENTITIES)
    for name in names:
        fn, pool = IDENTITIES[name]
        pts = kahler if pool == "kahler" else generic
        scale = _scale(pts)
        worst, fail = {}, {}
        for conv in Convention:
            vals = fn(pts, conv) / scale
            worst[conv] = float(vals.max())
            fail[conv] = float(np.mean(vals > NEGATIVE_CONTROL))
        report.identities[name] = {
            "paper_sign_max_residual": worst[Convention.PAPER],
            "commuting_sign_max_residual": worst[Convention.COMMUTING],
            "paper_sign_fail_fraction": fail[Convention.PAPER],
            "commuting_sign_fail_fraction": fail[Convention.COMMUTING],
            "verdict": _verdict(worst[Convention.PAPER] <= tol, worst[Convention.COMMUTING] <= tol),
            "tol": tol,
            "samples": len(pts),
        }
    if "commutation" in report.identities:
        comm = report.identities["commutation"]
        report.commuting_convention = comm["verdict"]
        if comm["verdict"] in ("paper", "commuting"):
            other = "paper" if comm["verdict"] == "commuting" else "commuting"
            report.negative_control_fraction = comm[f"{other}_sign_fail_fraction"]
    # least-squares s in  mixed(R) = s * C(Hess)
    c = np.array([c_matrix(h) for h in generic.hess[:500]])
    k = to_hodge(generic.curv[:500])[:, :3, 3:]
    den = float(np.sum(c * c))
    report.mixed_block_factor = float(np.sum(k * c)) / den if den > 0 else float("nan")
    return report


@lru_cache(maxsize=None)
def audited_convention(samples=200, seed=0):
    report = run_convention_audit(samples, seed, identities=["commutation"])
    if report.commuting_convention not in ("paper", "commuting"):
        raise RuntimeError(f"audit could not single out a commuting convention: {report.commuting_convention}")
    return Convention(report.commuting_convention)
