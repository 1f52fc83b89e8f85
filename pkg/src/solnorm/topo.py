"""Euler-characteristic and signature densities, and their integrals over profiles."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .curv import c_matrix, hodge_block_decompose, trace_free
from .normform import DegenerateSpectrum, normal_form

FOUR_PI2 = 4 * np.pi ** 2
EIGHT_PI2 = 8 * np.pi ** 2
ORBIT_VOLUME = 2 * np.pi ** 2  # volume of the unit round 3-sphere


class GridTooCoarse(RuntimeError):
    pass


@dataclass
class DensityReport:
    chi_density: float
    tau_density: float
    combined_residual: float
    besse_cross_check: float


def _sq(m):
    return float(np.sum(np.asarray(m) ** 2))


def chi_block_formula(a, b, laplacian, hess0_sq, offset_sign):
    """Block-form Euler density; ``offset_sign`` is the sign in front of ``laplacian/4``."""
    a = np.asarray(a)
    return (np.sum((a + offset_sign * laplacian / 4) ** 2) + np.sum(np.asarray(b) ** 2)
            - 0.25 * hess0_sq) / FOUR_PI2


def tau_block_formula(a, b, laplacian, scal, offset_sign):
    a = np.asarray(a)
    return float(np.sum(np.asarray(b) * (a + offset_sign * laplacian / 4 - scal / 12))) / (3 * np.pi ** 2)


def chi_tensor_density(curv):
    """``(|W|^2 + scal^2/24 - |Ric0|^2/2) / 8 pi^2`` from the curvature alone."""
    from .curv import ricci_of

    blocks = hodge_block_decompose(curv)
    ric0 = trace_free(ricci_of(curv))
    return (_sq(blocks.wplus) + _sq(blocks.wminus) + blocks.scal ** 2 / 24 - 0.5 * _sq(ric0)) / EIGHT_PI2


def chi_hodge_trace(curv):
    """``(|R++|^2 + |R--|^2 - 2 |R+-|^2) / 8 pi^2`` from the Hodge blocks of ``R``."""
    from .bivec import to_hodge

    t = to_hodge(curv)
    return (_sq(t[:3, :3]) + _sq(t[3:, 3:]) - 2 * _sq(t[:3, 3:])) / EIGHT_PI2


def tau_tensor_density(curv):
    blocks = hodge_block_decompose(curv)
    return (_sq(blocks.wplus) - _sq(blocks.wminus)) / (12 * np.pi ** 2)


def chi_density(p, nf):
    hess0_sq = _sq(trace_free(p.hess))
    return float(chi_block_formula(nf.a, nf.b, p.laplacian, hess0_sq, nf.convention.sign))


def tau_density(p, nf):
    return tau_block_formula(nf.a, nf.b, p.laplacian, p.scal, nf.convention.sign)


def exact_rhs(p):
    """Right-hand side ``(|W-|^2 + scal^2/48 - |Ric0|^2/4) / 4 pi^2`` of the combined identity."""
    blocks = hodge_block_decompose(p.curv)
    return (_sq(blocks.wminus) + blocks.scal ** 2 / 48 - 0.25 * _sq(trace_free(p.ric))) / FOUR_PI2


def trace_cct(hess):
    c = c_matrix(hess)
    return float(np.trace(c @ c.T))


def density_report(p, nf):
    chi = chi_density(p, nf)
    tau = tau_density(p, nf)
    return DensityReport(
        chi_density=chi,
        tau_density=tau,
        combined_residual=abs(chi - 1.5 * tau - exact_rhs(p)),
        besse_cross_check=abs(chi - chi_tensor_density(p.curv)),
    )


# finite-difference curvature on a profile grid satisfies the soliton
# equation only to about 1e-7, so the commutator gate is relaxed there
PROFILE_COMMUTATION_TOL = 1e-5


def chi_of_point(p, tol=PROFILE_COMMUTATION_TOL):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        return chi_density(p, normal_form(p, tol=tol))


def tau_of_point(p, tol=PROFILE_COMMUTATION_TOL):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        return tau_density(p, normal_form(p, tol=tol))


def chi_tau_of_point(p, tol=PROFILE_COMMUTATION_TOL):
    """Both densities from a single normal form."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        nf = normal_form(p, tol=tol)
    return chi_density(p, nf), tau_density(p, nf)


def integrate_profile(profile, density, tol=None, points=None):
    """Integrate a pointwise density over the cohomogeneity-one manifold.

    The measure is ``2 pi^2 f h^2 dt``; it vanishes where the fibre collapses,
    so the integrand is set to zero at the two ends. Composite Simpson is
    compared with the same rule on every other node; if ``tol`` is given and
    the two differ by more than ``tol`` :class:`GridTooCoarse` is raised.
    Returns the Richardson-extrapolated value, or an array of them when
    ``density`` returns several values.
    """
    from .kcao import frame_points

    t = profile.t
    n = len(t)
    if n < 5 or n % 2 == 0:
        raise GridTooCoarse("need an odd number of at least 5 grid points")
    if points is None:
        points = frame_points(profile)
    sample = density(next(iter(points.values())))
    first = np.atleast_1d(sample)
    vals = np.zeros((n, first.size))
    for k, pt in points.items():
        vals[k] = density(pt)
    integrand = ORBIT_VOLUME * vals * (profile.f * profile.h ** 2)[:, None]
    full = simpson(integrand, x=t, axis=0)
    half = simpson(integrand[::2], x=t[::2], axis=0)
    if tol is not None and np.max(np.abs(full - half)) > tol:
        raise GridTooCoarse(f"Simpson halves disagree by {np.max(np.abs(full - half)):.3e}")
    out = full + (full - half) / 15
    return float(out[0]) if np.ndim(sample) == 0 else out
