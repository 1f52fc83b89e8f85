"""Pointwise curvature algebra of gradient Ricci 4-solitons."""

from .bivec import Frame4, hodge_basis, hodge_star, induced_rotation, lift_to_so4, wedge
from .curv import Convention, assemble_from_parts, c_matrix, hodge_block_decompose, kn_hat, ricci_of, scal_of
from .normform import NormalForm, criticality_obstructions, is_pure, kernel_slice, normal_form
from .soliton import SolitonPoint, commutation_residual, s_hat

__version__ = "0.1.0"
