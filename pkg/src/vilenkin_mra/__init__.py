"""Orthogonal wavelets on p-adic Vilenkin groups generated by N-valid trees.

Typical use::

    from vilenkin_mra import build_nvalid, derive, verify_mra

    T = build_nvalid(3, 2, "min-height")
    mra = derive(T)
    assert verify_mra(mra).passed
    bank = mra.bank()
"""

from .cyclotomic import CycloArray, RootScalar
from .exceptions import (
    ConsistencyError,
    InvalidTreeError,
    MaskError,
    MaskNotOrthogonalError,
    NotValidMaskSupportError,
    ParameterError,
    ResourceError,
    StructureError,
    VilenkinError,
)
from .group import CharCoset, Character, GroupElement, GroupParams
from .mask import (
    CoefficientTable,
    Mask,
    check_mask,
    mask_from_tree,
    mask_from_windows,
    mask_value,
    solve_coefficients,
    wavelet_shift_masks,
)
from .pipeline import MRA, derive, verify_bank, verify_mra
from .refinable import (
    ElementarySet,
    PhiTable,
    is_elementary,
    phi_hat,
    phi_values,
    support_set,
    support_set_bruteforce,
    verify_refinement,
    verify_shift_orthonormality,
)
from .report import Check, Report
from .transform import (
    CoefficientBundle,
    FiniteSignal,
    VilenkinWaveletTransform,
    analyze,
    energy_report,
    project,
    synthesize,
)
from .tree import (
    PTree,
    allowed_windows,
    build_nvalid,
    enumerate_nvalid,
    height,
    tree_from_support,
    validate_nvalid,
)
from .wavelet import WaveletBank, derive_bank, verify_wavelets, wavelet_coefficients

__version__ = "0.1.0"
