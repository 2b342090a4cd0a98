"""End-to-end derivation: tree -> mask -> E -> phi -> beta -> wavelets."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .mask import CoefficientTable, Mask, check_mask, mask_from_tree, solve_coefficients
from .refinable import (
    ElementarySet,
    PhiTable,
    check_phi_table,
    is_elementary,
    phi_hat,
    phi_values,
    support_set,
    support_set_bruteforce,
    outer_shell,
    verify_refinement,
    verify_shift_orthonormality,
)
from .report import GRAM_TOL, Check, Report
from .tree import PTree
from .wavelet import WaveletBank, derive_bank, verify_wavelets

__all__ = ["MRA", "derive", "verify_mra", "verify_bank"]


@dataclass
class MRA:
    mask: Mask
    E: ElementarySet
    beta: CoefficientTable
    phi: PhiTable
    tree: Optional[PTree] = None

    @property
    def p(self) -> int:
        return self.mask.p

    @property
    def N(self) -> int:
        return self.mask.N

    @property
    def M(self) -> int:
        return self.E.M

    def bank(self) -> WaveletBank:
        return derive_bank(self.phi, self.beta)


def derive(source, phases=None, strict: bool = True) -> MRA:
    """Run the construction from a tree or a mask.

    ``strict=False`` carries on past a mask whose support set is not
    elementary, so that broken inputs can still be verified (and fail).
    """
    tree = None
    if isinstance(source, PTree):
        tree = source
        mask = mask_from_tree(source, phases, validate=strict)
    else:
        mask = source
    E = support_set(mask, strict=strict)
    beta = solve_coefficients(mask)
    phi = phi_values(phi_hat(mask, E))
    return MRA(mask, E, beta, phi, tree)


def _support_agreement(mra: MRA) -> Report:
    rep = Report("support set oracle")
    brute = support_set_bruteforce(mra.mask, mra.M)
    shell = outer_shell(brute, mra.M)
    same = brute.cosets == mra.E.cosets
    rep.add(Check("support walk agrees with exhaustive coset search", same, 0.0, True,
                  {"walk": len(mra.E), "exhaustive": len(brute)}))
    rep.add(Check("no support in the outer shell", not shell, 0.0, True,
                  {"shell_members": [list(c.word(mra.M + 1)) for c in shell[:20]]}))
    return rep


def _run(tasks, jobs: int) -> list:
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(t) for t in tasks]
            return [f.result() for f in futures]
    return [t() for t in tasks]


def verify_mra(mra: MRA, depth: int = 3, tol: float = GRAM_TOL, jobs: int = 1) -> Report:
    """Every check on the scaling side; the order of checks never depends on ``jobs``."""
    tasks = [
        lambda: check_mask(mra.mask),
        lambda: is_elementary(mra.E),
        lambda: _support_agreement(mra),
        lambda: check_phi_table(mra.phi),
        lambda: verify_shift_orthonormality(mra.phi, depth, tol),
        lambda: verify_refinement(mra.phi, mra.mask, mra.beta),
    ]
    out = Report("multiresolution analysis")
    for r in _run(tasks, jobs):
        out.extend(r)
    return out


def verify_bank(mra: MRA, bank: WaveletBank, depth: int = 2, tol: float = GRAM_TOL) -> Report:
    return verify_wavelets(bank, mra.phi, mra.mask, mra.E, depth, tol)
