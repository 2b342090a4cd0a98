"""Wavelets ``psi_1, ..., psi_{p-1}`` from the shifted masks.

``psi_l(x) = sum_h beta^(l)_h phi(A x - h)`` with
``beta^(l)_h = beta_h w^(l a_-1)``.  Each ``psi_l`` is supported on ``G_-N``
and constant on cosets of ``G_{M+1}``, one level finer than ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cyclotomic import CycloArray
from .exceptions import ParameterError
from .grid import DigitGrid, StepFunction, all_words, flat_index, h0_shifts
from .group import CharCoset
from .mask import CoefficientTable, Mask, wavelet_shift_masks
from .refinable import ElementarySet, PhiTable, gram_matrix, shift_matrix
from .report import DEFAULT_TOL, GRAM_TOL, Check, Report, compare

__all__ = [
    "WaveletBank",
    "wavelet_coefficients",
    "refine_apply",
    "psi_values",
    "derive_bank",
    "wavelet_support_sets",
    "verify_wavelets",
]


def wavelet_coefficients(beta: CoefficientTable, l: int) -> CoefficientTable:
    """``beta^(l)``; ``l = 0`` returns the scaling coefficients unchanged."""
    if not 0 <= l < beta.p:
        raise ParameterError(f"wavelet index l must be in 0..{beta.p - 1}, got {l}")
    return beta.with_phase(l)


def refine_apply(coeffs: CoefficientTable, f: StepFunction) -> StepFunction:
    """``x -> sum_h c_h f(A x - h)`` as a step function on ``G_lo / G_{hi+1}``.

    Requires ``f`` supported in ``G_lo`` with ``lo = -N``, which keeps the
    result inside ``G_lo``.
    """
    p, N = coeffs.p, coeffs.N
    if f.lo != -N:
        raise ParameterError(f"function support G_{f.lo} does not match N={N}")
    grid = DigitGrid.full(p, f.lo, f.hi + 1)
    pts = DigitGrid(p, f.lo - 1, grid.digits[None, :, :]).sub(coeffs.shifts[:, None, :], -N - 1)
    cols = f.evaluate(pts)
    c = coeffs.values
    if not isinstance(f.values, CycloArray):
        c = coeffs.complex_values()
    elif not coeffs.exact:
        cols = cols.to_complex()
    return StepFunction(p, f.lo, f.hi + 1, cols.T @ c)


def psi_values(beta_l: CoefficientTable, ph: PhiTable) -> StepFunction:
    return refine_apply(beta_l, ph.function())


@dataclass
class WaveletBank:
    p: int
    N: int
    M: int
    beta: CoefficientTable
    beta_l: list
    psi: list
    phi: StepFunction = None
    meta: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return all(isinstance(f.values, CycloArray) for f in self.psi)

    def psi_complex(self, l: int) -> np.ndarray:
        v = self.psi[l - 1].values
        return v.to_complex() if isinstance(v, CycloArray) else np.asarray(v)

    def complex_functions(self) -> tuple:
        """``(phi, [psi_1, ...])`` with floating point tables."""
        def cx(f):
            v = f.values.to_complex() if isinstance(f.values, CycloArray) else np.asarray(f.values, complex)
            return StepFunction(f.p, f.lo, f.hi, v)
        if self.phi is None:
            raise ParameterError("bank carries no scaling function table")
        return cx(self.phi), [cx(f) for f in self.psi]


def derive_bank(ph: PhiTable, beta: CoefficientTable) -> WaveletBank:
    beta_l = [wavelet_coefficients(beta, l) for l in range(1, ph.p)]
    psi = [psi_values(b, ph) for b in beta_l]
    for f in psi:
        assert (f.lo, f.hi) == (-ph.N, ph.M + 1)
    return WaveletBank(ph.p, ph.N, ph.M, beta, beta_l, psi, ph.function())


def wavelet_support_sets(m: Mask, E: ElementarySet) -> dict:
    """For each ``l`` the cosets ``chi`` with ``chi A^-1 in E`` and ``m(chi r_0^-l) != 0``.

    Words run over exponent indices ``-N .. M``; the exponent at ``-N`` is
    free because ``chi A^-1`` forgets it.
    """
    p, N, M = E.p, E.N, E.M
    W = all_words(N + M + 1, p)
    in_E = E.indicator()[flat_index(W[:, 1:], p)]
    out = {}
    for l, ml in enumerate([m] + wavelet_shift_masks(m)):
        keep = in_E & ml.support[tuple(W[:, :N + 1].T)]
        out[l] = ElementarySet(p, N, frozenset(CharCoset(N, tuple(int(a) for a in w)) for w in W[keep]), M + 1)
    return out


def _tiling_check(S: ElementarySet, l: int) -> Check:
    p, N = S.p, S.N
    prefixes = {c.prefix for c in S.cosets}
    tops = sorted({c.top for c in S.cosets if c.top is not None})
    ok = len(S) == p ** N and len(prefixes) == p ** N and all(t < S.M for t in tops)
    return Check(f"E A intersected with X_0 r_0^{l} tiles G_0-perp", ok, 0.0, True, {
        "cosets": len(S),
        "distinct_prefixes": len(prefixes),
        "inside_G_M+1_perp": all(t < S.M for t in tops),
        "contains_trivial_coset": CharCoset(N, ()) in S.cosets,
        "top_indices": tops,
    })


def verify_wavelets(bank: WaveletBank, ph: PhiTable, m: Mask, E: ElementarySet,
                    s: int = 2, tol: float = GRAM_TOL) -> Report:
    """Orthogonality of the shifted wavelet system and the finite completeness surrogate."""
    p, N, M = bank.p, bank.N, bank.M
    exact = bank.exact and ph.exact
    rep = Report("wavelets")
    shifts = h0_shifts(s, p)
    lo, hi = -N - s, M + 1
    weight = Fraction(1, p ** hi)

    def rows(f):
        if not exact and isinstance(f.values, CycloArray):
            f = StepFunction(f.p, f.lo, f.hi, f.values.to_complex())
        return shift_matrix(f, shifts, lo, hi)

    def eye(n):
        e = np.eye(n, dtype=np.int64)
        return CycloArray.from_int(e, p) if exact else e.astype(complex)

    def zeros(n, k):
        return CycloArray.zeros((n, k), p) if exact else np.zeros((n, k), dtype=complex)

    Phi = rows(ph.function())
    Psi = [rows(f) for f in bank.psi]
    n = len(shifts)
    for l, P in enumerate(Psi, start=1):
        rep.add(compare(gram_matrix(Phi, P, weight), zeros(n, n), tol,
                        f"scaling shifts orthogonal to wavelet {l} shifts", {"depth": s}))
    for k in range(1, p):
        for l in range(k + 1, p):
            rep.add(compare(gram_matrix(Psi[k - 1], Psi[l - 1], weight), zeros(n, n), tol,
                            f"wavelet {k} shifts orthogonal to wavelet {l} shifts", {"depth": s}))
    for l, P in enumerate(Psi, start=1):
        rep.add(compare(gram_matrix(P, P, weight), eye(n), tol,
                        f"wavelet {l} shifts orthonormal", {"depth": s}))

    for l, f in enumerate(bank.psi, start=1):
        v = f.values
        mean = (v.sum() * Fraction(1, p ** (M + 1))) if isinstance(v, CycloArray) else np.sum(v) / p ** (M + 1)
        zero = CycloArray.zeros((), p) if isinstance(v, CycloArray) else 0.0
        rep.add(compare(mean, zero, DEFAULT_TOL, f"wavelet {l} has zero mean"))

    # the refined space at depth t+1 is spanned by the depth-t shifts; the
    # refinement sum reaches N+1 digits, so t must be at least N
    t = max(s, N)
    lo_t = -N - t
    coarse = h0_shifts(t, p)
    fine = h0_shifts(t + 1, p)
    f0 = ph.function()
    if not exact and isinstance(f0.values, CycloArray):
        f0 = StepFunction(p, f0.lo, f0.hi, f0.values.to_complex())
    grid = DigitGrid.full(p, lo_t, hi)
    V = f0.evaluate(DigitGrid(p, lo_t - 1, grid.digits[None, :, :]).sub(fine[:, None, :], -t - 1))
    sys_rows = [shift_matrix(f, coarse, lo_t, hi) for f in [f0] + [
        StepFunction(p, g.lo, g.hi, g.values.to_complex()) if not exact and isinstance(g.values, CycloArray) else g
        for g in bank.psi]]
    B = CycloArray.stack(sys_rows, axis=0).reshape(p * len(coarse), -1) if exact else np.concatenate(sys_rows)
    C = gram_matrix(V, B, weight)
    CC = gram_matrix(C, C, Fraction(p))
    rep.add(compare(CC, eye(p * len(coarse)), tol, "finite-level completeness: shifts span the refined space",
                    {"depth": t, "refined_dimension": len(fine), "system_size": p * len(coarse)}))

    for l, S in wavelet_support_sets(m, E).items():
        if l:
            rep.add(_tiling_check(S, l))
    return rep
