"""N-elementary masks and the refinement-equation coefficients.

A mask is stored as a table ``lam`` over ``Z_p^(N+1)`` with axes
``(alpha_-N, ..., alpha_-1, alpha_0)``: the exponents of a character at
indices ``-N .. 0``.  Exponents below ``-N`` never matter (the mask is
constant on cosets of ``G_-N^perp``) and neither do exponents at indices
``>= 1`` (it is periodic under ``r_1, r_2, ...``).

Nonzero entries are either exact roots of unity (integer phases, the
default) or arbitrary unimodular complex numbers; in the latter case every
downstream computation runs in floating point with tolerances.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .cyclotomic import CycloArray, RootScalar, root_powers
from .exceptions import ConsistencyError, MaskError, ParameterError
from .grid import all_words, h0_shifts
from .group import Character
from .report import DEFAULT_TOL, Check, Report, compare
from .tree import PTree, allowed_windows, validate_nvalid
from .exceptions import InvalidTreeError
from .validation import check_depth, check_prime

__all__ = [
    "Mask",
    "CoefficientTable",
    "mask_from_tree",
    "mask_from_windows",
    "mask_value",
    "check_mask",
    "solve_coefficients",
    "mask_from_coefficients",
    "wavelet_shift_masks",
    "delta_mask",
]


class Mask:
    """Mask table with axes ``(alpha_-N, ..., alpha_0)``.

    ``support`` is a boolean table; ``phase`` (integer, exact mode) or
    ``values`` (complex, numeric mode) carries the nonzero entries.
    """

    def __init__(self, p: int, N: int, support, phase=None, values=None):
        self.p = check_prime(p)
        self.N = check_depth(N)
        shape = (self.p,) * (self.N + 1)
        self.support = np.asarray(support, dtype=bool)
        if self.support.shape != shape:
            raise ParameterError(f"mask table must have shape {shape}, got {self.support.shape}")
        if values is not None:
            values = np.asarray(values, dtype=complex)
            if values.shape != shape:
                raise ParameterError(f"mask values must have shape {shape}")
            self._values = np.where(self.support, values, 0)
            self.phase = None
        else:
            phase = np.zeros(shape, dtype=np.int64) if phase is None else np.asarray(phase, dtype=np.int64)
            if phase.shape != shape:
                raise ParameterError(f"mask phases must have shape {shape}")
            self.phase = np.where(self.support, phase % self.p, 0)
            self._values = None

    @property
    def exact(self) -> bool:
        return self._values is None

    @property
    def shape(self):
        return self.support.shape

    def table(self):
        """The full table as a :class:`CycloArray` (exact) or complex ndarray."""
        if self.exact:
            return CycloArray.from_phases(self.phase, self.p, nonzero=self.support)
        return self._values.copy()

    def complex_table(self) -> np.ndarray:
        if self.exact:
            return np.where(self.support, root_powers(self.p)[self.phase], 0)
        return self._values.copy()

    def entry(self, index):
        """Entry at ``(alpha_-N, ..., alpha_0)``: RootScalar (exact) or complex."""
        index = tuple(int(a) % self.p for a in index)
        if self.exact:
            if not self.support[index]:
                return RootScalar.zero(self.p)
            return RootScalar(self.p, int(self.phase[index]))
        return complex(self._values[index])

    def nonzero_indices(self) -> list:
        return [tuple(int(a) for a in idx) for idx in zip(*np.nonzero(self.support))]

    def nonzero_windows(self) -> frozenset:
        """Nonzero entries as tree windows (root-side label first)."""
        return frozenset(idx[::-1] for idx in self.nonzero_indices())

    def rolled(self, l: int) -> Mask:
        """Table of ``chi -> m(chi r_0^-l)``: the alpha_0 axis shifted by ``l``."""
        sup = np.roll(self.support, l, axis=-1)
        if self.exact:
            return Mask(self.p, self.N, sup, phase=np.roll(self.phase, l, axis=-1))
        return Mask(self.p, self.N, sup, values=np.roll(self._values, l, axis=-1))

    def __eq__(self, other):
        if not isinstance(other, Mask) or (self.p, self.N) != (other.p, other.N):
            return False
        if not np.array_equal(self.support, other.support):
            return False
        if self.exact and other.exact:
            return bool(np.array_equal(self.phase, other.phase))
        return bool(np.allclose(self.complex_table(), other.complex_table(), atol=DEFAULT_TOL))

    def __repr__(self):
        mode = "exact" if self.exact else "complex"
        return f"Mask(p={self.p}, N={self.N}, nonzero={int(self.support.sum())}, {mode})"


def delta_mask(p: int, N: int) -> Mask:
    """Mask with the single nonzero entry ``lam_{0..0} = 1``."""
    sup = np.zeros((p,) * (N + 1), dtype=bool)
    sup[(0,) * (N + 1)] = True
    return Mask(p, N, sup)


def _phase_entry(value, p):
    """Normalise one phase-table value: int -> exact phase, pair/complex -> complex."""
    if isinstance(value, RootScalar):
        if value.is_zero:
            raise ParameterError("phase table values must be unimodular, got 0")
        return int(value.phase), None
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value) % p, None
    if isinstance(value, (list, tuple)) and len(value) == 2:
        value = complex(float(value[0]), float(value[1]))
    if isinstance(value, (complex, float)):
        z = complex(value)
        if abs(abs(z) - 1) > 1e-9:
            raise ParameterError(f"phase value {z} is not unimodular")
        return None, z
    raise ParameterError(f"cannot interpret phase value {value!r}")


def mask_from_windows(windows, p: int, N: int, phases: Optional[Mapping] = None) -> Mask:
    """Mask whose nonzero entries are exactly the given root-side-first windows.

    No validity requirement is imposed, so this is also how deliberately
    broken masks are produced.
    """
    p = check_prime(p)
    N = check_depth(N)
    windows = {tuple(int(a) for a in w) for w in windows}
    for w in windows:
        if len(w) != N + 1 or any(not 0 <= a < p for a in w):
            raise ParameterError(f"window {w} is not a word of {N + 1} labels below {p}")
    support = np.zeros((p,) * (N + 1), dtype=bool)
    for w in windows:
        support[w[::-1]] = True
    if phases is None:
        return Mask(p, N, support)
    phases = {tuple(int(a) for a in k): v for k, v in phases.items()}
    extra = set(phases) - windows
    missing = windows - set(phases)
    if extra or missing:
        raise ParameterError(
            f"phase table does not match the window set: {len(missing)} missing, {len(extra)} unexpected"
            + (f" (e.g. missing {sorted(missing)[0]})" if missing else "")
            + (f" (e.g. unexpected {sorted(extra)[0]})" if extra else ""))
    zero = (0,) * (N + 1)
    if zero in phases:
        ph, z = _phase_entry(phases[zero], p)
        if (ph is not None and ph != 0) or (z is not None and abs(z - 1) > 1e-12):
            raise ParameterError("the all-zero window must carry phase 1")
    parsed = {w: _phase_entry(v, p) for w, v in phases.items()}
    if all(z is None for _, z in parsed.values()):
        phase = np.zeros(support.shape, dtype=np.int64)
        for w, (ph, _) in parsed.items():
            phase[w[::-1]] = ph
        return Mask(p, N, support, phase=phase)
    omega = root_powers(p)
    values = np.zeros(support.shape, dtype=complex)
    for w, (ph, z) in parsed.items():
        values[w[::-1]] = omega[ph] if z is None else z
    return Mask(p, N, support, values=values)


def mask_from_tree(T: PTree, phases: Optional[Mapping] = None, validate: bool = True) -> Mask:
    """The mask generated by an N-valid tree.

    ``lam`` at ``(alpha_-N, ..., alpha_0)`` is nonzero iff the tree contains
    the window ``alpha_0 -> alpha_-1 -> ... -> alpha_-N`` (plus the all-zero
    window).  ``phases`` maps windows to an integer phase ``k`` (meaning
    ``w^k``) or a unimodular complex number; missing windows are an error.
    With ``validate=False`` a non-valid tree is accepted and its (N+1)-windows
    are used as they are.
    """
    if validate:
        rep = validate_nvalid(T)
        if not rep.valid:
            raise InvalidTreeError("tree is not N-valid: " + "; ".join(rep.messages))
        windows = allowed_windows(T)
    else:
        from .tree import n_windows

        windows = set(n_windows(T, T.N + 1)) | {(0,) * (T.N + 1)}
    return mask_from_windows(windows, T.p, T.N, phases)


def mask_value(m: Mask, chi: Character):
    """``m_0(chi)``: only the exponents at indices ``-N .. 0`` are read."""
    if chi.p != m.p:
        raise ParameterError(f"character has p={chi.p}, mask has p={m.p}")
    return m.entry(tuple(chi[k] for k in range(-m.N, 1)))


def check_mask(m: Mask, tol: float = DEFAULT_TOL) -> Report:
    rep = Report("mask")
    zero = (0,) * (m.N + 1)
    if m.exact:
        ok = bool(m.support[zero]) and m.phase[zero] == 0
        dev = 0.0 if ok else abs(complex(m.entry(zero)) - 1)
    else:
        dev = abs(m.complex_table()[zero] - 1)
        ok = dev <= tol
    rep.add(Check("mask equals one at the trivial coset", ok, dev, m.exact))

    if m.exact:
        rep.add(Check("nonzero entries unimodular", True, 0.0, True))
    else:
        mods = np.abs(m.complex_table()[m.support])
        dev = float(np.max(np.abs(mods - 1), initial=0.0))
        rep.add(Check("nonzero entries unimodular", dev <= tol, dev, False))

    per_row = m.support.reshape(-1, m.p).sum(axis=1)
    bad = [tuple(int(a) for a in w) for w, c in zip(all_words(m.N, m.p), per_row) if c != 1]
    rep.add(Check("row sums of squared modulus equal one", not bad,
                  float(np.max(np.abs(per_row - 1), initial=0)), True,
                  {"violated_rows": bad[:50], "violations": len(bad)}))
    return rep


class CoefficientTable:
    """Coefficients ``beta_h`` for ``h`` in ``H_0^(N+1)``.

    ``values`` is flat in the order of :func:`h0_shifts(N+1)`, i.e. digit
    words ``(a_-N-1, ..., a_-1)`` with ``a_-N-1`` most significant.  The
    tensor view :meth:`as_tensor` uses axes ``(a_-1, ..., a_-N-1)``.
    """

    def __init__(self, p: int, N: int, values):
        self.p = p
        self.N = N
        if len(values) != p ** (N + 1):
            raise ParameterError(f"expected {p ** (N + 1)} coefficients, got {len(values)}")
        self.values = values

    @property
    def exact(self) -> bool:
        return isinstance(self.values, CycloArray)

    @property
    def shifts(self) -> np.ndarray:
        """Digits of each ``h`` at indices ``-N-1 .. -1``."""
        return h0_shifts(self.N + 1, self.p)

    def complex_values(self) -> np.ndarray:
        return self.values.to_complex() if self.exact else np.asarray(self.values, dtype=complex)

    def as_tensor(self):
        shape = (self.p,) * (self.N + 1)
        return self.values.reshape(shape).T

    def nonzero_shifts(self) -> list:
        nz = ~self.values.is_zero() if self.exact else np.abs(self.values) > DEFAULT_TOL
        return [tuple(int(a) for a in w) for w in self.shifts[nz]]

    def energy(self):
        """``sum_h |beta_h|^2`` (exact when possible)."""
        if self.exact:
            return self.values.abs2().sum()
        return float(np.sum(np.abs(self.values) ** 2))

    def with_phase(self, l: int) -> CoefficientTable:
        """``beta_h * w^(l a_-1)``: coefficients of the l-th shifted mask."""
        a1 = self.shifts[:, -1]
        if self.exact:
            return CoefficientTable(self.p, self.N, self.values.rotate(l * a1))
        return CoefficientTable(self.p, self.N, self.values * root_powers(self.p)[(l * a1) % self.p])

    def __repr__(self):
        return f"CoefficientTable(p={self.p}, N={self.N}, {'exact' if self.exact else 'complex'})"


def _pairing_matrix(p: int, N: int) -> np.ndarray:
    """``D[k, j]`` with ``(chi_k, A^-1 h_j) = w^D[k, j]``.

    ``chi_k`` runs over mask indices ``(alpha_-N .. alpha_0)``, ``h_j`` over
    :func:`h0_shifts(N+1)`.  ``A^-1 h`` moves the digit at ``-k-1`` to
    ``-k``, so the pairing is ``sum_k alpha_-k a_-k-1``.
    """
    chis = all_words(N + 1, p)[:, ::-1]          # alpha_0, alpha_-1, ..., alpha_-N
    hs = h0_shifts(N + 1, p)[:, ::-1]            # a_-1, a_-2, ..., a_-N-1
    return (chis @ hs.T) % p


def mask_from_coefficients(beta: CoefficientTable):
    """``m(chi_k) = (1/p) sum_j beta_j conj((chi_k, A^-1 h_j))`` as a full table."""
    p, N = beta.p, beta.N
    D = _pairing_matrix(p, N)
    shape = (p,) * (N + 1)
    if beta.exact:
        terms = beta.values.reshape(1, -1).rotate(-D)
        return (terms.sum(axis=1) * Fraction(1, p)).reshape(shape)
    omega = root_powers(p)
    return ((omega[(-D) % p] @ np.asarray(beta.values)) / p).reshape(shape)


def solve_coefficients(m: Mask) -> CoefficientTable:
    """Invert the mask formula by character orthogonality.

    ``beta_j = p^-N sum_k m(chi_k) (chi_k, A^-1 h_j)``; the result is checked
    by mapping it back to the mask.
    """
    p, N = m.p, m.N
    D = _pairing_matrix(p, N)
    lam = m.table().reshape(-1)
    if m.exact:
        values = lam.reshape(-1, 1).rotate(D).sum(axis=0) * Fraction(1, p ** N)
    else:
        values = (root_powers(p)[D].T @ lam) / p ** N
    beta = CoefficientTable(p, N, values)
    back = mask_from_coefficients(beta)
    chk = compare(back, m.table(), DEFAULT_TOL)
    if not chk.passed:
        raise ConsistencyError(f"coefficient round trip failed (deviation {chk.max_deviation:.3g})")
    return beta


def wavelet_shift_masks(m: Mask) -> list:
    """Tables of ``m_l(chi) = m(chi r_0^-l)`` for ``l = 1 .. p-1``.

    Supports of ``m_0, ..., m_{p-1}`` must be pairwise disjoint, which holds
    whenever every row has at most one nonzero entry.
    """
    shifted = [m.rolled(l) for l in range(m.p)]
    for a, b in itertools.combinations(range(m.p), 2):
        overlap = shifted[a].support & shifted[b].support
        if overlap.any():
            idx = tuple(int(i) for i in np.argwhere(overlap)[0])
            raise MaskError(f"m_{a} and m_{b} are both nonzero at {idx}")
    return shifted[1:]
