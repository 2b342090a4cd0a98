"""Support set, refinable function and the orthonormality/refinement checks.

Characters modulo ``G_-N^perp`` that live in ``G_M^perp`` are digit words
``(beta_-N, ..., beta_{M-1})`` stored lowest index first.  Dense tables over
these words use C order, so ``beta_-N`` is the most significant digit.

The refinable function is the step function

    phi(x) = p^-N sum_{zeta in E} phi_hat(zeta) (zeta, x),   x in G_-N / G_M,

and vanishes outside ``G_-N``.  Its integrals are weighted by ``p^-M``
per coset of ``G_M``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cyclotomic import CycloArray, root_powers
from .exceptions import ConsistencyError, MaskNotOrthogonalError, ParameterError
from .grid import DigitGrid, StepFunction, all_words, flat_index, h0_shifts
from .group import CharCoset
from .mask import CoefficientTable, Mask
from .report import DEFAULT_TOL, GRAM_TOL, Check, Report, compare

__all__ = [
    "ElementarySet",
    "PhiTable",
    "support_set",
    "support_set_bruteforce",
    "is_elementary",
    "phi_hat",
    "phi_values",
    "hat_from_values",
    "check_phi_table",
    "verify_shift_orthonormality",
    "verify_refinement",
    "gram_matrix",
    "shift_matrix",
    "outer_shell",
]

WALK_NODE_LIMIT = 200_000


# helpers shared by the exact and the floating point paths ----------------------

def _scaled(a, factor: Fraction):
    if isinstance(a, CycloArray):
        return a * factor
    return a * float(factor)


def _roots(phases, p: int, exact: bool):
    if exact:
        return CycloArray.from_phases(phases, p)
    return root_powers(p)[np.asarray(phases) % p]


def _zeros(n: int, p: int, exact: bool):
    return CycloArray.zeros((n,), p) if exact else np.zeros(n, dtype=complex)


def _complex(a):
    return a.to_complex() if isinstance(a, CycloArray) else np.asarray(a)


def _abs2(a):
    return a.abs2() if isinstance(a, CycloArray) else np.abs(a) ** 2


# elementary sets ------------------------------------------------------------------

@dataclass(frozen=True)
class ElementarySet:
    """Finite union of cosets of ``G_-N^perp`` inside ``G_M^perp``."""

    p: int
    N: int
    cosets: frozenset
    M: int = 0
    truncated: bool = False

    @classmethod
    def from_cosets(cls, p: int, N: int, cosets, M: Optional[int] = None, truncated: bool = False):
        cosets = frozenset(cosets)
        if M is None:
            tops = [c.top for c in cosets if c.top is not None]
            M = max(tops) + 1 if tops else 0
            M = max(M, 0)
        return cls(p, N, cosets, M, truncated)

    @classmethod
    def from_words(cls, p: int, N: int, words, M: Optional[int] = None):
        return cls.from_cosets(p, N, (CharCoset(N, tuple(w)) for w in words), M)

    def __len__(self):
        return len(self.cosets)

    def __contains__(self, item):
        if not isinstance(item, CharCoset):
            item = CharCoset(self.N, tuple(item))
        return item in self.cosets

    def words(self, M: Optional[int] = None) -> list:
        """Members as digit words over indices ``-N .. M-1`` (lowest first), sorted."""
        M = self.M if M is None else M
        return sorted(c.word(M) for c in self.cosets)

    def words_high_first(self, M: Optional[int] = None) -> list:
        return sorted(tuple(reversed(w)) for w in self.words(M))

    def indicator(self, M: Optional[int] = None) -> np.ndarray:
        M = self.M if M is None else M
        out = np.zeros(self.p ** (self.N + M), dtype=bool)
        if self.cosets:
            out[flat_index(self.words(M), self.p)] = True
        return out

    def tops(self) -> list:
        return sorted({c.top for c in self.cosets if c.top is not None})


def is_elementary(E: ElementarySet) -> Report:
    p, N, M = E.p, E.N, E.M
    rep = Report("elementary set")
    rep.add(Check("coset count equals p^N", len(E) == p ** N, abs(len(E) - p ** N), True,
                  {"count": len(E), "expected": p ** N}))
    rep.add(Check("trivial coset is a member", CharCoset(N, ()) in E.cosets))
    prefixes = {}
    dup = []
    for c in sorted(E.cosets, key=lambda c: c.word(M)):
        if c.prefix in prefixes:
            dup.append([list(prefixes[c.prefix].word(M)), list(c.word(M))])
        else:
            prefixes[c.prefix] = c
    rep.add(Check("prefixes distinct and cover G_0-perp", not dup and len(prefixes) == p ** N, 0.0, True,
                  {"duplicated_prefixes": dup[:20], "distinct_prefixes": len(prefixes)}))
    tops = set(E.tops())
    missing = [l for l in range(M + N) if -N + l not in tops]
    rep.add(Check("every shell up to the top level is hit", not missing, 0.0, True,
                  {"missing_shell_levels": missing, "top_indices": sorted(tops)}))
    rep.add(Check("support walk terminated", not E.truncated))
    return rep


def support_set(m: Mask, max_top: Optional[int] = None, strict: bool = True) -> ElementarySet:
    """Support of ``phi_hat`` generated by the mask.

    A word is a member iff every (N+1)-window of the zero-padded word is a
    nonzero mask entry.  For each prefix in ``G_0^perp / G_-N^perp`` the
    words are grown upward one digit at a time along nonzero entries; a word
    is accepted when the windows that run into the zero padding are nonzero
    too.  Growth stops at index ``max_top`` (the result is then flagged as
    truncated).
    """
    p, N = m.p, m.N
    sup = m.support
    if max_top is None:
        max_top = p ** N + N
    zero = (0,) * N
    zero_ok = bool(sup[(0,) * (N + 1)])

    def closes(state):
        if not zero_ok:
            return False
        return all(sup[state[i:] + (0,) * (i + 1)] for i in range(N))

    found = set()
    truncated = False
    visited = 0
    for prefix in itertools.product(range(p), repeat=N):
        stack = [(prefix, prefix)]
        while stack:
            word, state = stack.pop()
            visited += 1
            if visited > WALK_NODE_LIMIT:
                truncated = True
                break
            if closes(state):
                found.add(CharCoset(N, word))
            nxt = len(word) - N
            for c in range(p):
                if c == 0 and state == zero:
                    continue
                if not sup[state + (c,)]:
                    continue
                if nxt > max_top:
                    truncated = True
                    continue
                stack.append((word + (c,), state[1:] + (c,)))
    E = ElementarySet.from_cosets(p, N, found, truncated=truncated)
    if strict:
        rep = is_elementary(E)
        if not rep.passed:
            names = ", ".join(c.name for c in rep.failed)
            raise MaskNotOrthogonalError(f"support set is not elementary ({names})")
    return E


def support_set_bruteforce(m: Mask, M: int) -> ElementarySet:
    """Members of ``G_{M+1}^perp / G_-N^perp`` whose windows ``n = 0 .. M+1`` are all nonzero.

    Independent of :func:`support_set`: every one of the ``p^(M+N+1)``
    cosets is tested.  The returned set is bounded by ``G_{M+1}^perp`` (its
    ``M`` field is ``M + 1``); see :func:`outer_shell` for the members with
    top index ``M``.
    """
    if M < 0:
        raise ParameterError("M must be nonnegative")
    p, N = m.p, m.N
    W = all_words(M + N + 1, p)
    padded = np.concatenate([W, np.zeros((len(W), N + 1), dtype=np.int64)], axis=1)
    ok = np.ones(len(W), dtype=bool)
    for n in range(M + 2):
        win = padded[:, n:n + N + 1]
        ok &= m.support[tuple(win.T)]
    cosets = {CharCoset(N, tuple(int(a) for a in w)) for w in W[ok]}
    return ElementarySet(p, N, frozenset(cosets), M + 1)


def outer_shell(E: ElementarySet, level: int) -> list:
    """Members whose top nonzero exponent sits at index ``level``."""
    return sorted((c for c in E.cosets if c.top == level), key=lambda c: c.exponents)


# refinable function --------------------------------------------------------------

@dataclass
class PhiTable:
    """Dense tables of ``phi_hat`` (on ``G_M^perp / G_-N^perp``) and ``phi`` (on ``G_-N / G_M``)."""

    p: int
    N: int
    M: int
    E: ElementarySet
    hat: object
    values: object = None
    meta: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return isinstance(self.hat, CycloArray)

    @property
    def size(self) -> int:
        return self.p ** (self.M + self.N)

    def function(self) -> StepFunction:
        if self.values is None:
            raise ParameterError("phi values have not been computed; call phi_values first")
        return StepFunction(self.p, -self.N, self.M, self.values)

    def hat_function(self) -> StepFunction:
        """``phi_hat`` as a step function of the exponent word (indices ``-N .. M-1``)."""
        return StepFunction(self.p, -self.N, self.M, self.hat)

    def hat_on(self, M: int):
        """``phi_hat`` on words over ``-N .. M-1`` for ``M >= self.M`` (zero above)."""
        if M < self.M:
            raise ParameterError(f"cannot restrict phi_hat below M={self.M}")
        W = all_words(self.N + M, self.p)
        outside = W[:, self.N + self.M:].any(axis=1) if M > self.M else np.zeros(len(W), bool)
        idx = flat_index(W[:, :self.N + self.M], self.p)
        vals = self.hat[idx]
        if isinstance(vals, CycloArray):
            return vals.where_zero(outside)
        return np.where(outside, 0, vals)

    def values_complex(self) -> np.ndarray:
        v = self.function().values
        return v.to_complex() if isinstance(v, CycloArray) else np.asarray(v)

    def hat_complex(self) -> np.ndarray:
        return self.hat.to_complex() if self.exact else np.asarray(self.hat)


def _window_product(m: Mask, W: np.ndarray, n_windows: int):
    """Product of mask entries over windows ``n = 0 .. n_windows-1`` of zero-padded words."""
    p, N = m.p, m.N
    padded = np.concatenate([W, np.zeros((len(W), N + 1), dtype=np.int64)], axis=1)
    nonzero = np.ones(len(W), dtype=bool)
    if m.exact:
        phase = np.zeros(len(W), dtype=np.int64)
    else:
        val = np.ones(len(W), dtype=complex)
        table = m.complex_table()
    for n in range(n_windows):
        key = tuple(padded[:, n:n + N + 1].T)
        nonzero &= m.support[key]
        if m.exact:
            phase += m.phase[key]
        else:
            val = val * table[key]
    if m.exact:
        return CycloArray.from_phases(phase, p, nonzero=nonzero)
    return np.where(nonzero, val, 0)


def phi_hat(m: Mask, E: ElementarySet) -> PhiTable:
    """``phi_hat(zeta) = prod_{n=0}^{M+N} m(zeta A^-n)`` on ``E``, zero elsewhere."""
    if (m.p, m.N) != (E.p, E.N):
        raise ParameterError("mask and support set disagree on p or N")
    p, N, M = E.p, E.N, E.M
    W = all_words(N + M, p)
    prod = _window_product(m, W, M + N + 1)
    inside = E.indicator()
    if m.exact:
        hat = prod.where_zero(~inside)
    else:
        hat = np.where(inside, prod, 0)
    return PhiTable(p, N, M, E, hat)


def phi_values(ph: PhiTable) -> PhiTable:
    """Fill in ``phi`` on ``G_-N / G_M`` from ``phi_hat`` by the finite inversion sum."""
    p, N, M = ph.p, ph.N, ph.M
    Z = np.array(ph.E.words(), dtype=np.int64).reshape(-1, N + M)
    X = all_words(N + M, p)
    hat_E = ph.hat[flat_index(Z, p)] if len(Z) else _zeros(0, p, ph.exact)
    if len(Z) == 0:
        vals = _zeros(len(X), p, ph.exact)
    else:
        vals = _scaled(_roots(X @ Z.T, p, ph.exact) @ hat_E, Fraction(1, p ** N))
    return PhiTable(p, N, M, ph.E, ph.hat, vals, dict(ph.meta))


def hat_from_values(values, p: int, N: int, M: int):
    """Inverse direction: ``phi_hat(chi) = p^-M sum_x phi(x) conj((chi, x))``."""
    W = all_words(N + M, p)
    exact = isinstance(values, CycloArray)
    return _scaled(_roots(-(W @ W.T), p, exact) @ values, Fraction(1, p ** M))


def check_phi_table(ph: PhiTable, tol: float = DEFAULT_TOL) -> Report:
    rep = Report("refinable function tables")
    inside = ph.E.indicator()
    target = CycloArray.from_int(inside.astype(np.int64), ph.p) if ph.exact else inside.astype(float)
    chk = compare(_abs2(ph.hat), target, tol, "Fourier transform has unit modulus on E and vanishes off E")
    rep.add(chk)
    back = hat_from_values(ph.function().values, ph.p, ph.N, ph.M)
    rep.add(compare(back, ph.hat, tol, "time and frequency tables agree under the finite Fourier transform"))
    return rep


# shift systems ----------------------------------------------------------------

def shift_matrix(f: StepFunction, shifts: np.ndarray, lo: int, hi: int):
    """Rows ``f(x - h)`` for each shift, columns the points of ``G_lo / G_hi``.

    ``shifts`` are digit words at indices ``-s .. -1``.
    """
    s = shifts.shape[1]
    grid = DigitGrid.full(f.p, lo, hi)
    shifted = DigitGrid(f.p, lo, grid.digits[None, :, :]).sub(shifts[:, None, :], -s)
    return f.evaluate(shifted)


def gram_matrix(rows_a, rows_b, weight: Fraction):
    """``weight * rows_a @ conj(rows_b).T``."""
    if isinstance(rows_a, CycloArray):
        return (rows_a @ rows_b.conj().T) * weight
    return (np.asarray(rows_a) @ np.asarray(rows_b).conj().T) * float(weight)


def _identity(n, p, exact):
    eye = np.eye(n, dtype=np.int64)
    return CycloArray.from_int(eye, p) if exact else eye.astype(complex)


def verify_shift_orthonormality(ph: PhiTable, s: int = 2, tol: float = GRAM_TOL) -> Report:
    """Frequency-side row sums and the time-side Gram matrix of ``H_0^(s)`` shifts."""
    p, N, M = ph.p, ph.N, ph.M
    rep = Report("shift orthonormality")
    rows = _abs2(ph.hat).reshape(p ** N, p ** M).sum(axis=1)
    one = CycloArray.from_int(np.ones(p ** N, dtype=np.int64), p) if ph.exact else np.ones(p ** N)
    chk = compare(rows, one, tol, "Fourier-side row sums equal one")
    rs = rows.to_complex().real if ph.exact else rows.real
    chk.details["violated_rows"] = [list(map(int, w)) for w, v in zip(all_words(N, p), rs)
                                    if abs(v - 1) > tol][:50]
    rep.add(chk)
    shifts = h0_shifts(s, p)
    Phi = shift_matrix(ph.function(), shifts, -N - s, M)
    G = gram_matrix(Phi, Phi, Fraction(1, p ** M))
    chk = compare(G, _identity(len(shifts), p, ph.exact), tol, "shift Gram matrix is the identity",
                  {"depth": s, "shifts": len(shifts)})
    rep.add(chk)
    return rep


def verify_refinement(ph: PhiTable, m: Mask, beta: CoefficientTable, tol: float = DEFAULT_TOL) -> Report:
    p, N, M = ph.p, ph.N, ph.M
    exact = ph.exact and m.exact and beta.exact
    rep = Report("refinement")

    # frequency side on all cosets of G_-N^perp in G_{M+1}^perp
    W = all_words(N + M + 1, p)
    H = ph.hat_on(M + 1)
    if not exact:
        H = _complex(H)
    lam = (m.table() if exact else m.complex_table()).reshape(-1)
    m_chi = lam[flat_index(W[:, :N + 1], p)]
    # chi A^-1 moves every exponent down one index; the one at -N drops out
    down = np.concatenate([W[:, 1:], np.zeros((len(W), 1), dtype=np.int64)], axis=1)
    H_down = H[flat_index(down, p)]
    rep.add(compare(m_chi * H_down, H, tol, "frequency-side refinement identity"))

    # product over the outer shell
    shell = W[W[:, -1] != 0]
    prod = _window_product(m, shell, M + N + 1)
    zero = _zeros(len(shell), p, m.exact)
    rep.add(compare(prod, zero, tol, "mask product vanishes on the shell above G_M-perp",
                    {"shell_cosets": len(shell)}))

    # time side on G_{-N-1} / G_{M+1}
    f = ph.function()
    if not exact:
        f = StepFunction(p, -N, M, _complex(f.values))
    grid = DigitGrid.full(p, -N - 1, M + 1)
    lhs = f.evaluate(grid)
    shifts = beta.shifts
    Ax = DigitGrid(p, -N - 2, grid.digits[None, :, :])
    pts = Ax.sub(shifts[:, None, :], -N - 1)
    cols = f.evaluate(pts)
    b = beta.values if exact else beta.complex_values()
    rhs = cols.T @ b
    rep.add(compare(rhs, lhs, tol, "time-side refinement equation"))
    return rep
