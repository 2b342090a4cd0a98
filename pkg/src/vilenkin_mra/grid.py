"""Digit grids and step functions on finite quotients ``G_lo / G_hi``.

A point of ``G_lo / G_hi`` is the digit word ``(a_lo, ..., a_{hi-1})``.
Dense tables are flattened in C order with the *lowest* group index as the
most significant digit, so for ``H_0^(s)`` (indices ``-s .. -1``) the flat
position of ``h`` is ``a_-1 + a_-2 p + ... + a_-s p^(s-1)``.
"""

from __future__ import annotations

import numpy as np

from .cyclotomic import CycloArray
from .exceptions import ParameterError

__all__ = [
    "all_words",
    "flat_index",
    "format_word",
    "parse_word",
    "DigitGrid",
    "StepFunction",
    "h0_shifts",
]

_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"


def all_words(length: int, p: int) -> np.ndarray:
    """Every word of ``length`` digits over ``Z_p``, shape ``(p**length, length)``, C order."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((p,) * length, dtype=np.int64)
    return grids.reshape(length, -1).T.copy()


def flat_index(words, p: int) -> np.ndarray:
    words = np.asarray(words, dtype=np.int64)
    length = words.shape[-1]
    weights = p ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return words @ weights


def format_word(word, p: int) -> str:
    if p > len(_ALPHABET):
        raise ParameterError(f"string digit words support p <= {len(_ALPHABET)}")
    return "".join(_ALPHABET[int(a)] for a in word)


def parse_word(text: str, p: int) -> tuple:
    try:
        digits = tuple(_ALPHABET.index(c) for c in text.strip().lower())
    except ValueError:
        raise ParameterError(f"bad digit word {text!r}") from None
    if any(d >= p for d in digits):
        raise ParameterError(f"digit word {text!r} has a digit >= p={p}")
    return digits


def h0_shifts(s: int, p: int) -> np.ndarray:
    """Digit words of ``H_0^(s)`` over indices ``-s .. -1``, flat order as in the module docstring."""
    return all_words(s, p)


class DigitGrid:
    """A batch of group points given by their digits at indices ``lo .. lo+L-1``.

    ``digits`` has shape ``(..., L)``; leading axes are free batch axes.
    Digits outside the stored range are zero.
    """

    def __init__(self, p: int, lo: int, digits):
        self.p = p
        self.lo = lo
        self.digits = np.asarray(digits, dtype=np.int64)

    @classmethod
    def full(cls, p: int, lo: int, hi: int) -> DigitGrid:
        """All coset representatives of ``G_lo / G_hi``."""
        return cls(p, lo, all_words(hi - lo, p))

    @property
    def hi(self) -> int:
        return self.lo + self.digits.shape[-1]

    def extend(self, lo: int, hi: int) -> DigitGrid:
        lo = min(lo, self.lo)
        hi = max(hi, self.hi)
        pad_lo = self.lo - lo
        pad_hi = hi - self.hi
        if not pad_lo and not pad_hi:
            return self
        widths = [(0, 0)] * (self.digits.ndim - 1) + [(pad_lo, pad_hi)]
        return DigitGrid(self.p, lo, np.pad(self.digits, widths))

    def dilate(self) -> DigitGrid:
        """Points ``A x``: same digit array, indices shifted down by one."""
        return DigitGrid(self.p, self.lo - 1, self.digits)

    def dilate_inv(self) -> DigitGrid:
        return DigitGrid(self.p, self.lo + 1, self.digits)

    def sub(self, h_digits, h_lo: int) -> DigitGrid:
        """Points ``x - h`` for ``h`` given by digits at ``h_lo ..``.

        ``h_digits`` has shape ``(..., Lh)`` and broadcasts against the
        grid's batch axes (prepend axes to form all pairs).
        """
        h_digits = np.asarray(h_digits, dtype=np.int64)
        g = self.extend(h_lo, h_lo + h_digits.shape[-1])
        start = h_lo - g.lo
        full = np.zeros(h_digits.shape[:-1] + (g.digits.shape[-1],), dtype=np.int64)
        full[..., start:start + h_digits.shape[-1]] = h_digits
        return DigitGrid(self.p, g.lo, (g.digits - full) % self.p)

    def add(self, h_digits, h_lo: int) -> DigitGrid:
        return self.sub((-np.asarray(h_digits, dtype=np.int64)) % self.p, h_lo)


class StepFunction:
    """A function supported in ``G_lo`` and constant on cosets of ``G_hi``.

    ``values`` is a flat table of length ``p**(hi-lo)`` (numpy complex or
    :class:`CycloArray`) indexed by the digits at ``lo .. hi-1``.
    """

    def __init__(self, p: int, lo: int, hi: int, values):
        if len(values) != p ** (hi - lo):
            raise ParameterError(f"table has {len(values)} entries, expected {p ** (hi - lo)}")
        self.p = p
        self.lo = lo
        self.hi = hi
        self.values = values

    @property
    def exact(self) -> bool:
        return isinstance(self.values, CycloArray)

    def evaluate(self, grid: DigitGrid):
        """Values at every point of ``grid`` (same batch shape)."""
        if grid.hi < self.hi:
            raise ParameterError(
                f"grid resolution G_{grid.hi} is coarser than the function's G_{self.hi}")
        d = grid.digits
        n_low = self.lo - grid.lo
        outside = np.zeros(d.shape[:-1], dtype=bool)
        if n_low > 0:
            outside = d[..., :n_low].any(axis=-1)
        cols = []
        for k in range(self.lo, self.hi):
            j = k - grid.lo
            cols.append(d[..., j] if j >= 0 else np.zeros(d.shape[:-1], dtype=np.int64))
        idx = flat_index(np.stack(cols, axis=-1), self.p) if cols else np.zeros(d.shape[:-1], np.int64)
        if self.exact:
            return self.values[idx].where_zero(outside)
        out = np.asarray(self.values)[idx]
        return np.where(outside, 0, out)

    def table(self, lo: int, hi: int):
        """Dense table on ``G_lo / G_hi`` (zero outside the support)."""
        return self.evaluate(DigitGrid.full(self.p, lo, hi))
