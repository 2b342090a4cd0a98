"""Exact arithmetic in the cyclotomic field Q(w), w = exp(2 pi i / p).

Two carriers are provided:

* :class:`RootScalar` -- a single value that is either 0 or a p-th root of
  unity, stored as an integer phase.  Pairings of characters with group
  elements and mask entries live here.
* :class:`CycloArray` -- a dense array of elements of ``(1/d) Z[w]``.  Sums of
  roots of unity (Fourier sums, Gram matrices, refinement residuals) are
  computed here without rounding, so identities can be checked with zero
  tolerance.

Elements are stored as integer coefficient vectors over ``1, w, ..., w^(p-1)``
together with one rational scale per array.  Because
``1 + w + ... + w^(p-1) = 0`` the vector is made canonical by forcing the last
coefficient to zero; for prime p the remaining powers are a basis, so two
canonical vectors are equal iff the numbers are equal.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np

__all__ = ["RootScalar", "CycloArray", "root_powers"]


def root_powers(p: int) -> np.ndarray:
    """Complex values ``w**k`` for ``k = 0..p-1``."""
    return np.exp(2j * np.pi * np.arange(p) / p)


@dataclass(frozen=True)
class RootScalar:
    """Zero or ``exp(2 pi i phase / p)``; ``phase=None`` encodes zero."""

    p: int
    phase: Optional[int] = 0

    def __post_init__(self):
        if self.phase is not None:
            object.__setattr__(self, "phase", int(self.phase) % self.p)

    @classmethod
    def zero(cls, p):
        return cls(p, None)

    @classmethod
    def one(cls, p):
        return cls(p, 0)

    @property
    def is_zero(self) -> bool:
        return self.phase is None

    def __mul__(self, other):
        if isinstance(other, RootScalar):
            if other.p != self.p:
                raise ValueError("cannot multiply roots of unity of different orders")
            if self.is_zero or other.is_zero:
                return RootScalar.zero(self.p)
            return RootScalar(self.p, self.phase + other.phase)
        return NotImplemented

    def conj(self) -> RootScalar:
        if self.is_zero:
            return self
        return RootScalar(self.p, -self.phase)

    def __pow__(self, k: int) -> RootScalar:
        if self.is_zero:
            if k < 0:
                raise ZeroDivisionError("zero has no inverse")
            return self if k else RootScalar.one(self.p)
        return RootScalar(self.p, self.phase * k)

    def abs2(self) -> int:
        return 0 if self.is_zero else 1

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.exp(2j * cmath.pi * self.phase / self.p)

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        if self.is_zero:
            return f"RootScalar(p={self.p}, 0)"
        return f"RootScalar(p={self.p}, w^{self.phase})"


def _common_scale(a: Fraction, b: Fraction) -> Fraction:
    if a == 0:
        return b if b != 0 else Fraction(1)
    if b == 0:
        return a
    num = gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
    return Fraction(num, den)


class CycloArray:
    """Dense array of exact cyclotomic numbers.

    ``value[idx] = scale * sum_k coef[idx + (k,)] * w**k``.  Leading axes
    behave like an ordinary numpy array; the trailing axis of ``coef`` (length
    p) is the coefficient axis and is never exposed through indexing.
    """

    __array_priority__ = 1000

    def __init__(self, coef, p: int, scale=1):
        coef = np.asarray(coef, dtype=np.int64)
        if coef.ndim == 0 or coef.shape[-1] != p:
            raise ValueError(f"coefficient array must end with an axis of length p={p}")
        scale = Fraction(scale)
        if scale == 0:
            coef = np.zeros_like(coef)
            scale = Fraction(1)
        self.p = int(p)
        self.scale = scale
        self.coef = coef - coef[..., -1:]

    # construction -----------------------------------------------------------

    @classmethod
    def zeros(cls, shape, p):
        shape = tuple(shape) if isinstance(shape, (tuple, list)) else (int(shape),)
        return cls(np.zeros(shape + (p,), dtype=np.int64), p)

    @classmethod
    def from_int(cls, values, p, scale=1):
        values = np.asarray(values, dtype=np.int64)
        coef = np.zeros(values.shape + (p,), dtype=np.int64)
        coef[..., 0] = values
        return cls(coef, p, scale)

    @classmethod
    def from_phases(cls, phases, p, nonzero=None, scale=1):
        """Array of roots ``w**phases``; entries where ``nonzero`` is False are 0."""
        phases = np.asarray(phases, dtype=np.int64) % p
        coef = np.zeros(phases.shape + (p,), dtype=np.int64)
        np.put_along_axis(coef, phases[..., None], 1, axis=-1)
        if nonzero is not None:
            coef[~np.asarray(nonzero, dtype=bool)] = 0
        return cls(coef, p, scale)

    @classmethod
    def from_root(cls, r: RootScalar, scale=1):
        return cls.from_phases(0 if r.is_zero else r.phase, r.p, nonzero=not r.is_zero, scale=scale)

    @classmethod
    def phase_histogram(cls, phases, p, axis=-1, weights_nonzero=None, scale=1):
        """Sum of ``w**phases`` along ``axis`` (entries masked out by ``weights_nonzero`` skipped)."""
        phases = np.moveaxis(np.asarray(phases, dtype=np.int64) % p, axis, -1)
        keep = None
        if weights_nonzero is not None:
            keep = np.moveaxis(np.asarray(weights_nonzero, dtype=bool), axis, -1)
        coef = np.stack(
            [((phases == k) if keep is None else ((phases == k) & keep)).sum(axis=-1) for k in range(p)],
            axis=-1,
        )
        return cls(coef, p, scale)

    # array protocol ---------------------------------------------------------

    @property
    def shape(self):
        return self.coef.shape[:-1]

    @property
    def ndim(self):
        return self.coef.ndim - 1

    @property
    def size(self):
        return int(np.prod(self.shape, dtype=np.int64))

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, key):
        if key is Ellipsis or (isinstance(key, tuple) and any(k is Ellipsis for k in key)):
            raise IndexError("Ellipsis indexing is not supported on CycloArray")
        return CycloArray(self.coef[key], self.p, self.scale)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return CycloArray(self.coef.reshape(tuple(shape) + (self.p,)), self.p, self.scale)

    @property
    def T(self):
        axes = tuple(reversed(range(self.ndim))) + (self.ndim,)
        return CycloArray(self.coef.transpose(axes), self.p, self.scale)

    def sum(self, axis=None):
        if axis is None:
            return CycloArray(self.coef.reshape(-1, self.p).sum(axis=0), self.p, self.scale)
        axes = (axis,) if np.ndim(axis) == 0 else tuple(axis)
        axes = tuple(a % self.ndim for a in axes)
        return CycloArray(self.coef.sum(axis=axes), self.p, self.scale)

    def where_zero(self, mask):
        """Copy with the entries selected by ``mask`` set to zero."""
        coef = self.coef.copy()
        coef[np.asarray(mask, dtype=bool)] = 0
        return CycloArray(coef, self.p, self.scale)

    def take(self, indices, axis=0):
        return CycloArray(np.take(self.coef, indices, axis=axis % self.ndim), self.p, self.scale)

    @staticmethod
    def stack(arrays, axis=0):
        arrays = list(arrays)
        p = arrays[0].p
        scale = arrays[0].scale
        for a in arrays[1:]:
            scale = _common_scale(scale, a.scale)
        coefs = [a._coef_at(scale) for a in arrays]
        return CycloArray(np.stack(coefs, axis=axis), p, scale)

    # arithmetic -------------------------------------------------------------

    def _coef_at(self, scale: Fraction) -> np.ndarray:
        factor = self.scale / scale
        if factor.denominator != 1:
            raise ArithmeticError("scale is not a common denominator")
        return self.coef * int(factor)

    def _coerce(self, other):
        if isinstance(other, CycloArray):
            if other.p != self.p:
                raise ValueError("cyclotomic orders differ")
            return other
        if isinstance(other, RootScalar):
            return CycloArray.from_root(other)
        if isinstance(other, (int, np.integer, Fraction)):
            return CycloArray.from_int(1, self.p, Fraction(other))
        if isinstance(other, np.ndarray) and other.dtype.kind in "iub":
            return CycloArray.from_int(other.astype(np.int64), self.p)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        scale = _common_scale(self.scale, other.scale)
        return CycloArray(self._coef_at(scale) + other._coef_at(scale), self.p, scale)

    __radd__ = __add__

    def __neg__(self):
        return CycloArray(-self.coef, self.p, self.scale)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, Fraction)):
            return CycloArray(self.coef, self.p, self.scale * Fraction(other))
        if isinstance(other, RootScalar):
            if other.is_zero:
                return CycloArray(np.zeros_like(self.coef), self.p)
            return self.rotate(other.phase)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        p = self.p
        a, b = np.broadcast_arrays(self.coef, other.coef)
        out = np.zeros(a.shape, dtype=np.int64)
        for i in range(p):
            ai = a[..., i]
            if not ai.any():
                continue
            for j in range(p):
                out[..., (i + j) % p] += ai * b[..., j]
        return CycloArray(out, p, self.scale * other.scale)

    __rmul__ = __mul__

    def conj(self):
        idx = (-np.arange(self.p)) % self.p
        return CycloArray(self.coef[..., idx], self.p, self.scale)

    def rotate(self, phases):
        """Multiply entrywise by ``w**phases``."""
        phases = np.asarray(phases, dtype=np.int64)
        coef, phases = np.broadcast_arrays(self.coef, phases[..., None])
        idx = (np.arange(self.p) - phases) % self.p
        return CycloArray(np.take_along_axis(coef, idx, axis=-1), self.p, self.scale)

    def abs2(self):
        return self * self.conj()

    def matmul(self, other):
        """Matrix product over the leading axes: (m, n) @ (n, k) or (m, n) @ (n,)."""
        other = self._coerce(other)
        p = self.p
        if self.ndim != 2 or other.ndim not in (1, 2):
            raise ValueError("matmul expects a 2-d left operand and a 1-d or 2-d right operand")
        out_shape = (self.shape[0],) + other.shape[1:]
        a_max = int(np.abs(self.coef).max(initial=0))
        b_max = int(np.abs(other.coef).max(initial=0))
        n = self.shape[1]
        if a_max * b_max * max(n, 1) * p < 2 ** 52:
            # every partial sum is an integer below 2^53, so one float product is exact
            B = other.coef if other.ndim == 2 else other.coef[:, None, :]
            k = B.shape[1]
            A = np.moveaxis(self.coef, -1, 0).reshape(p * self.shape[0], n).astype(np.float64)
            Bf = np.moveaxis(B, -1, 1).reshape(n, p * k).astype(np.float64)
            prod = np.rint(A @ Bf).astype(np.int64).reshape(p, self.shape[0], p, k)
            out = np.zeros((self.shape[0], k, p), dtype=np.int64)
            for i in range(p):
                for j in range(p):
                    out[..., (i + j) % p] += prod[i, :, j, :]
            if other.ndim == 1:
                out = out[:, 0, :]
            return CycloArray(out, p, self.scale * other.scale)
        out = np.zeros(out_shape + (p,), dtype=np.int64)
        for i in range(p):
            ai = self.coef[..., i]
            if not ai.any():
                continue
            for j in range(p):
                bj = other.coef[..., j]
                if bj.any():
                    out[..., (i + j) % p] += ai @ bj
        return CycloArray(out, p, self.scale * other.scale)

    __matmul__ = matmul

    # inspection -------------------------------------------------------------

    def is_zero(self) -> np.ndarray:
        """Entrywise exact test for zero."""
        return ~self.coef.any(axis=-1)

    def equals(self, other) -> np.ndarray:
        return (self - other).is_zero()

    def to_complex(self) -> np.ndarray:
        out = (self.coef @ root_powers(self.p)) * float(self.scale)
        return out

    def __complex__(self):
        if self.ndim:
            raise TypeError("only 0-d arrays convert to complex")
        return complex(self.to_complex())

    def __repr__(self):
        return f"CycloArray(p={self.p}, shape={self.shape}, scale={self.scale})"
