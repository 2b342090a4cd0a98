"""Finite model of the p-adic Vilenkin group and its character group.

An element ``x = sum_k a_k g_k`` is a finitely supported digit word over
``Z_p`` indexed by integers; addition is digitwise modulo p with no carries.
A character ``chi = prod_k r_k^{alpha_k}`` is likewise a finitely supported
exponent word, and ``(chi, x) = exp(2 pi i / p * sum_k alpha_k a_k)``.

Subgroups and annihilators::

    x in G_n       <=>  a_k = 0 for all k <  n
    chi in G_n^perp <=> alpha_k = 0 for all k >= n

Haar measures are normalised so that ``mu(G_n) = p^-n`` and
``nu(G_n^perp) = p^n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .cyclotomic import CycloArray, RootScalar
from .exceptions import ParameterError
from .validation import check_prime

__all__ = [
    "GroupParams",
    "GroupElement",
    "Character",
    "CharCoset",
    "basis_element",
    "rademacher",
    "add",
    "sub",
    "dilate",
    "dilate_inv",
    "pair",
    "char_dilate",
    "char_dilate_inv",
    "subgroup_measure",
    "annihilator_measure",
    "modulus",
    "integrate_char_over_coset",
]


@dataclass(frozen=True)
class GroupParams:
    """Prime modulus and the admissible digit index window ``[lo, hi]``."""

    p: int
    lo: int = -16
    hi: int = 16

    def __post_init__(self):
        check_prime(self.p)
        if self.lo > self.hi:
            raise ParameterError(f"empty index window [{self.lo}, {self.hi}]")

    @property
    def below_p3(self) -> bool:
        """True for p = 2, which lies outside the p >= 3 range the construction assumes."""
        return self.p < 3

    def check_index(self, k: int):
        if not self.lo <= k <= self.hi:
            raise ParameterError(f"digit index {k} outside window [{self.lo}, {self.hi}]")


class _Word:
    """Sparse digit word shared by group elements and characters."""

    __slots__ = ("params", "_items")

    def __init__(self, digits: Optional[Mapping[int, int]] = None, params: GroupParams | int = 3):
        if isinstance(params, int):
            params = GroupParams(params)
        self.params = params
        items = []
        for k, a in (digits or {}).items():
            k = int(k)
            a = int(a)
            if not 0 <= a < params.p:
                raise ParameterError(f"digit {a} at index {k} is not in 0..{params.p - 1}")
            if a:
                params.check_index(k)
                items.append((k, a))
        self._items = tuple(sorted(items))

    @property
    def p(self) -> int:
        return self.params.p

    def __getitem__(self, k: int) -> int:
        for j, a in self._items:
            if j == k:
                return a
        return 0

    def items(self):
        return self._items

    def as_dict(self) -> dict:
        return dict(self._items)

    @property
    def lowest(self) -> Optional[int]:
        return self._items[0][0] if self._items else None

    @property
    def highest(self) -> Optional[int]:
        return self._items[-1][0] if self._items else None

    def _check_same(self, other):
        if type(other) is not type(self):
            raise ParameterError(f"expected {type(self).__name__}, got {type(other).__name__}")
        if other.params.p != self.params.p:
            raise ParameterError(f"moduli differ: p={self.p} vs p={other.p}")

    def _combine(self, other, sign: int):
        self._check_same(other)
        out = dict(self._items)
        for k, a in other._items:
            out[k] = (out.get(k, 0) + sign * a) % self.p
        return type(self)(out, self.params)

    def _shift(self, d: int):
        return type(self)({k + d: a for k, a in self._items}, self.params)

    def __eq__(self, other):
        return type(other) is type(self) and self.p == other.p and self._items == other._items

    def __hash__(self):
        return hash((type(self).__name__, self.p, self._items))

    def __repr__(self):
        body = ", ".join(f"{k}: {a}" for k, a in self._items)
        return f"{type(self).__name__}({{{body}}}, p={self.p})"


class GroupElement(_Word):
    """``x = sum a_k g_k``; absent indices carry digit 0."""

    __slots__ = ()

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return GroupElement({k: (-a) % self.p for k, a in self._items}, self.params)

    def in_subgroup(self, n: int) -> bool:
        """Membership in ``G_n`` (no digits below index n)."""
        return self.lowest is None or self.lowest >= n

    def is_zero(self) -> bool:
        return not self._items


class Character(_Word):
    """``chi = prod r_k^{alpha_k}``; absent indices carry exponent 0."""

    __slots__ = ()

    def __mul__(self, other):
        return self._combine(other, 1)

    def __truediv__(self, other):
        return self._combine(other, -1)

    def inverse(self):
        return Character({k: (-a) % self.p for k, a in self._items}, self.params)

    def __pow__(self, e: int):
        return Character({k: (a * e) % self.p for k, a in self._items}, self.params)

    def in_annihilator(self, n: int) -> bool:
        """Membership in ``G_n^perp`` (no exponents at indices >= n)."""
        return self.highest is None or self.highest < n

    def is_trivial(self) -> bool:
        return not self._items


def basis_element(k: int, params: GroupParams | int = 3, digit: int = 1) -> GroupElement:
    """``digit * g_k``."""
    return GroupElement({k: digit}, params)


def rademacher(n: int, params: GroupParams | int = 3, power: int = 1) -> Character:
    """``r_n ** power``."""
    p = params if isinstance(params, int) else params.p
    return Character({n: power % p}, params)


def add(x: GroupElement, y: GroupElement) -> GroupElement:
    return x + y


def sub(x: GroupElement, y: GroupElement) -> GroupElement:
    return x - y


def dilate(x: GroupElement) -> GroupElement:
    """``A x``: every digit moves from index n to n - 1."""
    return x._shift(-1)


def dilate_inv(x: GroupElement) -> GroupElement:
    return x._shift(1)


def char_dilate_inv(chi: Character) -> Character:
    """``chi A^-1``, defined by ``(chi A^-1, x) = (chi, A^-1 x)``; maps r_n to r_{n-1}."""
    return chi._shift(-1)


def char_dilate(chi: Character) -> Character:
    """``chi A``; maps r_n to r_{n+1}."""
    return chi._shift(1)


def pair(chi: Character, x: GroupElement) -> RootScalar:
    """``(chi, x)`` as an exact root of unity."""
    if chi.p != x.p:
        raise ParameterError(f"moduli differ: p={chi.p} vs p={x.p}")
    xd = x.as_dict()
    return RootScalar(chi.p, sum(a * xd.get(k, 0) for k, a in chi.items()))


def modulus(n: int, p: int) -> Fraction:
    """``m_n = p^n``."""
    return Fraction(p) ** n


def subgroup_measure(n: int, p: int) -> Fraction:
    """``mu(G_n) = 1 / m_n``."""
    return 1 / modulus(n, p)


def annihilator_measure(n: int, p: int) -> Fraction:
    """``nu(G_n^perp) = m_n``; the product with ``mu(G_n)`` is always 1."""
    return modulus(n, p)


@dataclass(frozen=True)
class CharCoset:
    """Coset of ``G_{-N}^perp`` given by the exponents at indices ``-N, -N+1, ...``.

    ``exponents[i]`` is the exponent at index ``-N + i``; trailing zeros are
    trimmed so two cosets are equal iff their words are equal.
    """

    N: int
    exponents: tuple = ()

    def __post_init__(self):
        ex = tuple(int(a) for a in self.exponents)
        while ex and ex[-1] == 0:
            ex = ex[:-1]
        object.__setattr__(self, "exponents", ex)

    @classmethod
    def from_word(cls, word: Iterable[int], N: int) -> CharCoset:
        return cls(N, tuple(word))

    @classmethod
    def from_character(cls, chi: Character, N: int) -> CharCoset:
        top = chi.highest
        if top is None or top < -N:
            return cls(N, ())
        return cls(N, tuple(chi[k] for k in range(-N, top + 1)))

    @property
    def top(self) -> Optional[int]:
        """Index of the highest nonzero exponent (None for the trivial coset)."""
        if not self.exponents:
            return None
        return -self.N + len(self.exponents) - 1

    def word(self, M: int) -> tuple:
        """Exponents at indices ``-N .. M-1``, zero padded."""
        length = self.N + M
        if len(self.exponents) > length:
            raise ParameterError(f"coset {self.exponents} does not fit below index {M}")
        return self.exponents + (0,) * (length - len(self.exponents))

    @property
    def prefix(self) -> tuple:
        """Exponents at indices ``-N .. -1`` (the part inside ``G_0^perp``)."""
        return (self.exponents + (0,) * self.N)[: self.N]

    def representative(self, params: GroupParams | int = 3) -> Character:
        return Character({-self.N + i: a for i, a in enumerate(self.exponents)}, params)

    def is_trivial(self) -> bool:
        return not self.exponents


def integrate_char_over_coset(n: int, rep: Character, x: GroupElement) -> CycloArray:
    """Closed form of ``int_{G_n^perp rep} (chi, x) d nu(chi)``.

    Equals ``p^n (rep, x)`` when ``x in G_n`` and 0 otherwise; the coset is
    determined by the exponents of ``rep`` at indices ``>= n``.
    """
    p = rep.p
    if not x.in_subgroup(n):
        return CycloArray.zeros((), p)
    return CycloArray.from_root(pair(rep, x), scale=modulus(n, p))
