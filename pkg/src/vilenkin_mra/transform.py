"""Finite orthogonal wavelet transform on ``G_-R / G_S``.

A signal is a dense complex vector of length ``p^(R+S)`` indexed by the
digits ``(a_-R, ..., a_{S-1})`` in C order (``a_-R`` most significant).
Inner products carry the weight ``p^-S`` per point.

Level 0 coefficients are inner products with ``phi(. - g)`` and
``psi_l(. - g)``, ``g in H_0^(R)``.  Coarser levels follow from the
refinement equation:

    a_{n}(g)   = p^-1/2 sum_h conj(beta_h)     a_{n+1}(A g + h)
    d_{n,l}(g) = p^-1/2 sum_h conj(beta^(l)_h) a_{n+1}(A g + h)

No periodisation is involved: with ``R >= N + J`` every basis function of
every level stays inside ``G_-R``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import ParameterError
from .grid import DigitGrid, StepFunction, flat_index, h0_shifts
from .refinable import shift_matrix
from .report import GRAM_TOL, Check, Report
from .validation import check_signals, exact_log
from .wavelet import WaveletBank

__all__ = [
    "FiniteSignal",
    "CoefficientBundle",
    "TransformPlan",
    "analyze",
    "synthesize",
    "project",
    "energy_report",
    "VilenkinWaveletTransform",
]


@dataclass
class FiniteSignal:
    p: int
    R: int
    S: int
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.p ** (self.R + self.S),):
            raise ParameterError(
                f"signal on G_-{self.R}/G_{self.S} needs {self.p ** (self.R + self.S)} samples, "
                f"got shape {self.samples.shape}")

    @classmethod
    def from_function(cls, f: StepFunction, R: int, S: int) -> FiniteSignal:
        v = f.table(-R, S)
        v = v.to_complex() if hasattr(v, "to_complex") else v
        return cls(f.p, R, S, v)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2)) / self.p ** self.S

    def inner(self, other: FiniteSignal) -> complex:
        return complex(np.vdot(other.samples, self.samples)) / self.p ** self.S


@dataclass
class CoefficientBundle:
    """Approximation at the coarsest level plus details keyed by ``(level, l)``.

    Levels are ``0, -1, ..., -(J-1)``; level ``-k`` holds ``p^(R-k)``
    coefficients indexed like :func:`h0_shifts(R-k)`.
    """

    p: int
    R: int
    S: int
    levels: int
    approx: np.ndarray
    details: dict = field(default_factory=dict)

    @property
    def coarsest(self) -> int:
        return -(self.levels - 1)

    def keys(self) -> list:
        """Detail keys from the coarsest level to level 0, ``l`` ascending."""
        return [(n, l) for n in range(self.coarsest, 1) for l in range(1, self.p)]

    def energy(self) -> float:
        e = float(np.sum(np.abs(self.approx) ** 2))
        return e + sum(float(np.sum(np.abs(self.details[k]) ** 2)) for k in self.keys())

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.approx] + [self.details[k] for k in self.keys()])

    @classmethod
    def from_flat(cls, flat, p: int, R: int, S: int, levels: int) -> CoefficientBundle:
        flat = np.asarray(flat, dtype=complex)
        if flat.shape != (p ** (R + 1),):
            raise ParameterError(f"expected {p ** (R + 1)} coefficients, got shape {flat.shape}")
        n0 = p ** (R - levels + 1)
        out = cls(p, R, S, levels, flat[:n0].copy())
        pos = n0
        for n, l in out.keys():
            size = p ** (R + n)
            out.details[(n, l)] = flat[pos:pos + size].copy()
            pos += size
        return out

    def to_dict(self) -> dict:
        def enc(a):
            return [[float(z.real), float(z.imag)] for z in a]
        return {
            "p": self.p, "R": self.R, "S": self.S, "levels": self.levels,
            "approximation": {"level": self.coarsest, "values": enc(self.approx)},
            "details": [{"level": n, "l": l, "values": enc(self.details[(n, l)])} for n, l in self.keys()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> CoefficientBundle:
        def dec(v):
            return np.array([complex(a, b) for a, b in v], dtype=complex)
        try:
            out = cls(int(data["p"]), int(data["R"]), int(data["S"]), int(data["levels"]),
                      dec(data["approximation"]["values"]))
            for d in data["details"]:
                out.details[(int(d["level"]), int(d["l"]))] = dec(d["values"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed coefficient bundle: {exc}") from None
        missing = [k for k in out.keys() if k not in out.details]
        if missing:
            raise ParameterError(f"coefficient bundle lacks details for {missing[0]}")
        for n, l in out.keys():
            if out.details[(n, l)].shape != (out.p ** (out.R + n),):
                raise ParameterError(f"detail block ({n}, {l}) has the wrong length")
        if out.approx.shape != (out.p ** (out.R + out.coarsest),):
            raise ParameterError("approximation block has the wrong length")
        return out


class TransformPlan:
    """Precomputed shift matrices and index maps for one bank and window."""

    def __init__(self, bank: WaveletBank, R: int, S: int, levels: int = 1):
        p, N, M = bank.p, bank.N, bank.M
        if levels < 1:
            raise ParameterError("levels must be at least 1")
        if R < N + levels:
            raise ParameterError(f"window G_-{R} too small: need R >= N + levels = {N + levels}")
        if S < M + 1:
            raise ParameterError(f"resolution G_{S} too coarse: need S >= M + 1 = {M + 1}")
        self.p, self.N, self.M, self.R, self.S, self.levels = p, N, M, R, S, levels
        phi, psi = bank.complex_functions()
        shifts = h0_shifts(R, p)
        self.Phi = shift_matrix(phi, shifts, -R, S)
        self.Psi = [shift_matrix(f, shifts, -R, S) for f in psi]
        self.beta = bank.beta.complex_values()
        self.beta_l = [b.complex_values() for b in bank.beta_l]
        self.weight = float(p) ** -S
        # K[k][g, h] is the index of A g + h among H_0^(R-k), for g in H_0^(R-k-1)
        self.K = [self._children(R - k) for k in range(levels - 1)]

    def _children(self, r: int) -> np.ndarray:
        p, N = self.p, self.N
        g = h0_shifts(r - 1, p)
        h = h0_shifts(N + 1, p)
        Ag = np.concatenate([g, np.zeros((len(g), 1), dtype=np.int64)], axis=1)
        words = np.broadcast_to(Ag[:, None, :], (len(g), len(h), r)).copy()
        words[:, :, r - N - 1:] = (words[:, :, r - N - 1:] + h[None, :, :]) % p
        return flat_index(words, p)

    @property
    def n_features(self) -> int:
        return self.p ** (self.R + self.S)

    @property
    def n_coefficients(self) -> int:
        return self.p ** (self.R + 1)

    def _down(self, a, k, coeffs):
        return (a[:, self.K[k]] @ coeffs.conj()) / np.sqrt(self.p)

    def _up(self, c, k, coeffs, out):
        vals = (c[:, :, None] * coeffs[None, None, :]) / np.sqrt(self.p)
        rows = np.arange(c.shape[0])[:, None, None]
        np.add.at(out, (rows, self.K[k][None, :, :]), vals)

    def analyze(self, X: np.ndarray) -> list:
        """Batch analysis; returns ``[approx, {(level, l): details}]``."""
        a = (X @ self.Phi.conj().T) * self.weight
        details = {(0, l): (X @ P.conj().T) * self.weight for l, P in enumerate(self.Psi, start=1)}
        for k in range(self.levels - 1):
            for l, bl in enumerate(self.beta_l, start=1):
                details[(-(k + 1), l)] = self._down(a, k, bl)
            a = self._down(a, k, self.beta)
        return [a, details]

    def synthesize(self, a: np.ndarray, details: dict) -> np.ndarray:
        for k in reversed(range(self.levels - 1)):
            out = np.zeros((a.shape[0], self.p ** (self.R - k)), dtype=complex)
            self._up(a, k, self.beta, out)
            for l, bl in enumerate(self.beta_l, start=1):
                self._up(details[(-(k + 1), l)], k, bl, out)
            a = out
        X = a @ self.Phi
        for l, P in enumerate(self.Psi, start=1):
            X = X + details[(0, l)] @ P
        return X

    def keys(self) -> list:
        return [(n, l) for n in range(-(self.levels - 1), 1) for l in range(1, self.p)]

    def flatten(self, a, details) -> np.ndarray:
        return np.concatenate([a] + [details[k] for k in self.keys()], axis=1)

    def unflatten(self, C) -> tuple:
        n0 = self.p ** (self.R - self.levels + 1)
        a = C[:, :n0]
        details = {}
        pos = n0
        for n, l in self.keys():
            size = self.p ** (self.R + n)
            details[(n, l)] = C[:, pos:pos + size]
            pos += size
        return a, details


def _plan_for(signal: FiniteSignal, bank: WaveletBank, levels: int) -> TransformPlan:
    if signal.p != bank.p:
        raise ParameterError(f"signal has p={signal.p}, bank has p={bank.p}")
    return TransformPlan(bank, signal.R, signal.S, levels)


def analyze(f: FiniteSignal, bank: WaveletBank, levels: int = 1,
            plan: Optional[TransformPlan] = None) -> CoefficientBundle:
    plan = plan or _plan_for(f, bank, levels)
    a, details = plan.analyze(f.samples[None, :])
    return CoefficientBundle(f.p, f.R, f.S, plan.levels, a[0], {k: v[0] for k, v in details.items()})


def synthesize(c: CoefficientBundle, bank: WaveletBank, plan: Optional[TransformPlan] = None) -> FiniteSignal:
    if c.p != bank.p:
        raise ParameterError(f"coefficients have p={c.p}, bank has p={bank.p}")
    plan = plan or TransformPlan(bank, c.R, c.S, c.levels)
    if c.approx.shape != (plan.p ** (plan.R - plan.levels + 1),):
        raise ParameterError("approximation block does not match the transform window")
    for n, l in plan.keys():
        if (n, l) not in c.details or c.details[(n, l)].shape != (plan.p ** (plan.R + n),):
            raise ParameterError(f"detail block ({n}, {l}) missing or of the wrong length")
    X = plan.synthesize(c.approx[None, :], {k: v[None, :] for k, v in c.details.items()})
    return FiniteSignal(c.p, c.R, c.S, X[0])


def project(f: FiniteSignal, bank: WaveletBank, levels: int = 1) -> FiniteSignal:
    """Orthogonal projection onto the span of the level-0 refined functions."""
    plan = _plan_for(f, bank, levels)
    return synthesize(analyze(f, bank, levels, plan), bank, plan)


def energy_report(f: FiniteSignal, c: CoefficientBundle, bank: WaveletBank,
                  in_span: Optional[bool] = None, tol: float = GRAM_TOL) -> Report:
    """Signal energy against coefficient energy; Parseval for in-span signals.

    Completeness is only checked on the finite window, so the report calls
    it finite-level completeness.
    """
    rep = Report("energy")
    total = f.norm2()
    coef = c.energy()
    residual = FiniteSignal(f.p, f.R, f.S, f.samples - synthesize(c, bank).samples).norm2()
    scale = max(total, 1.0)
    rep.add(Check("coefficient energy does not exceed signal energy", coef <= total + tol * scale,
                  max(0.0, coef - total), False,
                  {"signal_energy": total, "coefficient_energy": coef, "residual_energy": residual}))
    rep.add(Check("signal energy splits into coefficient and residual energy",
                  abs(total - coef - residual) <= tol * scale, abs(total - coef - residual), False))
    if in_span is None:
        in_span = residual <= tol * scale
    if in_span:
        rep.add(Check("finite-level completeness: Parseval equality", abs(total - coef) <= tol * scale,
                      abs(total - coef), False, {"residual_energy": residual}))
    return rep


class VilenkinWaveletTransform(TransformerMixin, BaseEstimator):
    """Estimator wrapper: rows of ``X`` are signals on ``G_-R / G_S``.

    ``transform`` returns the flat coefficient vector (approximation first,
    then details from the coarsest level to level 0, ``l`` ascending);
    ``inverse_transform`` maps it back.  ``R`` defaults to whatever the
    feature count implies once ``S`` (default ``M + 1``) is fixed.
    """

    def __init__(self, bank: Optional[WaveletBank] = None, levels: int = 1,
                 resolution: Optional[int] = None, window: Optional[int] = None):
        self.bank = bank
        self.levels = levels
        self.resolution = resolution
        self.window = window

    def fit(self, X, y=None):
        if self.bank is None:
            raise ParameterError("a wavelet bank is required")
        X = check_signals(X)
        p = self.bank.p
        total = exact_log(X.shape[1], p)
        S = self.bank.M + 1 if self.resolution is None else int(self.resolution)
        R = total - S if self.window is None else int(self.window)
        if R + S != total:
            raise ParameterError(f"{X.shape[1]} features do not match G_-{R}/G_{S}")
        self.plan_ = TransformPlan(self.bank, R, S, int(self.levels))
        self.R_, self.S_ = R, S
        self.n_features_in_ = X.shape[1]
        self.n_coefficients_ = self.plan_.n_coefficients
        return self

    def transform(self, X):
        check_is_fitted(self, "plan_")
        X = check_signals(X, n_features=self.n_features_in_)
        a, details = self.plan_.analyze(X)
        return self.plan_.flatten(a, details)

    def inverse_transform(self, C):
        check_is_fitted(self, "plan_")
        C = check_signals(C, n_features=self.n_coefficients_)
        a, details = self.plan_.unflatten(C)
        return self.plan_.synthesize(a, details)

    def bundle(self, X) -> list:
        """Per-signal :class:`CoefficientBundle` objects."""
        C = self.transform(X)
        return [CoefficientBundle.from_flat(c, self.bank.p, self.R_, self.S_, int(self.levels)) for c in C]

    def project(self, X):
        return self.inverse_transform(self.transform(X))
