"""Input validation helpers shared by the estimator, the CLI and the core."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import ParameterError

__all__ = ["is_prime", "check_prime", "check_depth", "check_signals", "exact_log"]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def check_prime(p) -> int:
    if not isinstance(p, numbers.Integral) or isinstance(p, bool):
        raise ParameterError(f"p must be an integer, got {p!r}")
    if not is_prime(int(p)):
        raise ParameterError(f"p must be prime, got {p}")
    return int(p)


def check_depth(N, name="N", minimum=1) -> int:
    if not isinstance(N, numbers.Integral) or isinstance(N, bool) or N < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {N!r}")
    return int(N)


def exact_log(n: int, p: int) -> int:
    """k with p**k == n, or ParameterError."""
    k = 0
    m = 1
    while m < n:
        m *= p
        k += 1
    if m != n:
        raise ParameterError(f"{n} is not a power of {p}")
    return k


def check_signals(X, n_features=None, ensure_2d=True) -> np.ndarray:
    """Complex-valued counterpart of sklearn's ``check_array``.

    sklearn refuses complex input, and signals on the group are complex in
    general, so shape and finiteness are validated here instead.
    """
    X = np.asarray(X)
    if X.dtype.kind not in "biufc":
        raise ParameterError(f"signal array must be numeric, got dtype {X.dtype}")
    X = X.astype(np.complex128)
    if ensure_2d:
        if X.ndim == 1:
            raise ParameterError("expected a 2-d array of shape (n_samples, n_features); "
                                 "reshape a single signal with X.reshape(1, -1)")
        if X.ndim != 2:
            raise ParameterError(f"expected a 2-d array, got {X.ndim} dimensions")
    if not np.all(np.isfinite(X)):
        raise ParameterError("signal array contains NaN or infinity")
    if n_features is not None and X.shape[-1] != n_features:
        raise ParameterError(f"expected {n_features} features, got {X.shape[-1]}")
    return X
