"""Scalar special functions used across the package.

Everything here works in natural-log units.  The Laguerre helpers return
*normalized* polynomials, ``sqrt(n!/(n+k)!) * L_n^(k)(x)`` in the usual
generalized convention, which is the combination that shows up in
displacement-operator matrix elements and stays bounded for large ``n``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "g_fn",
    "binary_entropy",
    "bessel_k1",
    "x_k1",
    "log_double_factorial",
    "normalized_laguerre_table",
    "laguerre_derivative_coeffs",
]

_EULER_GAMMA = 0.57721566490153286061


def g_fn(x):
    """Entropy of a thermal state with mean photon number ``x``.

    ``g(x) = (x+1) log(x+1) - x log x`` with ``g(0) = 0``.  Accepts scalars or
    arrays; raises ``ValueError`` on negative input.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError(f"g_fn requires x >= 0, got {x!r}")
    # log(1+x) + x log(1 + 1/x) avoids cancellation between the two large terms
    safe = np.where(arr > 0, arr, 1.0)
    tail = np.where(safe >= 1.0, np.log1p(1.0 / np.maximum(safe, 1.0)), np.log1p(safe) - np.log(safe))
    out = np.log1p(arr) + np.where(arr > 0, arr * tail, 0.0)
    return float(out) if out.ndim == 0 else out


def binary_entropy(x):
    """Binary entropy ``-x log x - (1-x) log(1-x)`` with zero endpoints."""
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError(f"binary_entropy requires x in [0, 1], got {x!r}")
    safe = np.clip(arr, 1e-300, 1.0)
    safe_c = np.clip(1.0 - arr, 1e-300, 1.0)
    out = -np.where(arr > 0, arr * np.log(safe), 0.0) - np.where(
        arr < 1, (1.0 - arr) * np.log(safe_c), 0.0
    )
    return float(out) if out.ndim == 0 else out


def log_double_factorial(n: int) -> float:
    """``log(n!!)`` for integer ``n >= -1``."""
    if n < -1:
        raise ValueError("double factorial defined for n >= -1")
    if n <= 0:
        return 0.0
    if n % 2:
        k = (n + 1) // 2
        # (2k-1)!! = (2k)! / (2^k k!)
        return float(gammaln(2 * k + 1) - k * math.log(2.0) - gammaln(k + 1))
    k = n // 2
    return float(k * math.log(2.0) + gammaln(k + 1))


def _k1_series(x: float) -> float:
    # K1(x) = 1/x + log(x/2) I1(x) - (x/4) sum_k [psi(k+1)+psi(k+2)] (x^2/4)^k / (k!(k+1)!)
    q = 0.25 * x * x
    term = 1.0  # (x^2/4)^k / (k! (k+1)!)
    psi_a = -_EULER_GAMMA  # psi(k+1)
    psi_b = 1.0 - _EULER_GAMMA  # psi(k+2)
    i1_sum = 0.0
    log_sum = 0.0
    for k in range(60):
        i1_sum += term
        log_sum += (psi_a + psi_b) * term
        if term < 1e-18 * i1_sum:
            break
        term *= q / ((k + 1) * (k + 2))
        psi_a += 1.0 / (k + 1)
        psi_b += 1.0 / (k + 2)
    i1 = 0.5 * x * i1_sum
    return 1.0 / x + math.log(0.5 * x) * i1 - 0.25 * x * log_sum


def _k1_integral(x: float) -> float:
    # K1(x) = int_0^inf exp(-x cosh t) cosh t dt; the integrand decays doubly
    # exponentially so the trapezoid rule converges geometrically in 1/h.
    t_max = math.acosh(max(745.0 / x, 1.0)) + 1.0
    h = 0.02
    t = np.arange(0.0, t_max + h, h)
    ch = np.cosh(t)
    vals = np.exp(-x * (ch - 1.0)) * ch
    total = h * (vals.sum() - 0.5 * vals[0])
    return float(total * math.exp(-x))


def bessel_k1(x: float) -> float:
    """Modified Bessel function of the second kind, order one, for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise ValueError("bessel_k1 requires x > 0")
    if x < 2.0:
        return _k1_series(x)
    return _k1_integral(x)


def x_k1(x: float) -> float:
    """``x K1(x)`` extended by continuity to ``x = 0`` (value 1)."""
    x = abs(float(x))
    if x == 0.0:
        return 1.0
    if x > 700.0:
        return 0.0
    return x * bessel_k1(x)


def laguerre_derivative_coeffs(n: int, k: int) -> list[float]:
    """Monomial coefficients of ``d^k/dx^k L_n(x)``, lowest power first.

    Uses log-factorials so that large ``n`` does not overflow.  Intended as a
    reference; evaluation in the engines goes through the recurrence in
    :func:`normalized_laguerre_table`.
    """
    if k > n:
        return [0.0]
    coeffs = []
    for m in range(k, n + 1):
        # d^k/dx^k x^m = m!/(m-k)! x^(m-k);  L_n = sum C(n,m) (-1)^m x^m / m!
        logmag = gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1) - gammaln(m - k + 1)
        coeffs.append((-1.0) ** m * math.exp(logmag))
    return coeffs


def normalized_laguerre_table(x: np.ndarray, k: int, n_max: int) -> np.ndarray:
    """Rows ``sqrt(n!/(n+k)!) L_n^(k)(x) * sqrt(k!)`` for ``n = 0..n_max``.

    The extra ``sqrt(k!)`` keeps row 0 equal to one; callers fold
    ``1/sqrt(k!)`` into the prefactor in log space.  Forward three-term
    recurrence, shape ``(n_max + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = (1.0 + k - x) / math.sqrt(k + 1.0)
    for n in range(1, n_max):
        a = math.sqrt((n + 1.0) * (n + k + 1.0))
        b = math.sqrt(n * (n + k + 0.0))
        out[n + 1] = ((2 * n + 1 + k - x) * out[n] - b * out[n - 1]) / a
    return out
