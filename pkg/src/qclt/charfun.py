"""Quantum characteristic functions ``chi(z) = Tr[T D(z)]`` for one mode.

Every :class:`CharFunction` is a callable that accepts a complex scalar or
array and returns values of the same shape.  Composites (convolutions,
cascades, channel outputs) are built lazily from their factors, so they
cost nothing until evaluated.

Displacement convention: ``D(z) = exp(z a^dag - z^* a)``, hence
``chi_{|i><j|}(z) = <j|D(z)|i>``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .fock import FockDensityMatrix, GaussianSpec, PreconditionError
from .grid import PhaseGrid
from .special import log_double_factorial, normalized_laguerre_table, x_k1

__all__ = [
    "CharFunction",
    "FockCharFunction",
    "GaussianCharFunction",
    "AnalyticCharFunction",
    "ScaledProduct",
    "SelfConvolutionPower",
    "DisplacedCharFunction",
    "WignerGrid",
    "charfun_fock_element",
    "charfun_of_density",
    "charfun_gaussian",
    "convolve_char",
    "self_convolution_power",
    "cascade_environment_charfun",
    "cascade_scales",
    "displaced_charfun",
    "cauchy_counterexample_charfun",
    "heavy_tail_charfun",
    "heavy_tail_charfun_imaginary",
    "derivatives_at_zero",
    "derivative_tensor",
    "phase_space_moment_estimate",
    "wigner_from_charfun",
    "decay_bound_value",
    "verify_decay_bound",
]

_CHUNK = 16384


class CharFunction:
    """Base class; subclasses implement :meth:`_eval` on 1-d complex arrays."""

    kind: str = "abstract"
    is_state: bool = True

    def __call__(self, z):
        arr = np.asarray(z, dtype=complex)
        flat = arr.ravel()
        if flat.size <= _CHUNK:
            out = self._eval(flat)
        else:
            out = np.concatenate(
                [self._eval(flat[i : i + _CHUNK]) for i in range(0, flat.size, _CHUNK)]
            )
        out = out.reshape(arr.shape)
        return complex(out) if arr.ndim == 0 else out

    def _eval(self, z: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def on_grid(self, grid: PhaseGrid) -> np.ndarray:
        return self(grid.z)


class FockCharFunction(CharFunction):
    """``chi(z) = sum_ij w_ij <j|D(z)|i>`` from a finite weight matrix.

    Evaluation runs over diagonal offsets ``k = j - i``; for each offset the
    normalized generalized Laguerre values come from a forward recurrence and
    the prefactor ``z^k e^{-|z|^2/2} / sqrt(k!)`` is formed in log space.

    ``laguerre_sign`` exists only to build a deliberately broken engine for
    negative-control tests; leave it at ``+1``.
    """

    kind = "fock_expansion"

    def __init__(self, weights, is_state: bool = True, laguerre_sign: int = 1):
        w = np.array(weights, dtype=complex)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be square")
        mag = np.abs(w)
        live = np.nonzero((mag.max(axis=0) > 0) | (mag.max(axis=1) > 0))[0]
        d = int(live[-1]) + 1 if live.size else 1
        self.weights = w[:d, :d]
        self.dim = d
        self.is_state = is_state
        self.laguerre_sign = laguerre_sign
        self._offsets = [k for k in range(-d + 1, d) if np.any(np.diagonal(self.weights, k))]

    def _eval(self, z):
        x = (z * z.conjugate()).real
        with np.errstate(divide="ignore"):
            logr = np.log(np.sqrt(x))
        phase = np.exp(1j * np.angle(z))
        out = np.zeros(z.shape, dtype=complex)
        d = self.dim
        tables: dict[int, np.ndarray] = {}
        for off in self._offsets:
            k = abs(off)
            if k not in tables:
                tables[k] = normalized_laguerre_table(x, k, d - 1 - k)
            # entries w[i, i+k] pair with <i+k|D|i>  (prefactor z^k);
            # entries w[i+k, i] pair with <i|D|i+k>  (prefactor (-z^*)^k)
            coeff = np.diagonal(self.weights, off)
            lag = coeff @ tables[k]
            if k == 0:
                pref = np.exp(-0.5 * x)
            else:
                with np.errstate(invalid="ignore"):
                    mag = np.exp(k * logr - 0.5 * x - 0.5 * gammaln(k + 1))
                mag = np.where(x > 0, mag, 0.0)
                if off > 0:
                    pref = mag * phase**k
                else:
                    sign = (-1) ** k if self.laguerre_sign > 0 else 1
                    pref = sign * mag * phase.conjugate() ** k
            out += pref * lag
        return out


class GaussianCharFunction(CharFunction):
    kind = "gaussian"

    def __init__(self, spec: GaussianSpec):
        self.spec = spec

    def _eval(self, z):
        g = self.spec.gamma
        xr, xi = z.real, z.imag
        q = g[0, 0] * xr * xr + 2 * g[0, 1] * xr * xi + g[1, 1] * xi * xi
        return np.exp(-0.5 * q).astype(complex)


class AnalyticCharFunction(CharFunction):
    """Closed-form characteristic function identified by a tag."""

    kind = "analytic"

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], tag: str, is_state: bool = True):
        self.func = func
        self.tag = tag
        self.is_state = is_state

    def _eval(self, z):
        return np.asarray(self.func(z), dtype=complex)


class ScaledProduct(CharFunction):
    """``z -> prod_k child_k(s_k z)``."""

    kind = "scaled_product"

    def __init__(self, factors: Sequence[tuple[CharFunction, float]]):
        if not factors:
            raise ValueError("need at least one factor")
        for _, s in factors:
            if s < 0:
                raise ValueError("scale factors must be non-negative")
        self.factors = list(factors)
        self.is_state = all(c.is_state for c, _ in self.factors)

    def _eval(self, z):
        out = np.ones(z.shape, dtype=complex)
        for child, s in self.factors:
            out *= child._eval(s * z)
        return out


class SelfConvolutionPower(CharFunction):
    """``z -> chi(z / sqrt(n))^n``.

    Points where ``|chi| > 0.1`` use ``exp(n log chi)``; elsewhere the power
    is formed by repeated squaring, which has no branch cut.
    """

    kind = "scaled_product"
    LOG_BRANCH_THRESHOLD = 0.1

    def __init__(self, child: CharFunction, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.child = child
        self.n = int(n)
        self.is_state = child.is_state

    @property
    def factors(self):
        return [(self.child, 1.0 / math.sqrt(self.n))] * self.n

    @staticmethod
    def _int_power(v: np.ndarray, n: int) -> np.ndarray:
        out = np.ones_like(v)
        base = v.copy()
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def _eval(self, z):
        v = self.child._eval(z / math.sqrt(self.n))
        if self.n == 1:
            return v
        big = np.abs(v) > self.LOG_BRANCH_THRESHOLD
        out = self._int_power(v, self.n)
        if np.any(big):
            out[big] = np.exp(self.n * np.log(v[big]))
        return out


class DisplacedCharFunction(CharFunction):
    """Characteristic function of ``D(w) rho D(w)^dag``."""

    kind = "analytic"

    def __init__(self, child: CharFunction, w: complex):
        self.child = child
        self.w = complex(w)
        self.tag = "displaced"
        self.is_state = child.is_state

    def _eval(self, u):
        w = self.w
        # e^{w^* u - w u^*} = e^{2i Im(w^* u)}
        return np.exp(w.conjugate() * u - w * u.conjugate()) * self.child._eval(u)


# -- constructors -----------------------------------------------------------


def charfun_fock_element(i: int, j: int) -> FockCharFunction:
    """Characteristic function of the operator ``|i><j|``."""
    if i < 0 or j < 0:
        raise ValueError("Fock indices must be non-negative")
    w = np.zeros((max(i, j) + 1,) * 2, dtype=complex)
    w[i, j] = 1.0
    return FockCharFunction(w, is_state=(i == j))


def charfun_of_density(rho: FockDensityMatrix, laguerre_sign: int = 1) -> FockCharFunction:
    return FockCharFunction(rho.entries, is_state=True, laguerre_sign=laguerre_sign)


def charfun_gaussian(spec: GaussianSpec) -> GaussianCharFunction:
    return GaussianCharFunction(spec)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {lam}")
    return lam


def convolve_char(chi1: CharFunction, chi2: CharFunction, lam: float) -> ScaledProduct:
    lam = _check_lambda(lam)
    return ScaledProduct([(chi1, math.sqrt(lam)), (chi2, math.sqrt(1.0 - lam))])


def self_convolution_power(chi: CharFunction, n: int) -> CharFunction:
    if n == 1:
        return chi
    return SelfConvolutionPower(chi, n)


def cascade_scales(lam: float, n: int) -> np.ndarray:
    """Scale factors ``sqrt((1-lam^{1/n})/(1-lam)) lam^{(l-1)/(2n)}``, ``l = 1..n``."""
    if not 0.0 < lam < 1.0:
        raise ValueError("cascade transmissivity must lie strictly inside (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    base = math.sqrt(-math.expm1(math.log(lam) / n) / (1.0 - lam))
    return base * lam ** (np.arange(n) / (2.0 * n))


def cascade_environment_charfun(chi_env: CharFunction, lam: float, n: int) -> CharFunction:
    """Effective single-shot environment of an ``n``-segment cascade."""
    scales = cascade_scales(lam, n)
    if n == 1:
        return ScaledProduct([(chi_env, 1.0)])
    return ScaledProduct([(chi_env, float(s)) for s in scales])


def displaced_charfun(chi: CharFunction, w: complex) -> CharFunction:
    return DisplacedCharFunction(chi, w)


def _cauchy(z):
    zr, zi = z.real, z.imag
    den = math.sqrt(2.0) + 1j * zr
    return math.sqrt(2.0) * np.exp(-np.abs(zi) * den) / den


def cauchy_counterexample_charfun() -> AnalyticCharFunction:
    """Pure state with wave function ``1/(sqrt(pi) (x + i))``; no finite moments."""
    return AnalyticCharFunction(_cauchy, "cauchy")


def heavy_tail_charfun_imaginary(t: float) -> complex:
    """``chi(i t) = sqrt(2)|t| K1(sqrt(2)|t|)`` for ``f(x) = (1+x^2)^{-3/4}/sqrt(2)``."""
    return complex(x_k1(math.sqrt(2.0) * abs(t)))


def _heavy_tail_point(z: complex) -> complex:
    a = math.sqrt(2.0) * z.real
    omega = math.sqrt(2.0) * z.imag
    if a == 0.0:
        return heavy_tail_charfun_imaginary(z.imag)

    def f(x):
        return (1.0 + x * x) ** -0.75 / math.sqrt(2.0)

    def even(x):
        return f(x) * f(x - a) + f(-x) * f(-x - a)

    def odd(x):
        return f(x) * f(x - a) - f(-x) * f(-x - a)

    if omega == 0.0:
        re = integrate.quad(even, 0, np.inf, limit=400, epsabs=1e-13)[0]
        im = 0.0
    else:
        w = abs(omega)
        # QAWF flags slowly decaying cycles even when converged (checked against mpmath)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            re = integrate.quad(even, 0, np.inf, weight="cos", wvar=w, epsabs=1e-13, limlst=200)[0]
            im = math.copysign(1.0, omega) * integrate.quad(
                odd, 0, np.inf, weight="sin", wvar=w, epsabs=1e-13, limlst=200
            )[0]
    return complex(np.exp(-1j * z.imag * z.real) * (re + 1j * im))


def heavy_tail_charfun() -> AnalyticCharFunction:
    """Pure state with wave function ``(1+x^2)^{-3/4}/sqrt(2)``.

    Finite moments of every order below two but not two itself.  Off the
    imaginary axis each value is a pair of oscillatory quadratures, so keep
    evaluations to a handful of probe points.
    """

    def func(z):
        return np.array([_heavy_tail_point(complex(v)) for v in np.ravel(z)], dtype=complex)

    return AnalyticCharFunction(func, "heavy_tail")


# -- derivatives ------------------------------------------------------------

# central-difference weights, error O(h^2), keyed by derivative order
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def _real_partials(chi: CharFunction, z0: np.ndarray, max_order: int, h: float) -> dict:
    """``d^p/dx^p d^q/dy^q chi`` at each point in ``z0`` for ``p + q <= max_order``."""
    offsets = np.arange(-2, 3)
    ox, oy = np.meshgrid(offsets, offsets, indexing="ij")
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    out = {}
    for step in (h, h / 2):
        pts = z0[:, None, None] + step * (ox + 1j * oy)[None]
        vals = chi(pts)
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("characteristic function is not finite near the expansion point")
        for p in range(max_order + 1):
            for q in range(max_order + 1 - p):
                acc = np.zeros(z0.shape, dtype=complex)
                for a, wa in _STENCILS[p].items():
                    for b, wb in _STENCILS[q].items():
                        acc += wa * wb * vals[:, a + 2, b + 2]
                out.setdefault((p, q), []).append(acc / step ** (p + q))
    # Richardson: O(h^2) -> O(h^4)
    return {key: (4.0 * fine - coarse) / 3.0 for key, (coarse, fine) in out.items()}


def derivative_tensor(chi: CharFunction, z0, max_order: int = 3, h: float = 1e-2) -> dict:
    """Wirtinger derivatives ``d_z^a d_{z*}^b chi`` at ``z0`` (array), ``a + b <= max_order``.

    Keys are ``(a, b)``; values have the shape of ``np.atleast_1d(z0)``.
    """
    if not 0 <= max_order <= 4:
        raise ValueError("max_order must be between 0 and 4")
    real = _real_partials(chi, z0, max_order, h)
    out = {}
    for a in range(max_order + 1):
        for b in range(max_order + 1 - a):
            acc = 0j
            # d_z = (d_x - i d_y)/2,  d_{z*} = (d_x + i d_y)/2
            for r in range(a + 1):
                for s in range(b + 1):
                    coef = math.comb(a, r) * math.comb(b, s) * (-1j) ** (a - r) * (1j) ** (b - s)
                    acc = acc + coef * real[(r + s, a - r + b - s)]
            out[(a, b)] = acc / 2 ** (a + b)
    return out


def derivatives_at_zero(chi: CharFunction, max_order: int = 3, h: float = 1e-2) -> dict:
    """Mixed Wirtinger derivatives at the origin, keyed ``(a, b)`` -> complex."""
    return {k: complex(v[0]) for k, v in derivative_tensor(chi, 0.0, max_order, h).items()}


def _disk_points(eps: float, samples: int) -> np.ndarray:
    # sunflower layout plus the origin
    if samples <= 1:
        return np.zeros(1, dtype=complex)
    k = np.arange(1, samples)
    r = eps * np.sqrt(k / (samples - 1))
    theta = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.concatenate([[0j], r * np.exp(1j * theta)])


def phase_space_moment_estimate(chi: CharFunction, k: int, eps: float, samples: int = 64) -> float:
    """Sampled lower estimate of ``sup_{|z|<=eps} max_{a+b<=k} |d_z^a d_{z*}^b chi|``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = _disk_points(eps, samples)
    tensor = derivative_tensor(chi, pts, max_order=int(k))
    return float(max(np.max(np.abs(v)) for v in tensor.values()))


# -- Wigner function --------------------------------------------------------


@dataclass
class WignerGrid:
    grid: PhaseGrid
    values: np.ndarray
    max_imag: float

    def mass(self) -> float:
        return float(np.sum(self.values) * self.grid.weight)

    def energy(self) -> float:
        """Quadrature of ``|z|^2 W``; equals ``Tr[rho (a^dag a + 1/2)]`` for states."""
        return float(np.sum(np.abs(self.grid.z) ** 2 * self.values) * self.grid.weight)


def wigner_from_charfun(chi: CharFunction, grid: PhaseGrid) -> WignerGrid:
    """``W(z) = pi^-2 int chi(w) exp(z w^* - z^* w) d^2w`` on the grid nodes."""
    c = chi.on_grid(grid)
    grid.check_boundary(c, what="characteristic function")
    u = grid.axis
    # z w^* - z^* w = 2i (z_I w_R - z_R w_I); the kernel separates by axis
    ker_re = np.exp(-2j * np.outer(u, u))  # [z_R, w_I]
    ker_im = np.exp(2j * np.outer(u, u))  # [z_I, w_R]
    w = ker_re @ c.T @ ker_im.T  # [z_R, z_I]
    w *= grid.weight / math.pi**2
    return WignerGrid(grid, w.real.copy(), float(np.max(np.abs(w.imag))))


# -- decay bound ------------------------------------------------------------


def decay_bound_value(E: float, m: int, delta: float, z_abs) -> float:
    """Upper bound on ``|chi(z)|`` for a state of energy ``E = Tr[rho(H + m/2)]``."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if m < 1:
        raise ValueError("m must be a positive integer")
    if E < 0.5 * m - 1e-12:
        raise PreconditionError(f"energy {E} below the vacuum floor {0.5 * m}")
    if delta in (0.0, 1.0):
        pref = 0.0
    else:
        logp = (
            3 * math.log1p(-delta)
            + (2 * m - 1) * math.log(delta)
            + 2 * log_double_factorial(2 * m + 1)
            - math.log(6.0)
            - 4 * m * math.log(2.0)
            - (2 * m - 1) * math.log(E)
        )
        pref = math.exp(logp)
    za = np.asarray(z_abs, dtype=float)
    out = 1.0 - pref * np.minimum(za**2, math.pi**2 * delta / (4.0 * E))
    return float(out) if out.ndim == 0 else out


def verify_decay_bound(
    chi: CharFunction,
    E: float,
    radii: Sequence[float],
    deltas: Sequence[float],
    m: int = 1,
    angles: int = 24,
) -> float:
    """Minimum of ``bound - |chi(z)|`` over sampled circles and ``delta`` values."""
    theta = 2 * math.pi * np.arange(angles) / angles
    r = np.asarray(radii, dtype=float)
    pts = r[:, None] * np.exp(1j * theta)[None, :]
    mod = np.abs(chi(pts))
    margin = math.inf
    for d in deltas:
        bound = decay_bound_value(E, m, d, r)[:, None]
        margin = min(margin, float(np.min(bound - mod)))
    return margin
