"""Thermal attenuators, beam-splitter cascades and their capacities.

All entropic quantities are in nats.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .charfun import (
    CharFunction,
    GaussianCharFunction,
    ScaledProduct,
    cascade_environment_charfun,
    convolve_char,
)
from .fock import FockDensityMatrix, GaussianSpec
from .phase import trace_distance
from .special import binary_entropy, g_fn

__all__ = [
    "CascadeSpec",
    "CapacityReport",
    "g_fn",
    "binary_entropy",
    "thermal_attenuator_apply",
    "cascade_apply",
    "cascade_mixing_weight",
    "diamond_distance_bound",
    "classical_capacity_thermal",
    "quantum_capacity_band",
    "antidegradability_threshold",
    "capacity_error_terms",
]


@dataclass(frozen=True)
class CascadeSpec:
    """``segments`` beam splitters of transmissivity ``lam^(1/segments)`` each."""

    lam: float
    segments: int
    env: CharFunction
    env_N: float

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError("cascade transmissivity must lie in (0, 1)")
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if self.env_N < 0:
            raise ValueError("environment photon number must be >= 0")

    @property
    def segment_transmissivity(self) -> float:
        return self.lam ** (1.0 / self.segments)

    def effective_environment(self) -> CharFunction:
        return cascade_environment_charfun(self.env, self.lam, self.segments)


@dataclass
class CapacityReport:
    lam: float
    N: float
    E: float
    classical: float
    q_lower: float
    q_upper: float
    eps: float
    delta_c: float
    delta_q: float
    flags: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def cascade_mixing_weight(lam: float, n: int) -> float:
    """``eta(lam, n)`` in ``rho(lam, n) = rho(lam^{(n-1)/n}, n-1) boxplus_eta rho``."""
    if n < 2:
        raise ValueError("mixing weight defined for n >= 2")
    return lam ** (1.0 / n) * (1.0 - lam ** ((n - 1.0) / n)) / (1.0 - lam)


def thermal_attenuator_apply(chi_in: CharFunction, lam: float, N: float) -> CharFunction:
    if N < 0:
        raise ValueError("thermal photon number must be >= 0")
    return convolve_char(chi_in, GaussianCharFunction(GaussianSpec.thermal(N)), lam)


def cascade_apply(chi_in: CharFunction, spec: CascadeSpec) -> CharFunction:
    lam = spec.lam
    return ScaledProduct(
        [(chi_in, math.sqrt(lam)), (spec.effective_environment(), math.sqrt(1.0 - lam))]
    )


def diamond_distance_bound(env1: FockDensityMatrix, env2: FockDensityMatrix) -> float:
    """Upper bound on the diamond distance between two convolution channels.

    Convolving with a fixed input is a channel in the environment, so the
    trace distance of the environments bounds the channel distance for any
    transmissivity.
    """
    return trace_distance(env1, env2)


def classical_capacity_thermal(lam: float, N: float, E: float) -> float:
    return float(g_fn(lam * E + (1.0 - lam) * N) - g_fn((1.0 - lam) * N))


def antidegradability_threshold(N: float) -> float:
    return (N + 0.5) / (N + 1.0)


def _lower_objective(x: float, lam: float, N: float, E: float) -> float:
    ex = E / x
    disc = ((1 + lam) * ex + (1 - lam) * N + 1) ** 2 - 4 * lam * ex * (ex + 1)
    d = math.sqrt(max(disc, 0.0))
    u = (1 - lam) * (ex - N)
    a = max(0.5 * (d + u - 1), 0.0)
    b = max(0.5 * (d - u - 1), 0.0)
    return x * (g_fn(lam * ex + (1 - lam) * N) - g_fn(a) - g_fn(b))


def _golden_max(f, a: float, b: float, tol: float = 1e-12, iters: int = 200) -> tuple[float, float]:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def quantum_capacity_band(lam: float, N: float, E: float, scan_points: int = 256) -> tuple[float, float, list]:
    """Best known lower and upper bounds on the quantum capacity of ``E_{N,lam}``.

    Returns ``(q_lower, q_upper, flags)``.  Below the antidegradability
    threshold both bounds are zero; exactly at it only the lower bound is
    pinned to zero.
    """
    if scan_points < 64:
        raise ValueError("scan_points must be >= 64")
    if not 0.0 <= lam <= 1.0 or N < 0 or E <= 0:
        raise ValueError("need lam in [0,1], N >= 0, E > 0")
    flags: list[str] = []
    thr = antidegradability_threshold(N)
    if lam < thr:
        return 0.0, 0.0, ["antidegradable"]

    if lam == thr:
        lower = 0.0
        flags.append("at_threshold")
    else:
        xs = np.geomspace(1e-4, 1.0, scan_points)
        vals = np.array([_lower_objective(x, lam, N, E) for x in xs])
        i = int(np.argmax(vals))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        _, best = _golden_max(lambda x: _lower_objective(x, lam, N, E), lo, hi)
        lower = max(0.0, float(vals[i]), best)

    e_out = lam * E + (1 - lam) * N
    denom = lam - (1 - lam) * N
    candidates = []
    if denom > 0:
        candidates.append(g_fn(e_out) - g_fn((1 - lam) * (N + 1) / denom * e_out))
    else:
        flags.append("F1_skipped")
    if lam < 1.0:
        candidates.append(-math.log((1 - lam) * lam**N) - g_fn(N))
    upper = min(candidates) if candidates else math.inf
    return lower, max(float(upper), lower), flags


def capacity_error_terms(eps: float, lam: float, N: float, E: float) -> tuple[float, float]:
    """Continuity-bound corrections ``(delta_c, delta_q)`` for a channel ``eps``-close in
    half diamond norm to the thermal attenuator."""
    if eps < 0 or eps > 2:
        raise ValueError("eps must lie in [0, 2]")
    if eps == 0:
        return 0.0, 0.0
    e_out = lam * E + (1 - lam) * N
    se = math.sqrt(eps)
    delta_q = 56 * se * g_fn(4 * e_out / se) + 6 * g_fn(4 * se)
    delta_c = (
        7 * eps * (math.log(e_out + 1) - math.log(eps / 2) + 1)
        + 2 * g_fn(2.5 * eps)
        + 4 * binary_entropy(eps / 2)
    )
    return float(delta_c), float(delta_q)
