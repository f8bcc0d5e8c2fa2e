"""Quadrature on phase space: Plancherel distances, reconstruction, rate fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .charfun import CharFunction
from .fock import DimensionError, FockDensityMatrix
from .grid import BOUNDARY_TOL, ExtentError, PhaseGrid
from .special import normalized_laguerre_table

__all__ = [
    "PhaseGrid",
    "ExtentError",
    "ResolutionError",
    "RateFit",
    "hs_distance_plancherel",
    "reconstruct_density",
    "trace_distance",
    "hs_distance_matrix",
    "rate_fit",
]

MAX_RECONSTRUCT_DIM = 64
_POINT_CHUNK = 32768


class ResolutionError(ValueError):
    """Quadrature lost too much mass to be trusted."""


@dataclass
class RateFit:
    points: list
    slope: float
    intercept: float
    r_squared: float

    def predict(self, n):
        return math.exp(self.intercept) * np.asarray(n, dtype=float) ** self.slope


def hs_distance_plancherel(chi1: CharFunction, chi2: CharFunction, grid: PhaseGrid) -> float:
    """Hilbert-Schmidt distance from ``(1/pi) int |chi1 - chi2|^2 d^2 z``."""
    v1 = chi1.on_grid(grid)
    grid.check_boundary(v1, what="first characteristic function")
    v2 = chi2.on_grid(grid)
    grid.check_boundary(v2, what="second characteristic function")
    diff = v1 - v2
    s = float(np.sum(diff.real**2 + diff.imag**2))
    return math.sqrt(s * grid.weight / math.pi)


def reconstruct_density(chi: CharFunction, dim: int, grid: PhaseGrid) -> FockDensityMatrix:
    """Fock matrix ``<i|rho|j> = (1/pi) int conj(chi_{|i><j|}) chi d^2 z`` by midpoint rule."""
    if dim < 1 or dim > MAX_RECONSTRUCT_DIM:
        raise DimensionError(f"reconstruction dimension must be in [1, {MAX_RECONSTRUCT_DIM}]")
    values = chi.on_grid(grid)
    grid.check_boundary(values, tol=BOUNDARY_TOL, what="characteristic function")
    z = grid.z.ravel()
    c = values.ravel()
    out = np.zeros((dim, dim), dtype=complex)
    for lo in range(0, z.size, _POINT_CHUNK):
        zc, cc = z[lo : lo + _POINT_CHUNK], c[lo : lo + _POINT_CHUNK]
        x = (zc * zc.conjugate()).real
        r = np.sqrt(x)
        phase = np.exp(-1j * np.angle(zc))  # conj of e^{i arg z}
        env = np.exp(-0.5 * x)
        for k in range(dim):
            table = normalized_laguerre_table(x, k, dim - 1 - k)
            if k == 0:
                base = env * cc
                out[np.arange(dim), np.arange(dim)] += table @ base
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                mag = np.where(r > 0, np.exp(k * np.log(np.where(r > 0, r, 1.0)) - 0.5 * x - 0.5 * gammaln(k + 1)), 0.0)
            # conj(z^k) pairs with entries [i, i+k]; conj((-z^*)^k) = (-z)^k with [i+k, i]
            up = table @ (mag * phase**k * cc)
            dn = table @ ((-1) ** k * mag * phase.conjugate() ** k * cc)
            i = np.arange(dim - k)
            out[i, i + k] += up
            out[i + k, i] += dn
    out *= grid.weight / math.pi
    out = 0.5 * (out + out.conj().T)
    tr = float(np.real(np.trace(out)))
    if abs(1.0 - tr) > 0.05:
        raise ResolutionError(
            f"reconstructed trace {tr:.4f}; raise the Fock dimension or refine the grid"
        )
    return FockDensityMatrix(out, trunc_tol=max(1.0 - tr, 0.0), validate=False)


def trace_distance(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """``||rho - sigma||_1``, the sum of absolute eigenvalues of the difference."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    d = rho.entries - sigma.entries
    ev = np.linalg.eigvalsh(0.5 * (d + d.conj().T))
    return float(np.sum(np.abs(ev)))


def hs_distance_matrix(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """Frobenius norm of ``rho - sigma``."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    return float(np.linalg.norm(rho.entries - sigma.entries))


def rate_fit(points: Sequence[tuple[int, float]]) -> RateFit:
    """Least-squares line through ``(log n, log distance)``."""
    pts = [(int(n), float(d)) for n, d in points]
    if len(pts) < 4:
        raise ValueError("rate_fit needs at least 4 points")
    if any(d <= 0 for _, d in pts):
        raise ValueError("distances must be positive for a log-log fit")
    x = np.log([n for n, _ in pts])
    y = np.log([d for _, d in pts])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot <= 1e-30 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return RateFit(pts, float(slope), float(intercept), r2)
