"""Single-mode states in a truncated Fock basis.

A :class:`FockDensityMatrix` carries its truncation dimension and the amount
of probability mass that was allowed to leak past the cutoff (``trunc_tol``).
The beam-splitter convolution is computed exactly inside the cutoff by
exponentiating the generator one total-photon-number block at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm

from .special import g_fn

__all__ = [
    "FockDensityMatrix",
    "GaussianSpec",
    "MomentReport",
    "DimensionError",
    "PreconditionError",
    "number_state",
    "superposition_state",
    "thermal_state",
    "convolve_fock",
    "symmetric_power_fock",
    "beam_splitter_block",
    "mean_and_second_moments",
    "standard_moment",
    "standard_moments",
    "gaussification",
    "von_neumann_entropy",
    "relative_entropy_vs_gaussification",
    "random_state",
]

HERM_TOL = 1e-12
PSD_TOL = 1e-9
CENTRED_TOL = 1e-9
ENTROPY_EIG_FLOOR = 1e-14


class DimensionError(ValueError):
    """Raised when Fock dimensions are inconsistent or out of range."""


class PreconditionError(ValueError):
    """Raised when an input violates a mathematical precondition."""


@dataclass(frozen=True)
class FockDensityMatrix:
    """Truncated density matrix ``entries[i, j] = <i|rho|j>``.

    Construction validates Hermiticity, the trace window
    ``[1 - trunc_tol, 1 + 1e-12]`` and positivity up to ``-1e-9``.  Pass
    ``validate=False`` to skip the eigenvalue check for trusted callers.
    """

    entries: np.ndarray
    trunc_tol: float = 0.0
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionError(f"entries must be a non-empty square matrix, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "trunc_tol", float(max(self.trunc_tol, 0.0)))
        if self.validate:
            self.check()

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermitized(self) -> np.ndarray:
        return 0.5 * (self.entries + self.entries.conj().T)

    def check(self) -> None:
        m = self.entries
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise PreconditionError("density matrix is not Hermitian")
        tr = self.trace
        if abs(tr.imag) > HERM_TOL:
            raise PreconditionError(f"trace has imaginary part {tr.imag:.3e}")
        if not (1.0 - self.trunc_tol - 1e-12 <= tr.real <= 1.0 + 1e-12):
            raise PreconditionError(
                f"trace {tr.real:.15f} outside [1 - trunc_tol, 1] (trunc_tol={self.trunc_tol:.3e})"
            )
        lo = np.linalg.eigvalsh(self.hermitized())[0]
        if lo < -PSD_TOL:
            raise PreconditionError(f"density matrix has eigenvalue {lo:.3e} < 0")

    def padded(self, dim: int) -> "FockDensityMatrix":
        """Embed into a larger truncation (or crop, adding the lost mass to ``trunc_tol``)."""
        if dim == self.dim:
            return self
        out = np.zeros((dim, dim), dtype=complex)
        d = min(dim, self.dim)
        out[:d, :d] = self.entries[:d, :d]
        lost = float(np.real(np.trace(self.entries)) - np.real(np.trace(out)))
        return FockDensityMatrix(out, self.trunc_tol + max(lost, 0.0), validate=False)

    def support(self, tol: float = 0.0) -> int:
        """Smallest dimension ``d`` such that all entries beyond ``d`` are ``<= tol``."""
        mag = np.abs(self.entries)
        live = np.nonzero((mag.max(axis=0) > tol) | (mag.max(axis=1) > tol))[0]
        return int(live[-1]) + 1 if live.size else 1


@dataclass(frozen=True)
class GaussianSpec:
    """Centred single-mode Gaussian state.

    ``gamma`` is the quadratic form in ``chi(z) = exp(-v.T @ gamma @ v / 2)``
    with ``v = (Re z, Im z)``.  ``nu`` is its symplectic eigenvalue
    ``sqrt(det gamma)``.
    """

    gamma: np.ndarray
    thermal_N: float | None = None

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.shape != (2, 2):
            raise DimensionError("gamma must be 2x2")
        if np.max(np.abs(g - g.T)) > 1e-12:
            raise PreconditionError("gamma must be symmetric")
        if np.linalg.det(g) < 1.0 - 1e-9 or g[0, 0] <= 0:
            raise PreconditionError(f"unphysical covariance, det gamma = {np.linalg.det(g):.6g} < 1")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        if self.thermal_N is not None:
            nu = self.nu
            if np.max(np.abs(g - nu * np.eye(2))) > 1e-9:
                raise PreconditionError("thermal_N set for a non-isotropic gamma")

    @property
    def nu(self) -> float:
        return math.sqrt(max(float(np.linalg.det(self.gamma)), 0.0))

    @property
    def nbar(self) -> float:
        return 0.25 * float(np.trace(self.gamma)) - 0.5

    @property
    def energy(self) -> float:
        """``Tr[rho (a^dag a + 1/2)]``."""
        return 0.25 * float(np.trace(self.gamma))

    @classmethod
    def thermal(cls, N: float) -> "GaussianSpec":
        if N < 0:
            raise ValueError("thermal photon number must be >= 0")
        return cls((2 * N + 1) * np.eye(2), thermal_N=float(N))


@dataclass
class MomentReport:
    mean: complex
    nbar: float
    asq: complex
    standard: dict = field(default_factory=dict)
    tail_flag: bool = False


# -- constructors -----------------------------------------------------------


def number_state(n: int, dim: int) -> FockDensityMatrix:
    if n < 0:
        raise ValueError("photon number must be non-negative")
    if n >= dim:
        raise DimensionError(f"Fock state |{n}> does not fit in dimension {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    m[n, n] = 1.0
    return FockDensityMatrix(m)


def superposition_state(coeffs: Iterable[tuple[int, complex]], dim: int) -> FockDensityMatrix:
    """Pure state ``|psi><psi|`` with ``psi = sum_n a_n |n>`` (renormalized)."""
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("empty coefficient list")
    psi = np.zeros(dim, dtype=complex)
    for n, amp in coeffs:
        if n < 0 or n >= dim:
            raise DimensionError(f"Fock index {n} outside dimension {dim}")
        psi[n] += amp
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("all amplitudes are zero")
    psi /= norm
    return FockDensityMatrix(np.outer(psi, psi.conj()))


def thermal_state(N: float, dim: int) -> FockDensityMatrix:
    if N < 0:
        raise ValueError("thermal photon number must be >= 0")
    if dim < 1:
        raise DimensionError("dimension must be >= 1")
    if N == 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return FockDensityMatrix(np.diag(p).astype(complex))
    q = N / (N + 1.0)
    p = q ** np.arange(dim) / (N + 1.0)
    return FockDensityMatrix(np.diag(p).astype(complex), trunc_tol=q**dim)


def random_state(dim: int, rank: int, rng: np.random.Generator, support: int | None = None) -> FockDensityMatrix:
    """Random mixed state of the given rank supported on ``|0>..|support-1>``."""
    support = dim if support is None else support
    if support > dim:
        raise DimensionError("support exceeds dimension")
    vecs = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    weights = rng.dirichlet(np.ones(rank))
    m = np.zeros((dim, dim), dtype=complex)
    for w, v in zip(weights, vecs.T):
        v = v / np.linalg.norm(v)
        m[:support, :support] += w * np.outer(v, v.conj())
    return FockDensityMatrix(0.5 * (m + m.conj().T))


# -- beam splitter ----------------------------------------------------------


def beam_splitter_block(total: int, lam: float) -> np.ndarray:
    """Beam-splitter unitary on the block ``{|p, total-p>}``, indexed by ``p``.

    Generator ``arccos(sqrt(lam)) (a^dag b - a b^dag)`` restricted to the block;
    the result is real orthogonal.
    """
    theta = math.atan2(math.sqrt(1.0 - lam), math.sqrt(lam))
    gen = np.zeros((total + 1, total + 1))
    for p in range(total):
        q = total - p
        # a^dag b |p, q> = sqrt((p+1) q) |p+1, q-1>
        amp = math.sqrt((p + 1) * q)
        gen[p + 1, p] += amp
        gen[p, p + 1] -= amp
    return expm(theta * gen)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {lam}")
    return lam


def convolve_fock(rho: FockDensityMatrix, sigma: FockDensityMatrix, lam: float) -> FockDensityMatrix:
    """``Tr_2[U (rho x sigma) U^dag]`` restricted to total photon number ``< D``."""
    lam = _check_lambda(lam)
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    D = rho.dim
    r, s = rho.entries, sigma.entries
    if lam == 1.0:
        out = r * np.trace(s)
        kept = float(np.real(np.trace(r) * np.trace(s)))
        blocks = None
    else:
        blocks = [beam_splitter_block(N, lam) for N in range(D)]
    if blocks is not None:
        out = np.zeros((D, D), dtype=complex)
        kept = 0.0
        for N in range(D):
            pN = np.arange(N + 1)
            for M in range(D):
                pM = np.arange(M + 1)
                sig = s[np.ix_(N - pN, M - pM)]
                if not np.any(sig):
                    continue
                X = r[np.ix_(pN, pM)] * sig
                Y = blocks[N] @ X @ blocks[M].T
                if N == M:
                    kept += float(np.real(np.trace(Y)))
                # Tr_2 pairs |p, q><p', q| with p' = p + (M - N)
                shift = M - N
                lo = max(0, -shift)
                hi = min(N, M - shift)
                if hi < lo:
                    continue
                p = np.arange(lo, hi + 1)
                out[p, p + shift] += Y[p, p + shift]
    out = 0.5 * (out + out.conj().T)
    total = float(np.real(np.trace(r) * np.trace(s)))
    discarded = max(total - kept, 0.0)
    return FockDensityMatrix(out, rho.trunc_tol + sigma.trunc_tol + discarded)


def symmetric_power_fock(rho: FockDensityMatrix, n: int) -> FockDensityMatrix:
    """``rho^{boxplus n}`` through the iteration ``(rho^{n-1}) boxplus_{1-1/n} rho``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = rho
    for k in range(2, n + 1):
        out = convolve_fock(out, rho, 1.0 - 1.0 / k)
    return out


# -- moments ----------------------------------------------------------------


def mean_and_second_moments(rho: FockDensityMatrix) -> MomentReport:
    m = rho.entries
    D = rho.dim
    n = np.arange(D)
    mean = complex(np.sum(np.sqrt(n[:-1] + 1.0) * np.diagonal(m, 1))) if D > 1 else 0j
    nbar = float(np.real(np.sum(n * np.diagonal(m))))
    asq = (
        complex(np.sum(np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) * np.diagonal(m, 2)))
        if D > 2
        else 0j
    )
    return MomentReport(mean=mean, nbar=nbar, asq=asq)


def standard_moment(rho: FockDensityMatrix, k: float) -> tuple[float, bool]:
    """``M_k = sum_n (1+n)^{k/2} rho_nn`` and a truncation-tail flag.

    The flag is raised when ``(1+D)^{k/2} * trunc_tol > 1e-6``, i.e. when the
    mass lost past the cutoff could move the moment noticeably.
    """
    if k < 0:
        raise ValueError("moment order must be >= 0")
    D = rho.dim
    w = (1.0 + np.arange(D)) ** (0.5 * k)
    value = float(np.real(np.sum(w * np.diagonal(rho.entries))))
    flag = (1.0 + D) ** (0.5 * k) * rho.trunc_tol > 1e-6
    return value, bool(flag)


def standard_moments(rho: FockDensityMatrix, orders: Sequence[float]) -> MomentReport:
    rep = mean_and_second_moments(rho)
    for k in orders:
        val, flag = standard_moment(rho, k)
        rep.standard[k] = val
        rep.tail_flag = rep.tail_flag or flag
    return rep


def gaussification(rho: FockDensityMatrix) -> GaussianSpec:
    """Centred Gaussian with the same second moments as ``rho``."""
    rep = mean_and_second_moments(rho)
    if abs(rep.mean) > CENTRED_TOL:
        raise PreconditionError(f"state is not centred: <a> = {rep.mean:.3e}")
    nb, c = rep.nbar, rep.asq
    d = 2 * nb + 1
    gamma = np.array(
        [[d - 2 * c.real, -2 * c.imag], [-2 * c.imag, d + 2 * c.real]],
    )
    if abs(c) <= CENTRED_TOL:
        return GaussianSpec(d * np.eye(2), thermal_N=nb)
    return GaussianSpec(gamma)


# -- entropies --------------------------------------------------------------


def von_neumann_entropy(rho: FockDensityMatrix) -> float:
    ev = np.linalg.eigvalsh(rho.hermitized())
    ev = ev[ev > ENTROPY_EIG_FLOOR]
    return float(-np.sum(ev * np.log(ev)))


def relative_entropy_vs_gaussification(
    rho_n: FockDensityMatrix, gauss: GaussianSpec, tol: float = 1e-6
) -> float:
    """``D(rho_n || rho_G) = S(rho_G) - S(rho_n)`` for a thermal Gaussification.

    Valid only when both states share first and second moments, which is
    checked to ``tol``.
    """
    if gauss.thermal_N is None:
        raise PreconditionError("relative entropy identity implemented for thermal Gaussifications only")
    rep = mean_and_second_moments(rho_n)
    if abs(rep.mean) > tol or abs(rep.asq) > tol or abs(rep.nbar - gauss.thermal_N) > tol:
        raise PreconditionError(
            f"moment mismatch: <a>={rep.mean:.2e}, <a^2>={rep.asq:.2e}, "
            f"nbar={rep.nbar:.8f} vs N={gauss.thermal_N:.8f}"
        )
    return float(g_fn(gauss.thermal_N)) - von_neumann_entropy(rho_n)
