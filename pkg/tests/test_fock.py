import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_density, two_mode_convolution
from qclt.fock import (
    DimensionError,
    FockDensityMatrix,
    GaussianSpec,
    PreconditionError,
    beam_splitter_block,
    convolve_fock,
    gaussification,
    mean_and_second_moments,
    number_state,
    random_state,
    relative_entropy_vs_gaussification,
    standard_moment,
    standard_moments,
    superposition_state,
    symmetric_power_fock,
    thermal_state,
    von_neumann_entropy,
)

lams = st.floats(min_value=0.0, max_value=1.0)
# dyadic values so that 1 - lam is exact in floating point
dyadic_lams = st.integers(min_value=0, max_value=2**20).map(lambda k: k / 2**20)
seeds = st.integers(min_value=0, max_value=2**31)


def _pair(seed, dim=10, support=5):
    rng = np.random.default_rng(seed)
    return (
        FockDensityMatrix(random_density(rng, dim, support, rank=int(rng.integers(1, 4)))),
        FockDensityMatrix(random_density(rng, dim, support, rank=int(rng.integers(1, 4)))),
    )


# -- construction and validation --------------------------------------------


def test_rejects_bad_matrices():
    with pytest.raises(DimensionError):
        FockDensityMatrix(np.zeros((2, 3)))
    with pytest.raises(PreconditionError):
        FockDensityMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(PreconditionError):
        FockDensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(PreconditionError):
        FockDensityMatrix(np.diag([0.5, 0.4]))
    # trace deficit allowed up to trunc_tol
    FockDensityMatrix(np.diag([0.5, 0.4]), trunc_tol=0.1 + 1e-12)


def test_entries_are_read_only():
    rho = number_state(1, 3)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1.0


def test_number_and_superposition_states():
    assert number_state(2, 4).entries[2, 2] == 1
    with pytest.raises(DimensionError):
        number_state(4, 4)
    with pytest.raises(ValueError):
        number_state(-1, 4)
    psi = superposition_state([(0, 1.0), (3, 1.0)], 4)
    assert np.allclose(psi.entries[[0, 0, 3, 3], [0, 3, 0, 3]], 0.5)
    with pytest.raises(ValueError):
        superposition_state([(0, 0.0)], 4)


def test_thermal_state_tail():
    tau = thermal_state(1.0, 30)
    assert tau.trunc_tol == pytest.approx(0.5**30)
    assert tau.trace.real == pytest.approx(1 - 0.5**30, abs=1e-15)
    assert thermal_state(0.0, 5).entries[0, 0] == 1


def test_padding_and_support():
    rho = superposition_state([(0, 1.0), (2, 1.0)], 4)
    assert rho.support() == 3
    big = rho.padded(8)
    assert big.dim == 8 and big.support() == 3
    small = rho.padded(2)
    assert small.trunc_tol == pytest.approx(0.5)


def test_random_state_is_valid(rng):
    rho = random_state(12, 3, rng, support=6)
    assert rho.support() <= 6
    assert np.linalg.matrix_rank(rho.entries, tol=1e-10) == 3
    with pytest.raises(DimensionError):
        random_state(4, 1, rng, support=5)


# -- beam splitter ----------------------------------------------------------


@pytest.mark.parametrize("total", [0, 1, 4, 9])
def test_block_is_orthogonal(total):
    u = beam_splitter_block(total, 0.3)
    assert np.allclose(u @ u.T, np.eye(total + 1), atol=1e-13)


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_vacuum_single_photon_identity(lam):
    out = convolve_fock(number_state(0, 6), number_state(1, 6), lam)
    ref = np.diag([lam, 1 - lam, 0, 0, 0, 0])
    assert np.max(np.abs(out.entries - ref)) <= 1e-12


def test_binomial_splitting():
    out = convolve_fock(number_state(3, 6), number_state(0, 6), 0.5)
    assert np.allclose(np.diag(out.entries).real[:4], np.array([1, 3, 3, 1]) / 8, atol=1e-13)


def test_symmetric_square_of_single_photon():
    out = symmetric_power_fock(number_state(1, 5), 2)
    assert np.allclose(np.diag(out.entries).real[:3], [0.5, 0.0, 0.5], atol=1e-13)


@pytest.mark.parametrize("seed", range(4))
def test_matches_dense_two_mode_oracle(seed):
    rho, sigma = _pair(seed, dim=6, support=3)
    lam = 0.1 + 0.2 * seed
    ref = two_mode_convolution(rho.entries, sigma.entries, lam, 12)
    assert np.max(np.abs(convolve_fock(rho, sigma, lam).entries - ref)) <= 1e-12


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        convolve_fock(number_state(0, 3), number_state(0, 4), 0.5)
    with pytest.raises(ValueError):
        convolve_fock(number_state(0, 3), number_state(0, 3), 1.5)


def test_truncation_is_accounted():
    out = convolve_fock(number_state(2, 3), number_state(2, 3), 0.5)
    assert out.trace.real + out.trunc_tol == pytest.approx(1.0, abs=1e-12)
    assert out.trunc_tol > 0


@given(seeds, dyadic_lams)
@settings(max_examples=25, deadline=None)
def test_convolution_properties(seed, lam):
    rho, sigma = _pair(seed)
    out = convolve_fock(rho, sigma, lam)
    assert abs(out.trace - 1) <= 1e-12
    assert np.linalg.eigvalsh(out.hermitized())[0] >= -1e-12
    swapped = convolve_fock(sigma, rho, 1 - lam)
    assert np.max(np.abs(out.entries - swapped.entries)) <= 1e-12
    mr, ms, mo = (mean_and_second_moments(x) for x in (rho, sigma, out))
    assert abs(mo.mean - (math.sqrt(lam) * mr.mean + math.sqrt(1 - lam) * ms.mean)) <= 1e-12
    cross = 2 * math.sqrt(lam * (1 - lam)) * (np.conj(mr.mean) * ms.mean).real
    assert mo.nbar == pytest.approx(lam * mr.nbar + (1 - lam) * ms.nbar + cross, abs=1e-11)


@given(seeds, lams)
@settings(max_examples=15, deadline=None)
def test_convolution_with_vacuum_scales_energy(seed, lam):
    rho, _ = _pair(seed)
    out = convolve_fock(rho, number_state(0, rho.dim), lam)
    assert mean_and_second_moments(out).nbar == pytest.approx(lam * mean_and_second_moments(rho).nbar, abs=1e-12)


# -- moments and Gaussification ---------------------------------------------


def test_moments_of_known_states():
    rep = mean_and_second_moments(superposition_state([(0, 1.0), (1, 1.0)], 4))
    assert rep.mean == pytest.approx(0.5)
    assert rep.nbar == pytest.approx(0.5)
    rep = mean_and_second_moments(superposition_state([(0, 1.0), (2, 1.0)], 4))
    assert rep.asq == pytest.approx(math.sqrt(2) / 2)


def test_standard_moments():
    val, flag = standard_moment(number_state(3, 6), 2)
    assert val == pytest.approx(4.0) and not flag
    assert standard_moment(thermal_state(5.0, 8), 4)[1]
    rep = standard_moments(number_state(1, 4), [1, 2, 3])
    assert rep.standard[3] == pytest.approx(2**1.5)
    with pytest.raises(ValueError):
        standard_moment(number_state(0, 2), -1)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_moment_roots_increase(seed):
    rho, _ = _pair(seed)
    roots = [standard_moment(rho, k)[0] ** (1 / k) for k in (1, 2, 3, 4, 6)]
    assert all(a <= b + 1e-12 for a, b in zip(roots, roots[1:]))


def test_gaussification_thermal_and_squeezed():
    g = gaussification(number_state(1, 4))
    assert g.thermal_N == pytest.approx(1.0)
    assert np.allclose(g.gamma, 3 * np.eye(2))
    g = gaussification(superposition_state([(0, 1.0), (2, 1.0)], 4))
    assert g.thermal_N is None
    assert g.nbar == pytest.approx(1.0)
    assert g.nu >= 1
    with pytest.raises(PreconditionError):
        gaussification(superposition_state([(0, 1.0), (1, 1.0)], 4))


def test_gaussian_spec_validation():
    with pytest.raises(PreconditionError):
        GaussianSpec(np.diag([0.5, 0.5]))
    with pytest.raises(PreconditionError):
        GaussianSpec(np.array([[1.0, 0.2], [0.0, 1.0]]))
    with pytest.raises(PreconditionError):
        GaussianSpec(np.diag([2.0, 3.0]), thermal_N=1.0)
    sq = GaussianSpec(np.diag([0.1, 10.0]))
    assert sq.nu == pytest.approx(1.0) and sq.energy == pytest.approx(2.525)


def test_entropies():
    assert von_neumann_entropy(number_state(2, 4)) == pytest.approx(0.0, abs=1e-14)
    tau = thermal_state(1.0, 80)
    assert von_neumann_entropy(tau) == pytest.approx(2 * math.log(2), abs=1e-12)
    out = symmetric_power_fock(number_state(1, 8), 2)
    rel = relative_entropy_vs_gaussification(out, GaussianSpec.thermal(1.0))
    assert rel == pytest.approx(2 * math.log(2) - math.log(2), abs=1e-12)
    with pytest.raises(PreconditionError):
        relative_entropy_vs_gaussification(number_state(2, 4), GaussianSpec.thermal(1.0))
