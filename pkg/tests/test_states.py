import math

import numpy as np
import pytest

from qclt.states import parse_amplitude, resolve_state


@pytest.mark.parametrize(
    "text,value",
    [("1", 1), ("0.5", 0.5), ("-2", -2), ("i0.5", 0.5j), ("-i2", -2j), ("1+i0.5", 1 + 0.5j),
     ("1 - i 2", 1 - 2j), (".5e1", 5.0), ("2e-1+i1e-1", 0.2 + 0.1j)],
)
def test_parse_amplitude(text, value):
    assert parse_amplitude(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["", "abc", "1+", "i", "1+2"])
def test_parse_amplitude_rejects(text):
    with pytest.raises(ValueError):
        parse_amplitude(text)


def test_fock_states():
    st = resolve_state("fock1", 8)
    assert st.energy == pytest.approx(1.5)
    assert st.gauss.thermal_N == pytest.approx(1.0)
    assert resolve_state("vacuum", 4).energy == pytest.approx(0.5)
    assert resolve_state("fock3", 8).rho.entries[3, 3] == 1


def test_plus03_gaussification():
    st = resolve_state("plus03", 8)
    assert st.finite_moments
    assert st.gauss.thermal_N == pytest.approx(1.5)
    assert st.energy == pytest.approx(2.0)


def test_superposition_grammar():
    st = resolve_state("superpos:0=1,3=1", 8)
    ref = resolve_state("plus03", 8)
    assert np.allclose(st.rho.entries, ref.rho.entries)
    phased = resolve_state("superpos:0=1,1=i1", 4)
    assert phased.rho.entries[0, 1] == pytest.approx(-0.5j)
    assert not phased.finite_moments  # not centred


def test_gaussian_states():
    th = resolve_state("thermal:2", 16)
    assert th.chi(1.0 + 0j) == pytest.approx(math.exp(-2.5))
    assert th.rho.dim == 16
    sq = resolve_state("squeezed:0.1")
    assert sq.rho is None and sq.energy == pytest.approx(2.525)
    with pytest.raises(ValueError):
        resolve_state("squeezed:-1")


def test_counterexample_states_have_no_gaussification():
    for sid in ("cauchy", "heavy_tail"):
        st = resolve_state(sid)
        assert not st.finite_moments and st.energy is None


def test_unknown_state():
    with pytest.raises(ValueError):
        resolve_state("coherent:1")
