import json
import math

import pytest

from qclt.experiments import (
    ExperimentConfig,
    run_capacity,
    run_cascade,
    run_counterexample,
    run_decay,
    run_rates,
)
from qclt.fock import PreconditionError
from qclt.report import render, to_csv, to_json
from qclt.special import g_fn


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_list=(4, 4))
    with pytest.raises(ValueError):
        ExperimentConfig(n_list=(8, 4))
    with pytest.raises(ValueError):
        ExperimentConfig(n_list=(0, 4))
    with pytest.raises(ValueError):
        ExperimentConfig(dim=65)
    with pytest.raises(ValueError):
        ExperimentConfig(out_format="xml")
    with pytest.raises(ValueError):
        ExperimentConfig(log_base="dits")
    with pytest.raises(ValueError):
        ExperimentConfig(grid=(0.0, 64))
    with pytest.raises(ValueError):
        ExperimentConfig(threads=0)


def test_rates_thermal_fixed_point():
    table = run_rates(ExperimentConfig(state_id="thermal:1", n_list=(4, 16, 64), dim=32))
    for key in ("hs", "trace", "relent"):
        assert max(abs(v) for v in table.column(key)) <= 1e-6


def test_rates_rows_and_provenance():
    table = run_rates(ExperimentConfig(state_id="fock1", n_list=(4, 8, 16, 32), dim=24))
    assert table.columns[:4] == ["n", "hs", "trace", "relent"]
    assert {"grid_R", "grid_K", "dim", "trunc_tol"} <= set(table.columns)
    hs = table.column("hs")
    assert all(a > b for a, b in zip(hs, hs[1:]))
    assert table.meta["fit"]["slope"] < 0
    assert table.meta["max_abs_third_derivative_at_0"] <= 1e-6


def test_rates_rejects_non_centred():
    with pytest.raises(PreconditionError):
        run_rates(ExperimentConfig(state_id="superpos:0=1,1=1"))
    with pytest.raises(PreconditionError):
        run_rates(ExperimentConfig(state_id="cauchy"))


def test_rates_squeezed_gaussian_is_fixed_point():
    table = run_rates(ExperimentConfig(state_id="squeezed:0.5", n_list=(2, 4), dim=32))
    assert max(table.column("hs")) <= 1e-10
    assert max(table.column("trace")) <= 1e-6


def test_cascade_columns():
    table = run_cascade(ExperimentConfig(subcommand="cascade", state_id="fock1", n_list=(2, 4, 8), dim=24))
    assert table.column("diamond_bound") == table.column("trace")
    tr = table.column("trace")
    assert tr[0] > tr[1] > tr[2]


def test_cascade_thermal_environment():
    table = run_cascade(ExperimentConfig(subcommand="cascade", state_id="thermal:1", n_list=(2, 8), dim=24))
    assert max(table.column("hs") + table.column("trace")) <= 1e-6


def test_capacity_examples():
    cfg = ExperimentConfig(subcommand="capacity", state_id="thermal:1", lam=0.5, E=2.0, dim=24)
    row = dict(zip(*(lambda t: (t.columns, t.rows[0]))(run_capacity(cfg))))
    assert row["classical"] == pytest.approx(g_fn(1.5) - g_fn(0.5), abs=1e-12)
    assert row["q_lower"] <= row["q_upper"]
    lossless = run_capacity(ExperimentConfig(subcommand="capacity", state_id="fock1", lam=1.0, E=2.0))
    row = dict(zip(lossless.columns, lossless.rows[0]))
    assert row["classical"] == pytest.approx(g_fn(2.0), abs=1e-14)
    assert row["eps"] == 0.0 and row["delta_c"] == 0.0 and row["delta_q"] == 0.0


def test_capacity_bits_and_photon_number():
    nats = run_capacity(ExperimentConfig(subcommand="capacity", N=1.0, lam=0.9, E=2.0, dim=24))
    bits = run_capacity(ExperimentConfig(subcommand="capacity", N=1.0, lam=0.9, E=2.0, dim=24, log_base="bits"))
    i = nats.columns.index("classical")
    assert bits.rows[0][i] == pytest.approx(nats.rows[0][i] / math.log(2))
    with pytest.raises(ValueError):
        run_capacity(ExperimentConfig(subcommand="capacity", state_id="fock1", N=2.0))
    with pytest.raises(PreconditionError):
        run_capacity(ExperimentConfig(subcommand="capacity", state_id="squeezed:0.5"))


def test_capacity_from_fock_environment():
    table = run_capacity(ExperimentConfig(subcommand="capacity", state_id="fock1", lam=0.9, E=2.0, n_list=(8,), dim=32))
    row = dict(zip(table.columns, table.rows[0]))
    assert 0 < row["eps"] < 0.1
    assert row["N_eff"] == pytest.approx(1.0, abs=1e-6)
    assert row["surrogate_gap"] <= row["delta_c"]


@pytest.mark.parametrize("sid", ["cauchy", "heavy_tail"])
def test_counterexample_rows(sid):
    table = run_counterexample(ExperimentConfig(subcommand="counterexample", state_id=sid))
    assert len(table.rows) == 12
    assert all(v == pytest.approx(1.0) for v in table.column("chi_n_at_0"))
    for z0 in ("1j", "2j", "(1+1j)"):
        vals = [r[2] for r in table.rows if r[1] == z0]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_counterexample_rejects_regular_states():
    with pytest.raises(ValueError):
        run_counterexample(ExperimentConfig(subcommand="counterexample", state_id="fock1"))


def test_decay_all_pass():
    table = run_decay(ExperimentConfig(subcommand="decay"))
    assert table.column("state") == ["vacuum", "fock1", "thermal:1", "squeezed:0.1"]
    assert all(table.column("pass"))
    with pytest.raises(PreconditionError):
        run_decay(ExperimentConfig(subcommand="decay", state_id="cauchy"))


def test_output_is_deterministic():
    cfg = ExperimentConfig(state_id="fock1", n_list=(4, 8), dim=16)
    a, b = run_rates(cfg), run_rates(cfg)
    assert to_csv(a) == to_csv(b)
    assert to_json(a) == to_json(b)


def test_csv_and_json_layout():
    table = run_decay(ExperimentConfig(subcommand="decay", state_id="vacuum"))
    text = to_csv(table)
    lines = text.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert meta and lines[len(meta)] == "state,energy,min_margin,pass"
    assert text.endswith("\n") and "\r" not in text
    doc = json.loads(to_json(table))
    assert set(doc) == {"meta", "rows"}
    assert doc["rows"][0]["state"] == "vacuum"
    assert doc["meta"]["config"]["subcommand"] == "decay"
    with pytest.raises(ValueError):
        render(table, "yaml")
