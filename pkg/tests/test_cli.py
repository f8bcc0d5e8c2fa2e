import json

import pytest

from qclt import __version__
from qclt.cli import build_parser, main


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for name in ("rates", "cascade", "capacity", "counterexample", "decay", "verify"):
        assert name in out


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out


def test_flags_parse():
    args = build_parser().parse_args(
        ["rates", "--state", "plus03", "--n", "4,8,16", "--lambda", "0.3", "--photon-N", "1",
         "--energy-E", "2", "--dim", "32", "--grid-extent", "9", "--grid-points", "200",
         "--format", "json", "--log-base", "bits", "--seed", "3", "--threads", "2"]
    )
    assert args.n_list == (4, 8, 16) and args.lam == 0.3 and args.N == 1.0
    assert (args.grid_extent, args.grid_points, args.threads) == (9.0, 200, 2)


def test_bad_n_list():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["rates", "--n", "4,x"])


def test_capacity_json_to_file(tmp_path):
    out = tmp_path / "cap.json"
    rc = main(["capacity", "--photon-N", "1", "--lambda", "0.5", "--energy-E", "2", "--dim", "16",
               "--format", "json", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["rows"][0]["q_lower"] <= doc["rows"][0]["q_upper"]


def test_csv_is_byte_identical(tmp_path):
    argv = ["counterexample", "--state", "cauchy", "--n", "10,100"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--threads", "1"]) == 0
    # thread count is echoed in the metadata; rows must still agree
    rows = lambda p: [ln for ln in p.read_bytes().splitlines() if not ln.startswith(b"#")]
    assert rows(a) == rows(b)
    c = tmp_path / "c.csv"
    main(argv + ["--out", str(c), "--threads", "1"])
    assert c.read_bytes() == b.read_bytes()


def test_errors_exit_nonzero(capsys):
    assert main(["rates", "--state", "cauchy"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["rates", "--state", "nonsense"]) == 2
    assert main(["rates", "--state", "fock1", "--n", "8,4"]) == 2


def test_threads_env_fallback(monkeypatch, tmp_path):
    monkeypatch.setenv("QCLT_THREADS", "2")
    out = tmp_path / "d.json"
    assert main(["decay", "--state", "vacuum", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["meta"]["config"]["threads"] == 2


def test_verify_exit_codes(tmp_path):
    assert main(["verify", "--out", str(tmp_path / "v.csv")]) == 0
    assert main(["verify", "--corrupt-laguerre-sign", "--out", str(tmp_path / "w.csv")]) == 1
    text = (tmp_path / "w.csv").read_text()
    assert "fock_vs_char,False" in text
