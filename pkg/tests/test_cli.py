import json

import numpy as np
import pytest

from spacetime_lcst import cli
from spacetime_lcst.grid import Spectrum, relative_l2
from spacetime_lcst.io import read_csv, read_signal


@pytest.fixture
def signals(tmp_path):
    a, b = tmp_path / "a.stcf", tmp_path / "b.stcf"
    assert cli.main(["gen", "--dims", "4,4,4,4", "--spacing", "0.8", "--kind", "random", "--seed", "1",
                     "--out", str(a)]) == 0
    assert cli.main(["gen", "--dims", "4,4,4,4", "--spacing", "0.8", "--kind", "random", "--seed", "2",
                     "--out", str(b)]) == 0
    return a, b


def test_gen_gaussian_and_delta(tmp_path):
    out = tmp_path / "g.stcf"
    assert cli.main(["gen", "--dims", "8,8,8,8", "--spacing", "0.5", "--width", "0.3", "--amplitude", "e_t12",
                     "--temporal-freq", "0.3", "--out", str(out)]) == 0
    f = read_signal(out)
    assert f.grid.n == (8, 8, 8, 8)
    assert np.count_nonzero(f.data[4, 4, 4, 4]) >= 1
    assert cli.main(["gen", "--dims", "2,2,2,2", "--kind", "delta", "--origin", "0,0,0,0",
                     "--out", str(out)]) == 0
    assert read_signal(out).data[0, 0, 0, 0, 0] == 1.0


def test_transform_round_trip(tmp_path, signals):
    a, _ = signals
    spec, back = tmp_path / "F.stcf", tmp_path / "back.stcf"
    args = ["--kind", "lcst", "--params", "2,1,1,1"]
    assert cli.main(["transform", *args, "--in", str(a), "--out", str(spec)]) == 0
    assert isinstance(read_signal(spec), Spectrum)
    assert cli.main(["transform", *args, "--inverse", "--in", str(spec), "--out", str(back)]) == 0
    assert relative_l2(read_signal(back), read_signal(a)) < 1e-12


@pytest.mark.parametrize(
    "kind, extra",
    [
        ("standard", []),
        ("mustard", ["--method", "eight"]),
        ("odot", ["--params", "2,1,1,1"]),
        ("starn", ["--params", "0,2,-0.5,0,0,0.5,-2,0"]),
    ],
)
def test_convolve_kinds(tmp_path, signals, kind, extra):
    a, b = signals
    out = tmp_path / "c.stcf"
    assert cli.main(["convolve", "--kind", kind, *extra, "--a", str(a), "--b", str(b), "--out", str(out)]) == 0
    assert read_signal(out).grid.same_as(read_signal(a).grid)


def test_convolve_direct_oracle_refuses_large_grid(tmp_path):
    a = tmp_path / "big.stcf"
    cli.main(["gen", "--dims", "5,5,5,5", "--kind", "random", "--out", str(a)])
    rc = cli.main(["convolve", "--kind", "starn", "--method", "direct", "--params", "0,2,-0.5,0,0,0.5,-2,0",
                   "--a", str(a), "--b", str(a), "--out", str(tmp_path / "o.stcf")])
    assert rc == 2


def test_verify_algebra_writes_report(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert cli.main(["--threads", "1", "verify", "--suite", "algebra", "--report", str(path)]) == 0
    assert "0 failed" in capsys.readouterr().out
    assert json.loads(path.read_text())["summary"]["failed"] == 0


def test_export_csv_slice(tmp_path, signals):
    a, _ = signals
    out = tmp_path / "a.csv"
    assert cli.main(["export", "--in", str(a), "--out", str(out), "--slice", "t=1"]) == 0
    _, coeffs = read_csv(out)
    assert np.array_equal(coeffs, read_signal(a).data[1].reshape(-1, 16))


def test_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    assert cli.main(["bench", "--kind", "lcst2", "--dims-sweep", "2,4", "--repeat", "1", "--out", str(out)]) == 0
    header, *rows = out.read_text().splitlines()
    assert header.split(",") == ["kind", "n", "samples", "direct_s", "fast_s", "speedup", "max_rel_dev"]
    assert len(rows) == 2 and float(rows[1].split(",")[-1]) < 1e-10


@pytest.mark.parametrize(
    "argv",
    [
        ["transform", "--kind", "lcst", "--params", "1,1,1,1", "--in", "x", "--out", "y"],
        ["transform", "--kind", "frsft", "--in", "x", "--out", "y"],
        ["gen", "--dims", "4,4,4", "--out", "y"],
        ["bench", "--dims-sweep", "a,b"],
        ["bench", "--paths", "slow"],
        ["--threads", "0", "verify", "--suite", "algebra"],
        ["nope"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2


def test_io_errors_exit_3(tmp_path):
    bad = tmp_path / "bad.stcf"
    bad.write_bytes(b"not a field")
    out = str(tmp_path / "o.stcf")
    assert cli.main(["transform", "--kind", "sft", "--in", str(bad), "--out", out]) == 3
    assert cli.main(["transform", "--kind", "sft", "--in", str(tmp_path / "missing"), "--out", out]) == 3


def test_threads_flag_overrides_environment(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli._threads(None) == 3
    assert cli._threads("2") == 2
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    with pytest.raises(cli.UsageError):
        cli._threads(None)
    assert cli._threads("auto") >= 1
