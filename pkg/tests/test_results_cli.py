import csv
import json
import math

import pytest
from hypothesis import given, strategies as st

from lowres_psk import cli
from lowres_psk.analytic import db_to_linear, sep_qpsk_rayleigh_2bit_closed
from lowres_psk.cli import ExperimentConfig, main, parse_grid
from lowres_psk.errors import ConfigError
from lowres_psk.results import SepCurve, curve_from_csv, curve_to_csv, load_curve, load_metadata, write_curve


def curve(**kw):
    base = dict(M=8, n=3, m=1.5, snr_db=[0.0, 2.5, 1e-3 + 5], values=[0.4, 1 / 3, 0.1],
                uncertainties=[1e-3, 2e-4, math.pi * 1e-5], method="montecarlo", seed=11, trials=[10, 20, 30])
    base.update(kw)
    return SepCurve(**base)


def read_csv(path):
    with open(path) as f:
        return list(csv.reader(f))


class TestPersistence:
    @pytest.mark.parametrize("fmt,name", [("csv", "c.csv"), ("json", "c.json")])
    def test_round_trip(self, tmp_path, fmt, name):
        c = curve()
        path = write_curve(c, tmp_path / name, fmt, {"seed": 11})
        assert load_curve(path) == c
        assert load_metadata(path)["seed"] == 11

    def test_round_trip_unquantized_and_no_seed(self, tmp_path):
        c = curve(n=math.inf, seed=None, trials=(), method="asymptotic")
        assert load_curve(write_curve(c, tmp_path / "a.csv")) == c
        assert curve_from_csv(curve_to_csv(c)) == c

    def test_header(self):
        assert curve_to_csv(curve()).splitlines()[0] == "M,n,m,snr_db,value,uncertainty,method,seed"

    def test_write_once(self, tmp_path):
        write_curve(curve(), tmp_path / "c.csv")
        with pytest.raises(FileExistsError):
            write_curve(curve(), tmp_path / "c.csv")
        write_curve(curve(values=[0.5, 0.2, 0.1]), tmp_path / "c.csv", overwrite=True)
        assert load_curve(tmp_path / "c.csv").values[0] == 0.5

    def test_bad_inputs(self, tmp_path):
        with pytest.raises(ConfigError):
            curve(values=[0.1])
        with pytest.raises(ConfigError):
            curve(snr_db=[5.0, 0.0, 1.0])
        with pytest.raises(ConfigError):
            write_curve(curve(), tmp_path / "x.xml", "xml")
        with pytest.raises(ConfigError):
            curve_from_csv("a,b\n1,2\n")
        with pytest.raises(ConfigError):
            curve_from_csv(",".join(curve_to_csv(curve()).splitlines()[0].split(",")) + "\n")


class TestConfig:
    def test_grid(self):
        assert parse_grid("0:15:5") == (0.0, 15.0, 5.0)
        assert parse_grid("40") == (40.0, 40.0, 1.0)
        assert list(ExperimentConfig("analytic", snr_db=(0.0, 1.0, 0.1)).grid()) == pytest.approx(
            [i / 10 for i in range(11)])
        with pytest.raises(ConfigError):
            parse_grid("a:b")
        with pytest.raises(ConfigError):
            parse_grid("1:2:3:4")

    @pytest.mark.parametrize("kw", [
        dict(M=(3,)), dict(M=(1,)), dict(M=()), dict(n=(0,)), dict(n=(math.inf,)), dict(m=(0.4,)),
        dict(m=(math.nan,)), dict(snr_db=(10.0, 0.0, 1.0)), dict(snr_db=(0.0, 10.0, 0.0)),
        dict(snr_db=(0.0, math.inf, 1.0)), dict(seed=-1), dict(max_trials=0), dict(target_rel_ci=0.0),
        dict(tol=0.0), dict(tol=0.5), dict(fmt="xlsx"), dict(method="guess"), dict(sep_levels=(1.5,)),
        dict(analytic_m=0.1),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            ExperimentConfig("simulate", **kw)

    @given(st.one_of(
        st.integers(-4, 1).map(lambda v: dict(M=(v,))),
        st.integers(3, 1000).filter(lambda v: v & (v - 1)).map(lambda v: dict(M=(v,))),
        st.integers(-5, 0).map(lambda v: dict(n=(v,))),
        st.floats(-10, 0.499).map(lambda v: dict(m=(v,))),
        st.floats(-100, 0).map(lambda v: dict(snr_db=(0.0, 10.0, v))),
        st.floats(0.01, 100).map(lambda v: dict(snr_db=(v, -v, 1.0))),
        st.integers(-10 ** 6, -1).map(lambda v: dict(seed=v)),
        st.integers(-10, 0).map(lambda v: dict(max_trials=v)),
        st.floats(-1, 0).map(lambda v: dict(tol=v)),
        st.text(max_size=5).filter(lambda s: s not in ("csv", "json")).map(lambda v: dict(fmt=v)),
    ))
    def test_invalid_randomized(self, kw):
        with pytest.raises(ConfigError):
            ExperimentConfig("simulate", **kw)

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("plot")


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    return tmp_path


def written(capsys):
    return [line for line in capsys.readouterr().out.splitlines() if line.endswith((".csv", ".json"))]


class TestCli:
    def test_simulate_rerun_is_reproducible(self, out, capsys):
        args = ["simulate", "--M", "4", "--n", "2", "--snr-db", "0:10:5", "--trials", "20000", "--seed", "9", "--overwrite"]
        assert main(args) == 0
        (path,) = written(capsys)
        first = read_csv(path)
        assert main(args) == 0
        assert read_csv(path) == first
        meta = load_metadata(path)
        assert meta["seed"] == 9 and meta["rng"] and meta["backend"] in ("numba", "numpy")
        assert len(first) == 4 and first[0][0] == "M"

    def test_write_once_without_overwrite(self, out, capsys):
        args = ["penalty", "--n", "2", "--snr-db", "18", "--overwrite"]
        assert main(args) == 0
        assert main(args[:-1]) == 0  # timestamped name, no clash
        assert len(list(out.glob("penalty*.csv"))) == 2
        target = out / "fixed"
        target.mkdir()
        (target / "penalty.csv").write_text("x")
        assert main(["penalty", "--n", "2", "--snr-db", "18", "--overwrite", "--out", str(target)]) == 0
        written(capsys)

    def test_existing_file_is_an_error(self, out, capsys, monkeypatch):
        monkeypatch.setattr(cli, "_stamp", lambda: "FIXED")
        assert main(["penalty", "--n", "2", "--snr-db", "18"]) == 0
        assert main(["penalty", "--n", "2", "--snr-db", "18"]) == 2
        assert "exists" in capsys.readouterr().err

    def test_analytic_closed_matches(self, out, capsys):
        assert main(["analytic", "--method", "closed", "--snr-db", "0:20:5", "--overwrite"]) == 0
        c = load_curve(written(capsys)[0])
        for s, v in c:
            assert v == pytest.approx(sep_qpsk_rayleigh_2bit_closed(float(db_to_linear(s))), abs=1e-6)

    def test_analytic_theorem3_json(self, out, capsys):
        assert main(["analytic", "--M", "4", "--n", "2", "--snr-db", "0:20:10", "--format", "json"]) == 0
        c = load_curve(written(capsys)[0])
        for s, v in c:
            assert v == pytest.approx(sep_qpsk_rayleigh_2bit_closed(float(db_to_linear(s))), abs=1e-6)

    def test_analytic_asymptotic_inf(self, out, capsys):
        assert main(["analytic", "--method", "asymptotic", "--n", "2", "3", "inf", "--snr-db", "40"]) == 0
        assert len(written(capsys)) == 3

    def test_bounds(self, out, capsys):
        assert main(["bounds", "--M", "8", "--n", "3", "--snr-db", "10:30:10"]) == 0
        lower, exact, upper = (load_curve(p) for p in written(capsys))
        for lo, p, hi in zip(lower.values, exact.values, upper.values):
            assert lo <= p * (1 + 1e-9) and p <= hi * (1 + 1e-9)

    def test_floor(self, out, capsys):
        assert main(["floor", "--M", "8", "--n", "2", "--trials", "100000"]) == 0
        (path,) = written(capsys)
        row = read_csv(path)[1]
        assert float(row[3]) == 0.125 and 0.45 <= float(row[5]) <= 0.55

    def test_dvo(self, out, capsys):
        assert main(["dvo", "--method", "closed"]) == 0
        row = read_csv(written(capsys)[0])[1]
        assert float(row[3]) == pytest.approx(0.5, abs=0.02)
        assert float(row[4]) == 0.5

    def test_penalty(self, out, capsys):
        assert main(["penalty", "--n", "2", "4", "--snr-db", "18", "--sep", "0.015"]) == 0
        rows = read_csv(written(capsys)[0])[1:]
        psi = [float(r[4]) for r in rows if r[0] == "psi" and r[1] == "2"]
        phi = [float(r[4]) for r in rows if r[0] == "phi" and r[1] == "4"]
        assert psi == [pytest.approx(6.35, abs=0.05)]
        assert phi == [pytest.approx(0.82, abs=0.05)]

    def test_detector_table(self, out, capsys):
        assert main(["detector-table", "--M", "8", "--n", "3", "--phase-deg", "40"]) == 0
        rows = read_csv(written(capsys)[0])[1:]
        assert len(rows) == 8
        decisions = {int(r[5]): int(r[6]) for r in rows}
        assert decisions[0] == 7 and decisions[7] == 6

    def test_compare_flags_wrong_model(self, out, capsys):
        base = ["compare", "--M", "4", "--n", "3", "--snr-db", "5:15:5", "--trials", "200000", "--ci", "1e-9"]
        assert main(base) == 0
        assert "3 points compared, 0 with" in capsys.readouterr().out
        assert main(base + ["--analytic-m", "3"]) == 0
        text = capsys.readouterr().out
        assert "0 with" not in text

    def test_config_file(self, out, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"M": [4], "n": [2], "snr_db": "0:10:10", "method": "closed"}))
        assert main(["analytic", "--config", str(cfg), "--snr-db", "5"]) == 0
        c = load_curve(written(capsys)[0])
        assert c.snr_db == (5.0,)

    @pytest.mark.parametrize("args", [
        ["analytic", "--snr-db", "10:0:1"],
        ["simulate", "--M", "6"],
        ["analytic", "--M", "8", "--n", "2"],
        ["analytic", "--method", "closed", "--M", "8", "--n", "3"],
        ["simulate", "--n", "inf"],
        ["penalty", "--n", "1"],
        ["compare", "--M", "8", "--n", "2"],
    ])
    def test_bad_invocations_exit_2(self, out, capsys, args):
        assert main(args) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_config_file(self, out, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"colour": "red"}))
        assert main(["analytic", "--config", str(bad)]) == 2
        assert main(["analytic", "--config", str(tmp_path / "missing.json")]) == 2
