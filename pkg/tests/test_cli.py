import csv
import io
import json
import math

import numpy as np
import pytest

from uwnetcap import channel, cli
from uwnetcap.channel import ChannelParams


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestAbsorptionNoise:
    def test_default_grid(self, capsys):
        code, out, _ = run(["absorption"], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 512
        assert list(table[0]) == ["f_khz", "a_db_per_km", "a_linear"]
        db = [float(r["a_db_per_km"]) for r in table]
        assert all(b > a for a, b in zip(db, db[1:]))

    def test_explicit_frequency(self, capsys):
        _, out, _ = run(["absorption", "--f", "100"], capsys)
        (row,) = rows(out)
        assert float(row["a_db_per_km"]) == pytest.approx(34.06866275996514, rel=1e-13)
        # 10^(34.07/10) is about 2.5e3
        assert float(row["a_linear"]) == pytest.approx(2552.4, rel=1e-3)

    def test_noise_follows_shipping_flag(self, capsys):
        _, quiet, _ = run(["noise", "--f", "0.1", "--shipping", "0"], capsys)
        _, busy, _ = run(["noise", "--f", "0.1", "--shipping", "1"], capsys)
        assert float(rows(quiet)[0]["noise_psd"]) == pytest.approx(586521.8371043215, rel=1e-12)
        assert float(rows(busy)[0]["noise_psd"]) == pytest.approx(52106430.0662156, rel=1e-12)

    def test_json_lines(self, capsys):
        _, out, _ = run(["absorption", "--f", "1", "--f", "2", "--format", "json"], capsys)
        recs = [json.loads(line) for line in out.splitlines()]
        assert [r["f_khz"] for r in recs] == [1.0, 2.0]


class TestFcCurve:
    def test_three_distances(self, capsys):
        code, out, _ = run(["fc-curve", "--distance", "1", "--distance", "10", "--distance", "100"], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 3
        fc = [float(r["f_c_khz"]) for r in table]
        assert all(b <= a for a, b in zip(fc, fc[1:]))
        for r in table:
            l, f = float(r["l_km"]), float(r["f_c_khz"])
            assert float(r["an_min"]) == pytest.approx(channel.an_product(l, f, ChannelParams()), rel=1e-12)


class TestBound:
    def test_default_curves(self, capsys):
        code, out, _ = run(["bound"], capsys)
        table = rows(out)
        assert code == 0
        assert sorted({float(r["a_f"]) for r in table}) == cli.REFERENCE_A_VALUES
        assert list(table[0])[-1] == "n_pow_neg_inv_alpha"
        for r in table:
            n = float(r["n"])
            assert float(r["n_pow_neg_inv_alpha"]) == pytest.approx(1 / n, rel=1e-15)
            if float(r["a_f"]) == 1.0:
                gk = 1.5 / math.sqrt(math.pi) * 2 / n
                assert float(r["per_pair_bound"]) == pytest.approx(gk, rel=1e-12)

    def test_bad_absorption_is_input_error(self, capsys):
        code, _, err = run(["bound", "--a-f", "0.5"], capsys)
        assert code == 2 and "a-f" in err


class TestWaterfill:
    def test_zero_target(self, capsys):
        code, out, _ = run(["waterfill", "--distance", "10"], capsys)
        rec = json.loads(out)
        assert code == 0 and rec["power"] == 0.0 and rec["bands"] == []

    def test_round_trip_and_center_inside(self, capsys):
        _, out, _ = run(["waterfill", "--distance", "10", "--capacity", "1000"], capsys)
        rec = json.loads(out)
        assert rec["capacity"] == pytest.approx(1000.0, rel=1e-9)
        assert any(lo <= rec["f_c_khz"] <= hi for lo, hi in rec["bands"])
        _, back, _ = run(["waterfill", "--distance", "10", "--power", repr(rec["power"])], capsys)
        assert json.loads(back)["capacity"] == pytest.approx(1000.0, rel=1e-6)

    def test_missing_distance(self, capsys):
        assert run(["waterfill", "--capacity", "5"], capsys)[0] == 2


class TestSimulate:
    ARGS = ["simulate", "--runs", "4", "--slots", "5", "--n-max", "16", "--a-f", "10", "--a-f", "100"]

    def test_reproducible_and_below_bound(self, capsys):
        code, a, _ = run(self.ARGS + ["--seed", "3"], capsys)
        _, b, _ = run(self.ARGS + ["--seed", "3"], capsys)
        assert code == 0 and a == b
        recs = [json.loads(line) for line in a.splitlines()]
        assert [r["seed"] for r in recs] == [3, 4, 5, 6]
        assert [r["a_f"] for r in recs] == [10.0, 100.0, 10.0, 100.0]
        for r in recs:
            assert 4 <= r["n"] <= 16
            assert r["margin_min"] >= 0
            assert r["transport_achieved"] <= r["transport_bound"]

    def test_workers_do_not_change_output(self, capsys):
        _, a, _ = run(self.ARGS, capsys)
        _, b, _ = run(self.ARGS + ["--workers", "2"], capsys)
        assert a == b

    def test_violation_exit_code(self, capsys, monkeypatch):
        def broken(config, params=None):
            return dict(seed=config.seed, n=config.n, alpha=1.0, beta=2.0, a_f=1.0,
                        margin_min=-1.0, transport_achieved=1.0, transport_bound=2.0)

        monkeypatch.setattr(cli.netsim, "run_simulation", broken)
        code, out, err = run(["simulate", "--runs", "2"], capsys)
        assert code == 4 and "violation" in err
        assert len(out.splitlines()) == 2

    def test_n_min_below_two(self, capsys):
        assert run(["simulate", "--n-min", "1", "--runs", "1"], capsys)[0] == 2


class TestFilesAndConfig:
    def test_out_file_is_byte_identical(self, tmp_path, capsys):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["bound", "--n-points", "7", "--out", str(p1)]) == 0
        assert cli.main(["bound", "--n-points", "7", "--out", str(p2)]) == 0
        assert p1.read_bytes() == p2.read_bytes()
        assert capsys.readouterr().out == ""

    def test_config_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "curves.cfg"
        cfg.write_text("# curve recipe\nalpha = 1.5\nbeta = 3\na-f = 10\na_f = 100\nn_points = 4\n")
        _, out, _ = run(["bound", "--config", str(cfg)], capsys)
        table = rows(out)
        assert sorted({float(r["a_f"]) for r in table}) == [10.0, 100.0]
        assert len(table) == 8
        n = float(table[1]["n"])
        assert float(table[1]["n_pow_neg_inv_alpha"]) == pytest.approx(n ** (-1 / 1.5), rel=1e-15)
        # flags beat the file
        _, out, _ = run(["bound", "--config", str(cfg), "--alpha", "1", "--a-f", "7"], capsys)
        table = rows(out)
        assert {float(r["a_f"]) for r in table} == {7.0}
        assert float(table[1]["n_pow_neg_inv_alpha"]) == pytest.approx(1 / float(table[1]["n"]), rel=1e-15)

    def test_config_keys_may_be_option_names(self, tmp_path, capsys):
        cfg = tmp_path / "fc.cfg"
        cfg.write_text("distance = 1\ndistance = 10\nf-hi = 150\n")
        _, out, _ = run(["fc-curve", "--config", str(cfg)], capsys)
        assert [float(r["l_km"]) for r in rows(out)] == [1.0, 10.0]

    def test_config_errors(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour = blue\n")
        assert run(["bound", "--config", str(cfg)], capsys)[0] == 2
        cfg.write_text("just words\n")
        assert run(["bound", "--config", str(cfg)], capsys)[0] == 2
        assert run(["bound", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 2

    def test_unknown_command_and_bad_flag(self, capsys):
        assert run(["plot"], capsys)[0] == 2
        assert run(["absorption", "--f", "-3"], capsys)[0] == 2

    def test_numeric_failure_exit(self, capsys, monkeypatch):
        from uwnetcap.errors import NumericalError

        def boom(*a, **k):
            raise NumericalError("no bracket")

        monkeypatch.setattr(cli.channel, "center_frequency_info", boom)
        assert run(["fc-curve", "--distance", "1"], capsys)[0] == 3
