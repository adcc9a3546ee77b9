"""End-to-end tests for the exdyn command line"""

import json

import pandas as pd
import pytest

from exchange_dynamics.cli import build_parser, cmd_fetch, main
from pipeline.worldbank import WorldBankClient

EXPONENTIAL = [
    "simulate", "--schedule", "exponential", "--M0", "100", "--q", "0.1",
    "--k", "2", "--W0", "50", "--Y0", "10", "--g", "0.03", "--t-end", "60",
]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSimulate:
    def test_exponential_regime(self, tmp_path, capsys):
        code, out, _ = run(capsys, *EXPONENTIAL, "--out-dir", str(tmp_path))
        assert code == 0
        summary = json.loads(out)
        assert summary["c_inf"] == pytest.approx(0.07)
        assert summary["regime"]["branch"] == "typical"
        assert summary["regime"]["v_inf"] == pytest.approx(1 / 1.2)

        trajectory = pd.read_csv(tmp_path / "trajectory.csv")
        assert list(trajectory.columns) == ["t", "M", "W", "P", "Y", "c", "v"]
        assert len(trajectory) == summary["samples"] == 3001
        assert trajectory["c"].iloc[-1] == pytest.approx(0.07, abs=1e-6)

        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["subcommand"] == "simulate"
        assert manifest["outputs"] == ["regime.json", "trajectory.csv"]
        assert manifest["params"]["schedule"] == {"type": "exponential", "M0": 100.0, "q": 0.1}

    def test_equilibrium_stays_put(self, tmp_path, capsys):
        code, _, _ = run(
            capsys, "simulate", "--schedule", "constant", "--M0", "100", "--k", "1",
            "--W0", "100", "--Y0", "1", "--t-end", "5", "--out-dir", str(tmp_path),
        )
        assert code == 0
        trajectory = pd.read_csv(tmp_path / "trajectory.csv")
        assert (trajectory["W"] == 100.0).all()

    def test_step_too_large(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "simulate", "--schedule", "constant", "--M0", "100", "--k", "1",
            "--W0", "50", "--Y0", "1", "--t-end", "10", "--dt", "0.6", "--out-dir", str(tmp_path),
        )
        assert code == 3
        assert "k/2" in err

    def test_invalid_parameter_lists_field(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "simulate", "--schedule", "constant", "--M0", "100", "--k", "-1",
            "--W0", "50", "--Y0", "1", "--t-end", "10", "--out-dir", str(tmp_path),
        )
        assert code == 2
        assert any(line.startswith("k: ") for line in err.splitlines())
        assert not (tmp_path / "manifest.json").exists()

    def test_config_file_with_override(self, tmp_path, capsys):
        config = tmp_path / "scenario.json"
        config.write_text(json.dumps({
            "schedule": {"type": "linear", "V0": 2.0},
            "k": 1.0, "W0": 10.0, "Y0": 1.0, "t_end": 5.0,
        }))
        out_dir = tmp_path / "out"
        code, out, _ = run(capsys, "simulate", "--config", str(config), "--t-end", "3", "--out-dir", str(out_dir))
        assert code == 0
        summary = json.loads(out)
        assert summary["samples"] == 301
        assert summary["regime"]["branch"] == "seesaw"
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert list(manifest["inputs"]) == [str(config)]
        assert manifest["params"]["t_end"] == 3.0

    def test_missing_config(self, tmp_path, capsys):
        code, _, err = run(capsys, "simulate", "--config", str(tmp_path / "nope.json"), "--out-dir", str(tmp_path))
        assert code == 2
        assert "not found" in err

    def test_tabulated_has_no_regime(self, tmp_path, capsys):
        code, out, _ = run(
            capsys, "simulate", "--schedule", "tabulated", "--times", "0,5,10", "--values", "50,60,80",
            "--k", "1", "--W0", "50", "--Y0", "1", "--t-end", "10", "--out-dir", str(tmp_path),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["regime"] is None
        assert summary["c_inf"] is None

    def test_reruns_are_byte_identical(self, tmp_path, capsys):
        for name in ("a", "b"):
            run(capsys, *EXPONENTIAL, "--t-end", "10", "--out-dir", str(tmp_path / name))
        for name in ("trajectory.csv", "regime.json", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestClassify:
    def test_china_fixture(self, tmp_path, capsys):
        code, out, _ = run(capsys, "classify", "--fixture", "china", "--out-dir", str(tmp_path))
        assert code == 0
        spectrum = json.loads(out)
        assert spectrum["country"] == "CHN"
        assert len(spectrum["steps"]) == 14
        assert [b["dd"] for b in spectrum["buffers"]] == [[2008, 2009], [2011, 2012]]
        assert json.loads((tmp_path / "spectrum.json").read_text()) == spectrum

    def test_table_format(self, tmp_path, capsys):
        code, out, _ = run(capsys, "classify", "--fixture", "china", "--format", "table", "--out-dir", str(tmp_path))
        assert code == 0
        assert "-1.615" in out
        assert "Spectrum:" in out

    def test_csv_format(self, tmp_path, capsys):
        code, out, _ = run(capsys, "classify", "--fixture", "china", "--format", "csv", "--out-dir", str(tmp_path))
        assert code == 0
        header = out.splitlines()[0].split(",")
        assert header[:3] == ["from", "to", "dq"]
        assert "label" in header

    def test_threshold_override_recorded(self, tmp_path, capsys):
        run(capsys, "classify", "--fixture", "china", "--max-buffer-steps", "3", "--out-dir", str(tmp_path))
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["params"]["thresholds"]["max_buffer_steps"] == 3

    def test_constant_input_is_degenerate(self, tmp_path, capsys):
        data = tmp_path / "flat.csv"
        data.write_text("period,q,g,c\n2000,10,5,2\n2001,10,5,2\n")
        code, out, _ = run(capsys, "classify", "--input", str(data), "--out-dir", str(tmp_path / "out"))
        assert code == 0
        spectrum = json.loads(out)
        assert spectrum["labels"] == []
        assert spectrum["steps"][0]["degenerate"] is True
        assert spectrum["notes"] == ["degenerate-flat: 2000->2001"]

    def test_panel_needs_country(self, tmp_path, capsys):
        data = tmp_path / "panel.csv"
        data.write_text("country,period,q,g,c\nAAA,2000,1,2,3\nAAA,2001,2,3,4\nBBB,2000,1,2,3\nBBB,2001,2,3,4\n")
        code, _, err = run(capsys, "classify", "--input", str(data), "--out-dir", str(tmp_path / "out"))
        assert code == 2
        assert "--country" in err
        code, out, _ = run(capsys, "classify", "--input", str(data), "--country", "BBB", "--out-dir", str(tmp_path / "out"))
        assert code == 0
        assert json.loads(out)["country"] == "BBB"

    def test_single_observation(self, tmp_path, capsys):
        data = tmp_path / "one.csv"
        data.write_text("period,q,g,c\n2000,10,5,2\n")
        code, _, _ = run(capsys, "classify", "--input", str(data), "--out-dir", str(tmp_path / "out"))
        assert code == 2

    def test_help_shows_threshold_defaults(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["classify", "--help"])
        assert excinfo.value.code == 0
        out = " ".join(capsys.readouterr().out.split())
        assert "(default: 3.0)" in out
        assert "(default: 0.35)" in out


class TestResolve:
    @pytest.mark.parametrize("argv,kind,value", [
        (["--q-dir", "up", "--slope", "0.5"], "behavior", "DR"),
        (["--q-dir", "flat", "--slope", "-1", "--dg", "up"], "behavior", "GoldenGrowth"),
        (["--q-dir", "up", "--slope", "-1"], "behavior", "GO"),
        (["--q-dir", "down", "--behavior", "LI"], "elasticity_class", "between_minus_one_and_zero"),
        (["--elasticity-class", "positive", "--behavior", "DD"], "q_direction", "down"),
    ])
    def test_completes_triangle(self, tmp_path, capsys, argv, kind, value):
        code, out, _ = run(capsys, "resolve", *argv, "--out-dir", str(tmp_path))
        assert code == 0
        assert json.loads(out)["result"] == {"kind": kind, "value": value}
        assert json.loads((tmp_path / "resolve.json").read_text())["result"]["value"] == value

    def test_inconsistent_pair(self, tmp_path, capsys):
        code, _, err = run(capsys, "resolve", "--q-dir", "flat", "--slope", "0.5", "--out-dir", str(tmp_path))
        assert code == 2
        assert "no matching row" in err

    def test_table_format(self, tmp_path, capsys):
        _, out, _ = run(capsys, "resolve", "--q-dir", "up", "--behavior", "GI", "--format", "table", "--out-dir", str(tmp_path))
        assert out.strip() == "elasticity_class: below_minus_one"


class TestRegress:
    def test_exact_synthetic(self, tmp_path, capsys):
        code, out, _ = run(capsys, "regress", "--synthetic", "exact", "--out-dir", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        assert report["slope"] == pytest.approx(1.0, abs=1e-9)
        assert report["n_used"] == report["n_input"] == 161
        scatter = pd.read_csv(tmp_path / "scatter.csv")
        assert len(scatter) == 161

    def test_noisy_synthetic_is_seeded(self, tmp_path, capsys):
        _, first, _ = run(capsys, "regress", "--synthetic", "noisy", "--seed", "3", "--out-dir", str(tmp_path / "a"))
        _, second, _ = run(capsys, "regress", "--synthetic", "noisy", "--seed", "3", "--out-dir", str(tmp_path / "b"))
        assert first == second
        assert (tmp_path / "a" / "scatter.csv").read_bytes() == (tmp_path / "b" / "scatter.csv").read_bytes()

    def test_too_few_countries(self, tmp_path, capsys):
        code, _, err = run(capsys, "regress", "--synthetic", "exact", "--n", "2", "--out-dir", str(tmp_path))
        assert code == 4
        assert "at least 3" in err

    def test_panel_input(self, tmp_path, capsys):
        rows = ["country,period,q,g,c"]
        for country, (q, g, c) in {"AAA": (10, 4, 6), "BBB": (20, 4, 16), "CCC": (7, 3, 4)}.items():
            rows += [f"{country},{2000 + i},{q},{g},{c}" for i in range(3)]
        data = tmp_path / "panel.csv"
        data.write_text("\n".join(rows) + "\n")
        code, out, _ = run(capsys, "regress", "--input", str(data), "--min-coverage", "3", "--out-dir", str(tmp_path / "out"))
        assert code == 0
        assert json.loads(out)["slope"] == pytest.approx(1.0)


class TestFetch:
    def test_fetch_with_cross_check(self, tmp_path, capsys, fake_session):
        args = build_parser().parse_args([
            "fetch", "--start-year", "2012", "--end-year", "2016", "--cross-check", "--out-dir", str(tmp_path),
        ])
        client = WorldBankClient(base_url="https://api.example.test/v2", session=fake_session)
        assert cmd_fetch(args, client=client) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["rows"] == 6
        assert summary["countries"] == 2
        assert summary["cross_check_mismatches"] == 0

        panel = pd.read_csv(tmp_path / "panel.csv")
        assert list(panel.columns) == ["country", "period", "q", "g", "c"]
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert "panel.csv" in manifest["outputs"]
        assert "cache/FP.CPI.TOTL.ZG.csv" in manifest["outputs"]

    def test_bad_indicator_flag(self, tmp_path, capsys):
        code, _, err = run(capsys, "fetch", "--indicator", "x=ABC", "--out-dir", str(tmp_path))
        assert code == 2
        assert "role=CODE" in err


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
