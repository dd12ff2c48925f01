"""Tests for config loading, presets and the command-line entry points."""

import csv
import json
import math

import pytest

from sparse_lmsf import cli
from sparse_lmsf.config import config_to_dict, dump_config, load_config, parse_config
from sparse_lmsf.errors import ConfigurationError
from sparse_lmsf.presets import preset, preset_names


def minimal_doc(**kw):
    doc = {
        "n_taps": 16, "sparsity": 2, "snr_db": 10, "iterations": 1000, "trials": 1000, "seed": 1,
        "algorithms": [
            {"kind": "LMSF", "label": "LMS/F", "step_size": 0.04, "threshold": 0.8},
            {"kind": "RZA_LMSF", "label": "RZA-LMS/F", "step_size": 0.04, "threshold": 0.8,
             "reg_param": 0.04, "reweight_factor": 20},
        ],
    }
    doc.update(kw)
    return doc


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestLoadConfig:
    def test_minimal(self, tmp_path):
        cfg = load_config(write(tmp_path, minimal_doc()))
        assert cfg.n_taps == 16 and cfg.sparsity == 2 and cfg.n_trials == 1000
        assert cfg.algorithms[1].reweight_factor == 20.0

    def test_sparsity_zero(self):
        with pytest.raises(ConfigurationError, match="sparsity out of range") as info:
            parse_config(minimal_doc(sparsity=0))
        assert info.value.key_path == "sparsity"

    def test_rza_without_reweight(self):
        doc = minimal_doc()
        del doc["algorithms"][1]["reweight_factor"]
        with pytest.raises(ConfigurationError, match="reweight_factor") as info:
            parse_config(doc)
        assert info.value.key_path == "algorithms[1].reweight_factor"

    def test_sparse_without_reg_param(self):
        doc = minimal_doc()
        del doc["algorithms"][1]["reg_param"]
        with pytest.raises(ConfigurationError, match="reg_param"):
            parse_config(doc)

    @pytest.mark.parametrize("mutate, key", [
        (lambda d: d.update(sparsty=2), "sparsty"),
        (lambda d: d["algorithms"][0].update(treshold=0.8), "algorithms[0].treshold"),
        (lambda d: d["algorithms"][0].update(kind="NLMS"), "algorithms[0].kind"),
        (lambda d: d["algorithms"][0].update(step_size="0.04"), "algorithms[0].step_size"),
        (lambda d: d["algorithms"][0].update(reweight_factor=20), "algorithms[0].reweight_factor"),
        (lambda d: d.update(trials=10.5), "trials"),
        (lambda d: d.update(seed=True), "seed"),
        (lambda d: d.pop("snr_db"), "snr_db"),
        (lambda d: d.update(algorithms=[]), "algorithms"),
        (lambda d: d.update(sweep={"algorithm_label": "LMS/F", "parameter": "reg_param", "grid": [1.0]}),
         "sweep.grid[0]"),
        (lambda d: d.update(sweep={"algorithm_label": "LMS/F", "parameter": "mu", "grid": [1.0]}),
         "sweep.parameter"),
        (lambda d: d.update(sweep={"algorithm_label": "X", "parameter": "step_size", "grid": [1.0]}),
         "sweep.algorithm_label"),
        (lambda d: d.update(sweep={"algorithm_label": "LMS/F", "parameter": "step_size", "grid": []}),
         "sweep.grid"),
    ])
    def test_strict(self, mutate, key):
        doc = minimal_doc()
        mutate(doc)
        with pytest.raises(ConfigurationError) as info:
            parse_config(doc)
        assert info.value.key_path == key

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            load_config(tmp_path / "nope.json")

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{ n_taps: 16 ")
        with pytest.raises(ConfigurationError, match="invalid JSON"):
            load_config(p)


class TestPresets:
    @pytest.mark.parametrize("name", preset_names())
    def test_round_trip(self, name, tmp_path):
        cfg = preset(name)
        p = tmp_path / "p.json"
        p.write_text(dump_config(cfg))
        assert load_config(p) == cfg

    def test_names(self):
        assert set(preset_names()) == {"table2-k2", "table2-k4", "fig5-sweep", "fig6-sweep", "fig9-sweep", "sec3c-alt"}

    def test_compare_k2(self):
        cfg = preset("table2-k2")
        by = {a.label: a for a in cfg.algorithms}
        assert len(by) == 7 and cfg.snr_db == 10 and cfg.n_taps == 16 and cfg.sparsity == 2
        assert {by[k].step_size for k in ("LMS", "ZA-LMS", "RZA-LMS", "LMS/F", "ZA-LMS/F", "RZA-LMS/F")} == {0.04}
        assert {by[k].threshold for k in ("LMS/F", "ZA-LMS/F", "RZA-LMS/F")} == {0.8}
        assert by["ZA-LMS/F"].reg_param == 0.0004
        assert by["RZA-LMS/F"].reg_param == 0.04
        assert by["ZA-LMS"].reg_param == 0.008
        assert by["RZA-LMS"].reg_param == 0.8
        assert by["RZA-LMS/F"].reweight_factor == by["RZA-LMS"].reweight_factor == 20

    def test_compare_k4(self):
        by = {a.label: a for a in preset("table2-k4").algorithms}
        assert (by["ZA-LMS/F"].reg_param, by["RZA-LMS/F"].reg_param) == (0.0002, 0.02)
        assert (by["ZA-LMS"].reg_param, by["RZA-LMS"].reg_param) == (0.004, 0.4)

    def test_compare_k2_alt(self):
        by = {a.label: a for a in preset("sec3c-alt").algorithms}
        assert by["RZA-LMS/F"].reg_param == 0.02

    def test_rza_eps_sweep_grid(self):
        assert preset("fig9-sweep").sweep.grid == (1, 2, 5, 10, 15, 20, 25, 30, 40, 50)

    def test_za_rho_sweep_grid_spans(self):
        grid = preset("fig5-sweep").sweep.grid
        assert min(grid) == pytest.approx(1e-5) and max(grid) == pytest.approx(1e-2)

    def test_cli_prints_preset(self, capsys):
        assert cli.main(["presets", "table2-k2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert parse_config(doc) == preset("table2-k2")

    def test_cli_unknown_preset(self, caplog):
        assert cli.main(["presets", "no-such-preset"]) == cli.EXIT_CONFIG
        assert "table2-k2" in caplog.text


def small_doc(**kw):
    doc = minimal_doc(iterations=60, trials=5, **kw)
    doc["n_taps"] = 8
    return doc


class TestCompareCommand:
    def test_outputs(self, tmp_path):
        cfg = write(tmp_path, small_doc())
        out = tmp_path / "out"
        assert cli.main(["compare", str(cfg), "-o", str(out)]) == 0
        header, rows = read_csv(out / "curves.csv")
        assert header == ["iteration", "LMS/F", "LMS/F_dB", "RZA-LMS/F", "RZA-LMS/F_dB"]
        assert len(rows) == 60
        assert [r[0] for r in rows] == [str(i) for i in range(60)]
        for r in rows:
            assert len(r) == len(header)
            for lin, db in ((float(r[1]), float(r[2])), (float(r[3]), float(r[4]))):
                assert math.isfinite(lin) and lin >= 0
                assert db == pytest.approx(10 * math.log10(lin), rel=1e-12)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["master_seed"] == 1
        assert manifest["outputs"] == ["curves.csv", "manifest.json"]
        assert manifest["divergence"] == {}
        assert parse_config(manifest["config"]) == load_config(cfg)

    def test_single_algorithm_single_row(self, tmp_path):
        doc = minimal_doc(iterations=1, trials=1)
        doc["algorithms"] = doc["algorithms"][:1]
        out = tmp_path / "o"
        assert cli.main(["compare", str(write(tmp_path, doc)), "-o", str(out)]) == 0
        header, rows = read_csv(out / "curves.csv")
        assert len(header) == 3 and len(rows) == 1

    def test_rerun_byte_identical(self, tmp_path):
        cfg = write(tmp_path, small_doc())
        cli.main(["compare", str(cfg), "-o", str(tmp_path / "a")])
        cli.main(["compare", str(cfg), "-o", str(tmp_path / "b"), "--threads", "3"])
        assert (tmp_path / "a" / "curves.csv").read_bytes() == (tmp_path / "b" / "curves.csv").read_bytes()

    def test_manifest_reproduces(self, tmp_path):
        cfg = write(tmp_path, small_doc())
        cli.main(["compare", str(cfg), "-o", str(tmp_path / "a"), "--seed", "99"])
        manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
        assert manifest["master_seed"] == 99
        again = write(tmp_path, manifest["config"], "again.json")
        cli.main(["compare", str(again), "-o", str(tmp_path / "b")])
        assert (tmp_path / "a" / "curves.csv").read_bytes() == (tmp_path / "b" / "curves.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write(tmp_path, small_doc())
        cli.main(["compare", str(cfg), "-o", str(tmp_path / "a")])
        cli.main(["compare", str(cfg), "-o", str(tmp_path / "b"), "--seed", "2"])
        assert (tmp_path / "a" / "curves.csv").read_bytes() != (tmp_path / "b" / "curves.csv").read_bytes()

    def test_divergence_exit_code(self, tmp_path):
        doc = small_doc()
        doc["algorithms"].append({"kind": "LMF", "label": "LMF", "step_size": 5.0})
        out = tmp_path / "o"
        assert cli.main(["compare", str(write(tmp_path, doc)), "-o", str(out)]) == cli.EXIT_DIVERGED
        manifest = json.loads((out / "manifest.json").read_text())
        assert set(manifest["divergence"]) == {"LMF"}
        header, _ = read_csv(out / "curves.csv")
        assert "LMF" not in header and "LMS/F" in header

    def test_config_error_exit_code(self, tmp_path):
        assert cli.main(["compare", str(write(tmp_path, small_doc(sparsity=0))), "-o", str(tmp_path / "o")]) \
            == cli.EXIT_CONFIG
        assert cli.main(["compare", str(tmp_path / "missing.json"), "-o", str(tmp_path / "o")]) == cli.EXIT_CONFIG

    def test_io_error_exit_code(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert cli.main(["compare", str(write(tmp_path, small_doc())), "-o", str(blocker / "sub")]) == cli.EXIT_IO

    def test_bad_flags(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            cli.main(["compare", "x.json", "-o", str(tmp_path), "--seed", "-3"])
        assert info.value.code == 2


class TestSweepCommand:
    def sweep_doc(self, grid):
        return small_doc(sweep={"algorithm_label": "RZA-LMS/F", "parameter": "reweight_factor", "grid": grid})

    def test_outputs(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert cli.main(["sweep", str(write(tmp_path, self.sweep_doc([5, 20, 50]))), "-o", str(out)]) == 0
        header, rows = read_csv(out / "sweep.csv")
        assert header == ["value", "steady_state_msd", "steady_state_msd_dB"]
        assert [float(r[0]) for r in rows] == [5.0, 20.0, 50.0]
        msd = [float(r[1]) for r in rows]
        assert all(math.isfinite(m) and m >= 0 for m in msd)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["best"]["value"] == [5.0, 20.0, 50.0][msd.index(min(msd))]
        assert "best reweight_factor" in capsys.readouterr().out

    def test_one_point(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert cli.main(["sweep", str(write(tmp_path, self.sweep_doc([20]))), "-o", str(out)]) == 0
        assert "best reweight_factor = 20.0" in capsys.readouterr().out

    def test_requires_sweep_block(self, tmp_path):
        assert cli.main(["sweep", str(write(tmp_path, small_doc())), "-o", str(tmp_path / "o")]) == cli.EXIT_CONFIG

    def test_divergence(self, tmp_path):
        doc = small_doc(sweep={"algorithm_label": "LMF", "parameter": "step_size", "grid": [0.001, 5.0]})
        doc["algorithms"].append({"kind": "LMF", "label": "LMF", "step_size": 0.001})
        out = tmp_path / "o"
        assert cli.main(["sweep", str(write(tmp_path, doc)), "-o", str(out)]) == cli.EXIT_DIVERGED
        assert not (out / "sweep.csv").exists()
        assert json.loads((out / "manifest.json").read_text())["divergence"]


def test_config_dict_is_json_serialisable():
    for name in preset_names():
        json.dumps(config_to_dict(preset(name)))
