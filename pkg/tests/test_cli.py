"""Batch front end: config validation, reports, exports, exit codes."""

import json

import numpy as np
import pytest

from semistab.cli import (
    ANALYSES,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    RunReport,
    export,
    main,
    run,
)
from semistab.errors import UsageError

EXPONENT_WINDOW = 0.1


def _strip_timing(text):
    d = json.loads(text)
    d.pop("timing")
    return json.dumps(d, sort_keys=True)


class TestRunConfig:
    def test_every_knob_has_a_default(self):
        cfg = RunConfig()
        assert cfg.scenario == "powerlaw"
        assert cfg.analyses == ()
        assert cfg.formats == ("json",)
        assert cfg.out is None

    def test_unknown_keys_rejected(self):
        with pytest.raises(UsageError, match="horizn"):
            RunConfig.from_dict({"horizn": 3})

    def test_unknown_analysis_rejected(self):
        with pytest.raises(UsageError, match="unknown analysis"):
            RunConfig.from_dict({"analyses": ["gap", "vibes"]})

    def test_unknown_format_rejected(self):
        with pytest.raises(UsageError, match="unknown format"):
            RunConfig.from_dict({"formats": ["yaml"]})

    @pytest.mark.parametrize(
        "field,value",
        [("horizon", 0.0), ("samples", 0), ("epsilon", 0.0),
         ("truncation", 1), ("exponent_tol", 0.0), ("radius", -1.0)],
    )
    def test_knob_bounds(self, field, value):
        with pytest.raises(UsageError):
            RunConfig.from_dict({field: value})

    def test_scenario_table_needs_exactly_one_reference(self):
        with pytest.raises(UsageError, match="exactly one"):
            RunConfig.from_dict(
                {"scenario": {"name": "powerlaw", "path": "x.json"}}
            )
        with pytest.raises(UsageError, match="exactly one"):
            RunConfig.from_dict({"scenario": {"args": {}}})

    def test_scenario_table_args_merge(self):
        cfg = RunConfig.from_dict(
            {
                "scenario": {"name": "powerlaw", "args": {"alpha": 2.0,
                                                          "n_modes": 8}},
                "scenario_args": {"alpha": 1.0},
            }
        )
        # explicit top-level args win over the table's
        assert cfg.scenario == "powerlaw"
        assert cfg.scenario_args == {"alpha": 1.0, "n_modes": 8}

    def test_hash_tracks_content(self):
        a = RunConfig.from_dict({"seed": 1})
        b = RunConfig.from_dict({"seed": 1})
        c = RunConfig.from_dict({"seed": 2})
        assert a.config_hash == b.config_hash
        assert a.config_hash != c.config_hash


class TestConfigFiles:
    def test_toml_round_trip(self, tmp_path):
        p = tmp_path / "run.toml"
        p.write_text(
            'analyses = ["gap"]\nseed = 5\n\n'
            '[scenario]\nname = "powerlaw"\nargs = { n_modes = 16 }\n'
        )
        code = main(["run", "--config", str(p), "--out", str(tmp_path / "o")])
        assert code == EXIT_OK
        rep = json.loads((tmp_path / "o" / "report.json").read_text())
        assert rep["provenance"]["config"]["seed"] == 5
        assert [r["analysis"] for r in rep["records"]] == ["gap"]

    def test_missing_file_is_usage_error(self, capsys):
        assert main(["run", "--config", "missing.toml"]) == EXIT_USAGE
        assert "not found" in capsys.readouterr().err

    def test_malformed_toml_is_usage_error(self, tmp_path, capsys):
        p = tmp_path / "bad.toml"
        p.write_text("analyses = [\n")
        assert main(["run", "--config", str(p)]) == EXIT_USAGE

    def test_unrecognized_suffix_rejected(self, tmp_path):
        p = tmp_path / "conf.yaml"
        p.write_text("x: 1\n")
        assert main(["run", "--config", str(p)]) == EXIT_USAGE


class TestRun:
    def test_empty_analysis_list_gives_provenance_only(self):
        cfg = RunConfig.from_dict({"scenario_args": {"n_modes": 8}})
        rep = run(cfg)
        assert rep.records == []
        assert rep.provenance["config_hash"] == cfg.config_hash
        assert rep.provenance["version"]
        assert rep.provenance["scenario"]["name"] == "powerlaw"
        assert rep.exit_code == EXIT_OK

    def test_analyze_pipeline_matches_declarations(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["gap", "spectral-condition", "decay-fit"]}
        )
        rep = run(cfg)
        by_name = {r.analysis: r for r in rep.records}
        assert set(by_name) == {"gap", "spectral-condition", "decay-fit"}
        assert all(r.match is True for r in rep.records)
        fit = by_name["decay-fit"].payload
        assert abs(fit["exponent"] - 1.0) <= EXPONENT_WINDOW
        # fit-grade truncation was applied since the user pinned no size
        assert rep.provenance["scenario_args"]["n_modes"] == 40000

    def test_pinned_truncation_is_respected_and_can_fail(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["decay-fit"], "truncation": 64}
        )
        rep = run(cfg)
        assert rep.provenance["scenario_args"]["n_modes"] == 64
        rec = rep.records[0]
        assert rec.match is False
        assert "classified" in rec.witness
        assert rep.exit_code == EXIT_MISMATCH

    def test_report_json_round_trip_is_lossless(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["gap", "simulate"], "scenario_args": {"n_modes": 12},
             "horizon": 4.0}
        )
        rep = run(cfg)
        wire = json.loads(json.dumps(rep.to_json_dict()))
        assert RunReport.from_json_dict(wire) == rep

    def test_determinism_excluding_wall_clock(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["gap", "simulate"], "seed": 11,
             "scenario_args": {"n_modes": 24}, "horizon": 8.0}
        )
        a = json.dumps(run(cfg).to_json_dict(), sort_keys=True)
        b = json.dumps(run(cfg).to_json_dict(), sort_keys=True)
        assert _strip_timing(a) == _strip_timing(b)

    def test_analyses_execute_in_dependency_order(self):
        cfg = RunConfig.from_dict(
            {
                "analyses": ["certify", "decay-fit", "gap"],
                "scenario": "bilinear",
                "scenario_args": {"n_modes": 48},
                "samples": 2,
                "horizon": 8.0,
            }
        )
        rep = run(cfg)
        order = [r.analysis for r in rep.records]
        assert order == ["gap", "decay-fit", "certify"]
        assert order.index("decay-fit") < order.index("certify")

    def test_admissibility_needs_an_input_operator(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["admissibility"], "scenario": "saturating",
             "scenario_args": {"n_modes": 16}}
        )
        with pytest.raises(UsageError, match="input operator"):
            run(cfg)

    def test_certify_needs_bilinear_constants(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["certify"], "scenario_args": {"n_modes": 16}}
        )
        with pytest.raises(UsageError, match="bilinear"):
            run(cfg)

    def test_probe_without_certified_gain_is_usage_error(self):
        cfg = RunConfig.from_dict(
            {"analyses": ["probe"], "scenario": "nonadmissible",
             "scenario_args": {"n_modes": 32}}
        )
        with pytest.raises(UsageError, match="certified"):
            run(cfg)


class TestExport:
    def _report(self, **over):
        base = {"analyses": ["decay-fit"], "formats": ["json", "csv"]}
        base.update(over)
        cfg = RunConfig.from_dict(base)
        return run(cfg), cfg

    def test_decay_fit_csv_matches_grid(self, tmp_path):
        rep, cfg = self._report()
        export(rep, str(tmp_path), cfg.formats)
        rows = (tmp_path / "decay_fit.csv").read_text().strip().splitlines()
        assert rows[0] == "t,norm"
        body = rows[1:]
        assert len(body) >= 8
        curve = rep.records[0].payload["curve"]
        assert len(body) == len(curve)
        t0 = float(body[0].split(",")[0])
        assert t0 == pytest.approx(curve[0][0])

    def test_admissibility_csvs(self, tmp_path):
        cfg = RunConfig.from_dict(
            {"analyses": ["admissibility"], "scenario": "dyadic",
             "formats": ["csv"], "samples": 4, "horizon": 16.0}
        )
        rep = run(cfg)
        written = export(rep, str(tmp_path), cfg.formats)
        names = sorted(p.name for p in written)
        assert names == ["admissibility.csv", "stripes.csv"]
        stripes = (tmp_path / "stripes.csv").read_text().strip().splitlines()
        assert stripes[0] == "k,phi,count"
        # stripe index 0 holds the first block with Phi = 1
        assert stripes[1].split(",") == ["0", "1.0", "1"]

    def test_certify_margin_trace_csv(self, tmp_path):
        cfg = RunConfig.from_dict(
            {"analyses": ["certify"], "scenario": "bilinear",
             "scenario_args": {"n_modes": 32}, "samples": 2,
             "horizon": 6.0, "formats": ["csv"]}
        )
        rep = run(cfg)
        export(rep, str(tmp_path), cfg.formats)
        rows = (tmp_path / "margins.csv").read_text().strip().splitlines()
        assert rows[0] == "run,t,margin"
        assert rows[1].startswith("sample0,")
        # every margin in a passing certification is nonnegative
        assert all(float(r.rsplit(",", 1)[1]) >= 0.0 for r in rows[1:])

    def test_json_report_written_once(self, tmp_path):
        rep, cfg = self._report(analyses=["gap"], formats=["json"],
                                scenario_args={"n_modes": 8})
        written = export(rep, str(tmp_path), cfg.formats)
        assert [p.name for p in written] == ["report.json"]
        reloaded = RunReport.from_json_dict(
            json.loads((tmp_path / "report.json").read_text())
        )
        assert reloaded == rep

    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        rep, cfg = self._report(analyses=["gap"],
                                scenario_args={"n_modes": 8})
        with pytest.raises(UsageError, match="not writable"):
            export(rep, str(blocker / "sub"), ("json",))


class TestMain:
    def test_analyze_example(self, tmp_path):
        code = main(
            ["analyze", "--scenario", "powerlaw", "--alpha", "1",
             "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        rep = json.loads((tmp_path / "report.json").read_text())
        fit = next(
            r for r in rep["records"] if r["analysis"] == "decay-fit"
        )
        assert abs(fit["payload"]["exponent"] - 1.0) <= EXPONENT_WINDOW

    def test_certify_example(self, tmp_path):
        code = main(
            ["certify", "--scenario", "bilinear", "--samples", "3",
             "--horizon", "8", "--truncation", "48", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        rep = json.loads((tmp_path / "report.json").read_text())
        cert = rep["records"][0]["payload"]["certification"]
        assert cert["pass"] is True

    def test_probe_subcommand(self, tmp_path):
        # the certified input gain needs enough modes for the range
        # condition to settle; the scenario default (512) is the minimum
        code = main(
            ["probe", "--scenario", "powerlaw",
             "--epsilon", "0.5", "--radius", "1.0", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        rep = json.loads((tmp_path / "report.json").read_text())
        payload = rep["records"][0]["payload"]
        assert payload["limit"]["pass"] and payload["asymptotic_gain"]["pass"]
        assert payload["limit"]["tau_hat"] is not None

    def test_unknown_scenario_is_usage_error(self, capsys):
        assert main(["simulate", "--scenario", "wave"]) == EXIT_USAGE
        assert "available" in capsys.readouterr().err

    def test_scenario_dump_feeds_other_commands(self, tmp_path, capsys):
        ref = tmp_path / "scn.json"
        code = main(
            ["scenario", "dump", "--scenario", "powerlaw",
             "--truncation", "16", "--out", str(ref)]
        )
        assert code == EXIT_OK
        doc = json.loads(ref.read_text())
        assert doc["name"] == "powerlaw" and doc["args"]["n_modes"] == 16
        assert doc["config"]["generator"]["truncation"] == 16
        code = main(
            ["simulate", "--scenario", str(ref), "--horizon", "4",
             "--out", str(tmp_path / "sim")]
        )
        assert code == EXIT_OK
        rep = json.loads((tmp_path / "sim" / "report.json").read_text())
        gen = rep["provenance"]["scenario"]["generator"]
        assert gen["truncation"] == 16

    def test_stdout_report_when_no_out(self, capsys):
        code = main(["analyze", "--scenario", "powerlaw",
                     "--truncation", "4096"])
        out = capsys.readouterr().out
        assert code in (EXIT_OK, EXIT_MISMATCH)
        rep = json.loads(out)
        assert {r["analysis"] for r in rep["records"]} == {
            "gap", "spectral-condition", "decay-fit"
        }


class TestSweep:
    def _config(self, tmp_path, body):
        p = tmp_path / "sweep.toml"
        p.write_text(body)
        return str(p)

    def test_cases_run_and_summarize(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SEMISTAB_THREADS", "2")
        cfgp = self._config(
            tmp_path,
            'analyses = ["gap"]\n\n'
            '[[cases]]\nscenario = { name = "powerlaw",'
            ' args = { n_modes = 8 } }\n\n'
            '[[cases]]\nscenario = { name = "powerlaw",'
            ' args = { alpha = 2.0, n_modes = 8 } }\n',
        )
        out = tmp_path / "results"
        assert main(["sweep", "--config", cfgp, "--out", str(out)]) == EXIT_OK
        summary = json.loads((out / "sweep.json").read_text())
        assert [c["exit_code"] for c in summary["cases"]] == [0, 0]
        for i in range(2):
            rep = json.loads(
                (out / f"case-{i:03d}" / "report.json").read_text()
            )
            assert rep["records"][0]["match"] is True

    def test_exit_code_is_worst_case(self, tmp_path):
        cfgp = self._config(
            tmp_path,
            'analyses = ["decay-fit"]\n\n'
            '[[cases]]\nscenario = { name = "powerlaw",'
            ' args = { n_modes = 64 } }\n\n'
            '[[cases]]\nscenario = "powerlaw"\n',
        )
        code = main(["sweep", "--config", cfgp, "--out",
                     str(tmp_path / "r")])
        assert code == EXIT_MISMATCH

    def test_empty_cases_rejected(self, tmp_path, capsys):
        cfgp = self._config(tmp_path, 'analyses = ["gap"]\n')
        assert main(["sweep", "--config", cfgp]) == EXIT_USAGE
        assert "cases" in capsys.readouterr().err

    def test_bad_thread_env_rejected(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SEMISTAB_THREADS", "many")
        cfgp = self._config(
            tmp_path,
            '[[cases]]\nscenario = { name = "powerlaw",'
            ' args = { n_modes = 8 } }\n',
        )
        assert main(["sweep", "--config", cfgp]) == EXIT_USAGE


ANALYSIS_SET = set(ANALYSES)


def test_subcommand_analysis_sets_are_known():
    from semistab.cli import _SUBCOMMAND_ANALYSES

    for names in _SUBCOMMAND_ANALYSES.values():
        assert set(names) <= ANALYSIS_SET
