import os
import xml.dom.minidom

import pytest

from opspectra import cli, scenarios
from opspectra.cli import (ConfigParse, ScenarioConfig, ScenarioFailed,
                           parse_config_text, run_scenario)
from opspectra.scenarios import BadOption, UnknownScenario

ALL_IDS = ("thm1_1", "prop2_2", "thm3_1", "thm4_1", "thm4_2", "thm6_1",
           "mnt_illustration", "conjecture5_1_explore")


def test_registry_lists_the_expected_ids():
    assert scenarios.scenario_ids() == ALL_IDS
    for sid in ALL_IDS:
        assert scenarios.describe(sid)
    with pytest.raises(UnknownScenario):
        scenarios.describe("thm9_9")


def test_config_parser_happy_path():
    text = """
    # a comment
    scenario = thm4_1
    seed = 3

    input.bump_value = 0.25  # trailing comment
    threshold.cn_last = 0.01
    """
    d = parse_config_text(text)
    assert d == {"scenario": "thm4_1", "seed": "3",
                 "input.bump_value": "0.25", "threshold.cn_last": "0.01"}


@pytest.mark.parametrize("line,reason", [
    ("just words", "expected key"),
    ("a..b = 1", "bad key"),
    ("2bad = 1", "bad key"),
    ("empty = ", "empty value"),
])
def test_config_parser_rejects_malformed_lines(line, reason):
    with pytest.raises(ConfigParse) as err:
        parse_config_text(line)
    assert err.value.lineno == 1
    assert reason in str(err.value)


def test_config_parser_rejects_duplicates():
    with pytest.raises(ConfigParse) as err:
        parse_config_text("seed = 1\nseed = 2\n")
    assert err.value.lineno == 2


def test_scenario_config_from_mapping_defaults_and_checks():
    cfg = ScenarioConfig.from_mapping({"scenario": "thm4_1"})
    assert cfg.seed == 1 and cfg.outdir is None and not cfg.emit_svg
    with pytest.raises(ConfigParse):
        ScenarioConfig.from_mapping({})
    with pytest.raises(UnknownScenario):
        ScenarioConfig.from_mapping({"scenario": "bogus"})
    with pytest.raises(BadOption):
        ScenarioConfig.from_mapping({"scenario": "thm4_1", "seed": "x"})
    with pytest.raises(BadOption):
        ScenarioConfig.from_mapping({"scenario": "thm4_1",
                                     "threshold.cn_last": "-1"})


def test_default_configs_round_trip_through_the_parser():
    for sid in ALL_IDS:
        cfg = ScenarioConfig.from_mapping(
            parse_config_text(scenarios.default_config(sid)))
        assert cfg.scenario == sid


def test_run_scenario_writes_artifacts(tmp_path):
    cfg = ScenarioConfig("thm4_1", outdir=str(tmp_path / "out"))
    report = run_scenario(cfg)
    assert report.passed
    assert (tmp_path / "out" / "stats.csv").exists()
    text = (tmp_path / "out" / "stats.csv").read_text()
    assert text.startswith("label,N,value\n")
    assert all(line.count(",") == 2 for line in text.strip().splitlines())


def test_run_scenario_raises_after_writing_on_threshold_violation(tmp_path):
    cfg = ScenarioConfig("thm4_1", outdir=str(tmp_path / "out"),
                         options={"threshold.cn_last": "1e-12"})
    with pytest.raises(ScenarioFailed) as err:
        run_scenario(cfg)
    assert err.value.failures == ["cn_last"]
    assert (tmp_path / "out" / "stats.csv").exists()


def test_byte_identical_reruns(tmp_path):
    a = ScenarioConfig("prop2_2", seed=5, outdir=str(tmp_path / "a"))
    b = ScenarioConfig("prop2_2", seed=5, outdir=str(tmp_path / "b"))
    run_scenario(a)
    run_scenario(b)
    assert (tmp_path / "a" / "stats.csv").read_bytes() \
        == (tmp_path / "b" / "stats.csv").read_bytes()


def test_outdir_env_override(tmp_path, monkeypatch):
    target = tmp_path / "forced"
    monkeypatch.setenv(cli.OUTDIR_ENV, str(target))
    report = run_scenario(ScenarioConfig("thm4_1",
                                         outdir=str(tmp_path / "ignored")))
    assert report.outdir == str(target)
    assert (target / "stats.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_scenario_extra_artifacts(tmp_path):
    cfg = ScenarioConfig("prop2_2", outdir=str(tmp_path / "out"))
    run_scenario(cfg)
    assert (tmp_path / "out" / "zeros.csv").read_text().startswith(
        "index,point\n")
    assert (tmp_path / "out" / "density.csv").read_text().startswith(
        "x,density\n")
    cfg2 = ScenarioConfig("conjecture5_1_explore",
                          outdir=str(tmp_path / "out2"))
    run_scenario(cfg2)
    torus = (tmp_path / "out2" / "torus_samples.csv").read_text()
    assert torus.splitlines()[0] == "theta_1,a_1,a_2,b_1,b_2"
    assert (tmp_path / "out2" / "discriminant.csv").read_text().startswith(
        "k,coeff\n")


def test_svg_emission_is_well_formed(tmp_path):
    cfg = ScenarioConfig("thm4_1", outdir=str(tmp_path / "out"),
                         emit_svg=True)
    report = run_scenario(cfg)
    for s in report.result.series:
        path = tmp_path / "out" / f"plot_{s.label}.svg"
        assert path.exists()
        xml.dom.minidom.parse(str(path))


def test_cli_run_exit_codes(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(cli.OUTDIR_ENV, raising=False)
    good = tmp_path / "good.txt"
    good.write_text("scenario = thm4_1\noutdir = %s\n" % (tmp_path / "out"))
    assert cli.main(["run", str(good)]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "scenario thm4_1: PASS" in out

    strict = tmp_path / "strict.txt"
    strict.write_text("scenario = thm4_1\noutdir = %s\n"
                      "threshold.cn_last = 1e-12\n" % (tmp_path / "out2"))
    assert cli.main(["run", str(strict)]) == 1
    assert "FAIL cn_last" in capsys.readouterr().out

    bad = tmp_path / "bad.txt"
    bad.write_text("scenario = nonsense\n")
    assert cli.main(["run", str(bad)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.txt")]) == 2
    capsys.readouterr()


def test_cli_list_and_emit(capsys):
    assert cli.main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for sid in ALL_IDS:
        assert sid in out
    assert cli.main(["emit-default-config", "thm6_1"]) == 0
    assert "scenario = thm6_1" in capsys.readouterr().out
    assert cli.main(["emit-default-config", "nope"]) == 2
    capsys.readouterr()


def test_mnt_scenario_has_no_thresholds_but_reports(tmp_path):
    report = run_scenario(ScenarioConfig("mnt_illustration",
                                         outdir=str(tmp_path / "out")))
    assert report.passed
    assert any("illustration" in line for line in report.lines)
    labels = {s.label for s in report.result.series}
    assert "b_window_max" in labels
