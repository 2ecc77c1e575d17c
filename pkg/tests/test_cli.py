import json

import pytest

from delaybounds import cli
from delaybounds.cli import (
    EXIT_ERROR,
    EXIT_EXHAUSTED,
    EXIT_FAILED,
    EXIT_OK,
    compare_row,
    load_scenario,
    main,
    parse_scenario,
    resolve_seed,
)
from delaybounds.errors import ConfigParseError
from delaybounds.verification import SUITE_IDS


def read_records(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.setattr(cli, "SEED_OVERRIDE", None)


def write_scenario(tmp_path, data):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(data))
    return str(path)


class TestScenarioParsing:
    def test_default_scenario(self, scenarios_dir):
        scenario = load_scenario(scenarios_dir / "default.json")
        assert scenario.suites == SUITE_IDS
        assert scenario.config.seed == 7
        assert scenario.config.tol_identity == 1e-12
        assert scenario.config.search_orders == (0, 1)

    def test_discrete_scenario(self, scenarios_dir):
        scenario = load_scenario(scenarios_dir / "discrete.json")
        assert scenario.config.kind == "discrete"
        assert scenario.config.split is None
        assert "two-interval-domination" not in scenario.suites

    @pytest.mark.parametrize("data", [
        {"instance": {}},
        {"version": 2},
        {"version": 1, "colour": "red"},
        {"version": 1, "instance": {"n": 2, "width": 3}},
        {"version": 1, "instance": {"tolerances": {"loose": 1.0}}},
        {"version": 1, "suites": ["soundness", "everything"]},
        {"version": 1, "bounds": ["exact", "best"]},
        {"version": 1, "format": "xml"},
        {"version": 1, "instance": {"n": 0}},
        {"version": 1, "instance": {"kind": "discrete", "lower": 0, "upper": 2, "order": 5}},
        {"version": 1, "instance": {"kind": "discrete", "lower": 0.5, "upper": 4}},
    ])
    def test_rejected_scenarios(self, data):
        with pytest.raises(ConfigParseError):
            parse_scenario(data)

    def test_compare_alphas_are_checked(self):
        compare = {"f": [[1.0]], "W": [[1.0]], "order": 0, "interval": [0.0, 1.0]}
        with pytest.raises(ConfigParseError):
            parse_scenario({"version": 1, "compare": {**compare, "alphas": []}})
        with pytest.raises(ConfigParseError):
            parse_scenario({"version": 1, "compare": {**compare, "alphas": [0.5, 1.0]}})
        with pytest.raises(ConfigParseError):
            parse_scenario({"version": 1, "compare": {"f": [[1.0]], "alphas": [0.5]}})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError):
            load_scenario(tmp_path / "absent.json")


class TestSeedResolution:
    def test_flag_wins(self, monkeypatch):
        monkeypatch.setattr(cli, "SEED_OVERRIDE", "5")
        assert resolve_seed(3, 7) == 3

    def test_environment_beats_scenario(self, monkeypatch):
        monkeypatch.setattr(cli, "SEED_OVERRIDE", "5")
        assert resolve_seed(None, 7) == 5

    def test_scenario_is_the_fallback(self):
        assert resolve_seed(None, 7) == 7

    def test_bad_environment_seed(self, monkeypatch):
        monkeypatch.setattr(cli, "SEED_OVERRIDE", "seven")
        with pytest.raises(ConfigParseError):
            resolve_seed(None, 7)


class TestVerify:
    def test_default_scenario_passes(self, scenarios_dir, tmp_path):
        code = main(["verify", str(scenarios_dir / "default.json"), "--trials", "3", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert sorted(p.stem for p in tmp_path.glob("*.jsonl")) == sorted(SUITE_IDS)
        header = read_records(tmp_path / "ordering.jsonl")[0]
        assert header["record"] == "suite"
        assert header["passed"] is True
        assert header["trials"] == 3

    def test_impossible_tolerance_fails(self, scenarios_dir, tmp_path):
        data = {"version": 1, "instance": {"seed": 2, "trials": 3}, "suites": ["equivalence-sgfmb-bbi"]}
        code = main(["verify", write_scenario(tmp_path, data), "--tol", "1e-20", "--out", str(tmp_path)])
        assert code == EXIT_FAILED
        records = read_records(tmp_path / "equivalence-sgfmb-bbi.jsonl")
        assert any(r["record"] == "failure" for r in records)

    def test_seed_flag_reaches_the_report(self, tmp_path):
        data = {"version": 1, "instance": {"trials": 2}, "suites": ["schur"]}
        main(["verify", write_scenario(tmp_path, data), "--seed", "41", "--out", str(tmp_path)])
        assert read_records(tmp_path / "schur.jsonl")[0]["seed"] == 41

    def test_missing_scenario(self, tmp_path):
        assert main(["verify", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == EXIT_ERROR

    def test_unknown_field(self, tmp_path):
        path = write_scenario(tmp_path, {"version": 1, "instance": {"width": 3}})
        assert main(["verify", path, "--out", str(tmp_path)]) == EXIT_ERROR

    def test_missing_version(self, tmp_path):
        path = write_scenario(tmp_path, {"instance": {"n": 1}})
        assert main(["verify", path, "--out", str(tmp_path)]) == EXIT_ERROR

    @pytest.mark.parametrize("instance", [
        {"kind": "discrete", "lower": 0, "upper": 2, "order": 5, "split": None},
        {"kind": "discrete", "lower": 0.5, "upper": 4, "split": None},
    ])
    def test_unusable_discrete_space_is_a_config_error(self, tmp_path, instance):
        path = write_scenario(tmp_path, {"version": 1, "instance": {**instance, "trials": 2}, "suites": ["soundness"]})
        assert main(["verify", path, "--out", str(tmp_path)]) == EXIT_ERROR
        assert not (tmp_path / "soundness.jsonl").exists()


class TestCompare:
    def test_linear_example(self, scenarios_dir, tmp_path):
        assert main(["compare", str(scenarios_dir / "compare.json"), "--out", str(tmp_path)]) == EXIT_OK
        rows = read_records(tmp_path / "compare.jsonl")
        assert [r["alpha"] for r in rows] == pytest.approx([0.1, 0.25, 0.5, 0.75, 0.9])
        middle = rows[2]
        assert middle["exact"] == pytest.approx(4.0 / 3.0, rel=1e-12)
        assert middle["dbbi"] == pytest.approx(4.0 / 3.0, rel=1e-10)
        assert middle["bbi"] == pytest.approx(4.0 / 3.0, rel=1e-10)
        assert all(r["ordered"] for r in rows)
        assert "alpha" in (tmp_path / "compare.txt").read_text()

    def test_quadratic_example(self, scenarios_dir, tmp_path, capsys):
        assert main(["compare", str(scenarios_dir / "compare_quadratic.json"), "--out", str(tmp_path)]) == EXIT_OK
        printed = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        for row in printed:
            assert row["bbi"] == pytest.approx(7.0 / 36.0, rel=1e-10)
            assert row["bbi"] <= row["dbbi"] * (1 + 1e-12) <= row["exact"] * (1 + 1e-9)

    def test_row_keeps_free_parameter_bounds_below_dbbi(self, scenarios_dir):
        spec = load_scenario(scenarios_dir / "compare_quadratic.json").compare
        row = compare_row(spec, 0.25)
        assert row["ordered"]
        for column in ("m-lsr", "ds-fmb", "serc", "erc", "merc", "rcc"):
            assert row[column] <= row["dbbi"] * (1 + 1e-9)

    def test_needs_compare_section(self, scenarios_dir, tmp_path):
        assert main(["compare", str(scenarios_dir / "default.json"), "--out", str(tmp_path)]) == EXIT_ERROR

    def test_empty_alphas(self, tmp_path):
        data = {"version": 1, "compare": {"f": [[1.0]], "W": [[1.0]], "order": 0,
                                          "interval": [0.0, 1.0], "alphas": []}}
        assert main(["compare", write_scenario(tmp_path, data), "--out", str(tmp_path)]) == EXIT_ERROR


class TestSearch:
    def test_witness_is_written(self, tmp_path):
        assert main(["search", "B", "--seed", "7", "--out", str(tmp_path)]) == EXIT_OK
        (record,) = read_records(tmp_path / "witness-B.jsonl")
        assert record["found"] is True
        assert record["kind"] == "B"
        assert record["negative_value"] <= -1e-6
        assert record["positive_value"] >= 1e-6

    def test_lowercase_kind_and_order(self, tmp_path):
        assert main(["search", "d", "--order", "1", "--seed", "7", "--out", str(tmp_path),
                     "--format", "records"]) == EXIT_OK
        (record,) = read_records(tmp_path / "witness-D.jsonl")
        assert record["alpha"] == 1.0

    def test_zero_budget_is_exhausted(self, tmp_path):
        assert main(["search", "B", "--budget", "0", "--out", str(tmp_path)]) == EXIT_EXHAUSTED
        (record,) = read_records(tmp_path / "witness-B.jsonl")
        assert record["found"] is False

    def test_bad_dimensions(self, tmp_path):
        assert main(["search", "D", "--n", "0", "--out", str(tmp_path)]) == EXIT_ERROR

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["search", "Q", "--out", str(tmp_path)])
        assert excinfo.value.code == EXIT_ERROR

    def test_missing_command(self):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == EXIT_ERROR
