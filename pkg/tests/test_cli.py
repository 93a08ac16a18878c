from __future__ import annotations

import json
from pathlib import Path

import pytest
from conftest import write
from typer.testing import CliRunner

from fluidcat import checks
from fluidcat.cli import app
from fluidcat.fincat import FinCategory, codiscrete_category

runner = CliRunner()


def run(l5_file: Path, tmp_path: Path, command: str, *extra: str):
    target = tmp_path / f"{command}.json"
    result = runner.invoke(
        app,
        [command, "--input", str(l5_file), "--epsilon", "1.5", "--output", str(target), *extra],
    )
    return result, target


def test_cover_lists_balls_and_warns_about_disconnection(l5_file: Path, tmp_path: Path) -> None:
    result, target = run(l5_file, tmp_path, "cover")

    assert result.exit_code == 0
    assert "disconnected" in result.output
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["tool"] == "fluidcat"
    assert payload["command"] == "cover"
    assert payload["config"]["epsilon"] == 1.5
    assert payload["result"]["balls"]["b"] == ["a", "b", "c"]
    assert payload["result"]["components"] == [["a", "b", "c", "d"], ["e"]]


def test_cover_single_atom_has_no_warning(tmp_path: Path) -> None:
    source = tmp_path / "solo.json"
    write(source, json.dumps({"atoms": ["solo"], "metric": {"type": "matrix", "d": [[0]]}}))
    target = tmp_path / "out.json"

    result = runner.invoke(app, ["cover", "--input", str(source), "--epsilon", "1", "--output", str(target)])

    assert result.exit_code == 0
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["result"]["components"] == [["solo"]]
    assert payload["result"]["warnings"] == []


def test_zero_epsilon_exits_with_code_2(l5_file: Path) -> None:
    result = runner.invoke(app, ["cover", "--input", str(l5_file), "--epsilon", "0"])

    assert result.exit_code == 2
    assert "NonpositiveEpsilon" in result.output


def test_malformed_input_exits_with_code_2(tmp_path: Path) -> None:
    source = tmp_path / "bad.json"
    write(source, json.dumps({"atoms": ["a", "b"], "metric": {"type": "matrix", "d": [[0, 1], [2, 0]]}}))

    result = runner.invoke(app, ["system", "--input", str(source), "--epsilon", "1"])

    assert result.exit_code == 2
    assert "AsymmetricMetric:" in result.output


def test_wavefn_reports_worked_value(l5_file: Path, tmp_path: Path) -> None:
    result, target = run(l5_file, tmp_path, "wavefn", "--levels", "2", "--core", "a", "--lambda", "0.5")

    assert result.exit_code == 0
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["config"]["lambda"] == 0.5
    wave = payload["result"]["waves"][0]
    assert wave["prob"] == pytest.approx({"a": 0.4, "b": 0.4, "c": 0.2}, abs=1e-12)
    assert list(wave["prob"]) == ["a", "b", "c"]


def test_bad_lambda_exits_with_code_2(l5_file: Path) -> None:
    result = runner.invoke(app, ["wavefn", "--input", str(l5_file), "--epsilon", "1.5", "--lambda", "1"])

    assert result.exit_code == 2
    assert "LambdaOutOfRange" in result.output


def test_bundle_counts(l5_file: Path, tmp_path: Path) -> None:
    result, target = run(l5_file, tmp_path, "bundle", "--levels", "1")

    assert result.exit_code == 0
    payload = json.loads(target.read_text(encoding="utf-8"))["result"]
    assert payload["objects"] == 5
    assert payload["morphisms"] == 25
    assert payload["checks"]["cofibered"] == []
    assert payload["checks"]["duality"] == []


def test_strata_at_level_zero_exits_with_code_2(l5_file: Path) -> None:
    result = runner.invoke(app, ["strata", "--input", str(l5_file), "--epsilon", "1.5", "--levels", "0"])

    assert result.exit_code == 2
    assert "ZeroLevel" in result.output


def test_strata_and_colimit(l5_file: Path, tmp_path: Path) -> None:
    result, target = run(l5_file, tmp_path, "strata", "--levels", "2", "--core", "a")
    assert result.exit_code == 0
    assert json.loads(target.read_text(encoding="utf-8"))["result"] == {"a": [["a", "b"], ["c"]]}

    result, target = run(l5_file, tmp_path, "colimit")
    assert result.exit_code == 0
    colimits = json.loads(target.read_text(encoding="utf-8"))["result"]["colimits"]
    assert colimits["a"] == ["a", "b", "c", "d"]
    assert colimits["e"] == ["e"]


def test_unknown_core_exits_with_code_2(l5_file: Path) -> None:
    result = runner.invoke(app, ["towers", "--input", str(l5_file), "--epsilon", "1.5", "--core", "z"])

    assert result.exit_code == 2
    assert "UnknownAtom" in result.output


def test_towers_report(l5_file: Path, tmp_path: Path) -> None:
    result, target = run(l5_file, tmp_path, "towers", "--levels", "1", "--core", "a")

    assert result.exit_code == 0
    payload = json.loads(target.read_text(encoding="utf-8"))["result"]
    canonical = payload["towers"][0]
    assert canonical["feet"] == ["a@1"]
    assert [section["members"] for section in canonical["sections"]] == [
        ["a", "b"],
        ["a", "b", "c"],
        ["a", "b", "c", "d"],
        ["a", "b", "c", "d", "e"],
    ]


@pytest.mark.parametrize("command", ["cover", "system", "towers", "bundle"])
def test_dot_output(l5_file: Path, tmp_path: Path, command: str) -> None:
    result, target = run(l5_file, tmp_path, command, "--levels", "1", "--format", "dot")

    assert result.exit_code == 0
    text = target.read_text(encoding="utf-8")
    assert text.startswith(("graph ", "digraph "))
    assert text.rstrip().endswith("}")


@pytest.mark.parametrize("command", ["strata", "colimit", "wavefn", "check"])
def test_dot_is_refused_where_unsupported(l5_file: Path, command: str) -> None:
    result = runner.invoke(app, [command, "--input", str(l5_file), "--epsilon", "1.5", "--format", "dot"])

    assert result.exit_code == 2
    assert "UnsupportedFormat" in result.output


def test_check_passes_and_is_byte_stable(l5_file: Path, tmp_path: Path) -> None:
    first, first_target = run(l5_file, tmp_path, "check")
    first_text = first_target.read_text(encoding="utf-8")
    second, second_target = run(l5_file, tmp_path, "check")

    assert first.exit_code == 0
    assert second.exit_code == 0
    assert json.loads(first_text)["result"]["passed"] is True
    assert second_target.read_text(encoding="utf-8") == first_text


def test_check_fails_on_corrupted_category(l5_file: Path, tmp_path: Path, monkeypatch) -> None:
    good = codiscrete_category(("x", "y"), "t")
    table = {(g, f): good.compose(g, f) for g, f, _ in good.table()}
    table[(good.identity("y"), good.hom("x", "y")[0])] = good.identity("x")
    corrupted = FinCategory(good.objects, good.morphisms, good.identities, composition=table, name="corrupt")
    original = checks.level_categories
    monkeypatch.setattr(checks, "level_categories", lambda system: [*original(system), corrupted])

    result, target = run(l5_file, tmp_path, "check", "--levels", "2")

    assert result.exit_code == 1
    assert "category-laws/identity-left" in result.output
    assert json.loads(target.read_text(encoding="utf-8"))["result"]["passed"] is False


def test_system_output_is_deterministic_on_stdout(l5_file: Path) -> None:
    args = ["system", "--input", str(l5_file), "--epsilon", "1.5", "--levels", "2"]

    assert runner.invoke(app, args).output == runner.invoke(app, args).output
