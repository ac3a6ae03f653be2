import json

from click.testing import CliRunner

from cli import cli
from services.flow_service import serialize_flow


def _lines(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_generate_split_render(tmp_path):
    runner = CliRunner()
    flows = tmp_path / "flows.jsonl"
    result = runner.invoke(cli, ["generate", "--pattern", "mixed", "--count", "30", "--seed", "3", "--out", str(flows)])
    assert result.exit_code == 0, result.output
    rows = _lines(flows)
    assert len(rows) == 30
    assert all({"id", "pattern", "type", "components"} <= set(r) for r in rows)

    manifest = tmp_path / "manifest.json"
    result = runner.invoke(cli, ["split", "--in", str(flows), "--ratios", "0.8,0.1,0.1", "--seed", "1", "--out", str(manifest)])
    assert result.exit_code == 0, result.output
    data = json.loads(manifest.read_text())
    assert (len(data["train"]), len(data["valid"]), len(data["test"])) == (24, 3, 3)

    dots = tmp_path / "dots"
    result = runner.invoke(cli, ["render", "--in", str(flows), "--out-dir", str(dots), "--seed", "0"])
    assert result.exit_code == 0, result.output
    assert sorted(p.stem for p in dots.glob("*.dot")) == sorted(r["id"] for r in rows)


def test_generate_unknown_pattern(tmp_path):
    result = CliRunner().invoke(cli, ["generate", "--pattern", "nope", "--seed", "1", "--out", str(tmp_path / "x")])
    assert result.exit_code != 0


def test_annotate_command(tmp_path):
    runner = CliRunner()
    flows, annotated = tmp_path / "flows.jsonl", tmp_path / "annotated.jsonl"
    runner.invoke(cli, ["generate", "--count", "5", "--seed", "2", "--no-annotate", "--out", str(flows)])
    assert all(c["annotation"] == "" for r in _lines(flows) for c in r["components"])

    result = runner.invoke(cli, ["annotate", "--in", str(flows), "--out", str(annotated)])
    assert result.exit_code == 0, result.output
    assert [r["id"] for r in _lines(annotated)] == [r["id"] for r in _lines(flows)]
    assert all(c["annotation"] for r in _lines(annotated) for c in r["components"])


def test_evaluate_end_to_end(tmp_path, scheduled_loop, scheduled_loop_obj):
    dataset = tmp_path / "data.jsonl"
    preds = tmp_path / "preds.jsonl"
    report = tmp_path / "report.md"
    with open(dataset, "w", encoding="utf-8") as fh:
        for i in range(10):
            fh.write(json.dumps({"id": f"s{i}", "reference": scheduled_loop_obj}) + "\n")
    with open(preds, "w", encoding="utf-8") as fh:
        for i in range(10):
            raw = f"```json\n{serialize_flow(scheduled_loop)}\n```" if i < 5 else "I cannot generate this."
            fh.write(json.dumps({"sample_id": f"s{i}", "raw_output": raw}) + "\n")

    result = CliRunner().invoke(cli, [
        "evaluate", "--dataset", str(dataset), "--predictions", str(preds),
        "--report", str(report), "--format", "md",
    ])
    assert result.exit_code == 0, result.output
    table = report.read_text()
    assert "| overall | 10 | 0.500 | 0.500 | 0.500 | 0.500 | 0.500 | 0.500 |" in table


def test_evaluate_split_restriction(tmp_path, scheduled_loop_obj):
    dataset = tmp_path / "data.jsonl"
    dataset.write_text("".join(
        json.dumps({"id": i, "reference": scheduled_loop_obj}) + "\n" for i in ("a", "b")
    ))
    preds = tmp_path / "preds.jsonl"
    preds.write_text("".join(
        json.dumps({"sample_id": i, "raw_output": json.dumps(scheduled_loop_obj)}) + "\n" for i in ("a", "b")
    ))
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"train": ["a"], "valid": [], "test": ["b"], "ratios": [0.5, 0.0, 0.5]}))
    report = tmp_path / "r.json"

    result = CliRunner().invoke(cli, [
        "evaluate", "--dataset", str(dataset), "--predictions", str(preds), "--report", str(report),
        "--split", str(manifest), "--split-name", "test",
    ])
    assert result.exit_code == 0, result.output
    body = json.loads(report.read_text())
    assert body["overall"]["count"] == 1
    assert [row["sample_id"] for row in body["per_sample"]] == ["b"]


def test_evaluate_needs_one_prediction_source(tmp_path, scheduled_loop_obj):
    dataset = tmp_path / "data.jsonl"
    dataset.write_text(json.dumps({"id": "a", "reference": scheduled_loop_obj}) + "\n")
    result = CliRunner().invoke(cli, ["evaluate", "--dataset", str(dataset), "--report", str(tmp_path / "r")])
    assert result.exit_code != 0


def test_evaluate_missing_token_is_config_error(tmp_path, monkeypatch, scheduled_loop_obj):
    monkeypatch.delenv("FLOW_MODEL_TOKEN", raising=False)
    dataset = tmp_path / "data.jsonl"
    dataset.write_text(json.dumps({"id": "a", "reference": scheduled_loop_obj, "image_path": "a.png"}) + "\n")
    endpoint = tmp_path / "endpoint.json"
    endpoint.write_text(json.dumps({"base_url": "http://model.test"}))
    result = CliRunner().invoke(cli, [
        "evaluate", "--dataset", str(dataset), "--endpoint", str(endpoint), "--report", str(tmp_path / "r"),
    ])
    assert result.exit_code == 1
    assert "FLOW_MODEL_TOKEN" in result.output


def test_low_scores_still_exit_zero(tmp_path, scheduled_loop_obj):
    dataset = tmp_path / "data.jsonl"
    dataset.write_text(json.dumps({"id": "a", "reference": scheduled_loop_obj}) + "\n")
    preds = tmp_path / "p.jsonl"
    preds.write_text(json.dumps({"sample_id": "a", "raw_output": "nope"}) + "\n")
    result = CliRunner().invoke(cli, [
        "evaluate", "--dataset", str(dataset), "--predictions", str(preds), "--report", str(tmp_path / "r.json"),
    ])
    assert result.exit_code == 0
