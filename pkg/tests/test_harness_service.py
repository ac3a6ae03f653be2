import json
import random

import pytest

from config.constants import METRIC_COLUMNS
from models.synth import SplitManifest
from services.flow_service import flow_to_obj, serialize_flow
from services.harness_service import (
    EvalReport,
    Prediction,
    Sample,
    emit_report,
    load_dataset,
    load_predictions,
    score,
)
from utils.errors import DatasetError, UnknownSampleIdError
from utils.jsonl import write_jsonl


def _sample(sid, flow, **extra):
    return Sample(id=sid, reference=flow, **extra)


def _perfect(sample):
    return Prediction.from_raw(sample.id, f"```json\n{serialize_flow(sample.reference)}\n```")


def _garbage(sample):
    return Prediction.from_raw(sample.id, "I cannot generate this.")


@pytest.fixture
def ten_samples(scheduled_loop):
    return [_sample(f"s{i:02d}", scheduled_loop) for i in range(10)]


# ---------- load_dataset ----------

def test_load_dataset(tmp_path, scheduled_loop_obj):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [
        {"id": "a", "reference": scheduled_loop_obj, "source_type": "manual", "width": 800, "height": 300},
        {"id": "b", "reference": scheduled_loop_obj},
        {"id": "c", "reference": scheduled_loop_obj, "pattern": "scheduled_loop"},
    ])
    samples = load_dataset(path)
    assert [s.id for s in samples] == ["a", "b", "c"]
    assert samples[0].source_type == "manual"
    assert samples[1].source_type == "synthetic"


def test_duplicate_id_names_the_line(tmp_path, scheduled_loop_obj):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "a", "reference": scheduled_loop_obj}, {"id": "a", "reference": scheduled_loop_obj}])
    with pytest.raises(DatasetError) as exc:
        load_dataset(path)
    assert exc.value.line == 2
    assert "line 2" in str(exc.value)


def test_invalid_reference_names_the_sample(tmp_path, scheduled_loop_obj):
    scheduled_loop_obj["components"][2]["block"] = 9
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "broken", "reference": scheduled_loop_obj}])
    with pytest.raises(DatasetError) as exc:
        load_dataset(path)
    assert exc.value.sample_id == "broken"
    assert "'broken'" in str(exc.value)


def test_dimensions_come_in_pairs(tmp_path, scheduled_loop_obj):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "a", "reference": scheduled_loop_obj, "width": 10}])
    with pytest.raises(DatasetError):
        load_dataset(path)


def test_missing_file_is_dataset_error(tmp_path):
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "nope.jsonl")


def test_bad_json_line(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text('{"id": "a"\n', encoding="utf-8")
    with pytest.raises(DatasetError) as exc:
        load_dataset(path)
    assert exc.value.line == 1


def test_generated_lines_load_as_samples(tmp_path, scheduled_loop):
    path = tmp_path / "flows.jsonl"
    write_jsonl(path, [{**flow_to_obj(scheduled_loop), "id": "f1", "pattern": "scheduled_loop"}])
    (sample,) = load_dataset(path)
    assert sample.id == "f1" and sample.pattern == "scheduled_loop"
    assert sample.reference == scheduled_loop


def test_split_filter(tmp_path, scheduled_loop_obj):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": i, "reference": scheduled_loop_obj} for i in ("a", "b", "c")])
    manifest = SplitManifest(train=["a"], valid=["b"], test=["c"], ratios=(0.5, 0.25, 0.25))
    assert [s.id for s in load_dataset(path, split=manifest, split_name="test")] == ["c"]


def test_load_predictions(tmp_path, scheduled_loop_text):
    path = tmp_path / "preds.jsonl"
    write_jsonl(path, [
        {"sample_id": "a", "raw_output": scheduled_loop_text},
        {"sample_id": "b", "raw_output": "no idea"},
    ])
    good, bad = load_predictions(path)
    assert good.flow is not None and good.parse_error is None
    assert bad.flow is None and "no_json_found" in bad.parse_error
    assert bad.raw_output == "no idea"


# ---------- score ----------

def test_identity_batch_scores_one(ten_samples):
    report = score(ten_samples, [_perfect(s) for s in ten_samples])
    assert report.overall.count == 10
    assert report.overall.means.to_row() == (1.0,) * 6


def test_half_unparseable_scores_half(ten_samples):
    preds = [_perfect(s) for s in ten_samples[:5]] + [_garbage(s) for s in ten_samples[5:]]
    report = score(ten_samples, preds)
    assert report.overall.means.to_row() == (0.5,) * 6

    table = emit_report(report, "markdown")
    header = table.splitlines()[0]
    assert header == "| Group | N | " + " | ".join(h for _, h in METRIC_COLUMNS) + " |"
    assert "| overall | 10 | 0.500 | 0.500 | 0.500 | 0.500 | 0.500 | 0.500 |" in table


def test_prediction_with_colliding_input_names_scores_zero(ten_samples, scheduled_loop_obj):
    bad = json.loads(json.dumps(scheduled_loop_obj))
    bad["components"][0]["inputs"] = [{"name": "Table", "value": "a"}, {"name": "table", "value": "b"}]
    preds = [_perfect(s) for s in ten_samples[1:]]
    preds.append(Prediction.from_raw(ten_samples[0].id, json.dumps(bad)))

    report = score(ten_samples, preds)
    assert len(report.per_sample) == 10
    first = report.per_sample[0]
    assert first.sample_id == ten_samples[0].id
    assert first.metrics.to_row() == (0.0,) * 6
    assert report.overall.means.trigger_match == 0.9


def test_missing_predictions_score_zero(ten_samples):
    report = score(ten_samples, [_perfect(s) for s in ten_samples[:5]])
    assert len(report.per_sample) == 10
    assert sum(r.missing for r in report.per_sample) == 5
    assert report.overall.means.component_match == 0.5

    excluded = score(ten_samples, [_perfect(s) for s in ten_samples[:5]], exclude_missing=True)
    assert excluded.overall.count == 5
    assert excluded.overall.means.component_match == 1.0


def test_orphan_prediction_is_rejected(ten_samples):
    with pytest.raises(UnknownSampleIdError):
        score(ten_samples, [Prediction.from_raw("ghost", "{}")])


def test_duplicate_prediction_is_rejected(ten_samples):
    with pytest.raises(DatasetError):
        score(ten_samples, [_perfect(ten_samples[0]), _perfect(ten_samples[0])])


def test_grouping(scheduled_loop):
    samples = [
        _sample("a", scheduled_loop, source_type="synthetic", width=800, height=300, pattern="scheduled_loop"),
        _sample("b", scheduled_loop, source_type="synthetic", width=1000, height=1001),
        _sample("c", scheduled_loop, source_type="manual"),
    ]
    report = score(samples, [_perfect(samples[0])])
    assert {k: g.count for k, g in report.groups["source_type"].items()} == {"synthetic": 2, "manual": 1}
    assert {k: g.count for k, g in report.groups["orientation"].items()} == {"landscape": 1, "portrait": 1}
    assert {k: g.count for k, g in report.groups["resolution"].items()} == {"small": 1, "large": 1}
    assert report.groups["pattern"]["scheduled_loop"].means.trigger_match == 1.0
    for axis, groups in report.groups.items():
        if axis == "source_type":
            assert sum(g.count for g in groups.values()) == report.overall.count


def test_score_is_order_independent(ten_samples):
    preds = [_perfect(s) for s in ten_samples[:3]] + [_garbage(s) for s in ten_samples[3:6]]
    shuffled_samples, shuffled_preds = ten_samples[:], preds[:]
    rng = random.Random(0)
    rng.shuffle(shuffled_samples)
    rng.shuffle(shuffled_preds)
    assert score(ten_samples, preds) == score(shuffled_samples, shuffled_preds)


def test_aggregates_are_arithmetic_means(scheduled_loop, scheduled_loop_obj):
    scheduled_loop_obj["trigger"]["type"] = "daily"
    samples = [_sample(f"s{i}", scheduled_loop) for i in range(4)]
    preds = [
        _perfect(samples[0]),
        Prediction.from_raw("s1", json.dumps(scheduled_loop_obj)),
        _garbage(samples[2]),
    ]
    report = score(samples, preds)
    for name, _ in METRIC_COLUMNS:
        values = [getattr(r.metrics, name) for r in report.per_sample]
        assert getattr(report.overall.means, name) == pytest.approx(sum(values) / len(values))


# ---------- emit_report ----------

def test_empty_report_is_header_only():
    lines = emit_report(score([], []), "markdown").splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("| Group | N | FlowSim w/ inputs")


def test_identity_markdown_row(ten_samples):
    table = emit_report(score(ten_samples, [_perfect(s) for s in ten_samples]), "markdown")
    assert "| overall | 10 | 1.000 | 1.000 | 1.000 | 1.000 | 1.000 | 1.000 |" in table


def test_json_report_round_trips(ten_samples):
    report = score(ten_samples, [_perfect(s) for s in ten_samples[:4]])
    text = emit_report(report, "json")
    assert EvalReport.model_validate_json(text) == report
    assert "flow_sim_with_inputs" in json.loads(text)["overall"]["means"]


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(EvalReport(), "html")
