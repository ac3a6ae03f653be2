import json

from services.flow_service import serialize_flow


def test_home(client):
    resp = client.get("/")
    assert resp.status_code == 200


def test_parse_route(client, scheduled_loop_text):
    resp = client.post("/flows/parse", json={"text": scheduled_loop_text})
    assert resp.status_code == 200
    body = resp.get_json()
    assert len(body["id"]) == 64
    assert body["flow"]["trigger"]["type"] == "weekly"


def test_parse_route_reports_violation(client, scheduled_loop_obj):
    scheduled_loop_obj["components"][1]["block"] = 5
    resp = client.post("/flows/parse", json={"flow": scheduled_loop_obj})
    assert resp.status_code == 400
    body = resp.get_json()
    assert body["kind"] == "schema_violation"
    assert body["path"] == "components[1].block"


def test_parse_route_missing_fields(client):
    resp = client.post("/flows/parse", json={})
    assert resp.status_code == 400
    assert resp.get_json()["missing_fields"]


def test_canonicalize_route(client, scheduled_loop_obj):
    scheduled_loop_obj["components"][0]["definition"] = " Look_Up_Records "
    resp = client.post("/flows/canonicalize", json={"flow": scheduled_loop_obj})
    assert resp.status_code == 200
    assert resp.get_json()["flow"]["components"][0]["definition"] == "look_up_records"


def test_tree_route(client, scheduled_loop_obj):
    resp = client.post("/flows/tree", json={"flow": scheduled_loop_obj, "include_inputs": False})
    body = resp.get_json()
    assert body["node_count"] == 7
    assert body["tree"]["label"] == "flow"


def test_evaluate_route(client, scheduled_loop_obj, scheduled_loop):
    resp = client.post("/metrics/evaluate", json={
        "candidate": f"```json\n{serialize_flow(scheduled_loop)}\n```",
        "reference": scheduled_loop_obj,
    })
    assert resp.status_code == 200
    assert resp.get_json()["metrics"]["component_match"] == 1.0

    resp = client.post("/metrics/evaluate", json={"candidate": "sorry", "reference": scheduled_loop_obj})
    body = resp.get_json()
    assert body["metrics"]["flow_sim_with_inputs"] == 0.0
    assert body["parse_error"]["kind"] == "no_json_found"


def test_evaluate_route_missing_fields(client):
    resp = client.post("/metrics/evaluate", json={"candidate": {}})
    assert resp.status_code == 400
    assert resp.get_json()["missing_fields"] == ["reference"]


def test_generate_route(client):
    resp = client.post("/synth/generate", json={"pattern": "scheduled_loop", "count": 3, "seed": 1})
    assert resp.status_code == 200
    body = resp.get_json()
    assert body["count"] == 3
    assert all(r["pattern"] == "scheduled_loop" for r in body["records"])
    assert body["records"][0]["flow"]["trigger"]["annotation"]


def test_generate_route_validation(client):
    assert client.post("/synth/generate", json={}).status_code == 400
    assert client.post("/synth/generate", json={"seed": 1, "pattern": "nope"}).status_code == 400
    assert client.post("/synth/generate", json={"seed": 1, "count": 0}).status_code == 400


def test_render_route(client, scheduled_loop_obj):
    resp = client.post("/render/dot", json={"flow": scheduled_loop_obj, "style": {"orientation": "left_to_right"}})
    assert resp.status_code == 200
    assert "rankdir=LR" in resp.get_json()["dot"]

    resp = client.post("/render/dot", json={"flow": scheduled_loop_obj, "style": {"edge_style": "wavy"}})
    assert resp.status_code == 400


def test_score_route(client, scheduled_loop_obj):
    samples = [{"id": f"s{i}", "reference": scheduled_loop_obj} for i in range(4)]
    predictions = [
        {"sample_id": "s0", "raw_output": json.dumps(scheduled_loop_obj)},
        {"sample_id": "s1", "raw_output": json.dumps(scheduled_loop_obj)},
        {"sample_id": "s2", "raw_output": "nothing"},
    ]
    resp = client.post("/harness/score", json={"samples": samples, "predictions": predictions})
    assert resp.status_code == 200
    assert resp.get_json()["overall"]["means"]["trigger_match"] == 0.5

    resp = client.post("/harness/score", json={"samples": samples, "predictions": predictions, "format": "markdown"})
    assert resp.get_json()["markdown"].startswith("| Group | N |")


def test_score_route_unknown_sample(client, scheduled_loop_obj):
    resp = client.post("/harness/score", json={
        "samples": [{"id": "a", "reference": scheduled_loop_obj}],
        "predictions": [{"sample_id": "b", "raw_output": "{}"}],
    })
    assert resp.status_code == 400
