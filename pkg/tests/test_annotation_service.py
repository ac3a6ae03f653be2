import json

from config.catalog import DEFAULT_CATALOG
from config.patterns import PATTERN_REGISTRY
from services.annotation_service import annotate, component_annotation, trigger_annotation
from services.flow_service import parse_flow
from services.synth_service import generate_dataset


def _blank(obj):
    obj["trigger"]["annotation"] = ""
    for comp in obj["components"]:
        comp["annotation"] = ""
    return parse_flow(json.dumps(obj))


def test_reference_example_templates(scheduled_loop_obj):
    flow = annotate(_blank(scheduled_loop_obj))
    assert flow.trigger.annotation == "on wednesdays at 4:45 pm"
    assert [c.annotation for c in flow.components] == [
        "look up incident_task records",
        "for each incident_task record",
        "if active is false",
        "post incident details for incident_task",
    ]


def test_existing_annotations_are_kept(scheduled_loop):
    assert annotate(scheduled_loop) == scheduled_loop


def test_annotate_is_idempotent():
    for flow in generate_dataset(PATTERN_REGISTRY, DEFAULT_CATALOG, 100, seed=21):
        once = annotate(flow)
        assert annotate(once) == once
        assert all(c.annotation for c in once.components)
        if once.trigger is not None:
            assert once.trigger.annotation


def test_trigger_templates():
    def trig(kind, **inputs):
        return parse_flow(json.dumps({
            "type": "flow",
            "trigger": {"type": kind, "inputs": [{"name": k, "value": v} for k, v in inputs.items()]},
            "components": [],
        })).trigger

    assert trigger_annotation(trig("daily", time="1970-01-01 00:15:00")) == "every day at 12:15 am"
    assert trigger_annotation(trig("repeat", repeat="1970-01-01 04:00:00")) == "every 4 hours"
    assert trigger_annotation(trig("record_updated", table="incident")) == "when a incident record is updated"
    assert trigger_annotation(trig("service_catalog", catalog_item="new_laptop")) == "when a new laptop is requested"


def test_component_default_uses_words():
    flow = parse_flow(json.dumps({
        "type": "subflow",
        "components": [{"category": "action", "definition": "ask_for_approval", "order": 1}],
    }))
    assert component_annotation(flow.components[0]) == "ask for approval"
