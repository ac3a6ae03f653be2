import json
from pathlib import Path

import pytest

from services.flow_service import parse_flow

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def make_flow(trigger_type="daily", trigger_inputs=(), components=(), kind="flow"):
    """Small flow builder for tests. `components` are (category, definition, extra dict) tuples."""
    data = {"type": kind, "scope": "global", "components": []}
    if kind == "flow":
        data["trigger"] = {
            "type": trigger_type,
            "inputs": [{"name": n, "value": v} for n, v in trigger_inputs],
        }
    for i, (category, definition, extra) in enumerate(components, start=1):
        data["components"].append({"category": category, "definition": definition, "order": i, **extra})
    return parse_flow(json.dumps(data))


@pytest.fixture
def scheduled_loop_text():
    return load_fixture_text("scheduled_loop.json")


@pytest.fixture
def scheduled_loop_obj(scheduled_loop_text):
    return json.loads(scheduled_loop_text)


@pytest.fixture
def scheduled_loop(scheduled_loop_text):
    return parse_flow(scheduled_loop_text)


@pytest.fixture
def client():
    from app import app

    app.config.update(TESTING=True)
    return app.test_client()
