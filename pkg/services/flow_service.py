# services/flow_service.py

import hashlib
import json
import logging
import re
from typing import Any, List

from pydantic import ValidationError

from models.flow import ComponentIdentity, Flow
from utils.errors import FlowParseError, ParseErrorKind

logger = logging.getLogger(__name__)

_FENCE_RE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\r?\n(.*?)```", re.DOTALL)
_decoder = json.JSONDecoder()


# =============================================================================
# PARSING
# =============================================================================

def _format_loc(loc) -> str:
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out


def _first_violation(err: ValidationError) -> FlowParseError:
    first = err.errors(include_url=False)[0]
    # Drop union/function tags pydantic appends to the location.
    loc = [p for p in first.get("loc", ()) if not (isinstance(p, str) and p.startswith("function-"))]
    path = _format_loc(loc)
    ctx = first.get("ctx") or {}
    if "path" in ctx:
        inner = ctx["path"]
        path = f"{path}.{inner}" if path else inner
        reason = ctx.get("reason", first.get("msg", "invalid value"))
    else:
        reason = first.get("msg", "invalid value")
    return FlowParseError(ParseErrorKind.SCHEMA_VIOLATION, reason, path or "$")


def flow_from_obj(obj: Any) -> Flow:
    if not isinstance(obj, dict):
        raise FlowParseError(ParseErrorKind.SCHEMA_VIOLATION, "flow must be a JSON object", "$")
    try:
        return Flow.model_validate(obj)
    except ValidationError as e:
        raise _first_violation(e) from None


def parse_flow(text: str | bytes) -> Flow:
    """
    Parse a flow JSON document.

    Unknown keys are ignored and key order never matters. Raises FlowParseError
    (malformed_json or schema_violation naming the first failing path).
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise FlowParseError(ParseErrorKind.MALFORMED_JSON, f"not UTF-8: {e.reason}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise FlowParseError(ParseErrorKind.MALFORMED_JSON, f"{e.msg} (line {e.lineno}, column {e.colno})") from None
    return flow_from_obj(obj)


def extract_flow_from_model_output(text: str) -> Flow:
    """
    Pull the flow out of a raw model reply.

    The first fenced code block is preferred when present; inside it (or the
    whole text otherwise) the first '{' that starts a complete JSON object wins.
    """
    if not isinstance(text, str):
        raise FlowParseError(ParseErrorKind.NO_JSON_FOUND, "model output is not text")

    candidates = [m.group(1) for m in _FENCE_RE.finditer(text)]
    candidates.append(text)

    for chunk in candidates:
        idx = chunk.find("{")
        while idx != -1:
            try:
                obj, _ = _decoder.raw_decode(chunk, idx)
            except json.JSONDecodeError:
                idx = chunk.find("{", idx + 1)
                continue
            if isinstance(obj, dict):
                return flow_from_obj(obj)
            idx = chunk.find("{", idx + 1)

    raise FlowParseError(ParseErrorKind.NO_JSON_FOUND, "model output contains no JSON object")


# =============================================================================
# CANONICAL FORM
# =============================================================================

def _norm(s: str) -> str:
    return s.strip().lower()


def _canonical_inputs(inputs) -> list:
    rows = [{"name": _norm(b.name), "value": b.value} for b in inputs]
    return sorted(rows, key=lambda r: r["name"])


def canonicalize(flow: Flow) -> Flow:
    """
    Normalized copy of `flow`: trimmed lower-case identifiers, inputs sorted by
    name, orders renumbered 1..n with block references remapped. Idempotent.
    """
    renumber = {c.order: i for i, c in enumerate(flow.components, start=1)}

    data = {
        "type": flow.kind.value,
        "scope": _norm(flow.scope),
        "components": [
            {
                "annotation": c.annotation,
                "category": c.category.value,
                "definition": _norm(c.definition),
                "scope": _norm(c.scope),
                "order": renumber[c.order],
                "block": renumber[c.block] if c.block is not None else None,
                "inputs": _canonical_inputs(c.inputs),
            }
            for c in flow.components
        ],
    }
    if flow.trigger is not None:
        data["trigger"] = {
            "annotation": flow.trigger.annotation,
            "type": _norm(flow.trigger.trigger_type),
            "inputs": _canonical_inputs(flow.trigger.inputs),
        }
    return Flow.model_validate(data)


def component_identities(flow: Flow) -> List[ComponentIdentity]:
    return [ComponentIdentity.of(c) for c in flow.components]


# =============================================================================
# SERIALIZATION
# =============================================================================

def flow_to_obj(flow: Flow) -> dict:
    return flow.model_dump(mode="json", by_alias=True, exclude_none=True)


def serialize_flow(flow: Flow, indent: int | None = 2) -> str:
    return json.dumps(flow_to_obj(flow), indent=indent, ensure_ascii=False)


def content_hash(flow: Flow) -> str:
    """
    Identifier of a flow's content: annotations blanked, canonical form,
    compact key-sorted JSON, SHA-256.
    """
    obj = flow_to_obj(canonicalize(flow))
    if "trigger" in obj:
        obj["trigger"]["annotation"] = ""
    for comp in obj["components"]:
        comp["annotation"] = ""
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
