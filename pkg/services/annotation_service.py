# services/annotation_service.py

"""
Template annotations for generated flows.

Only empty annotations are filled, so annotate() is idempotent and never
overwrites text that came with the flow.
"""

import re
from typing import Dict, Optional

from models.flow import Component, Flow, Trigger

WEEKDAYS = {
    "1": "mondays", "2": "tuesdays", "3": "wednesdays", "4": "thursdays",
    "5": "fridays", "6": "saturdays", "7": "sundays",
}

_TIME_RE = re.compile(r"(\d{1,2}):(\d{2})(?::\d{2})?\s*$")
_PILL_FIELD_RE = re.compile(r"\{\{[^}]*?\.([A-Za-z_][\w]*)\}\}\s*=\s*(.*)$")
_PLAIN_COND_RE = re.compile(r"^\s*([\w.]+)\s*=\s*(.*)$")


# =============================================================================
# HELPERS
# =============================================================================

def _inputs(bindings) -> Dict[str, str]:
    return {b.name.strip().lower(): b.value for b in bindings}


def _clock(value: str) -> Optional[str]:
    """'1970-01-01 16:45:00' -> '4:45 pm'."""
    m = _TIME_RE.search(value or "")
    if not m:
        return None
    hour, minute = int(m.group(1)), m.group(2)
    suffix = "am" if hour < 12 else "pm"
    hour12 = hour % 12 or 12
    return f"{hour12}:{minute} {suffix}"


def _condition(value: str) -> Optional[str]:
    m = _PILL_FIELD_RE.search(value or "") or _PLAIN_COND_RE.match(value or "")
    if not m:
        return None
    return f"{m.group(1).replace('_', ' ')} is {m.group(2).strip()}"


def _words(definition: str) -> str:
    return definition.strip().replace("_", " ").lower()


# =============================================================================
# TEMPLATES
# =============================================================================

def trigger_annotation(trigger: Trigger) -> str:
    kind = trigger.trigger_type.strip().lower()
    args = _inputs(trigger.inputs)
    at = _clock(args.get("time", ""))

    if kind == "weekly":
        day = WEEKDAYS.get(args.get("day_of_week", "").strip(), "every week")
        return f"on {day} at {at}" if at else f"on {day}"
    if kind == "daily":
        return f"every day at {at}" if at else "every day"
    if kind == "monthly":
        day = args.get("day_of_month", "").strip()
        text = f"on day {day} of every month" if day else "every month"
        return f"{text} at {at}" if at else text
    if kind == "repeat":
        m = _TIME_RE.search(args.get("repeat", ""))
        if not m:
            return "on a repeating schedule"
        hours = int(m.group(1))
        return "every hour" if hours == 1 else f"every {hours} hours"
    if kind.startswith("record_"):
        table = args.get("table", "record")
        verb = kind[len("record_"):].replace("_", " ")
        return f"when a {table} record is {verb}"
    if kind == "inbound_email":
        if args.get("email_type") == "reply":
            return f"when a reply to a {args.get('target_table', 'record')} email arrives"
        return "when a new email arrives"
    if kind == "service_catalog":
        item = args.get("catalog_item", "catalog item").replace("_", " ")
        return f"when a {item} is requested"
    if kind == "sla_task":
        return f"when an sla reaches {args.get('percentage', '?')} percent"
    return f"on {_words(kind)}"


def component_annotation(comp: Component, table: Optional[str] = None) -> str:
    args = _inputs(comp.inputs)
    table = args.get("table") or table

    if comp.is_flowlogic:
        logic = comp.logic
        if logic in ("IF", "ELSEIF", "DOUNTIL"):
            cond = _condition(args.get("condition", ""))
            head = {"IF": "if", "ELSEIF": "else if", "DOUNTIL": "repeat until"}[logic]
            return f"{head} {cond}" if cond else head
        if logic == "ELSE":
            return "otherwise"
        if logic == "FOREACH":
            return f"for each {table} record" if table else "for each item"
        if logic == "PARALLEL":
            return "in parallel"
        if logic == "TRY":
            return "try"
        if logic == "CATCH":
            return "on error"
        return _words(logic)

    definition = comp.definition.strip().lower()
    if definition == "look_up_records":
        return f"look up {table} records"
    if definition == "look_up_record":
        return f"look up a {table} record"
    if definition in ("create_record", "update_record", "delete_record", "create_or_update_record"):
        verb = _words(definition).rsplit(" ", 1)[0]
        return f"{verb} {table} record" if table else f"{verb} record"
    text = _words(definition)
    return f"{text} for {table}" if table else text


def annotate(flow: Flow) -> Flow:
    """Copy of `flow` with every empty annotation filled in."""
    data = flow.model_dump(by_alias=True)
    table = None

    if flow.trigger is not None:
        table = _inputs(flow.trigger.inputs).get("table") or _inputs(flow.trigger.inputs).get("target_table")
        if not flow.trigger.annotation.strip():
            data["trigger"]["annotation"] = trigger_annotation(flow.trigger)

    for comp, row in zip(flow.components, data["components"]):
        own_table = _inputs(comp.inputs).get("table")
        if not comp.annotation.strip():
            row["annotation"] = component_annotation(comp, table)
        if own_table and comp.definition.strip().lower().startswith("look_up"):
            table = own_table

    return Flow.model_validate(data)
