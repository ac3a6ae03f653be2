# config/patterns.py

"""
Declarative pattern registry.

Only scheduled_loop has a fixed recipe; every other template is an
interpretation of its pattern name and is kept deliberately small.
Weights are the pattern counts of the synthetic dataset.
"""

from typing import Dict, List

from config.constants import P_ELSE, P_IF, PATTERN_COUNTS
from models.flow import FlowKind
from models.synth import (
    PatternSpec,
    add_action,
    add_flowlogic,
    maybe,
    pick_related_action,
    pick_trigger,
)

IF_INPUTS = (("condition", "{{$subject.$field}}=$value"),)
FOREACH_INPUTS = (("items", "{{$lookup.Records}}"),)


def _specs(p_if: float, p_else: float) -> Dict[str, dict]:
    return {
        # Scheduled trigger, look up records, loop over them, optionally branch.
        "scheduled_loop": dict(steps=(
            pick_trigger("scheduled"),
            add_action("look_up_records"),
            add_flowlogic("FOREACH", FOREACH_INPUTS),
            maybe(p_if, add_flowlogic("IF", IF_INPUTS)),
            pick_related_action("crud", "notify"),
            maybe(
                p_else,
                add_flowlogic("ELSE", attach="sibling", sibling_of="IF"),
                pick_related_action("crud", "notify"),
                requires="IF",
            ),
        )),
        "scheduled_single": dict(steps=(
            pick_trigger("scheduled"),
            add_action("look_up_record"),
            pick_related_action("crud", "notify"),
        )),
        "crud_loop": dict(steps=(
            pick_trigger("record"),
            add_action("look_up_records"),
            add_flowlogic("FOREACH", FOREACH_INPUTS),
            pick_related_action("crud"),
        )),
        "crud_single": dict(steps=(
            pick_trigger("record"),
            pick_related_action("crud"),
        )),
        "service_catalog_request_manual": dict(steps=(
            pick_trigger("service_catalog"),
            add_action("get_catalog_variables"),
            add_action("ask_for_approval"),
            add_flowlogic("IF", (("condition", "{{$subject.approval}}=approved"),)),
            add_action("create_task"),
            maybe(
                p_else,
                add_flowlogic("ELSE", attach="sibling", sibling_of="IF"),
                pick_related_action("notify"),
            ),
        )),
        "service_catalog_request_automated": dict(steps=(
            pick_trigger("service_catalog"),
            add_action("get_catalog_variables"),
            add_action("create_a_user"),
            add_action("update_record"),
            maybe(p_if, add_action("send_notification")),
        )),
        "outbound_notification": dict(steps=(
            pick_trigger("record"),
            maybe(p_if, add_flowlogic("IF", IF_INPUTS)),
            pick_related_action("notify"),
        )),
        # Upsert subflow called by an integration.
        "integration_inbound": dict(kind=FlowKind.SUBFLOW, steps=(
            add_action("look_up_record"),
            add_flowlogic("IF", IF_INPUTS),
            add_action("update_record"),
            add_flowlogic("ELSE", attach="sibling", sibling_of="IF"),
            add_action("create_record"),
        )),
        "integration_batch_sync": dict(steps=(
            pick_trigger("scheduled"),
            add_action(None, "source"),
            add_flowlogic("FOREACH", (("items", "{{$lookup.Records}}"),)),
            add_action("create_or_update_record"),
        )),
        "single_component": dict(steps=(
            pick_trigger(),
            add_action(None, "crud", "notify", "approval", "provision"),
        )),
        "sla": dict(steps=(
            pick_trigger("sla"),
            maybe(p_if, add_flowlogic("IF", IF_INPUTS)),
            pick_related_action("notify"),
            maybe(p_if, pick_related_action("update")),
        )),
        "parallel": dict(steps=(
            pick_trigger("record", "scheduled"),
            add_flowlogic("PARALLEL"),
            pick_related_action("crud", "notify", repeat=(2, 3)),
        )),
        "trigger_only": dict(steps=(
            pick_trigger(),
        )),
        "misc": dict(steps=(
            pick_trigger(),
            add_flowlogic("TRY"),
            pick_related_action("crud", "notify", repeat=(1, 2)),
            add_flowlogic("CATCH", attach="sibling", sibling_of="TRY"),
            add_action("log"),
        )),
        # Wait on a record until it reaches a state, then act on it.
        "pad": dict(steps=(
            pick_trigger("record"),
            add_flowlogic("DOUNTIL", (("condition", "{{$subject.$field}}=$value"),)),
            add_action(None, "wait"),
            pick_related_action("update"),
        )),
        "inbound_email_new": dict(steps=(
            pick_trigger("email_new"),
            add_action("create_record"),
            maybe(p_if, add_action("send_email")),
        )),
        "inbound_email_reply": dict(steps=(
            pick_trigger("email_reply"),
            add_action("update_record"),
        )),
    }


def build_registry(p_if: float = P_IF, p_else: float = P_ELSE) -> List[PatternSpec]:
    """All dataset patterns, weighted by their dataset counts."""
    specs = _specs(p_if, p_else)
    return [
        PatternSpec(name=name, weight=count, **specs[name])
        for name, count in PATTERN_COUNTS.items()
    ]


PATTERN_REGISTRY = build_registry()


def get_pattern(name: str, registry: List[PatternSpec] = PATTERN_REGISTRY) -> PatternSpec:
    for pattern in registry:
        if pattern.name == name:
            return pattern
    raise KeyError(f"unknown pattern {name!r}")
