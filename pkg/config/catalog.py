# config/catalog.py

"""
Default synthetic catalog.

Names that appear in the reference example flow (incident_task, look_up_records,
post_incident_details in sn_ms_teams_ah, create_a_user in sn_ms_ad_spoke,
update_record, weekly triggers on day_of_week/time) come first; everything
marked `# invented` is filler to give the generator variety.
"""

from models.synth import ActionSpec, Catalog, TriggerSpec

TABLES = (
    "incident",
    "incident_task",
    "problem",
    "change_request",
    "sc_req_item",
    "sc_task",
    "sys_user",       # invented
    "task_sla",       # invented
    "cmdb_ci",        # invented
    "kb_knowledge",   # invented
    "alm_asset",      # invented
    "hr_case",        # invented
)

CONDITIONS = (
    ("active", "false"),
    ("active", "true"),
    ("state", "closed"),
    ("state", "resolved"),
    ("state", "published"),
    ("priority", "1"),
    ("priority", "2"),
    ("approval", "approved"),
    ("impact", "1"),
    ("category", "hardware"),
    ("category", "software"),
)

_SCHEDULED = "scheduled"
_RECORD = "record"

TRIGGERS = (
    TriggerSpec(trigger_type="weekly", group=_SCHEDULED, subject="",
                inputs=(("day_of_week", "$day_of_week"), ("time", "1970-01-01 $time"))),
    TriggerSpec(trigger_type="daily", group=_SCHEDULED, subject="",
                inputs=(("time", "1970-01-01 $time"),)),
    TriggerSpec(trigger_type="monthly", group=_SCHEDULED, subject="",
                inputs=(("day_of_month", "$day_of_month"), ("time", "1970-01-01 $time"))),
    TriggerSpec(trigger_type="repeat", group=_SCHEDULED, subject="",
                inputs=(("repeat", "1970-01-01 $repeat_interval"),)),
    TriggerSpec(trigger_type="record_created", group=_RECORD, uses_table=True,
                inputs=(("table", "$table"), ("condition", "$field=$value"))),
    TriggerSpec(trigger_type="record_updated", group=_RECORD, uses_table=True,
                inputs=(("table", "$table"), ("condition", "$field=$value"))),
    TriggerSpec(trigger_type="record_created_or_updated", group=_RECORD, uses_table=True,
                inputs=(("table", "$table"), ("condition", "$field=$value"))),
    TriggerSpec(trigger_type="inbound_email", group="email_new", table="incident",
                inputs=(("email_type", "new"), ("condition", "subject contains $keyword"))),
    TriggerSpec(trigger_type="inbound_email", group="email_reply", uses_table=True,
                inputs=(("email_type", "reply"), ("target_table", "$table"))),
    TriggerSpec(trigger_type="service_catalog", group="service_catalog", table="sc_req_item",
                subject="Trigger.requested_item",
                inputs=(("catalog_item", "$catalog_item"),)),
    TriggerSpec(trigger_type="sla_task", group="sla", table="task_sla",
                inputs=(("sla_definition", "$sla_definition"), ("percentage", "$sla_percentage"))),
)

ACTIONS = (
    ActionSpec(definition="look_up_records", tags=("lookup",),
               inputs=(("table", "$table"),)),
    ActionSpec(definition="look_up_record", tags=("lookup_one",),
               inputs=(("table", "$table"), ("conditions", "$field=$value"))),
    ActionSpec(definition="create_record", tags=("crud", "create"),
               inputs=(("table", "$table"), ("values", "$field=$value"))),
    ActionSpec(definition="update_record", tags=("crud", "update"),
               inputs=(("record", "{{$subject}}"), ("table", "$table"), ("values", "$field=$value"))),
    ActionSpec(definition="delete_record", tags=("crud",),
               inputs=(("record", "{{$subject}}"),)),
    ActionSpec(definition="create_or_update_record", tags=("crud", "sync"),
               inputs=(("table", "$table"), ("values", "$field=$value"))),
    ActionSpec(definition="post_incident_details", scope="sn_ms_teams_ah",
               tables=("incident", "incident_task"), tags=("notify",)),
    ActionSpec(definition="send_email", tags=("notify",),  # invented
               inputs=(("to", "{{$subject.assigned_to.email}}"), ("subject", "$email_subject"))),
    ActionSpec(definition="send_notification", tags=("notify",),  # invented
               inputs=(("notification", "$notification"), ("record", "{{$subject}}"))),
    ActionSpec(definition="post_message", scope="sn_slack_ah", tags=("notify",),  # invented
               inputs=(("channel", "$channel"), ("message", "{{$subject.short_description}}"))),
    ActionSpec(definition="ask_for_approval", tags=("approval",),  # invented
               inputs=(("record", "{{$subject}}"), ("rules", "$approval_rule"))),
    ActionSpec(definition="create_task", tables=("sc_req_item", "sc_task", "incident", "change_request"),
               tags=("fulfil",),  # invented
               inputs=(("assignment_group", "$assignment_group"), ("parent", "{{$subject}}"), ("table", "sc_task"))),
    ActionSpec(definition="get_catalog_variables", tables=("sc_req_item",), tags=("catalog",),
               inputs=(("requested_item", "{{Trigger.requested_item}}"),)),
    ActionSpec(definition="create_a_user", scope="sn_ms_ad_spoke", tags=("provision",),
               inputs=(("user_name", "{{$subject.requested_for.user_name}}"),)),
    ActionSpec(definition="get_users", scope="sn_ms_ad_spoke", tags=("source",),  # invented
               inputs=(("group", "$ad_group"),)),
    ActionSpec(definition="get_issues", scope="sn_jira_spoke", tags=("source",),  # invented
               inputs=(("project", "$jira_project"),)),
    ActionSpec(definition="log", tags=("log",),  # invented
               inputs=(("message", "$log_message"),)),
    ActionSpec(definition="wait_for_condition", tags=("wait",),  # invented
               inputs=(("record", "{{$subject}}"), ("condition", "$field=$value"))),
    ActionSpec(definition="timer", tags=("wait",),
               inputs=(("duration", "1970-01-01 $repeat_interval"),)),
)

_HOURS = tuple(f"{h:02d}" for h in range(24))

VALUES = {
    "day_of_week": tuple(str(d) for d in range(1, 8)),
    "day_of_month": tuple(str(d) for d in range(1, 29)),
    "time": tuple(f"{h}:{m:02d}:00" for h in _HOURS for m in (0, 15, 30, 45)),
    "repeat_interval": tuple(f"{h}:00:00" for h in ("01", "02", "04", "06", "08", "12")),
    "keyword": ("outage", "password", "access", "laptop", "urgent", "vpn"),
    "catalog_item": (
        "new_laptop", "software_access", "vpn_access", "new_hire_onboarding", "mobile_phone",
        "monitor", "headset", "database_access", "shared_mailbox", "offboarding", "desk_move", "printer_access",
    ),
    "assignment_group": (
        "service_desk", "hardware", "network", "database", "identity", "facilities", "procurement", "field_services",
    ),
    "sla_definition": ("p1_resolution", "p2_resolution", "p1_response", "request_fulfilment"),
    "sla_percentage": ("50", "75", "100"),
    "email_subject": ("status update", "action required", "record closed", "reminder"),
    "notification": ("record_assigned", "record_closed", "sla_warning", "approval_pending"),
    "channel": ("#it-ops", "#service-desk", "#change-board"),
    "approval_rule": ("manager_approves", "group_approves", "any_approver"),
    "ad_group": ("all_staff", "contractors", "engineering"),
    "jira_project": ("OPS", "ITSM", "PLAT"),
    "log_message": ("flow failed", "step failed", "retry scheduled"),
}

DEFAULT_CATALOG = Catalog(
    tables=TABLES,
    triggers=TRIGGERS,
    actions=ACTIONS,
    conditions=CONDITIONS,
    values=VALUES,
)
