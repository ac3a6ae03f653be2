# routes/metrics_routes.py

from flask import Blueprint, request, jsonify

from services.flow_service import extract_flow_from_model_output, flow_from_obj
from services.metrics_service import evaluate_pair
from utils.errors import FlowParseError

metrics_bp = Blueprint("metrics", __name__)


@metrics_bp.route("/metrics/evaluate", methods=["POST"])
def evaluate():
    """
    Score one candidate against a reference.
    JSON body:
        - candidate: flow object, or raw model output text
        - reference: flow object
        - strict_trigger, components_as_set (optional)
    """
    try:
        payload = request.get_json(silent=True) or {}

        missing = [f for f in ("candidate", "reference") if f not in payload]
        if missing:
            return jsonify({"error": "Missing required fields", "missing_fields": missing}), 400

        try:
            reference = flow_from_obj(payload["reference"])
        except FlowParseError as e:
            return jsonify({"error": "Invalid reference flow", **e.to_dict()}), 400

        raw = payload["candidate"]
        try:
            candidate = extract_flow_from_model_output(raw) if isinstance(raw, str) else flow_from_obj(raw)
            parse_error = None
        except FlowParseError as e:
            candidate, parse_error = e, e.to_dict()

        result = evaluate_pair(
            candidate,
            reference,
            strict_trigger=bool(payload.get("strict_trigger", False)),
            components_as_set=bool(payload.get("components_as_set", False)),
        )
        return jsonify({"metrics": result.model_dump(), "parse_error": parse_error}), 200

    except Exception as e:
        return jsonify({"error": "An unexpected error occurred during scoring.", "details": str(e)}), 500
