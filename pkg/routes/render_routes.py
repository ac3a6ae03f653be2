# routes/render_routes.py

from flask import Blueprint, request, jsonify
from pydantic import ValidationError

from services.flow_service import flow_from_obj
from services.render_service import RenderStyle, sample_style, to_dot
from utils.errors import FlowParseError

render_bp = Blueprint("render", __name__)


@render_bp.route("/render/dot", methods=["POST"])
def render_dot():
    """
    DOT source for a flow.
    Style comes from "style" when given, else is sampled from "seed" (default 0).
    """
    try:
        payload = request.get_json(silent=True) or {}
        if "flow" not in payload:
            return jsonify({"error": "Missing required fields", "missing_fields": ["flow"]}), 400

        flow = flow_from_obj(payload["flow"])
        if payload.get("style"):
            style = RenderStyle.model_validate(payload["style"])
        else:
            style = sample_style(int(payload.get("seed", 0)))

        return jsonify({"dot": to_dot(flow, style), "style": style.model_dump()}), 200

    except FlowParseError as e:
        return jsonify({"error": "Invalid flow", **e.to_dict()}), 400
    except (ValidationError, TypeError, ValueError) as e:
        return jsonify({"error": "Invalid style", "details": str(e)}), 400
    except Exception as e:
        return jsonify({"error": "An unexpected error occurred while rendering.", "details": str(e)}), 500
