# routes/flows_routes.py

from flask import Blueprint, request, jsonify

from services.flow_service import canonicalize, content_hash, flow_from_obj, flow_to_obj, parse_flow
from services.tree_service import build_tree, tree_size
from utils.errors import FlowParseError

flows_bp = Blueprint("flows", __name__)


def _tree_obj(node) -> dict:
    return {"label": node.label, "weight": node.weight, "children": [_tree_obj(c) for c in node.children]}


def _read_flow(payload: dict):
    if isinstance(payload.get("text"), str):
        return parse_flow(payload["text"])
    return flow_from_obj(payload.get("flow"))


@flows_bp.route("/flows/parse", methods=["POST"])
def parse():
    """
    Validate a flow.
    JSON body: either "text" (the raw document) or "flow" (an object).
    """
    try:
        payload = request.get_json(silent=True) or {}
        if "text" not in payload and "flow" not in payload:
            return jsonify({"error": "Missing required fields", "missing_fields": ["text or flow"]}), 400

        flow = _read_flow(payload)
        return jsonify({"id": content_hash(flow), "flow": flow_to_obj(flow)}), 200

    except FlowParseError as e:
        return jsonify({"error": "Invalid flow", **e.to_dict()}), 400
    except Exception as e:
        return jsonify({"error": "An unexpected error occurred while parsing the flow.", "details": str(e)}), 500


@flows_bp.route("/flows/canonicalize", methods=["POST"])
def canonical():
    try:
        payload = request.get_json(silent=True) or {}
        if "flow" not in payload:
            return jsonify({"error": "Missing required fields", "missing_fields": ["flow"]}), 400

        flow = canonicalize(flow_from_obj(payload["flow"]))
        return jsonify({"flow": flow_to_obj(flow)}), 200

    except FlowParseError as e:
        return jsonify({"error": "Invalid flow", **e.to_dict()}), 400
    except Exception as e:
        return jsonify({"error": "An unexpected error occurred.", "details": str(e)}), 500


@flows_bp.route("/flows/tree", methods=["POST"])
def tree():
    try:
        payload = request.get_json(silent=True) or {}
        if "flow" not in payload:
            return jsonify({"error": "Missing required fields", "missing_fields": ["flow"]}), 400

        include_inputs = bool(payload.get("include_inputs", True))
        flow_tree = build_tree(flow_from_obj(payload["flow"]), include_inputs=include_inputs)
        return jsonify({
            "node_count": flow_tree.node_count,
            "size": tree_size(flow_tree),
            "tree": _tree_obj(flow_tree.root),
        }), 200

    except FlowParseError as e:
        return jsonify({"error": "Invalid flow", **e.to_dict()}), 400
    except Exception as e:
        return jsonify({"error": "An unexpected error occurred.", "details": str(e)}), 500
