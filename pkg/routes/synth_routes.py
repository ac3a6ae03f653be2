# routes/synth_routes.py

from flask import Blueprint, request, jsonify

from config.catalog import DEFAULT_CATALOG
from config.patterns import PATTERN_REGISTRY, get_pattern
from services.annotation_service import annotate
from services.flow_service import flow_to_obj
from services.synth_service import generate_records

synth_bp = Blueprint("synth", __name__)

MAX_COUNT_PER_REQUEST = 1000


@synth_bp.route("/synth/generate", methods=["POST"])
def generate():
    """
    Generate synthetic flows.
    JSON body: seed (required), pattern (name or "mixed"), count, annotate.
    """
    try:
        payload = request.get_json(silent=True) or {}

        if payload.get("seed") is None:
            return jsonify({"error": "Missing required fields", "missing_fields": ["seed"]}), 400

        try:
            seed = int(payload["seed"])
            count = int(payload.get("count", 1))
        except (TypeError, ValueError):
            return jsonify({"error": "seed and count must be integers"}), 400
        if not 1 <= count <= MAX_COUNT_PER_REQUEST:
            return jsonify({"error": f"count must be between 1 and {MAX_COUNT_PER_REQUEST}"}), 400

        name = payload.get("pattern", "mixed")
        try:
            registry = PATTERN_REGISTRY if name == "mixed" else [get_pattern(name)]
        except KeyError:
            return jsonify({"error": f"Unknown pattern {name!r}"}), 400

        records = generate_records(registry, DEFAULT_CATALOG, count, seed)
        with_annotations = bool(payload.get("annotate", True))
        return jsonify({
            "count": len(records),
            "records": [
                {
                    "id": r.id,
                    "pattern": r.pattern,
                    "flow": flow_to_obj(annotate(r.flow) if with_annotations else r.flow),
                }
                for r in records
            ],
        }), 200

    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        return jsonify({"error": "An unexpected error occurred during generation.", "details": str(e)}), 500
