# routes/harness_routes.py

from flask import Blueprint, request, jsonify
from pydantic import ValidationError

from services.flow_service import flow_from_obj
from services.harness_service import Prediction, Sample, emit_report, score
from utils.errors import DatasetError, FlowParseError, UnknownSampleIdError

harness_bp = Blueprint("harness", __name__)


@harness_bp.route("/harness/score", methods=["POST"])
def score_batch():
    """
    Score a small batch in one call.
    JSON body:
        - samples: [{id, reference, source_type?, width?, height?, pattern?}]
        - predictions: [{sample_id, raw_output}]
        - format: "json" (default) or "markdown"
        - exclude_missing (optional)
    """
    try:
        payload = request.get_json(silent=True) or {}

        missing = [f for f in ("samples", "predictions") if not isinstance(payload.get(f), list)]
        if missing:
            return jsonify({"error": "Missing required fields", "missing_fields": missing}), 400

        samples = []
        for row in payload["samples"]:
            try:
                samples.append(Sample.model_validate({**row, "reference": flow_from_obj(row.get("reference"))}))
            except (FlowParseError, ValidationError, AttributeError, TypeError) as e:
                sample_id = row.get("id") if isinstance(row, dict) else None
                return jsonify({"error": "Invalid sample", "sample_id": sample_id, "details": str(e)}), 400

        predictions = [
            Prediction.from_raw(str(p.get("sample_id", "")), str(p.get("raw_output") or ""))
            for p in payload["predictions"]
        ]

        report = score(samples, predictions, exclude_missing=bool(payload.get("exclude_missing", False)))
        if payload.get("format", "json") in ("markdown", "md"):
            return jsonify({"markdown": emit_report(report, "markdown")}), 200
        return jsonify(report.model_dump(mode="json")), 200

    except (UnknownSampleIdError, DatasetError) as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        return jsonify({"error": "An unexpected error occurred during scoring.", "details": str(e)}), 500
