# services/harness_service.py

import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config.constants import METRIC_COLUMNS
from models.flow import Flow
from models.synth import SplitManifest
from services.flow_service import extract_flow_from_model_output, flow_from_obj
from services.metrics_service import MetricResult, evaluate_pair
from services.render_service import classify_orientation, classify_resolution
from utils.errors import DatasetError, FlowParseError, UnknownSampleIdError
from utils.jsonl import read_jsonl

logger = logging.getLogger(__name__)

SourceType = Literal["synthetic", "manual", "digital", "whiteboard", "user_interface", "other"]


# =============================================================================
# TYPES
# =============================================================================

class Sample(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    reference: Flow
    image_path: Optional[str] = None
    source_type: SourceType = "synthetic"
    width: Optional[int] = Field(default=None, gt=0)
    height: Optional[int] = Field(default=None, gt=0)
    pattern: Optional[str] = None

    @model_validator(mode="after")
    def _dimensions_together(self) -> "Sample":
        if (self.width is None) != (self.height is None):
            raise ValueError("width and height must be given together")
        return self

    @property
    def has_dimensions(self) -> bool:
        return self.width is not None


class Prediction(BaseModel):
    model_config = ConfigDict(frozen=True)

    sample_id: str
    raw_output: str = ""
    flow: Optional[Flow] = None
    parse_error: Optional[str] = None

    @classmethod
    def from_raw(cls, sample_id: str, raw_output: str) -> "Prediction":
        try:
            flow = extract_flow_from_model_output(raw_output)
        except FlowParseError as e:
            return cls(sample_id=sample_id, raw_output=raw_output, parse_error=str(e))
        return cls(sample_id=sample_id, raw_output=raw_output, flow=flow)

    @classmethod
    def failed(cls, sample_id: str, reason: str) -> "Prediction":
        return cls(sample_id=sample_id, raw_output="", parse_error=reason)


class SampleScore(BaseModel):
    sample_id: str
    metrics: MetricResult
    missing: bool = False


class GroupStats(BaseModel):
    count: int
    means: MetricResult


class EvalReport(BaseModel):
    per_sample: List[SampleScore] = Field(default_factory=list)
    overall: Optional[GroupStats] = None
    # axis -> group name -> stats; axes are source_type, orientation, resolution, pattern
    groups: Dict[str, Dict[str, GroupStats]] = Field(default_factory=dict)


# =============================================================================
# LOADING
# =============================================================================

def _sample_from_row(row: dict) -> dict:
    """Dataset rows are either sample rows or generated flow lines (flow fields plus id)."""
    if "reference" in row:
        return dict(row)
    if "components" in row or "type" in row:
        return {"id": row.get("id"), "pattern": row.get("pattern"), "reference": row}
    raise ValueError("row has neither a reference nor flow fields")


def load_dataset(path: str | Path, split: Optional[SplitManifest] = None, split_name: str = "test") -> List[Sample]:
    """
    Read a JSONL dataset. Duplicate ids and invalid references are rejected
    with the offending line. With `split`, only ids in `split_name` are kept.
    """
    samples: List[Sample] = []
    seen: Dict[str, int] = {}
    try:
        for line_no, row in read_jsonl(path):
            sample_id = row.get("id")
            try:
                data = _sample_from_row(row)
                data["reference"] = flow_from_obj(data["reference"])
                sample = Sample.model_validate(data)
            except FlowParseError as e:
                raise DatasetError(f"invalid reference flow: {e}", line=line_no, sample_id=sample_id) from None
            except (ValidationError, ValueError) as e:
                raise DatasetError(f"invalid sample: {e}", line=line_no, sample_id=sample_id) from None
            if sample.id in seen:
                raise DatasetError(
                    f"duplicate id (first seen on line {seen[sample.id]})",
                    line=line_no,
                    sample_id=sample.id,
                )
            seen[sample.id] = line_no
            samples.append(sample)
    except OSError as e:
        raise DatasetError(f"cannot read dataset {path}: {e.strerror or e}") from e

    if split is not None:
        keep = set(getattr(split, split_name))
        samples = [s for s in samples if s.id in keep]
        logger.info("kept %d samples from split %r", len(samples), split_name)
    logger.info("loaded %d samples from %s", len(samples), path)
    return samples


def load_predictions(path: str | Path) -> List[Prediction]:
    """Read `{sample_id, raw_output}` lines; each output is parsed on load."""
    out = []
    try:
        for line_no, row in read_jsonl(path):
            sample_id = row.get("sample_id")
            if not isinstance(sample_id, str) or not sample_id:
                raise DatasetError("missing sample_id", line=line_no)
            raw = row.get("raw_output")
            out.append(Prediction.from_raw(sample_id, raw if isinstance(raw, str) else ""))
    except OSError as e:
        raise DatasetError(f"cannot read predictions {path}: {e.strerror or e}") from e
    return out


# =============================================================================
# SCORING
# =============================================================================

def _mean(results: List[MetricResult]) -> MetricResult:
    n = len(results)
    return MetricResult(**{
        name: sum(getattr(r, name) for r in results) / n
        for name, _ in METRIC_COLUMNS
    })


def _stats(results: List[MetricResult]) -> GroupStats:
    return GroupStats(count=len(results), means=_mean(results))


def _group_keys(sample: Sample) -> Dict[str, str]:
    keys = {"source_type": sample.source_type}
    if sample.has_dimensions:
        keys["orientation"] = classify_orientation(sample.width, sample.height)
        keys["resolution"] = classify_resolution(sample.width, sample.height)
    if sample.pattern:
        keys["pattern"] = sample.pattern
    return keys


def score(
    samples: Iterable[Sample],
    predictions: Iterable[Prediction],
    exclude_missing: bool = False,
) -> EvalReport:
    """
    Score predictions against their samples. A sample with no prediction scores
    zero unless `exclude_missing` drops it from the report.
    """
    samples = sorted(samples, key=lambda s: s.id)
    by_id = {s.id: s for s in samples}

    preds: Dict[str, Prediction] = {}
    for p in predictions:
        if p.sample_id not in by_id:
            raise UnknownSampleIdError(f"prediction for unknown sample {p.sample_id!r}")
        if p.sample_id in preds:
            raise DatasetError("duplicate prediction", sample_id=p.sample_id)
        preds[p.sample_id] = p

    rows: List[SampleScore] = []
    grouped: Dict[str, Dict[str, List[MetricResult]]] = defaultdict(lambda: defaultdict(list))
    for sample in samples:
        pred = preds.get(sample.id)
        if pred is None and exclude_missing:
            continue
        candidate = pred.flow if pred is not None else None
        result = evaluate_pair(candidate, sample.reference)
        rows.append(SampleScore(sample_id=sample.id, metrics=result, missing=pred is None))
        for axis, key in _group_keys(sample).items():
            grouped[axis][key].append(result)
        logger.debug("scored %s: %s", sample.id, result.to_row())

    report = EvalReport(
        per_sample=rows,
        overall=_stats([r.metrics for r in rows]) if rows else None,
        groups={
            axis: {key: _stats(values) for key, values in sorted(by_key.items())}
            for axis, by_key in sorted(grouped.items())
        },
    )
    logger.info(
        "scored %d samples (%d missing predictions)",
        len(rows), sum(1 for r in rows if r.missing),
    )
    return report


# =============================================================================
# REPORTS
# =============================================================================

def _markdown(report: EvalReport) -> str:
    header = ["Group", "N"] + [heading for _, heading in METRIC_COLUMNS]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
    ]

    def row(label: str, stats: GroupStats) -> str:
        cells = [label, str(stats.count)] + [f"{v:.3f}" for v in stats.means.to_row()]
        return "| " + " | ".join(cells) + " |"

    if report.overall is not None:
        lines.append(row("overall", report.overall))
    for axis, by_key in report.groups.items():
        for key, stats in by_key.items():
            lines.append(row(f"{axis}={key}", stats))
    return "\n".join(lines) + "\n"


def emit_report(report: EvalReport, fmt: str = "json") -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2)
    if fmt in ("markdown", "md", "markdown_table"):
        return _markdown(report)
    raise ValueError(f"unknown report format {fmt!r}")
