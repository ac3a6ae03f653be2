# cli.py

import functools
import json
import logging
from pathlib import Path

import click

from config.catalog import DEFAULT_CATALOG
from config.constants import LOG_LEVEL, SPLIT_RATIOS
from config.patterns import PATTERN_REGISTRY, get_pattern
from models.synth import FlowRecord, SplitManifest
from services.annotation_service import annotate
from services.harness_service import emit_report, load_dataset, load_predictions, score
from services.model_client import ModelEndpointConfig, fetch_predictions
from services.render_service import rasterize, sample_style, to_dot
from services.synth_service import generate_records, load_records, record_to_line, split_dataset
from utils.errors import ConfigError
from utils.jsonl import write_jsonl
from utils.logger import configure_logging

logger = logging.getLogger(__name__)


def _fail_cleanly(fn):
    """I/O, config and data errors become a one-line message and exit code 1."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError) as e:
            raise click.ClickException(str(e)) from e
    return wrapper


def _parse_ratios(ctx, param, value):
    if value is None:
        return SPLIT_RATIOS
    try:
        ratios = tuple(float(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter("expected three comma-separated numbers")
    if len(ratios) != 3:
        raise click.BadParameter("expected three comma-separated numbers")
    return ratios


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def cli(verbose):
    """Workflow synthesis and evaluation tools."""
    configure_logging("DEBUG" if verbose else LOG_LEVEL)


# =============================================================================
# SYNTHETIC DATA
# =============================================================================

@cli.command()
@click.option("--pattern", default="mixed", show_default=True, help="Pattern name, or 'mixed' for the full distribution.")
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--annotate/--no-annotate", "with_annotations", default=True, show_default=True)
@_fail_cleanly
def generate(pattern, count, seed, out_path, with_annotations):
    """Generate COUNT distinct flows as JSONL."""
    try:
        registry = PATTERN_REGISTRY if pattern == "mixed" else [get_pattern(pattern)]
    except KeyError:
        raise click.BadParameter(f"unknown pattern {pattern!r}", param_hint="--pattern")

    records = generate_records(registry, DEFAULT_CATALOG, count, seed)
    if with_annotations:
        records = [r.model_copy(update={"flow": annotate(r.flow)}) for r in records]
    written = write_jsonl(out_path, (record_to_line(r) for r in records))
    click.echo(f"wrote {written} flows to {out_path}")


@cli.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--ratios", callback=_parse_ratios, default=None, help="train,valid,test (default 12376:1000:1000).")
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@_fail_cleanly
def split(in_path, ratios, seed, out_path):
    """Partition generated flows into train/valid/test by content hash."""
    records = load_records(in_path)
    manifest = split_dataset([r.flow for r in records], ratios, seed)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    Path(out_path).write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    click.echo(f"train={len(manifest.train)} valid={len(manifest.valid)} test={len(manifest.test)}")


@cli.command("annotate")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@_fail_cleanly
def annotate_cmd(in_path, out_path):
    """Fill empty annotations in a flow JSONL file."""
    records = load_records(in_path)
    rows = (
        record_to_line(FlowRecord(id=r.id, pattern=r.pattern, flow=annotate(r.flow)))
        for r in records
    )
    written = write_jsonl(out_path, rows)
    click.echo(f"annotated {written} flows")


@cli.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--raster", is_flag=True, help="Also write PNGs when the Graphviz binary is installed.")
@_fail_cleanly
def render(in_path, out_dir, seed, raster):
    """Write <flow-id>.dot (and .png) for every flow."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = load_records(in_path)
    pngs = 0
    for i, record in enumerate(records):
        dot_text = to_dot(record.flow, sample_style(seed + i))
        (out / f"{record.id}.dot").write_text(dot_text, encoding="utf-8")
        if raster and rasterize(dot_text, out / f"{record.id}.png") is not None:
            pngs += 1
    logger.info("rendered %d flows (%d rasterized)", len(records), pngs)
    click.echo(f"rendered {len(records)} flows to {out}")


# =============================================================================
# EVALUATION
# =============================================================================

@cli.command()
@click.option("--dataset", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--predictions", "predictions_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--endpoint", "endpoint_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "md"]), default="json", show_default=True)
@click.option("--exclude-missing", is_flag=True, help="Drop samples without a prediction (diagnostics only).")
@click.option("--split", "split_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--split-name", type=click.Choice(["train", "valid", "test"]), default="test", show_default=True)
@_fail_cleanly
def evaluate(dataset, predictions_path, endpoint_path, report_path, fmt, exclude_missing, split_path, split_name):
    """Score predictions against a reference dataset."""
    if (predictions_path is None) == (endpoint_path is None):
        raise click.UsageError("give exactly one of --predictions or --endpoint")

    manifest = None
    if split_path:
        try:
            manifest = SplitManifest.model_validate(json.loads(Path(split_path).read_text(encoding="utf-8")))
        except ValueError as e:
            raise ConfigError(f"invalid split manifest {split_path}: {e}") from e

    samples = load_dataset(dataset, split=manifest, split_name=split_name)
    if predictions_path:
        predictions = load_predictions(predictions_path)
    else:
        predictions = fetch_predictions(samples, ModelEndpointConfig.from_file(endpoint_path))

    if manifest is not None:
        kept = {s.id for s in samples}
        outside = [p for p in predictions if p.sample_id not in kept]
        if outside:
            logger.info("ignoring %d predictions outside split %r", len(outside), split_name)
            predictions = [p for p in predictions if p.sample_id in kept]

    report = score(samples, predictions, exclude_missing=exclude_missing)
    text = emit_report(report, "markdown" if fmt == "md" else "json")
    Path(report_path).parent.mkdir(parents=True, exist_ok=True)
    Path(report_path).write_text(text, encoding="utf-8")
    click.echo(f"scored {len(report.per_sample)} samples; report written to {report_path}")


if __name__ == "__main__":
    cli()
