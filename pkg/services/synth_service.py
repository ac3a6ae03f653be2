# services/synth_service.py

import logging
import math
import zlib
from pathlib import Path
from string import Template
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.constants import MAX_DISTINCT_RETRIES
from models.flow import Flow, FlowKind
from models.synth import (
    ActionSpec,
    Catalog,
    FlowRecord,
    GenStep,
    GenStepKind,
    PatternSpec,
    SplitManifest,
)
from services.flow_service import content_hash, flow_from_obj, flow_to_obj
from utils.errors import DatasetError, ExhaustedRetriesError, FlowParseError
from utils.jsonl import read_jsonl

logger = logging.getLogger(__name__)

_UINT64 = 2 ** 64
_DATASET_KEY = 0x5EED
_SPLIT_KEY = 0x5917
_LOOKUP_TAGS = {"lookup", "lookup_one", "source"}


# =============================================================================
# RANDOM STREAMS
# =============================================================================

def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def _stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key...). Adding keys never perturbs other streams."""
    return np.random.default_rng(np.random.SeedSequence(seed % _UINT64, spawn_key=key))


def _choice(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


def _identifiers(template: Template) -> List[str]:
    names = []
    for m in template.pattern.finditer(template.template):
        name = m.group("named") or m.group("braced")
        if name and name not in names:
            names.append(name)
    return names


# =============================================================================
# FLOW BUILDER
# =============================================================================

class _FlowBuilder:
    """Mutable scratch state while one pattern is being played."""

    def __init__(self, pattern: PatternSpec, catalog: Catalog):
        self.pattern = pattern
        self.catalog = catalog
        self.trigger: Optional[dict] = None
        self.trigger_subject = ""
        self.components: List[dict] = []
        self.cursor: Optional[int] = None   # order of the innermost open flow logic
        self.table: Optional[str] = None
        self.last_lookup: Optional[dict] = None

    # ---------- context ----------

    def _by_order(self, order: int) -> dict:
        return self.components[order - 1]

    def _enclosing(self):
        order = self.cursor
        while order is not None:
            comp = self._by_order(order)
            yield comp
            order = comp.get("block")

    def _subject(self) -> str:
        for comp in self._enclosing():
            if comp["definition"] == "FOREACH":
                return f"{comp['order']}.item"
        if self.last_lookup is not None and self.last_lookup["definition"] == "look_up_record":
            return f"{self.last_lookup['order']}.Record"
        if self.trigger_subject:
            return self.trigger_subject
        if self.last_lookup is not None:
            return f"{self.last_lookup['order']}.Records"
        return "subflow.record" if self.pattern.kind is FlowKind.SUBFLOW else "Trigger.current"

    def _render_inputs(self, templates: Tuple[Tuple[str, str], ...], rng: np.random.Generator) -> List[dict]:
        ctx: Dict[str, str] = {}
        out = []
        for name, raw in templates:
            template = Template(raw)
            for ident in _identifiers(template):
                if ident in ctx:
                    continue
                if ident == "table":
                    ctx[ident] = self._table(rng)
                elif ident in ("field", "value"):
                    ctx["field"], ctx["value"] = _choice(rng, self.catalog.conditions)
                elif ident == "subject":
                    ctx[ident] = self._subject()
                elif ident == "lookup":
                    ctx[ident] = str(self.last_lookup["order"]) if self.last_lookup else "1"
                elif ident in self.catalog.values:
                    ctx[ident] = _choice(rng, self.catalog.values[ident])
                else:
                    raise KeyError(f"no value pool for template variable ${ident}")
            out.append({"name": name, "value": template.substitute(ctx)})
        return out

    def _table(self, rng: np.random.Generator) -> str:
        if self.table is None:
            self.table = _choice(rng, self.catalog.tables)
        return self.table

    # ---------- mutations ----------

    def set_trigger(self, groups: Tuple[str, ...], rng: np.random.Generator) -> None:
        candidates = self.catalog.triggers_in(groups)
        if not candidates:
            raise ValueError(f"catalog has no trigger in groups {groups}")
        spec = _choice(rng, candidates)
        if spec.table is not None:
            self.table = spec.table
        elif spec.uses_table:
            self.table = _choice(rng, self.catalog.tables)
        self.trigger_subject = spec.subject
        self.trigger = {
            "annotation": "",
            "type": spec.trigger_type,
            "inputs": self._render_inputs(spec.inputs, rng),
        }

    def _place(self, attach: str, sibling_of: Optional[str]) -> Optional[int]:
        if attach == "top":
            return None
        if attach == "sibling":
            for comp in reversed(self.components):
                if comp["definition"] == sibling_of:
                    return comp.get("block")
            raise ValueError(f"no {sibling_of} to attach a sibling to")
        return self.cursor

    def _append(self, category: str, definition: str, scope: str, block: Optional[int], inputs: List[dict]) -> dict:
        comp = {
            "annotation": "",
            "category": category,
            "definition": definition,
            "scope": scope,
            "order": len(self.components) + 1,
            "inputs": inputs,
        }
        if block is not None:
            comp["block"] = block
        self.components.append(comp)
        return comp

    def add_action(self, spec: ActionSpec, attach: str, rng: np.random.Generator) -> None:
        block = self._place(attach, None)
        inputs = self._render_inputs(spec.inputs, rng)
        comp = self._append("action", spec.definition, spec.scope, block, inputs)
        if _LOOKUP_TAGS.intersection(spec.tags):
            self.last_lookup = comp

    def add_flowlogic(self, step: GenStep, rng: np.random.Generator) -> None:
        block = self._place(step.attach, step.sibling_of)
        inputs = self._render_inputs(step.inputs, rng)
        comp = self._append("flowlogic", step.definition, "global", block, inputs)
        self.cursor = comp["order"]

    def has(self, definition: str) -> bool:
        return any(c["definition"] == definition for c in self.components)

    def related_actions(self, tags: Tuple[str, ...]) -> List[ActionSpec]:
        wanted = set(tags)
        table = self.table
        return [
            a for a in self.catalog.actions
            if (not wanted or wanted.intersection(a.tags)) and (table is None or a.relates_to(table))
        ]

    def to_flow(self) -> Flow:
        data = {"type": self.pattern.kind.value, "scope": "global", "components": self.components}
        if self.pattern.kind is FlowKind.FLOW:
            data["trigger"] = self.trigger
        return Flow.model_validate(data)


def _run_steps(
    builder: _FlowBuilder,
    steps: Tuple[GenStep, ...],
    seed: int,
    path: Tuple[int, ...],
) -> None:
    pattern_key = _name_key(builder.pattern.name)
    for i, step in enumerate(steps):
        step_path = path + (i,)
        rng = _stream(seed, pattern_key, *step_path)

        if step.kind is GenStepKind.PICK_TRIGGER:
            builder.set_trigger(step.pool, rng)

        elif step.kind is GenStepKind.ADD_ACTION:
            if step.definition:
                spec = builder.catalog.action(step.definition)
            else:
                candidates = builder.related_actions(step.pool)
                if not candidates:
                    raise ValueError(f"catalog has no action tagged {step.pool}")
                spec = _choice(rng, candidates)
            builder.add_action(spec, step.attach, rng)

        elif step.kind is GenStepKind.ADD_FLOWLOGIC:
            builder.add_flowlogic(step, rng)

        elif step.kind is GenStepKind.MAYBE:
            roll = rng.random()
            if step.requires and not builder.has(step.requires):
                continue
            if roll < step.prob:
                _run_steps(builder, step.substeps, seed, step_path)

        elif step.kind is GenStepKind.PICK_RELATED_ACTION:
            candidates = builder.related_actions(step.pool)
            if not candidates:
                raise ValueError(f"catalog has no action related to {builder.table!r} in {step.pool}")
            lo, hi = step.repeat
            for _ in range(int(rng.integers(lo, hi + 1))):
                builder.add_action(_choice(rng, candidates), "current", rng)


# =============================================================================
# PUBLIC API
# =============================================================================

def generate_flow(pattern: PatternSpec, catalog: Catalog, seed: int) -> Flow:
    """Play `pattern` against `catalog`. Deterministic per (pattern, catalog, seed)."""
    builder = _FlowBuilder(pattern, catalog)
    _run_steps(builder, pattern.steps, seed, ())
    if pattern.kind is FlowKind.FLOW and builder.trigger is None:
        raise ValueError(f"pattern {pattern.name!r} never picks a trigger")
    return builder.to_flow()


def generate_records(
    registry: List[PatternSpec],
    catalog: Catalog,
    count: int,
    seed: int,
    max_retries: int = MAX_DISTINCT_RETRIES,
) -> List[FlowRecord]:
    """
    Sample `count` distinct flows, patterns drawn proportionally to their weights.
    A flow whose content hash was already produced is redrawn with a fresh seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not registry:
        raise ValueError("registry must not be empty")

    rng = _stream(seed, _DATASET_KEY)
    weights = np.array([p.weight for p in registry], dtype=float)
    picks = rng.choice(len(registry), size=count, p=weights / weights.sum())
    flow_seeds = rng.integers(0, 2 ** 63, size=count)

    seen = set()
    records: List[FlowRecord] = []
    resampled = 0
    for idx, flow_seed in zip(picks, flow_seeds):
        pattern = registry[int(idx)]
        flow_seed = int(flow_seed)
        for attempt in range(max_retries + 1):
            flow = generate_flow(pattern, catalog, flow_seed)
            fid = content_hash(flow)
            if fid not in seen:
                break
            resampled += 1
            flow_seed = int(rng.integers(0, 2 ** 63))
        else:
            raise ExhaustedRetriesError(
                f"could not draw a new distinct {pattern.name!r} flow after {max_retries} retries"
            )
        seen.add(fid)
        records.append(FlowRecord(id=fid, pattern=pattern.name, flow=flow))

    if resampled:
        logger.info("generated %d flows (%d duplicate draws resampled)", count, resampled)
    else:
        logger.info("generated %d flows", count)
    return records


def generate_dataset(registry: List[PatternSpec], catalog: Catalog, count: int, seed: int) -> List[Flow]:
    return [r.flow for r in generate_records(registry, catalog, count, seed)]


def split_dataset(flows: List[Flow], ratios: Tuple[float, float, float], seed: int) -> SplitManifest:
    """
    Partition flows by content hash. Every variant of one flow lands in the same
    split; sizes are within one of count * ratio.
    """
    if len(ratios) != 3 or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ValueError(f"ratios must be three numbers summing to 1, got {ratios}")

    ids = list(dict.fromkeys(content_hash(f) for f in flows))
    order = _stream(seed, _SPLIT_KEY).permutation(len(ids))
    shuffled = [ids[int(i)] for i in order]

    n = len(shuffled)
    n_train = round(n * ratios[0])
    n_valid = min(round(n * ratios[1]), n - n_train)
    train = shuffled[:n_train]
    valid = shuffled[n_train:n_train + n_valid]
    test = shuffled[n_train + n_valid:]

    logger.info("split %d flows into %d/%d/%d", n, len(train), len(valid), len(test))
    return SplitManifest(train=train, valid=valid, test=test, ratios=tuple(ratios), seed=seed)


def assign_split(manifest: SplitManifest, flow: Flow) -> Optional[str]:
    """Split name holding `flow` (or any rendering of it), None if absent."""
    return manifest.split_of(content_hash(flow))


# =============================================================================
# JSONL LAYOUT
# =============================================================================

def record_to_line(record: FlowRecord) -> dict:
    """Flat JSONL row: the serialized flow plus `id` and `pattern`."""
    row = flow_to_obj(record.flow)
    row["id"] = record.id
    if record.pattern is not None:
        row["pattern"] = record.pattern
    return row


def load_records(path: str | Path) -> List[FlowRecord]:
    records = []
    try:
        for line_no, row in read_jsonl(path):
            try:
                flow = flow_from_obj(row)
            except FlowParseError as e:
                raise DatasetError(f"invalid flow: {e}", line=line_no, sample_id=row.get("id")) from None
            records.append(FlowRecord(id=row.get("id") or content_hash(flow), pattern=row.get("pattern"), flow=flow))
    except OSError as e:
        raise DatasetError(f"cannot read flows {path}: {e.strerror or e}") from e
    return records
