# models/synth.py

from __future__ import annotations

import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.constants import SPLIT_NAMES
from models.flow import Flow, FlowKind


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


# =============================================================================
# CATALOG
# =============================================================================

class TriggerSpec(_Frozen):
    trigger_type: str
    group: str
    inputs: Tuple[Tuple[str, str], ...] = ()
    # Fixed table for triggers bound to one table; None = drawn from the catalog.
    table: Optional[str] = None
    uses_table: bool = False
    # Data-pill prefix for "the current record" when no loop encloses a step.
    subject: str = "Trigger.current"


class ActionSpec(_Frozen):
    definition: str
    scope: str = "global"
    tables: Tuple[str, ...] = ()
    tags: Tuple[str, ...] = ()
    inputs: Tuple[Tuple[str, str], ...] = ()

    def relates_to(self, table: Optional[str]) -> bool:
        return not self.tables or table in self.tables


class Catalog(_Frozen):
    tables: Tuple[str, ...]
    triggers: Tuple[TriggerSpec, ...]
    actions: Tuple[ActionSpec, ...]
    # (field, value) pairs used by conditions and record values.
    conditions: Tuple[Tuple[str, str], ...]
    # Free template variables ($name) and the values they are drawn from.
    values: Dict[str, Tuple[str, ...]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> "Catalog":
        if not self.tables or not self.triggers or not self.actions or not self.conditions:
            raise ValueError("catalog pools must not be empty")
        for name, pool in self.values.items():
            if not pool:
                raise ValueError(f"value pool {name!r} is empty")
        return self

    def action(self, definition: str) -> ActionSpec:
        for a in self.actions:
            if a.definition == definition:
                return a
        raise KeyError(f"action {definition!r} is not in the catalog")

    def triggers_in(self, groups: Tuple[str, ...]) -> List[TriggerSpec]:
        return [t for t in self.triggers if not groups or t.group in groups]


# =============================================================================
# PATTERNS
# =============================================================================

class GenStepKind(str, Enum):
    PICK_TRIGGER = "pick_trigger"
    ADD_ACTION = "add_action"
    ADD_FLOWLOGIC = "add_flowlogic"
    MAYBE = "maybe"
    PICK_RELATED_ACTION = "pick_related_action"


class GenStep(_Frozen):
    kind: GenStepKind
    # add_action / add_flowlogic: fixed definition.
    definition: Optional[str] = None
    # pick_trigger: trigger groups; add_action / pick_related_action: action tags.
    pool: Tuple[str, ...] = ()
    # maybe: probability and guarded substeps.
    prob: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    requires: Optional[str] = None
    substeps: Tuple["GenStep", ...] = ()
    # Where a new component is nested.
    attach: Literal["current", "top", "sibling"] = "current"
    sibling_of: Optional[str] = None
    # Flow-logic input templates.
    inputs: Tuple[Tuple[str, str], ...] = ()
    repeat: Tuple[int, int] = (1, 1)

    @model_validator(mode="after")
    def _check(self) -> "GenStep":
        if self.kind is GenStepKind.MAYBE and (self.prob is None or not self.substeps):
            raise ValueError("maybe steps need a probability and substeps")
        if self.kind is GenStepKind.ADD_FLOWLOGIC and not self.definition:
            raise ValueError("add_flowlogic needs a definition")
        if self.attach == "sibling" and not self.sibling_of:
            raise ValueError("sibling attachment needs sibling_of")
        lo, hi = self.repeat
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid repeat range {self.repeat}")
        return self


# Shorthands for declaring patterns.
def pick_trigger(*groups: str) -> GenStep:
    return GenStep(kind=GenStepKind.PICK_TRIGGER, pool=groups)


def add_action(definition: Optional[str] = None, *tags: str, attach: str = "current") -> GenStep:
    return GenStep(kind=GenStepKind.ADD_ACTION, definition=definition, pool=tags, attach=attach)


def add_flowlogic(definition: str, inputs=(), attach: str = "current", sibling_of: Optional[str] = None) -> GenStep:
    return GenStep(
        kind=GenStepKind.ADD_FLOWLOGIC,
        definition=definition,
        inputs=tuple(inputs),
        attach=attach,
        sibling_of=sibling_of,
    )


def maybe(prob: float, *substeps: GenStep, requires: Optional[str] = None) -> GenStep:
    return GenStep(kind=GenStepKind.MAYBE, prob=prob, substeps=substeps, requires=requires)


def pick_related_action(*tags: str, repeat: Tuple[int, int] = (1, 1)) -> GenStep:
    return GenStep(kind=GenStepKind.PICK_RELATED_ACTION, pool=tags, repeat=repeat)


class PatternSpec(_Frozen):
    name: str
    steps: Tuple[GenStep, ...]
    weight: float = Field(gt=0)
    kind: FlowKind = FlowKind.FLOW
    description: str = ""


# =============================================================================
# DATASET ARTIFACTS
# =============================================================================

class FlowRecord(_Frozen):
    """One JSONL line of generated data: the flow plus its id and pattern."""
    id: str
    pattern: Optional[str] = None
    flow: Flow


class SplitManifest(BaseModel):
    train: List[str]
    valid: List[str]
    test: List[str]
    ratios: Tuple[float, float, float]
    seed: int = 0

    @field_validator("ratios")
    @classmethod
    def _ratios_sum_to_one(cls, v):
        if any(r < 0 for r in v) or not math.isclose(sum(v), 1.0, abs_tol=1e-9):
            raise ValueError(f"ratios must be non-negative and sum to 1, got {v}")
        return v

    @model_validator(mode="after")
    def _disjoint(self) -> "SplitManifest":
        a, b, c = set(self.train), set(self.valid), set(self.test)
        if a & b or a & c or b & c:
            raise ValueError("splits share flow ids")
        return self

    def split_of(self, flow_id: str) -> Optional[str]:
        for name in SPLIT_NAMES:
            if flow_id in getattr(self, name):
                return name
        return None
