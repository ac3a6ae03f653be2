# models/flow.py

"""
Workflow data model.

JSON layout (field names as emitted by the generator):

    {"type": "flow", "scope": "global",
     "trigger": {"annotation": ..., "type": "weekly", "inputs": [{"name": ..., "value": ...}]},
     "components": [{"annotation": ..., "category": "action", "definition": "look_up_records",
                     "scope": "global", "order": 1, "block": 2, "inputs": [...]}]}

All models are frozen; a Flow is valid by construction.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_core import PydanticCustomError

from config.constants import FLOWLOGIC_DEFINITIONS


class FlowKind(str, Enum):
    FLOW = "flow"
    SUBFLOW = "subflow"


class ComponentCategory(str, Enum):
    ACTION = "action"
    FLOWLOGIC = "flowlogic"
    SUBFLOW = "subflow"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="ignore", populate_by_name=True)


def _violation(path: str, reason: str) -> PydanticCustomError:
    return PydanticCustomError("schema_violation", "{reason}", {"path": path, "reason": reason})


def _check_unique_names(inputs, path: str) -> None:
    # Names compare the way canonicalize writes them.
    seen = set()
    for i, binding in enumerate(inputs):
        key = binding.name.strip().lower()
        if key in seen:
            raise _violation(f"{path}[{i}].name", f"duplicate input name {key!r}")
        seen.add(key)


class InputBinding(_Frozen):
    name: str = Field(min_length=1)
    value: str = ""

    @field_validator("value", mode="before")
    @classmethod
    def _stringify(cls, v: Any) -> Any:
        # Model replies often emit numbers/booleans for literal values.
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (int, float)):
            return str(v)
        return v

    @field_validator("name")
    @classmethod
    def _name_not_blank(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("input name must not be blank")
        return v


class Trigger(_Frozen):
    annotation: str = ""
    trigger_type: str = Field(alias="type")
    inputs: Tuple[InputBinding, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> "Trigger":
        if not self.trigger_type.strip():
            raise _violation("type", "trigger type must not be empty")
        _check_unique_names(self.inputs, "inputs")
        return self


class Component(_Frozen):
    annotation: str = ""
    category: ComponentCategory
    definition: str = Field(min_length=1)
    scope: str = "global"
    order: int = Field(gt=0)
    block: Optional[int] = Field(default=None, gt=0)
    inputs: Tuple[InputBinding, ...] = ()

    @field_validator("category", mode="before")
    @classmethod
    def _lower_category(cls, v: Any) -> Any:
        return v.strip().lower() if isinstance(v, str) else v

    @field_validator("definition")
    @classmethod
    def _definition_not_blank(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("definition must not be blank")
        return v

    @model_validator(mode="after")
    def _check(self) -> "Component":
        if (
            self.category is ComponentCategory.FLOWLOGIC
            and self.definition.strip().upper() not in FLOWLOGIC_DEFINITIONS
        ):
            raise _violation("definition", f"unknown flow logic definition {self.definition!r}")
        _check_unique_names(self.inputs, "inputs")
        return self

    @property
    def is_flowlogic(self) -> bool:
        return self.category is ComponentCategory.FLOWLOGIC

    @property
    def logic(self) -> str:
        """Upper-cased flow-logic keyword ('' for actions and subflows)."""
        return self.definition.strip().upper() if self.is_flowlogic else ""


class ComponentIdentity(_Frozen):
    category: str
    definition: str
    scope: str

    @field_validator("category", "definition", "scope", mode="before")
    @classmethod
    def _normalize(cls, v: Any) -> Any:
        if isinstance(v, Enum):
            v = v.value
        return v.strip().lower() if isinstance(v, str) else v

    @classmethod
    def of(cls, component: Component) -> "ComponentIdentity":
        return cls(category=component.category, definition=component.definition, scope=component.scope)

    def as_tuple(self) -> Tuple[str, str, str]:
        return (self.category, self.definition, self.scope)


class Flow(_Frozen):
    kind: FlowKind = Field(alias="type")
    scope: str = "global"
    trigger: Optional[Trigger] = None
    components: Tuple[Component, ...] = ()

    @field_validator("kind", mode="before")
    @classmethod
    def _lower_kind(cls, v: Any) -> Any:
        return v.strip().lower() if isinstance(v, str) else v

    @model_validator(mode="after")
    def _check(self) -> "Flow":
        if self.kind is FlowKind.FLOW and self.trigger is None:
            raise _violation("trigger", "a flow must have a trigger")
        if self.kind is FlowKind.SUBFLOW and self.trigger is not None:
            raise _violation("trigger", "a subflow must not have a trigger")

        flowlogic_orders = set()
        previous = 0
        for i, comp in enumerate(self.components):
            if comp.order <= previous:
                raise _violation(
                    f"components[{i}].order",
                    f"order {comp.order} is not greater than the previous order {previous}",
                )
            if comp.block is not None and comp.block not in flowlogic_orders:
                raise _violation(
                    f"components[{i}].block",
                    f"block {comp.block} does not reference an earlier flow logic component",
                )
            if comp.is_flowlogic:
                flowlogic_orders.add(comp.order)
            previous = comp.order
        return self

    @property
    def is_subflow(self) -> bool:
        return self.kind is FlowKind.SUBFLOW

    def children_of(self, block: Optional[int]) -> Tuple[Component, ...]:
        """Components directly nested in `block` (None = top level), in order."""
        return tuple(c for c in self.components if c.block == block)
