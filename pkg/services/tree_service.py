# services/tree_service.py

"""
Ordered, labeled tree decomposition of a flow.

    flow
    ├── trigger:<type>
    │   └── input:<name>=<value> ...
    └── components
        └── <category>:<definition>:<scope>
            ├── input:<name>=<value> ...
            └── <nested components, in order> ...

Subflows have no trigger subtree. Labels exclude annotations and orders.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, Optional, Tuple

from config.constants import NODE_WEIGHTS, snap_weight
from models.flow import Component, Flow
from services.flow_service import canonicalize


class NodeKind(str, Enum):
    FLOW = "flow"
    TRIGGER = "trigger"
    COMPONENTS = "components"
    COMPONENT = "component"
    INPUT = "input"


@dataclass(frozen=True)
class TreeNode:
    label: str
    kind: NodeKind
    weight: float
    children: Tuple["TreeNode", ...] = ()

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError(f"node weight must be positive, got {self.weight}")

    def iter_nodes(self) -> Iterator["TreeNode"]:
        """Preorder traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass(frozen=True)
class FlowTree:
    root: TreeNode

    def iter_nodes(self) -> Iterator[TreeNode]:
        return self.root.iter_nodes()

    @property
    def node_count(self) -> int:
        return sum(1 for _ in self.iter_nodes())


@dataclass(frozen=True)
class Subtree1:
    parent_label: str
    child_labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.child_labels:
            raise ValueError("a 1-height subtree needs at least one child")


# =============================================================================
# DECOMPOSITION
# =============================================================================

def _input_nodes(inputs, weights: Dict[str, float]) -> Tuple[TreeNode, ...]:
    w = weights[NodeKind.INPUT.value]
    return tuple(TreeNode(f"input:{b.name}={b.value}", NodeKind.INPUT, w) for b in inputs)


def _component_node(
    comp: Component,
    flow: Flow,
    weights: Dict[str, float],
    include_inputs: bool,
) -> TreeNode:
    children = _input_nodes(comp.inputs, weights) if include_inputs else ()
    if comp.is_flowlogic:
        children += tuple(
            _component_node(child, flow, weights, include_inputs)
            for child in flow.children_of(comp.order)
        )
    return TreeNode(
        f"{comp.category.value}:{comp.definition}:{comp.scope}",
        NodeKind.COMPONENT,
        weights[NodeKind.COMPONENT.value],
        children,
    )


def build_tree(
    flow: Flow,
    include_inputs: bool = True,
    weights: Optional[Dict[str, float]] = None,
) -> FlowTree:
    """Decompose `flow` (canonicalized first) into its FlowTree."""
    weights = {kind: snap_weight(w) for kind, w in {**NODE_WEIGHTS, **(weights or {})}.items()}
    flow = canonicalize(flow)

    components = TreeNode(
        "components",
        NodeKind.COMPONENTS,
        weights[NodeKind.COMPONENTS.value],
        tuple(_component_node(c, flow, weights, include_inputs) for c in flow.children_of(None)),
    )

    children = (components,)
    if flow.trigger is not None:
        trigger = TreeNode(
            f"trigger:{flow.trigger.trigger_type}",
            NodeKind.TRIGGER,
            weights[NodeKind.TRIGGER.value],
            _input_nodes(flow.trigger.inputs, weights) if include_inputs else (),
        )
        children = (trigger, components)

    return FlowTree(TreeNode("flow", NodeKind.FLOW, weights[NodeKind.FLOW.value], children))


def subtrees_height1(tree: FlowTree) -> FrozenSet[Subtree1]:
    """
    All (parent, ordered children) pairs, except the two that hang off the
    root (flow -> trigger, flow -> components) and are present in every tree.
    """
    out = set()
    for node in tree.iter_nodes():
        if node is tree.root or not node.children:
            continue
        out.add(Subtree1(node.label, tuple(c.label for c in node.children)))
    return frozenset(out)


def tree_size(tree: FlowTree) -> float:
    """Weighted size: sum of node weights (node count under unit weights)."""
    return sum(node.weight for node in tree.iter_nodes())
