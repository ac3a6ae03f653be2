# services/metrics_service.py

import logging
from typing import Dict, Optional, Tuple, Union

import zss
from multiset import FrozenMultiset
from pydantic import BaseModel, ConfigDict, Field

from config.constants import METRIC_COLUMNS, ORACLE_MAX_NODES
from models.flow import Flow
from services.flow_service import canonicalize, component_identities
from services.tree_service import FlowTree, TreeNode, build_tree, subtrees_height1, tree_size
from utils.errors import FlowParseError, SizeExceededError

logger = logging.getLogger(__name__)


# =============================================================================
# EDIT COSTS
# =============================================================================

class EditCosts:
    """Node-weighted costs: insert/delete cost the node weight, relabel the larger weight."""

    def insert(self, node: TreeNode) -> float:
        return node.weight

    def delete(self, node: TreeNode) -> float:
        return node.weight

    def relabel(self, a: TreeNode, b: TreeNode) -> float:
        if a.label == b.label:
            return 0.0
        return max(a.weight, b.weight)


DEFAULT_COSTS = EditCosts()


class MetricResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    flow_sim_with_inputs: float = Field(ge=0.0, le=1.0)
    flow_sim_no_inputs: float = Field(ge=0.0, le=1.0)
    tree_bleu_with_inputs: float = Field(ge=0.0, le=1.0)
    tree_bleu_no_inputs: float = Field(ge=0.0, le=1.0)
    trigger_match: float = Field(ge=0.0, le=1.0)
    component_match: float = Field(ge=0.0, le=1.0)

    @classmethod
    def zero(cls) -> "MetricResult":
        return cls(**{name: 0.0 for name, _ in METRIC_COLUMNS})

    def to_row(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name, _ in METRIC_COLUMNS)


# =============================================================================
# TREE EDIT DISTANCE
# =============================================================================

def _children(node: TreeNode):
    return list(node.children)


def ted(a: FlowTree, b: FlowTree, costs: EditCosts = DEFAULT_COSTS) -> float:
    """Zhang-Shasha ordered tree edit distance under `costs`."""
    return float(zss.distance(
        a.root,
        b.root,
        get_children=_children,
        insert_cost=costs.insert,
        remove_cost=costs.delete,
        update_cost=costs.relabel,
    ))


def ted_oracle(a: FlowTree, b: FlowTree, costs: EditCosts = DEFAULT_COSTS) -> float:
    """
    Exact edit distance by plain forest recursion (no keyroot decomposition).
    Exponential; only for cross-checking `ted` on tiny trees.
    """
    total = a.node_count + b.node_count
    if total > ORACLE_MAX_NODES:
        raise SizeExceededError(f"oracle is limited to {ORACLE_MAX_NODES} nodes, got {total}")

    memo: Dict[Tuple[Tuple[TreeNode, ...], Tuple[TreeNode, ...]], float] = {}

    def forest_weight(forest, cost) -> float:
        return sum(cost(n) for tree in forest for n in tree.iter_nodes())

    def dist(f: Tuple[TreeNode, ...], g: Tuple[TreeNode, ...]) -> float:
        key = (f, g)
        if key in memo:
            return memo[key]
        if not f and not g:
            result = 0.0
        elif not f:
            result = forest_weight(g, costs.insert)
        elif not g:
            result = forest_weight(f, costs.delete)
        else:
            v, w = f[-1], g[-1]
            result = min(
                dist(f[:-1] + v.children, g) + costs.delete(v),
                dist(f, g[:-1] + w.children) + costs.insert(w),
                dist(v.children, w.children) + dist(f[:-1], g[:-1]) + costs.relabel(v, w),
            )
        memo[key] = result
        return result

    return dist((a.root,), (b.root,))


# =============================================================================
# FLOW METRICS
# =============================================================================

def flow_sim(
    f: Flow,
    f_ref: Flow,
    include_inputs: bool = True,
    weights: Optional[Dict[str, float]] = None,
) -> float:
    """1 - TED / (|F| + |F_r|) with weighted tree sizes."""
    a = build_tree(f, include_inputs=include_inputs, weights=weights)
    b = build_tree(f_ref, include_inputs=include_inputs, weights=weights)
    distance = ted(a, b)
    if distance == 0:
        return 1.0
    return 1.0 - distance / (tree_size(a) + tree_size(b))


def tree_bleu(f: Flow, f_ref: Flow, include_inputs: bool = True) -> float:
    """Share of the candidate's 1-height subtrees that also occur in the reference."""
    candidate = subtrees_height1(build_tree(f, include_inputs=include_inputs))
    if not candidate:
        return 0.0
    reference = subtrees_height1(build_tree(f_ref, include_inputs=include_inputs))
    return len(candidate & reference) / len(candidate)


def trigger_match(f: Flow, f_ref: Flow, strict: bool = False) -> int:
    """1 when both triggers are absent, or both present with equal type (and inputs if strict)."""
    a = canonicalize(f).trigger
    b = canonicalize(f_ref).trigger
    if a is None or b is None:
        return int(a is None and b is None)
    if a.trigger_type != b.trigger_type:
        return 0
    if strict and a.inputs != b.inputs:
        return 0
    return 1


def component_match(f: Flow, f_ref: Flow, as_set: bool = False) -> float:
    """Jaccard overlap of (category, definition, scope) bags; order-agnostic."""
    mine = [i.as_tuple() for i in component_identities(f)]
    theirs = [i.as_tuple() for i in component_identities(f_ref)]
    if as_set:
        a, b = set(mine), set(theirs)
    else:
        a, b = FrozenMultiset(mine), FrozenMultiset(theirs)
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


def evaluate_pair(
    candidate: Union[Flow, FlowParseError, None],
    reference: Flow,
    strict_trigger: bool = False,
    components_as_set: bool = False,
    weights: Optional[Dict[str, float]] = None,
) -> MetricResult:
    """All six scores for one prediction. Unparsed candidates score zero everywhere."""
    if not isinstance(candidate, Flow):
        return MetricResult.zero()

    return MetricResult(
        flow_sim_with_inputs=flow_sim(candidate, reference, True, weights),
        flow_sim_no_inputs=flow_sim(candidate, reference, False, weights),
        tree_bleu_with_inputs=tree_bleu(candidate, reference, True),
        tree_bleu_no_inputs=tree_bleu(candidate, reference, False),
        trigger_match=float(trigger_match(candidate, reference, strict=strict_trigger)),
        component_match=component_match(candidate, reference, as_set=components_as_set),
    )
