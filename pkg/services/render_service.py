# services/render_service.py

import logging
import shutil
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple

import graphviz
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.constants import (
    DEFAULT_NODE_SHAPES,
    EDGE_STYLES,
    ELSE_EDGE_LABEL,
    ENTRY_EDGE_LABELS,
    LANDSCAPE_RATIO,
    LARGE_MIN_PIXELS,
    ORIENTATIONS,
    RANKDIR_BY_ORIENTATION,
    SMALL_MAX_PIXELS,
    SPLINES_BY_EDGE_STYLE,
)
from models.flow import Component, Flow
from services.tree_service import FlowTree

logger = logging.getLogger(__name__)

Orientation = Literal["top_to_bottom", "left_to_right"]
EdgeStyle = Literal["straight", "curved", "orthogonal"]


class RenderStyle(BaseModel):
    model_config = ConfigDict(frozen=True)

    orientation: Orientation = "top_to_bottom"
    edge_style: EdgeStyle = "straight"
    node_shape_map: Dict[str, str] = Field(default_factory=lambda: dict(DEFAULT_NODE_SHAPES))
    seed: int = 0

    def shape_for(self, kind: str) -> str:
        return self.node_shape_map.get(kind, DEFAULT_NODE_SHAPES.get(kind, "box"))


def sample_style(seed: int) -> RenderStyle:
    rng = np.random.default_rng(np.random.SeedSequence(seed % 2 ** 64))
    orientation = ORIENTATIONS[int(rng.integers(len(ORIENTATIONS)))]
    edge_style = EDGE_STYLES[int(rng.integers(len(EDGE_STYLES)))]
    return RenderStyle(orientation=orientation, edge_style=edge_style, seed=seed)


# =============================================================================
# DOT
# =============================================================================

def _digraph(name: str, style: RenderStyle) -> graphviz.Digraph:
    return graphviz.Digraph(
        name=name,
        graph_attr={
            "rankdir": RANKDIR_BY_ORIENTATION[style.orientation],
            "splines": SPLINES_BY_EDGE_STYLE[style.edge_style],
        },
    )


def _node_id(comp: Component) -> str:
    return f"c{comp.order}"


def _wire(dot: graphviz.Digraph, flow: Flow, parent_id: Optional[str], parent: Optional[Component]) -> None:
    """Connect the children of `parent` (top level when None) and recurse into nested logic."""
    children = flow.children_of(parent.order if parent is not None else None)
    if not children:
        return

    logic = parent.logic if parent is not None else ""
    if parent_id is not None:
        if logic == "PARALLEL":
            for child in children:
                dot.edge(parent_id, _node_id(child), label=ENTRY_EDGE_LABELS["PARALLEL"])
        elif logic in ENTRY_EDGE_LABELS:
            dot.edge(parent_id, _node_id(children[0]), label=ENTRY_EDGE_LABELS[logic])
        else:
            dot.edge(parent_id, _node_id(children[0]))

    if logic != "PARALLEL":
        for a, b in zip(children, children[1:]):
            if a.logic in ("IF", "ELSEIF") and b.logic in ("ELSE", "ELSEIF"):
                dot.edge(_node_id(a), _node_id(b), label=ELSE_EDGE_LABEL)
            else:
                dot.edge(_node_id(a), _node_id(b))

    for child in children:
        if child.is_flowlogic:
            _wire(dot, flow, _node_id(child), child)


def to_dot(flow: Flow, style: Optional[RenderStyle] = None) -> str:
    """
    Graphviz DOT source for `flow`: one node per trigger and component, edges in
    execution order, labelled control edges out of flow logic.
    """
    style = style or RenderStyle()
    dot = _digraph("flow", style)

    entry = None
    if flow.trigger is not None:
        entry = "trigger"
        dot.node(
            "trigger",
            label=flow.trigger.annotation or flow.trigger.trigger_type,
            shape=style.shape_for("trigger"),
        )
    for comp in flow.components:
        dot.node(
            _node_id(comp),
            label=comp.annotation or comp.definition,
            shape=style.shape_for(comp.category.value),
        )

    _wire(dot, flow, entry, None)
    return dot.source


def tree_to_dot(tree: FlowTree, style: Optional[RenderStyle] = None) -> str:
    """Debug view of a decomposed flow tree."""
    dot = _digraph("tree", style or RenderStyle())
    counter = 0

    def visit(node) -> str:
        nonlocal counter
        node_id = f"n{counter}"
        counter += 1
        dot.node(node_id, label=node.label, shape="box" if node.children else "plaintext")
        for child in node.children:
            dot.edge(node_id, visit(child))
        return node_id

    visit(tree.root)
    return dot.source


def rasterize(dot_text: str, out_path: str | Path) -> Optional[Path]:
    """Render DOT to PNG with the Graphviz binary; None when it is not installed."""
    if shutil.which("dot") is None:
        logger.warning("graphviz 'dot' binary not on PATH; skipping %s", out_path)
        return None
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        rendered = graphviz.Source(dot_text).render(outfile=str(out_path), format="png", cleanup=True)
    except graphviz.ExecutableNotFound:
        logger.warning("graphviz executable failed to start; skipping %s", out_path)
        return None
    return Path(rendered)


# =============================================================================
# IMAGE STRATIFICATION
# =============================================================================

def _check_size(width: int, height: int) -> Tuple[int, int]:
    if width <= 0 or height <= 0:
        raise ValueError(f"image size must be positive, got {width}x{height}")
    return width, height


def classify_orientation(width: int, height: int) -> str:
    width, height = _check_size(width, height)
    return "landscape" if width >= LANDSCAPE_RATIO * height else "portrait"


def classify_resolution(width: int, height: int) -> str:
    width, height = _check_size(width, height)
    pixels = width * height
    if pixels < SMALL_MAX_PIXELS:
        return "small"
    if pixels > LARGE_MIN_PIXELS:
        return "large"
    return "medium"
