import os

# =============================================================================
# FLOW MODEL
# =============================================================================

# Closed flow-logic vocabulary. TIMER is an action, not flow logic.
FLOWLOGIC_DEFINITIONS = frozenset({
    "IF", "ELSE", "ELSEIF", "FOREACH", "DOUNTIL",
    "PARALLEL", "TRY", "CATCH", "END",
})


# =============================================================================
# TREE WEIGHTS (node cost for tree edit distance)
# =============================================================================

# Weights live on a 1/1024 grid: sums of such floats are exact, so edit
# distances and sizes compare by exact equality. Overrides are snapped to it.
WEIGHT_GRID = 1024


def snap_weight(value: float) -> float:
    snapped = round(float(value) * WEIGHT_GRID) / WEIGHT_GRID
    if snapped <= 0:
        raise ValueError(f"node weight must be at least 1/{WEIGHT_GRID}, got {value}")
    return snapped


STRUCTURE_NODE_WEIGHT = snap_weight(os.getenv("FLOW_NODE_WEIGHT_STRUCTURE", 1.0))
INPUT_NODE_WEIGHT = snap_weight(os.getenv("FLOW_NODE_WEIGHT_INPUT", 0.25))

NODE_WEIGHTS = {
    "flow":       STRUCTURE_NODE_WEIGHT,
    "trigger":    STRUCTURE_NODE_WEIGHT,
    "components": STRUCTURE_NODE_WEIGHT,
    "component":  STRUCTURE_NODE_WEIGHT,
    "input":      INPUT_NODE_WEIGHT,
}

UNIT_NODE_WEIGHTS = {kind: 1.0 for kind in NODE_WEIGHTS}

# Exhaustive edit-distance search is only tractable for tiny trees.
ORACLE_MAX_NODES = 12


# =============================================================================
# METRICS
# =============================================================================

# Same order as the report columns.
METRIC_COLUMNS = [
    ("flow_sim_with_inputs",  "FlowSim w/ inputs"),
    ("flow_sim_no_inputs",    "FlowSim no inputs"),
    ("tree_bleu_with_inputs", "TreeBLEU w/ inputs"),
    ("tree_bleu_no_inputs",   "TreeBLEU no inputs"),
    ("trigger_match",         "Trigger match"),
    ("component_match",       "Component match"),
]


# =============================================================================
# SYNTHETIC GENERATION
# =============================================================================

P_IF = float(os.getenv("SYNTH_P_IF", 0.5))
P_ELSE = float(os.getenv("SYNTH_P_ELSE", P_IF))

MAX_DISTINCT_RETRIES = 100

# Pattern distribution of the synthetic dataset (total 14,376).
PATTERN_COUNTS = {
    "crud_loop":                         2148,
    "crud_single":                       2144,
    "service_catalog_request_manual":    1102,
    "scheduled_loop":                    1100,
    "scheduled_single":                  1100,
    "outbound_notification":             1100,
    "integration_inbound":               1058,
    "integration_batch_sync":            1000,
    "single_component":                   994,
    "sla":                                660,
    "parallel":                           656,
    "trigger_only":                       624,
    "misc":                               364,
    "pad":                                152,
    "inbound_email_new":                   60,
    "service_catalog_request_automated":   58,
    "inbound_email_reply":                 56,
}

# Synthetic train / valid / test sizes: 12,376 / 1,000 / 1,000.
SPLIT_RATIOS = (12376 / 14376, 1000 / 14376, 1000 / 14376)
SPLIT_NAMES = ("train", "valid", "test")


# =============================================================================
# RENDERING & STRATIFICATION
# =============================================================================

ORIENTATIONS = ("top_to_bottom", "left_to_right")
EDGE_STYLES = ("straight", "curved", "orthogonal")

RANKDIR_BY_ORIENTATION = {"top_to_bottom": "TB", "left_to_right": "LR"}
SPLINES_BY_EDGE_STYLE = {"straight": "line", "curved": "curved", "orthogonal": "ortho"}

DEFAULT_NODE_SHAPES = {
    "trigger":   "ellipse",
    "action":    "box",
    "subflow":   "box3d",
    "flowlogic": "diamond",
}

# Control-edge labels out of flow-logic elements.
ENTRY_EDGE_LABELS = {
    "IF":       "then",
    "ELSEIF":   "then",
    "ELSE":     "then",
    "FOREACH":  "loop",
    "DOUNTIL":  "loop",
    "PARALLEL": "branch",
    "TRY":      "try",
    "CATCH":    "catch",
}
ELSE_EDGE_LABEL = "else"

LANDSCAPE_RATIO = 2
SMALL_MAX_PIXELS = 400_000
LARGE_MIN_PIXELS = 1_000_000


# =============================================================================
# REMOTE MODEL CLIENT
# =============================================================================

DEFAULT_ENDPOINT_PATH = "/v1/chat/completions"
DEFAULT_TIMEOUT_S = 60.0
DEFAULT_MAX_RETRIES = 2
DEFAULT_MAX_IN_FLIGHT = 4
DEFAULT_PROMPT_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "assets", "prompts", "flow_json_v1.txt",
)
IMAGE_SLOT = "<image>"

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
