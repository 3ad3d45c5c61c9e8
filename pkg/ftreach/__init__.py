"""ftreach - minimum valid arc sets for fault-tolerant reachability."""

__version__ = "0.1.0"
__author__ = "ftreach developers"

from .divergent import TreePair, build_divergent_trees, check_divergent
from .dominators import DominatorTree, dominator_tree, dominator_tree_naive, is_descendant
from .errors import (
    ChoiceUnavailable,
    ConsistencyError,
    FtreachError,
    InputError,
    NoQualifyingArc,
    SizeGuardError,
    Verdict,
)
from .graph import (
    FlowGraph,
    SpanningTree,
    extract_spanning_tree,
    parse_arcset,
    parse_flowgraph,
    parse_tree,
    random_flowgraph,
    reachable_set,
    restrict,
    serialize,
)
from .lowhigh import (
    LowHighOrder,
    brute_force_low_high,
    check_low_high,
    construct_low_high,
    derived_graph,
)
from .validset import (
    brute_force_min_valid_set,
    classify,
    compute_valid_set,
    first_discrepancy,
    is_valid_set,
    lower_bound,
)
