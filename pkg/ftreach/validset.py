"""Minimum-size valid arc sets for fault-tolerant reachability.

A set A' of arcs is valid for (G, T) when the subgraph (V, A_T | A') has the
same dominators as G. Every vertex v with t(v) != d(v) needs one extra
entering arc, and the construction below adds exactly one arc for each.
"""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Tuple

from .dominators import DominatorTree, dominator_tree
from .errors import ConsistencyError, InputError, NoQualifyingArc, SizeGuardError
from .graph import Arc, ArcSet, FlowGraph, SpanningTree, restrict
from .lowhigh import LowHighOrder

logger = logging.getLogger(__name__)

CASE_TREE_ARC = "1"
CASE_IDOM_ARC = "2"
CASE_LOW_ARC = "3a"
CASE_HIGH_ARC = "3b"


def classify(
    graph: FlowGraph, tree: SpanningTree, dom: DominatorTree, order: LowHighOrder
) -> Dict[int, str]:
    """The case that decides each vertex's extra arc.

    1: t(v) = d(v). 2: t(v) != d(v) and (d(v), v) is an arc. 3a/3b: (d(v), v)
    is not an arc and t(v) comes after/before v in the order.
    """
    cases = {}
    position = order.position
    for v in graph.vertices():
        if v == graph.s:
            continue
        t, d = tree.parent[v], dom.idom[v]
        if t == d:
            cases[v] = CASE_TREE_ARC
        elif graph.has_arc(d, v):
            cases[v] = CASE_IDOM_ARC
        elif position[t] > position[v]:
            cases[v] = CASE_LOW_ARC
        else:
            cases[v] = CASE_HIGH_ARC
    return cases


def compute_valid_set(
    graph: FlowGraph, tree: SpanningTree, dom: DominatorTree, order: LowHighOrder
) -> ArcSet:
    """A minimum-size valid set, given D and a low-high order of it.

    Case 3a takes the entering arc whose tail is closest below v in the order;
    case 3b the one closest above v among tails outside v's subtree.
    """
    position = order.position
    chosen: List[Arc] = []
    for v, case in classify(graph, tree, dom, order).items():
        if case == CASE_TREE_ARC:
            continue
        if case == CASE_IDOM_ARC:
            chosen.append((dom.idom[v], v))
            continue

        here = position[v]
        best = 0
        if case == CASE_LOW_ARC:
            # t(v) has a v-avoiding tree path from s, so it cannot sit below v in D
            if dom.is_descendant(v, tree.parent[v]):
                raise ConsistencyError(
                    f"tree parent {tree.parent[v]} of {v} is a descendant of {v} in D"
                )
            for x in graph.pred[v]:
                rank = position[x]
                if rank < here and (not best or rank > position[best]):
                    best = x
        else:
            for x in graph.pred[v]:
                rank = position[x]
                if (
                    rank > here
                    and not dom.is_descendant(v, x)
                    and (not best or rank < position[best])
                ):
                    best = x
        if not best:
            raise NoQualifyingArc(v, case)
        chosen.append((best, v))

    logger.debug("Valid set has %d arcs", len(chosen))
    return frozenset(chosen)


def lower_bound(tree: SpanningTree, dom: DominatorTree) -> int:
    """Number of vertices v != s whose tree parent is not their immediate dominator."""
    return sum(
        1
        for v in range(1, dom.n + 1)
        if v != dom.s and tree.parent[v] != dom.idom[v]
    )


def _subgraph(graph: FlowGraph, tree: SpanningTree, candidate: Iterable[Arc]) -> FlowGraph:
    arcs = set(tree.arcs())
    for u, v in candidate:
        if not (1 <= u <= graph.n and 1 <= v <= graph.n) or not graph.has_arc(u, v):
            raise InputError(f"arc ({u}, {v}) not in G")
        arcs.add((u, v))
    return restrict(graph, arcs)


def first_discrepancy(
    graph: FlowGraph,
    tree: SpanningTree,
    candidate: Iterable[Arc],
    dom: Optional[DominatorTree] = None,
) -> Optional[Tuple[int, int, int]]:
    """The smallest v whose immediate dominator differs in (V, A_T | candidate).

    Returns (v, d(v) in G, d(v) in the subgraph), or None when they all agree.
    """
    if dom is None:
        dom = dominator_tree(graph)
    sub = dominator_tree(_subgraph(graph, tree, candidate))
    for v in graph.vertices():
        if dom.idom[v] != sub.idom[v]:
            return v, dom.idom[v], sub.idom[v]
    return None


def is_valid_set(
    graph: FlowGraph,
    tree: SpanningTree,
    candidate: Iterable[Arc],
    dom: Optional[DominatorTree] = None,
) -> bool:
    """True iff (V, A_T | candidate) has the same immediate dominators as G."""
    return first_discrepancy(graph, tree, candidate, dom) is None


def brute_force_min_valid_set(
    graph: FlowGraph, tree: SpanningTree, max_arcs: int = 20
) -> ArcSet:
    """The smallest valid subset of the non-tree arcs, by enumeration.

    Subsets are tried by increasing size and, within a size, in lexicographic
    order of their sorted arc lists.
    """
    tree_arcs = set(tree.arcs())
    spare = [arc for arc in graph.arcs() if arc not in tree_arcs]
    if len(spare) > max_arcs:
        raise SizeGuardError(
            f"brute-force search is limited to {max_arcs} non-tree arcs, got {len(spare)}"
        )
    dom = dominator_tree(graph)
    for size in range(len(spare) + 1):
        for subset in itertools.combinations(spare, size):
            if is_valid_set(graph, tree, subset, dom):
                return frozenset(subset)
    # the full set of non-tree arcs rebuilds G itself
    raise ConsistencyError("no subset of the non-tree arcs is valid")
