"""Two divergent spanning trees B and R built from a low-high order."""

import logging
from typing import Dict, Iterable, List, Optional

from .dominators import DominatorTree
from .errors import ChoiceUnavailable, Verdict
from .graph import Arc, FlowGraph
from .lowhigh import LowHighOrder

logger = logging.getLogger(__name__)


class TreePair:
    """Parent tables of the two trees: ``b[v]`` and ``r[v]``, 0 for s."""

    def __init__(self, s: int, b: List[int], r: List[int]):
        self.s = s
        self.b = b
        self.r = r

    def b_map(self) -> Dict[int, int]:
        return {v: u for v, u in enumerate(self.b) if v and v != self.s}

    def r_map(self) -> Dict[int, int]:
        return {v: u for v, u in enumerate(self.r) if v and v != self.s}

    def arcs(self) -> Iterable[Arc]:
        """Every arc used by B or R, once, in ascending order."""
        return sorted(set(self.tree_arcs(self.b)) | set(self.tree_arcs(self.r)))

    def tree_arcs(self, parent: List[int]) -> Iterable[Arc]:
        return ((u, v) for v, u in enumerate(parent) if v and v != self.s)

    def __repr__(self) -> str:
        return f"TreePair(b={self.b_map()}, r={self.r_map()})"


def build_divergent_trees(
    graph: FlowGraph,
    tree: DominatorTree,
    order: LowHighOrder,
    allowed: Optional[Iterable[Arc]] = None,
) -> TreePair:
    """Choose (b(v), v) and (r(v), v) for every v != s.

    If (d(v), v) is an arc of G both trees use it. Otherwise b(v) is the
    in-neighbour closest below v in the order and r(v) the closest one above v
    that is not a descendant of v. With ``allowed``, only those arcs may be
    chosen; ChoiceUnavailable names the first vertex, in low-high order, that
    cannot be served.
    """
    n, s = graph.n, graph.s
    position = order.position
    allowed_set = set(allowed) if allowed is not None else None

    def admissible(u: int, v: int) -> bool:
        return allowed_set is None or (u, v) in allowed_set

    b = [0] * (n + 1)
    r = [0] * (n + 1)
    for v in order.sequence:
        if v == s:
            continue
        dv = tree.idom[v]
        if graph.has_arc(dv, v):
            if not admissible(dv, v):
                raise ChoiceUnavailable(v)
            b[v] = r[v] = dv
            continue

        here = position[v]
        low = high = 0
        for u in graph.pred[v]:
            if not admissible(u, v):
                continue
            rank = position[u]
            if rank < here:
                if not low or rank > position[low]:
                    low = u
            elif rank > here and not tree.is_descendant(v, u):
                if not high or rank < position[high]:
                    high = u
        if not low or not high:
            raise ChoiceUnavailable(v)
        b[v] = low
        r[v] = high

    logger.debug("Built divergent spanning trees over %d vertices", n)
    return TreePair(s, b, r)


def root_path(parent: List[int], v: int, s: int) -> Optional[List[int]]:
    """Vertices on the path from v up to s, or None if the parent links cycle."""
    path = [v]
    seen = {v}
    while v != s:
        v = parent[v]
        if not v or v in seen:
            return None
        path.append(v)
        seen.add(v)
    return path


def check_divergent(
    graph: FlowGraph,
    tree: DominatorTree,
    pair: TreePair,
    order: Optional[LowHighOrder] = None,
) -> Verdict:
    """Check that for every v the root paths in B and R share only v's dominators.

    Vertices are scanned in ``order`` if given, else in the preorder of ``tree``;
    the first failing vertex is reported.
    """
    s = graph.s
    scan = order.sequence if order is not None else tree.order
    for v in scan:
        if v != s:
            for name, parent in (("B", pair.b), ("R", pair.r)):
                u = parent[v]
                if not u or not graph.has_arc(u, v):
                    return Verdict.failed(v, f"({u}, {v}) is not an arc of G in {name}")

    for v in scan:
        path_b = root_path(pair.b, v, s)
        path_r = root_path(pair.r, v, s)
        if path_b is None:
            return Verdict.failed(v, "B is not a tree")
        if path_r is None:
            return Verdict.failed(v, "R is not a tree")
        common = set(path_b).intersection(path_r)
        dominators = set(tree.dominators_of(v))
        if common != dominators:
            extra = sorted(common - dominators)
            missing = sorted(dominators - common)
            if extra:
                return Verdict.failed(v, f"paths also share {extra}")
            return Verdict.failed(v, f"paths miss dominators {missing}")
    return Verdict.passed()


def pair_to_dot(graph: FlowGraph, pair: TreePair) -> str:
    """DOT rendering: B arcs blue, R arcs red, arcs in both trees bold."""
    b_arcs = set(pair.tree_arcs(pair.b))
    r_arcs = set(pair.tree_arcs(pair.r))
    lines = ["digraph G {"]
    for v in graph.vertices():
        if v == graph.s:
            lines.append(f"  {v} [shape=doublecircle];")
        else:
            lines.append(f"  {v};")
    for u, v in graph.arcs():
        if (u, v) in b_arcs and (u, v) in r_arcs:
            lines.append(f"  {u} -> {v} [style=bold];")
        elif (u, v) in b_arcs:
            lines.append(f"  {u} -> {v} [color=blue];")
        elif (u, v) in r_arcs:
            lines.append(f"  {u} -> {v} [color=red];")
        else:
            lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
