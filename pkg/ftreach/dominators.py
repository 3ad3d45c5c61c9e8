"""Dominator trees: Lengauer-Tarjan, a vertex-removal oracle, and descendant queries."""

import logging
from typing import Dict, List, Optional, Sequence

from .errors import ConsistencyError
from .graph import FlowGraph, reachable_set

logger = logging.getLogger(__name__)


class DominatorTree:
    """The dominator tree D of a flow graph, rooted at s.

    ``idom[v]`` is d(v) (0 for s). ``pre`` and ``size`` hold a preorder of D
    and subtree sizes, so that descendant tests are interval checks.
    """

    def __init__(self, s: int, idom: Sequence[int], order: Optional[Sequence[int]] = None):
        n = len(idom) - 1
        self.n = n
        self.s = s
        self.idom = list(idom)

        children: List[List[int]] = [[] for _ in range(n + 1)]
        for v in range(1, n + 1):
            if v != s:
                children[self.idom[v]].append(v)

        if order is None:
            order = self._ascending_preorder(children)
        self.order = list(order)

        pre = [0] * (n + 1)
        for rank, v in enumerate(self.order, start=1):
            pre[v] = rank
        size = [1] * (n + 1)
        for v in reversed(self.order):
            if v != s:
                size[self.idom[v]] += size[v]

        self.children = children
        self.pre = pre
        self.size = size

    def _ascending_preorder(self, children: List[List[int]]) -> List[int]:
        order = []
        stack = [self.s]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(children[v]))
        if len(order) != self.n:
            raise ConsistencyError("immediate dominators do not form a tree rooted at s")
        return order

    def d(self, v: int) -> int:
        return self.idom[v]

    def is_descendant(self, v: int, w: int) -> bool:
        """True iff w lies in the subtree of v (v is its own descendant)."""
        return self.pre[v] <= self.pre[w] < self.pre[v] + self.size[v]

    def dominators_of(self, v: int) -> List[int]:
        """The dominators of v, from v up to s."""
        chain = [v]
        while v != self.s:
            v = self.idom[v]
            chain.append(v)
        return chain

    def depth(self) -> List[int]:
        depth = [0] * (self.n + 1)
        for v in self.order:
            if v != self.s:
                depth[v] = depth[self.idom[v]] + 1
        return depth

    def idom_map(self) -> Dict[int, int]:
        return {v: self.idom[v] for v in range(1, self.n + 1) if v != self.s}

    def with_preorder(self, order: Sequence[int]) -> "DominatorTree":
        """The same tree, indexed by another preorder (e.g. a low-high order)."""
        return DominatorTree(self.s, self.idom, order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DominatorTree):
            return NotImplemented
        return self.s == other.s and self.idom == other.idom

    def __repr__(self) -> str:
        return f"DominatorTree({self.idom_map()})"


def is_descendant(tree: DominatorTree, v: int, w: int) -> bool:
    return tree.is_descendant(v, w)


def dominator_tree(graph: FlowGraph) -> DominatorTree:
    """Immediate dominators by the simple Lengauer-Tarjan algorithm.

    Uses path compression without balancing, O(m log n). Vertices are
    renumbered 1..n in depth-first preorder (neighbours in ascending id), and
    every forest operation is iterative so deep graphs do not hit the
    recursion limit.
    """
    n, s, succ, pred = graph.n, graph.s, graph.succ, graph.pred
    logger.debug("Computing dominator tree from %d vertices", n)

    dfnum = [0] * (n + 1)
    vertex = [0, s]
    parent = [0] * (n + 1)
    dfnum[s] = 1
    stack = [(s, iter(succ[s]))]
    while stack:
        u, it = stack[-1]
        for w in it:
            if not dfnum[w]:
                dfnum[w] = len(vertex)
                parent[dfnum[w]] = dfnum[u]
                vertex.append(w)
                stack.append((w, iter(succ[w])))
                break
        else:
            stack.pop()

    semi = list(range(n + 1))
    label = list(range(n + 1))
    ancestor = [0] * (n + 1)
    idom = [0] * (n + 1)
    bucket: List[List[int]] = [[] for _ in range(n + 1)]

    def evaluate(v: int) -> int:
        if ancestor[v] == 0:
            return v
        path = []
        u = v
        while ancestor[ancestor[u]] != 0:
            path.append(u)
            u = ancestor[u]
        for u in reversed(path):
            a = ancestor[u]
            if semi[label[a]] < semi[label[u]]:
                label[u] = label[a]
            ancestor[u] = ancestor[a]
        return label[v]

    for w in range(n, 1, -1):
        for x in pred[vertex[w]]:
            u = evaluate(dfnum[x])
            if semi[u] < semi[w]:
                semi[w] = semi[u]
        bucket[semi[w]].append(w)
        p = parent[w]
        ancestor[w] = p
        for v in bucket[p]:
            u = evaluate(v)
            idom[v] = u if semi[u] < semi[v] else p
        bucket[p] = []

    for w in range(2, n + 1):
        if idom[w] != semi[w]:
            idom[w] = idom[idom[w]]

    result = [0] * (n + 1)
    for w in range(2, n + 1):
        result[vertex[w]] = vertex[idom[w]]
    return DominatorTree(s, result)


def dominator_tree_naive(graph: FlowGraph) -> DominatorTree:
    """Immediate dominators straight from the definition, by vertex removal.

    v dominates w iff w is unreachable from s once v is removed. O(n m); meant
    as an oracle for small graphs.
    """
    n, s = graph.n, graph.s
    dominators: List[List[int]] = [[v] for v in range(n + 1)]
    for v in range(1, n + 1):
        if v == s:
            for w in range(1, n + 1):
                if w != s:
                    dominators[w].append(s)
            continue
        survivors = reachable_set(graph, s, v)
        for w in range(1, n + 1):
            if w != v and w not in survivors:
                dominators[w].append(v)

    # the dominators of w form a chain; the deepest proper one has the most dominators
    idom = [0] * (n + 1)
    for w in range(1, n + 1):
        if w == s:
            continue
        proper = [v for v in dominators[w] if v != w]
        idom[w] = max(proper, key=lambda v: len(dominators[v]))
    return DominatorTree(s, idom)
