"""Low-high orders of a dominator tree: construction, checking and a brute-force oracle.

A low-high order is a preorder of D in which every vertex v that is not
entered by the arc (d(v), v) has two entering arcs (u, v) and (w, v) with
u < v < w and w outside the subtree of v.
"""

import heapq
import itertools
import logging
from typing import Dict, Iterator, List, Optional, Sequence

from .dominators import DominatorTree, dominator_tree
from .errors import ConsistencyError, SizeGuardError, Verdict
from .graph import Arc, FlowGraph

logger = logging.getLogger(__name__)

NOT_A_PREORDER = "not-a-preorder"
MISSING_LOW_ARC = "missing-low-arc"
MISSING_HIGH_ARC = "missing-high-arc"

# tree parent of a child that hangs from the right end of its sibling group
RIGHT_END = 0


class LowHighOrder:
    """A total order on the vertices; ``position[v]`` is the 1-based rank of v.

    Any sequence is accepted; ``check_low_high`` decides whether it is a
    low-high order.
    """

    def __init__(self, n: int, sequence: Sequence[int]):
        self.n = n
        self.sequence = tuple(sequence)
        position = [0] * (n + 1)
        bijective = len(self.sequence) == n
        for rank, v in enumerate(self.sequence, start=1):
            if not 1 <= v <= n or position[v]:
                bijective = False
                continue
            position[v] = rank
        self.position = position
        self.bijective = bijective

    def rank(self, v: int) -> int:
        return self.position[v]

    def __iter__(self) -> Iterator[int]:
        return iter(self.sequence)

    def __len__(self) -> int:
        return len(self.sequence)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LowHighOrder):
            return NotImplemented
        return self.sequence == other.sequence

    def __repr__(self) -> str:
        return f"LowHighOrder({list(self.sequence)})"


class DerivedGraph:
    """Arcs of G re-targeted at the level of each vertex's siblings in D.

    An arc (u, v) becomes (u, v) if u = d(v), (c, v) if c is the child of d(v)
    whose subtree holds u, and is dropped if u is a proper descendant of v.
    """

    def __init__(self, n: int, arcs: List[Arc], free: List[bool]):
        self.n = n
        self.arcs = arcs
        # free[v]: (d(v), v) is an arc
        self.free = free
        tails: List[List[int]] = [[] for _ in range(n + 1)]
        for u, v in arcs:
            tails[v].append(u)
        self.tails = tails

    def __iter__(self) -> Iterator[Arc]:
        return iter(self.arcs)

    def __len__(self) -> int:
        return len(self.arcs)


def derived_graph(graph: FlowGraph, tree: DominatorTree) -> DerivedGraph:
    """Compute the derived arcs; each tail is found as a level ancestor in D."""
    n, s = graph.n, graph.s
    idom = tree.idom
    depth = tree.depth()
    path = [0] * (n + 1)
    derived = set()
    free = [False] * (n + 1)

    for u in tree.order:
        path[depth[u]] = u
        for v in graph.succ[u]:
            if v == s:
                continue
            if u == idom[v]:
                derived.add((u, v))
                free[v] = True
            elif not tree.is_descendant(v, u):
                derived.add((path[depth[v]], v))

    arcs = sorted(derived)
    logger.debug("Derived graph has %d arcs", len(arcs))
    return DerivedGraph(n, arcs, free)


def check_low_high(
    graph: FlowGraph, tree: DominatorTree, order: LowHighOrder
) -> Verdict:
    """Check that ``order`` is a preorder of D with the low-high property.

    Reports the first violating vertex (ascending id) and the failed clause.
    """
    n, s = graph.n, graph.s
    if not order.bijective or order.n != n:
        return Verdict.failed(None, NOT_A_PREORDER)
    position = order.position
    if position[s] != 1:
        return Verdict.failed(s, NOT_A_PREORDER)

    idom = tree.idom
    lowest = position[:]
    highest = position[:]
    for v in reversed(tree.order):
        if v != s:
            p = idom[v]
            lowest[p] = min(lowest[p], lowest[v])
            highest[p] = max(highest[p], highest[v])
    for v in range(1, n + 1):
        if v != s and position[idom[v]] > position[v]:
            return Verdict.failed(v, NOT_A_PREORDER)
        if lowest[v] != position[v] or highest[v] - lowest[v] + 1 != tree.size[v]:
            return Verdict.failed(v, NOT_A_PREORDER)

    for v in range(1, n + 1):
        if v == s or graph.has_arc(idom[v], v):
            continue
        here = position[v]
        has_low = False
        has_high = False
        for u in graph.pred[v]:
            if position[u] < here:
                has_low = True
            elif position[u] > here and not tree.is_descendant(v, u):
                has_high = True
        if not has_low:
            return Verdict.failed(v, MISSING_LOW_ARC)
        if not has_high:
            return Verdict.failed(v, MISSING_HIGH_ARC)

    return Verdict.passed()


def construct_low_high(graph: FlowGraph, tree: DominatorTree) -> LowHighOrder:
    """Build a low-high order of D, one sibling group at a time.

    The children of each vertex p are ordered using only the derived arcs that
    enter them: a child entered from p may go anywhere, every other child
    needs a derived in-neighbour on each side. The result is self-checked.
    """
    derived = derived_graph(graph, tree)
    children_order: Dict[int, List[int]] = {}
    for p in tree.order:
        group = tree.children[p]
        if group:
            free = {v: derived.free[v] for v in group}
            inn = {v: sorted({u for u in derived.tails[v] if u != p}) for v in group}
            children_order[p] = _order_siblings(p, group, free, inn)

    sequence = []
    stack = [graph.s]
    while stack:
        v = stack.pop()
        sequence.append(v)
        stack.extend(reversed(children_order.get(v, ())))
    order = LowHighOrder(graph.n, sequence)

    verdict = check_low_high(graph, tree, order)
    if not verdict:
        raise ConsistencyError(
            f"constructed order fails the low-high check at vertex "
            f"{verdict.vertex} ({verdict.reason})"
        )
    return order


def _order_siblings(
    p: int, group: List[int], free: Dict[int, bool], inn: Dict[int, List[int]]
) -> List[int]:
    """Order the children of p so that each non-free child sits between two in-neighbours.

    ``inn[v]`` lists the derived in-neighbours of v among its siblings.
    """
    placer = _SiblingPlacer(p, group, free, inn)
    order = placer.run()
    if placer.rebuilds:
        logger.debug(
            "Placed the %d children of %d with %d tree rebuild(s)",
            len(group), p, placer.rebuilds,
        )
    return order


class _SiblingPlacer:
    """Places the children of one vertex from left to right.

    The unplaced children are kept in a spanning tree hung from the right end
    of the group: a free child may hang from the right end, any other child
    hangs from an unplaced in-neighbour. A child is placed once it is a leaf of
    that tree and is free or has a placed in-neighbour. Its tree parent, placed
    later, is then its in-neighbour on the right.

    Removing a leaf keeps every other child reachable from the right end. When
    no leaf is placeable the tree is rebuilt; among the placeable children, one
    deepest in the dominator tree of the unplaced children (rooted at the right
    end) dominates nothing there, so it can always be made a leaf.
    """

    def __init__(self, p: int, group: List[int], free: Dict[int, bool], inn: Dict[int, List[int]]):
        self.p = p
        self.group = list(group)
        self.free = free
        self.inn = inn
        out: Dict[int, List[int]] = {v: [] for v in group}
        for v in group:
            for u in inn[v]:
                out[u].append(v)
        self.out = out
        self.remaining = set(group)
        self.has_left = {v: free[v] for v in group}
        self.parent: Dict[int, int] = {}
        self.count: Dict[int, int] = {}
        self.heap: List[int] = []
        self.rebuilds = 0

    def run(self) -> List[int]:
        result = []
        self._rebuild()
        while self.remaining:
            if not self.heap:
                self.rebuilds += 1
                self._rebuild()
            v = heapq.heappop(self.heap)
            if v in self.remaining and not self.count[v] and self.has_left[v]:
                self._place(v)
                result.append(v)
        return result

    def _place(self, v: int):
        self.remaining.discard(v)
        q = self.parent[v]
        if q != RIGHT_END:
            self.count[q] -= 1
            if not self.count[q] and self.has_left[q]:
                heapq.heappush(self.heap, q)
        for w in self.out[v]:
            if w in self.remaining and not self.has_left[w]:
                self.has_left[w] = True
                if not self.count[w]:
                    heapq.heappush(self.heap, w)

    def _rebuild(self):
        parent = self._search()
        if parent is None:
            raise ConsistencyError(
                f"children of vertex {self.p} are not all reachable from a free sibling"
            )
        if not self._install(parent):
            x = self._deepest_placeable()
            parent = self._search(skip=x)
            anchor = RIGHT_END if self.free[x] else next(
                (u for u in self.inn[x] if u in self.remaining), None
            )
            if parent is None or anchor is None:
                raise ConsistencyError(
                    f"cannot place the children of vertex {self.p} in a low-high order"
                )
            parent[x] = anchor
            self._install(parent)

    def _search(self, skip: Optional[int] = None) -> Optional[Dict[int, int]]:
        """A spanning tree of the unplaced children, or None if some child is cut off.

        Children that already have a placed in-neighbour are expanded last, so
        that as many of them as possible end up as leaves.
        """
        parent: Dict[int, int] = {}
        plain: List[int] = []
        held: List[int] = []
        for v in self.group:
            if v in self.remaining and v != skip and self.free[v]:
                parent[v] = RIGHT_END
                held.append(v)
        while plain or held:
            v = plain.pop() if plain else held.pop()
            for w in self.out[v]:
                if w in self.remaining and w != skip and w not in parent:
                    parent[w] = v
                    (held if self.has_left[w] else plain).append(w)
        expected = len(self.remaining) - (skip is not None)
        return parent if len(parent) == expected else None

    def _install(self, parent: Dict[int, int]) -> bool:
        count = {v: 0 for v in self.remaining}
        for q in parent.values():
            if q != RIGHT_END:
                count[q] += 1
        self.parent = parent
        self.count = count
        self.heap = [v for v in self.remaining if not count[v] and self.has_left[v]]
        heapq.heapify(self.heap)
        return bool(self.heap)

    def _deepest_placeable(self) -> int:
        others = sorted(self.remaining)
        index = {v: i for i, v in enumerate(others, start=2)}
        arcs = [(1, index[v]) for v in others if self.free[v]]
        for u in others:
            arcs.extend((index[u], index[w]) for w in self.out[u] if w in self.remaining)
        depth = dominator_tree(FlowGraph(len(others) + 1, 1, arcs)).depth()
        return max(
            (v for v in others if self.has_left[v]),
            key=lambda v: (depth[index[v]], -v),
        )


def brute_force_low_high(
    graph: FlowGraph, tree: DominatorTree, max_n: int = 9
) -> Optional[LowHighOrder]:
    """The lexicographically first permutation that passes ``check_low_high``."""
    if graph.n > max_n:
        raise SizeGuardError(
            f"brute-force low-high search is limited to n <= {max_n}, got n={graph.n}"
        )
    s = graph.s
    others = [v for v in graph.vertices() if v != s]
    # a permutation not starting with s fails the check, so only these can pass
    for rest in itertools.permutations(others):
        order = LowHighOrder(graph.n, (s,) + rest)
        if check_low_high(graph, tree, order):
            return order
    return None
