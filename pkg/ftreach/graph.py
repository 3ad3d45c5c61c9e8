"""Flow graphs, spanning trees, their text formats, and random instances."""

import logging
import random
from bisect import bisect_left
from collections import deque
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    TextIO,
    Tuple,
    Union,
)

from .errors import GraphFormatError, InputError, TreeFormatError

logger = logging.getLogger(__name__)

Arc = Tuple[int, int]
ArcSet = FrozenSet[Arc]
TextSource = Union[str, TextIO, Iterable[str]]

FORMATS = ("edgelist", "dot")


def _content_lines(text: TextSource) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, tokens) for every non-blank, non-comment line."""
    lines = text.splitlines() if isinstance(text, str) else text
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped.split()


def _to_int(token: str, line: int, error=InputError) -> int:
    try:
        return int(token)
    except ValueError:
        raise error(f"expected an integer, found '{token}'", line)


def _read_pair(tokens: List[str], line: int, error=InputError) -> Arc:
    if len(tokens) != 2:
        raise error(f"expected two vertex ids, found '{' '.join(tokens)}'", line)
    return _to_int(tokens[0], line, error), _to_int(tokens[1], line, error)


class FlowGraph:
    """A directed graph on vertices 1..n in which every vertex is reachable from s.

    Self-loops are dropped and duplicate arcs collapsed on construction. Out- and
    in-adjacency lists are sorted by vertex id and must not be modified.
    """

    def __init__(self, n: int, s: int, arcs: Iterable[Arc]):
        if n < 1:
            raise GraphFormatError("a flow graph needs at least one vertex")
        if not 1 <= s <= n:
            raise GraphFormatError(f"start vertex {s} out of range 1..{n}")

        succ: List[List[int]] = [[] for _ in range(n + 1)]
        total = 0
        self_loops = 0
        for u, v in arcs:
            total += 1
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"arc ({u}, {v}) has a vertex outside 1..{n}")
            if u == v:
                self_loops += 1
                continue
            succ[u].append(v)

        pred: List[List[int]] = [[] for _ in range(n + 1)]
        m = 0
        for u in range(1, n + 1):
            heads = sorted(set(succ[u]))
            succ[u] = heads
            m += len(heads)
            for v in heads:
                pred[v].append(u)

        self.n = n
        self.s = s
        self.m = m
        self.succ = succ
        self.pred = pred
        self.self_loops = self_loops
        self.duplicates = total - self_loops - m

        if self_loops:
            logger.warning("Dropped %d self-loop(s)", self_loops)
        if self.duplicates:
            logger.warning("Collapsed %d duplicate arc(s)", self.duplicates)

        seen = reachable_set(self, s)
        if len(seen) != n:
            missing = next(v for v in range(1, n + 1) if v not in seen)
            raise GraphFormatError(f"vertex {missing} unreachable from s")

        logger.debug("Built flow graph with n=%d, m=%d, s=%d", n, m, s)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def arcs(self) -> Iterator[Arc]:
        """Arcs in ascending (tail, head) order."""
        for u in range(1, self.n + 1):
            for v in self.succ[u]:
                yield u, v

    def has_arc(self, u: int, v: int) -> bool:
        heads = self.succ[u]
        i = bisect_left(heads, v)
        return i < len(heads) and heads[i] == v

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowGraph):
            return NotImplemented
        return self.n == other.n and self.s == other.s and self.succ == other.succ

    def __repr__(self) -> str:
        return f"FlowGraph(n={self.n}, m={self.m}, s={self.s})"


class SpanningTree:
    """An arborescence on all vertices of ``graph``, rooted at its start vertex.

    ``parent[v]`` is t(v); ``parent[s]`` is 0.
    """

    def __init__(self, graph: FlowGraph, parent: Union[Sequence[int], Dict[int, int]]):
        n, s = graph.n, graph.s
        if isinstance(parent, dict):
            table = [0] * (n + 1)
            for v, u in parent.items():
                if not 1 <= v <= n:
                    raise TreeFormatError(f"vertex {v} out of range 1..{n}")
                table[v] = u
        else:
            if len(parent) != n + 1:
                raise TreeFormatError(f"parent table must have {n + 1} entries")
            table = list(parent)

        if table[s] != 0:
            raise TreeFormatError(f"start vertex {s} cannot have a parent")
        for v in range(1, n + 1):
            if v == s:
                continue
            u = table[v]
            if u == 0:
                raise TreeFormatError(f"vertex {v} has no parent")
            if not 1 <= u <= n or not graph.has_arc(u, v):
                raise TreeFormatError(f"arc ({u}, {v}) not in G")

        # 0 = unvisited, 1 = on the current walk, 2 = known to reach s
        state = [0] * (n + 1)
        state[s] = 2
        for v in range(1, n + 1):
            walk = []
            x = v
            while state[x] == 0:
                state[x] = 1
                walk.append(x)
                x = table[x]
            if state[x] == 1:
                raise TreeFormatError(f"cycle detected through vertex {x}")
            for y in walk:
                state[y] = 2

        self.graph = graph
        self.root = s
        self.parent = table

    def arcs(self) -> Iterator[Arc]:
        """Tree arcs (t(v), v) in ascending child order."""
        for v in range(1, self.graph.n + 1):
            if v != self.root:
                yield self.parent[v], v

    def parent_map(self) -> Dict[int, int]:
        return {v: u for u, v in self.arcs()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpanningTree):
            return NotImplemented
        return self.root == other.root and self.parent == other.parent

    def __repr__(self) -> str:
        return f"SpanningTree({self.parent_map()})"


def parse_flowgraph(text: TextSource) -> FlowGraph:
    """Parse the ``.fg`` format: '<n> <m>', 's <vertex>', then m lines '<tail> <head>'."""
    lines = _content_lines(text)

    header = next(lines, None)
    if header is None:
        raise GraphFormatError("empty input, expected '<n> <m>'")
    number, tokens = header
    if len(tokens) != 2:
        raise GraphFormatError("expected '<n> <m>'", number)
    n = _to_int(tokens[0], number, GraphFormatError)
    m = _to_int(tokens[1], number, GraphFormatError)
    if n < 1 or m < 0:
        raise GraphFormatError(f"invalid header '{n} {m}'", number)

    start = next(lines, None)
    if start is None:
        raise GraphFormatError("missing start line 's <vertex>'")
    number, tokens = start
    if len(tokens) != 2 or tokens[0] != "s":
        raise GraphFormatError("expected 's <vertex>'", number)
    s = _to_int(tokens[1], number, GraphFormatError)
    if not 1 <= s <= n:
        raise GraphFormatError(f"start vertex {s} out of range 1..{n}", number)

    arcs: List[Arc] = []
    for number, tokens in lines:
        if len(arcs) == m:
            raise GraphFormatError(f"more than {m} arc lines", number)
        u, v = _read_pair(tokens, number, GraphFormatError)
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex id out of range 1..{n}", number)
        arcs.append((u, v))
    if len(arcs) != m:
        raise GraphFormatError(f"expected {m} arc lines, found {len(arcs)}")

    return FlowGraph(n, s, arcs)


def parse_tree(text: TextSource, graph: FlowGraph) -> SpanningTree:
    """Parse the ``.tree`` format: n-1 lines '<parent> <child>'."""
    n = graph.n
    parent = [0] * (n + 1)
    count = 0
    for number, tokens in _content_lines(text):
        u, v = _read_pair(tokens, number, TreeFormatError)
        if not (1 <= u <= n and 1 <= v <= n):
            raise TreeFormatError(f"vertex id out of range 1..{n}", number)
        if not graph.has_arc(u, v):
            raise TreeFormatError(f"arc ({u}, {v}) not in G", number)
        if v == graph.s:
            raise TreeFormatError(f"start vertex {v} cannot have a parent", number)
        if parent[v]:
            raise TreeFormatError(f"vertex {v} has two parents", number)
        parent[v] = u
        count += 1
    if count != n - 1:
        raise TreeFormatError(f"expected {n - 1} tree arcs, found {count}")
    return SpanningTree(graph, parent)


def parse_arcset(text: TextSource, graph: FlowGraph) -> ArcSet:
    """Parse an arc set: an optional count line, then lines '<tail> <head>'.

    The count line is what ``ftreach validset`` prints first, so its output can
    be fed back unchanged. Every arc must belong to ``graph``.
    """
    arcs: Set[Arc] = set()
    declared: Optional[int] = None
    first = True
    for number, tokens in _content_lines(text):
        if first and len(tokens) == 1:
            declared = _to_int(tokens[0], number)
            first = False
            continue
        first = False
        u, v = _read_pair(tokens, number)
        if not (1 <= u <= graph.n and 1 <= v <= graph.n) or not graph.has_arc(u, v):
            raise InputError(f"arc ({u}, {v}) not in G", number)
        arcs.add((u, v))
    if declared is not None and declared != len(arcs):
        raise InputError(f"arc set declares {declared} arcs but lists {len(arcs)}")
    return frozenset(arcs)


def serialize(
    graph: FlowGraph, tree: Optional[SpanningTree] = None, fmt: str = "edgelist"
) -> str:
    """Render a graph as ``.fg`` text or as DOT, tree arcs in bold."""
    if fmt == "edgelist":
        lines = [f"{graph.n} {graph.m}", f"s {graph.s}"]
        lines.extend(f"{u} {v}" for u, v in graph.arcs())
        return "\n".join(lines) + "\n"

    if fmt == "dot":
        tree_arcs = set(tree.arcs()) if tree is not None else set()
        lines = ["digraph G {"]
        for v in graph.vertices():
            if v == graph.s:
                lines.append(f"  {v} [shape=doublecircle];")
            else:
                lines.append(f"  {v};")
        for u, v in graph.arcs():
            if (u, v) in tree_arcs:
                lines.append(f"  {u} -> {v} [style=bold];")
            else:
                lines.append(f"  {u} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    raise InputError(f"unknown format '{fmt}' (expected one of {', '.join(FORMATS)})")


def serialize_tree(tree: SpanningTree) -> str:
    """Render a tree in the ``.tree`` format."""
    return "".join(f"{u} {v}\n" for u, v in tree.arcs())


def reachable_set(
    graph: FlowGraph, source: int, forbidden: Optional[int] = None
) -> Set[int]:
    """Vertices reachable from ``source`` along paths that avoid ``forbidden``."""
    if source == forbidden:
        raise InputError(f"source vertex {source} is the forbidden vertex")
    seen = {source}
    queue = deque([source])
    succ = graph.succ
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v != forbidden and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def extract_spanning_tree(
    graph: FlowGraph, strategy: str = "bfs", seed: int = 0
) -> SpanningTree:
    """Build a spanning tree rooted at s by breadth-first, depth-first or random search.

    Neighbours are scanned in ascending id; ``random`` grows the tree from a
    uniformly chosen frontier arc at each step and is deterministic per seed.
    """
    n, s, succ = graph.n, graph.s, graph.succ
    parent = [0] * (n + 1)
    visited = [False] * (n + 1)
    visited[s] = True

    if strategy == "bfs":
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in succ[u]:
                if not visited[v]:
                    visited[v] = True
                    parent[v] = u
                    queue.append(v)

    elif strategy == "dfs":
        stack = [(s, iter(succ[s]))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if not visited[v]:
                    visited[v] = True
                    parent[v] = u
                    stack.append((v, iter(succ[v])))
                    break
            else:
                stack.pop()

    elif strategy == "random":
        rng = random.Random(seed)
        frontier = [(s, v) for v in succ[s]]
        while frontier:
            i = rng.randrange(len(frontier))
            frontier[i], frontier[-1] = frontier[-1], frontier[i]
            u, v = frontier.pop()
            if visited[v]:
                continue
            visited[v] = True
            parent[v] = u
            frontier.extend((v, w) for w in succ[v] if not visited[w])

    else:
        raise InputError(f"unknown tree strategy '{strategy}'")

    return SpanningTree(graph, parent)


def random_flowgraph(n: int, m: int, seed: int) -> FlowGraph:
    """A random flow graph with exactly n vertices and m arcs, start vertex 1.

    A random arborescence comes first, so every vertex is reachable; the
    remaining m-(n-1) arcs are distinct random non-loop arcs.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    capacity = n * (n - 1)
    if m < n - 1:
        raise InputError(f"m={m} is less than n-1={n - 1}")
    if m > capacity:
        raise InputError(f"m={m} exceeds the simple-digraph capacity n(n-1)={capacity}")

    rng = random.Random(seed)
    order = list(range(2, n + 1))
    rng.shuffle(order)
    placed = [1]
    arcs: Set[Arc] = set()
    for v in order:
        arcs.add((rng.choice(placed), v))
        placed.append(v)

    extra = m - (n - 1)
    if extra > (capacity - (n - 1)) // 2:
        rest = [
            (u, v)
            for u in range(1, n + 1)
            for v in range(1, n + 1)
            if u != v and (u, v) not in arcs
        ]
        arcs.update(rng.sample(rest, extra))
    else:
        while len(arcs) < m:
            u = rng.randint(1, n)
            v = rng.randint(1, n)
            if u != v:
                arcs.add((u, v))

    return FlowGraph(n, 1, sorted(arcs))


def restrict(graph: FlowGraph, arcs: Iterable[Arc]) -> FlowGraph:
    """The subgraph (V, arcs) of ``graph`` with the same start vertex."""
    return FlowGraph(graph.n, graph.s, arcs)
