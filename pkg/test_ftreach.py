#!/usr/bin/env python3
"""Unit tests for ftreach on small hand-checked flow graphs."""

import pytest

from ftreach.config import Config
from ftreach.divergent import TreePair, build_divergent_trees, check_divergent, pair_to_dot, root_path
from ftreach.dominators import dominator_tree, dominator_tree_naive, is_descendant
from ftreach.errors import (
    ChoiceUnavailable,
    ConsistencyError,
    GraphFormatError,
    InputError,
    SizeGuardError,
    TreeFormatError,
)
from ftreach.graph import (
    FlowGraph,
    SpanningTree,
    extract_spanning_tree,
    parse_arcset,
    parse_flowgraph,
    parse_tree,
    random_flowgraph,
    reachable_set,
    serialize,
    serialize_tree,
)
from ftreach.lowhigh import (
    MISSING_HIGH_ARC,
    NOT_A_PREORDER,
    LowHighOrder,
    _order_siblings,
    brute_force_low_high,
    check_low_high,
    construct_low_high,
    derived_graph,
)
from ftreach.validset import (
    brute_force_min_valid_set,
    classify,
    compute_valid_set,
    first_discrepancy,
    is_valid_set,
    lower_bound,
)

STAR = "3 2\ns 1\n1 2\n1 3\n"
DIAMOND = "4 5\ns 1\n1 2\n2 3\n1 3\n3 4\n2 4\n"
CHAIN = "3 2\ns 1\n1 2\n2 3\n"
DEEP = "4 4\ns 1\n1 2\n2 3\n1 4\n3 4\n"

DIAMOND_TREE = "1 2\n2 3\n3 4\n"
DIAMOND_OTHER_TREE = "1 2\n1 3\n2 4\n"


@pytest.fixture
def diamond():
    return parse_flowgraph(DIAMOND)


@pytest.fixture
def deep():
    return parse_flowgraph(DEEP)


def chain_graph():
    return parse_flowgraph(CHAIN)


# --- graph ------------------------------------------------------------------


def test_parse_flowgraph(diamond):
    assert (diamond.n, diamond.m, diamond.s) == (4, 5, 1)
    assert diamond.succ[2] == [3, 4]
    assert diamond.pred[4] == [2, 3]
    assert list(diamond.arcs()) == [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]
    assert diamond.has_arc(2, 4)
    assert not diamond.has_arc(4, 2)


def test_parse_flowgraph_skips_comments_and_blank_lines():
    graph = parse_flowgraph("# star\n3 2\n\ns 1\n1 2  \n# tail head\n1 3\n")
    assert graph == parse_flowgraph(STAR)


def test_self_loops_and_duplicates_are_dropped():
    graph = parse_flowgraph("3 4\ns 1\n1 2\n1 2\n2 2\n2 3\n")
    assert graph.m == 2
    assert graph.self_loops == 1
    assert graph.duplicates == 1
    assert list(graph.arcs()) == [(1, 2), (2, 3)]


def test_unreachable_vertex_is_rejected():
    with pytest.raises(GraphFormatError, match="vertex 3 unreachable from s"):
        parse_flowgraph("3 1\ns 1\n1 2\n")


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty input"),
        ("x 2\n", "line 1"),
        ("4 5 6\n", "line 1"),
        ("3 2\n1 2\n", "line 2"),
        ("3 2\ns 9\n1 2\n1 3\n", "out of range"),
        ("2 1\ns 1\n1 5\n", "line 3"),
        ("4 5\ns 1\n1 2\n", "expected 5 arc lines, found 1"),
        ("2 1\ns 1\n1 2\n2 1\n", "more than 1 arc lines"),
        ("2 1\ns 1\n1 two\n", "expected an integer"),
    ],
)
def test_malformed_flowgraph(text, message):
    with pytest.raises(GraphFormatError, match=message):
        parse_flowgraph(text)


def test_parse_tree(diamond):
    tree = parse_tree(DIAMOND_TREE, diamond)
    assert tree.parent_map() == {2: 1, 3: 2, 4: 3}
    assert list(tree.arcs()) == [(1, 2), (2, 3), (3, 4)]
    other = parse_tree(DIAMOND_OTHER_TREE, diamond)
    assert other.parent_map() == {2: 1, 3: 1, 4: 2}


@pytest.mark.parametrize(
    "text, message",
    [
        ("1 2\n2 3\n4 4\n", r"arc \(4, 4\) not in G"),
        ("1 2\n2 3\n1 3\n", "vertex 3 has two parents"),
        ("1 2\n2 3\n", "expected 3 tree arcs, found 2"),
        ("1 2\n2 3\n3 9\n", "out of range"),
    ],
)
def test_malformed_tree(diamond, text, message):
    with pytest.raises(TreeFormatError, match=message):
        parse_tree(text, diamond)


def test_tree_cannot_enter_start_vertex():
    graph = parse_flowgraph("2 2\ns 1\n1 2\n2 1\n")
    with pytest.raises(TreeFormatError, match="start vertex 1 cannot have a parent"):
        parse_tree("1 2\n2 1\n", graph)


def test_spanning_tree_rejects_cycles():
    graph = parse_flowgraph("3 4\ns 1\n1 2\n2 3\n3 2\n1 3\n")
    with pytest.raises(TreeFormatError, match="cycle detected through vertex 2"):
        SpanningTree(graph, {2: 3, 3: 2})


def test_parse_arcset(diamond):
    assert parse_arcset("1 3\n2 4\n", diamond) == {(1, 3), (2, 4)}
    assert parse_arcset("2\n1 3\n2 4\n", diamond) == {(1, 3), (2, 4)}
    assert parse_arcset("0\n", diamond) == frozenset()
    with pytest.raises(InputError, match=r"arc \(4, 1\) not in G"):
        parse_arcset("4 1\n", diamond)
    with pytest.raises(InputError, match="declares 3 arcs but lists 2"):
        parse_arcset("3\n1 3\n2 4\n", diamond)


@pytest.mark.parametrize("text", [STAR, DIAMOND, DEEP])
def test_edgelist_reparses_equal(text):
    graph = parse_flowgraph(text)
    assert parse_flowgraph(serialize(graph)) == graph


def test_dot_output():
    star = parse_flowgraph(STAR)
    assert serialize(star, fmt="dot").count("->") == 2

    diamond = parse_flowgraph(DIAMOND)
    tree = parse_tree(DIAMOND_TREE, diamond)
    dot = serialize(diamond, tree, "dot")
    assert dot.startswith("digraph G {")
    assert "1 [shape=doublecircle];" in dot
    assert dot.count("[style=bold]") == 3

    with pytest.raises(InputError, match="unknown format"):
        serialize(star, fmt="gml")


def test_reachable_set(diamond, deep):
    assert reachable_set(diamond, 1, 2) == {1, 3, 4}
    assert reachable_set(diamond, 1) == {1, 2, 3, 4}
    assert reachable_set(deep, 1, 2) == {1, 4}
    with pytest.raises(InputError):
        reachable_set(diamond, 1, 1)


def test_extract_spanning_tree(diamond):
    star = parse_flowgraph(STAR)
    assert extract_spanning_tree(star, "bfs").parent_map() == {2: 1, 3: 1}
    for strategy in ("bfs", "dfs", "random"):
        assert extract_spanning_tree(chain_graph(), strategy, 3).parent_map() == {2: 1, 3: 2}

    assert extract_spanning_tree(diamond, "bfs").parent_map() == {2: 1, 3: 1, 4: 2}
    assert extract_spanning_tree(diamond, "dfs").parent_map() == {2: 1, 3: 2, 4: 3}
    assert extract_spanning_tree(diamond, "random", 5) == extract_spanning_tree(diamond, "random", 5)

    with pytest.raises(InputError, match="unknown tree strategy"):
        extract_spanning_tree(diamond, "widest")


def test_serialize_tree_reparses(diamond):
    tree = parse_tree(DIAMOND_TREE, diamond)
    assert serialize_tree(tree) == DIAMOND_TREE
    assert parse_tree(serialize_tree(tree), diamond) == tree


def test_random_flowgraph():
    single = random_flowgraph(1, 0, 7)
    assert (single.n, single.m) == (1, 0)

    tree_only = random_flowgraph(5, 4, 1)
    assert tree_only.m == 4
    assert all(len(tree_only.pred[v]) == 1 for v in range(2, 6))

    assert random_flowgraph(20, 60, 11) == random_flowgraph(20, 60, 11)
    assert random_flowgraph(20, 60, 11).m == 60
    assert random_flowgraph(4, 12, 3).m == 12

    with pytest.raises(InputError, match="less than n-1"):
        random_flowgraph(5, 3, 1)
    with pytest.raises(InputError, match="capacity"):
        random_flowgraph(3, 7, 1)


# --- dominators ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text, expected",
    [
        (STAR, {2: 1, 3: 1}),
        (DIAMOND, {2: 1, 3: 1, 4: 1}),
        (CHAIN, {2: 1, 3: 2}),
        (DEEP, {2: 1, 3: 2, 4: 1}),
        ("5 7\ns 1\n1 2\n1 3\n2 4\n3 4\n4 5\n5 2\n5 3\n", {2: 1, 3: 1, 4: 1, 5: 4}),
    ],
)
def test_dominator_tree(text, expected):
    graph = parse_flowgraph(text)
    assert dominator_tree(graph).idom_map() == expected
    assert dominator_tree_naive(graph).idom_map() == expected


def test_dominators_with_other_start_vertex():
    graph = FlowGraph(3, 2, [(2, 1), (1, 3), (2, 3)])
    assert dominator_tree(graph).idom_map() == {1: 2, 3: 2}
    assert dominator_tree(graph) == dominator_tree_naive(graph)


def test_single_vertex_dominator_tree():
    tree = dominator_tree(FlowGraph(1, 1, []))
    assert tree.idom_map() == {}
    assert tree.dominators_of(1) == [1]


def test_long_chain_does_not_recurse():
    n = 5000
    graph = FlowGraph(n, 1, [(v, v + 1) for v in range(1, n)])
    tree = dominator_tree(graph)
    assert tree.idom[n] == n - 1
    assert tree.is_descendant(1, n)


def test_descendants_and_dominator_chains(deep):
    tree = dominator_tree(deep)
    assert is_descendant(tree, 2, 3)
    assert not is_descendant(tree, 2, 4)
    assert tree.is_descendant(2, 2)
    assert tree.is_descendant(1, 4)
    assert tree.dominators_of(3) == [3, 2, 1]
    assert tree.d(4) == 1
    assert tree.depth()[3] == 2


# --- low-high orders ------------------------------------------------------------


def test_derived_graph(diamond, deep):
    derived = derived_graph(diamond, dominator_tree(diamond))
    assert derived.arcs == sorted(diamond.arcs())
    assert derived.free[2] and derived.free[3] and not derived.free[4]

    derived = derived_graph(deep, dominator_tree(deep))
    assert derived.arcs == [(1, 2), (1, 4), (2, 3), (2, 4)]

    chain = chain_graph()
    assert derived_graph(chain, dominator_tree(chain)).arcs == [(1, 2), (2, 3)]


def test_check_low_high(diamond, deep):
    tree = dominator_tree(diamond)
    assert check_low_high(diamond, tree, LowHighOrder(4, [1, 2, 4, 3]))

    verdict = check_low_high(diamond, tree, LowHighOrder(4, [1, 2, 3, 4]))
    assert not verdict
    assert (verdict.vertex, verdict.reason) == (4, MISSING_HIGH_ARC)

    chain = chain_graph()
    assert check_low_high(chain, dominator_tree(chain), LowHighOrder(3, [1, 2, 3]))

    deep_tree = dominator_tree(deep)
    for sequence in ([1, 3, 2, 4], [1, 2, 4, 3], [2, 1, 3, 4], [1, 2, 2, 4], [1, 2, 3]):
        verdict = check_low_high(deep, deep_tree, LowHighOrder(4, sequence))
        assert not verdict
        assert verdict.reason == NOT_A_PREORDER


def test_construct_low_high(diamond, deep):
    assert list(construct_low_high(diamond, dominator_tree(diamond))) == [1, 2, 4, 3]
    assert list(construct_low_high(deep, dominator_tree(deep))) == [1, 2, 3, 4]
    chain = chain_graph()
    assert list(construct_low_high(chain, dominator_tree(chain))) == [1, 2, 3]
    star = parse_flowgraph(STAR)
    assert list(construct_low_high(star, dominator_tree(star))) == [1, 2, 3]


def test_construct_low_high_on_a_five_cycle():
    # 1 <-> 2 <-> 3 <-> 4 <-> 5 <-> 1: vertices 3 and 4 each sit between two siblings
    arcs = [(1, 2), (2, 1), (2, 3), (3, 2), (3, 4), (4, 3), (4, 5), (5, 4), (5, 1), (1, 5)]
    graph = FlowGraph(5, 1, arcs)
    tree = dominator_tree(graph)
    order = construct_low_high(graph, tree)
    assert check_low_high(graph, tree, order)
    assert brute_force_low_high(graph, tree) is not None


GADGET_ARCS = [
    (1, 2), (1, 4), (2, 5), (2, 7), (2, 12), (3, 4), (3, 8), (4, 1), (4, 3), (4, 6),
    (6, 10), (6, 11), (6, 12), (7, 2), (7, 5), (7, 6), (7, 12), (8, 5), (8, 6), (8, 9),
    (9, 2), (9, 5), (9, 10), (10, 2), (10, 5), (10, 7), (10, 11), (11, 1), (11, 10), (12, 8),
]


def test_construct_low_high_on_a_gadget():
    graph = FlowGraph(12, 1, GADGET_ARCS)
    tree = dominator_tree(graph)
    assert tree == dominator_tree_naive(graph)
    order = construct_low_high(graph, tree)
    assert check_low_high(graph, tree, order)
    assert order.sequence[0] == 1


def test_order_siblings():
    # 2 and 5 are entered from the parent; 3 and 4 are not
    free = {2: True, 3: False, 4: False, 5: True}
    inn = {2: [3], 3: [2, 4], 4: [3, 5], 5: [4]}
    assert _order_siblings(1, [2, 3, 4, 5], free, inn) == [2, 3, 4, 5]

    free = {2: True, 3: True, 4: False}
    assert _order_siblings(1, [2, 3, 4], free, {2: [], 3: [], 4: [2, 3]}) == [2, 4, 3]

    # no sibling is entered from the parent, so nothing can be first
    with pytest.raises(ConsistencyError):
        _order_siblings(1, [2, 3], {2: False, 3: False}, {2: [3], 3: [2]})



def test_brute_force_low_high(diamond):
    assert list(brute_force_low_high(diamond, dominator_tree(diamond))) == [1, 2, 4, 3]
    star = parse_flowgraph(STAR)
    assert list(brute_force_low_high(star, dominator_tree(star))) == [1, 2, 3]
    chain = chain_graph()
    assert list(brute_force_low_high(chain, dominator_tree(chain))) == [1, 2, 3]

    big = random_flowgraph(10, 20, 4)
    with pytest.raises(SizeGuardError):
        brute_force_low_high(big, dominator_tree(big))


def test_low_high_order_positions():
    order = LowHighOrder(4, [1, 2, 4, 3])
    assert order.rank(4) == 3
    assert order.bijective
    assert len(order) == 4
    assert not LowHighOrder(4, [1, 2, 2, 3]).bijective
    assert not LowHighOrder(4, [1, 2, 3]).bijective


# --- divergent spanning trees -------------------------------------------------------


def test_build_divergent_trees(diamond):
    tree = dominator_tree(diamond)
    order = construct_low_high(diamond, tree)
    pair = build_divergent_trees(diamond, tree, order)
    assert pair.b_map() == {2: 1, 3: 1, 4: 2}
    assert pair.r_map() == {2: 1, 3: 1, 4: 3}
    assert check_divergent(diamond, tree, pair)
    assert list(pair.arcs()) == [(1, 2), (1, 3), (2, 4), (3, 4)]


def test_divergent_trees_on_a_chain():
    chain = chain_graph()
    tree = dominator_tree(chain)
    pair = build_divergent_trees(chain, tree, construct_low_high(chain, tree))
    assert pair.b_map() == pair.r_map() == {2: 1, 3: 2}


def test_restricted_divergent_trees(diamond):
    tree = dominator_tree(diamond)
    order = LowHighOrder(4, [1, 2, 4, 3])
    allowed = {(1, 2), (1, 3), (2, 4), (3, 4)}
    pair = build_divergent_trees(diamond, tree, order, allowed)
    assert pair.b_map() == {2: 1, 3: 1, 4: 2}
    assert pair.r_map() == {2: 1, 3: 1, 4: 3}

    # with only the tree arcs, 4 (scanned before 3) has no allowed in-neighbour before it
    tree_arcs = {(1, 2), (2, 3), (3, 4)}
    with pytest.raises(ChoiceUnavailable) as excinfo:
        build_divergent_trees(diamond, tree, order, tree_arcs)
    assert excinfo.value.vertex == 4


def test_check_divergent(diamond):
    tree = dominator_tree(diamond)
    same = TreePair(1, [0, 0, 1, 2, 3], [0, 0, 1, 2, 3])
    verdict = check_divergent(diamond, tree, same, LowHighOrder(4, [1, 2, 4, 3]))
    assert not verdict
    assert verdict.vertex == 4
    assert verdict.reason == "paths also share [2, 3]"

    # without an order the scan follows the preorder of the dominator tree
    verdict = check_divergent(diamond, tree, same)
    assert (verdict.vertex, verdict.reason) == (3, "paths also share [2]")

    star = parse_flowgraph(STAR)
    assert check_divergent(star, dominator_tree(star), TreePair(1, [0, 0, 1, 1], [0, 0, 1, 1]))

    missing = TreePair(1, [0, 0, 1, 1, 1], [0, 0, 1, 1, 3])
    verdict = check_divergent(diamond, tree, missing)
    assert verdict.vertex == 4
    assert "not an arc of G in B" in verdict.reason


def test_root_path():
    assert root_path([0, 0, 1, 2, 3], 4, 1) == [4, 3, 2, 1]
    assert root_path([0, 0, 1, 2, 3], 1, 1) == [1]
    assert root_path([0, 0, 3, 2], 2, 1) is None


def test_pair_to_dot(diamond):
    tree = dominator_tree(diamond)
    pair = build_divergent_trees(diamond, tree, construct_low_high(diamond, tree))
    dot = pair_to_dot(diamond, pair)
    assert "1 -> 2 [style=bold];" in dot
    assert "2 -> 4 [color=blue];" in dot
    assert "3 -> 4 [color=red];" in dot
    assert "  2 -> 3;" in dot


# --- valid sets ----------------------------------------------------------------------


def _instance(graph_text, tree_text):
    graph = parse_flowgraph(graph_text)
    tree = parse_tree(tree_text, graph)
    dom = dominator_tree(graph)
    return graph, tree, dom, construct_low_high(graph, dom)


def test_valid_set_on_diamond():
    graph, tree, dom, order = _instance(DIAMOND, DIAMOND_TREE)
    assert classify(graph, tree, dom, order) == {2: "1", 3: "2", 4: "3a"}
    assert compute_valid_set(graph, tree, dom, order) == {(1, 3), (2, 4)}
    assert lower_bound(tree, dom) == 2


def test_valid_set_on_diamond_with_other_tree():
    graph, tree, dom, order = _instance(DIAMOND, DIAMOND_OTHER_TREE)
    assert classify(graph, tree, dom, order) == {2: "1", 3: "1", 4: "3b"}
    assert compute_valid_set(graph, tree, dom, order) == {(3, 4)}
    assert lower_bound(tree, dom) == 1


@pytest.mark.parametrize("text", [STAR, CHAIN])
def test_valid_set_is_empty_when_tree_is_dominator_tree(text):
    graph = parse_flowgraph(text)
    tree = extract_spanning_tree(graph, "bfs")
    dom = dominator_tree(graph)
    assert compute_valid_set(graph, tree, dom, construct_low_high(graph, dom)) == frozenset()
    assert lower_bound(tree, dom) == 0


def test_is_valid_set(diamond):
    tree = parse_tree(DIAMOND_TREE, diamond)
    assert is_valid_set(diamond, tree, {(1, 3), (2, 4)})
    assert not is_valid_set(diamond, tree, {(1, 3)})
    assert first_discrepancy(diamond, tree, {(1, 3)}) == (4, 1, 3)
    assert first_discrepancy(diamond, tree, {(1, 3), (2, 4)}) is None

    non_tree = set(diamond.arcs()) - set(tree.arcs())
    assert is_valid_set(diamond, tree, non_tree)

    with pytest.raises(InputError, match=r"arc \(4, 1\) not in G"):
        is_valid_set(diamond, tree, {(4, 1)})


def test_brute_force_min_valid_set(diamond):
    assert brute_force_min_valid_set(diamond, parse_tree(DIAMOND_TREE, diamond)) == {(1, 3), (2, 4)}
    assert brute_force_min_valid_set(diamond, parse_tree(DIAMOND_OTHER_TREE, diamond)) == {(3, 4)}
    chain = chain_graph()
    assert brute_force_min_valid_set(chain, extract_spanning_tree(chain)) == frozenset()

    dense = random_flowgraph(8, 40, 1)
    with pytest.raises(SizeGuardError):
        brute_force_min_valid_set(dense, extract_spanning_tree(dense))


def test_valid_set_is_deterministic():
    graph = random_flowgraph(30, 120, 9)
    tree = extract_spanning_tree(graph, "random", 9)
    results = []
    for _ in range(2):
        dom = dominator_tree(graph)
        results.append(compute_valid_set(graph, tree, dom, construct_low_high(graph, dom)))
    assert results[0] == results[1]


# --- config ----------------------------------------------------------------------------


def test_config_defaults(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = Config()
    assert config.get("format") == "edgelist"
    assert config.get("naive_limit") == 10
    assert config.parse_strategy() == ("bfs", 0)
    assert config.parse_strategy("random:7") == ("random", 7)
    assert config.parse_strategy("DFS") == ("dfs", 0)
    with pytest.raises(InputError):
        config.parse_strategy("widest")
    with pytest.raises(InputError):
        config.parse_strategy("random:x")


def test_config_file_is_found_in_parent_directory(tmp_path, monkeypatch):
    (tmp_path / ".ftreach.json").write_text('{"tree_strategy": "dfs", "seed": 5}')
    nested = tmp_path / "a" / "b"
    nested.mkdir(parents=True)
    monkeypatch.chdir(nested)
    config = Config()
    assert config.parse_strategy() == ("dfs", 5)


def test_bad_config_file_keeps_defaults(tmp_path, caplog):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    config = Config(str(path))
    assert config.get("format") == "edgelist"
    assert "Could not load config file" in caplog.text


def test_config_integers(tmp_path):
    path = tmp_path / "limits.json"
    path.write_text('{"naive_limit": "12", "brute_force_max_n": "many"}')
    config = Config(str(path))
    assert config.get_int("naive_limit", 10) == 12
    assert config.get_int("seed", 3) == 0
    with pytest.raises(InputError, match="brute_force_max_n"):
        config.get_int("brute_force_max_n", 9)
