"""Main CLI interface for ftreach."""

import functools
import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import Iterable

import click

from .config import Config
from .divergent import build_divergent_trees, check_divergent, pair_to_dot
from .dominators import dominator_tree, dominator_tree_naive
from .errors import ChoiceUnavailable, ConsistencyError, InputError
from .graph import (
    FORMATS,
    extract_spanning_tree,
    parse_arcset,
    parse_flowgraph,
    parse_tree,
    random_flowgraph,
    serialize,
    serialize_tree,
)
from .lowhigh import LowHighOrder, brute_force_low_high, check_low_high, construct_low_high
from .validset import (
    brute_force_min_valid_set,
    classify,
    compute_valid_set,
    first_discrepancy,
    lower_bound,
)

logger = logging.getLogger(__name__)


class ExitStatus(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 1
    INPUT_ERROR = 2
    INTERNAL_ERROR = 3
    # 128 + SIGINT
    INTERRUPTED = 130


class ClickHandler(logging.Handler):
    """Send log records to standard error through click."""

    def emit(self, record):
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def setup_logging(level: str):
    root = logging.getLogger("ftreach")
    if not any(isinstance(h, ClickHandler) for h in root.handlers):
        handler = ClickHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
    try:
        root.setLevel(str(level).upper())
    except ValueError:
        root.setLevel(logging.WARNING)
        logger.warning("Unknown log level %r, using WARNING", level)


def handle_errors(func):
    """Map every failure of a command to its exit status."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KeyboardInterrupt:
            click.echo("\nOperation cancelled.", err=True)
            sys.exit(ExitStatus.INTERRUPTED)
        except ChoiceUnavailable as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(ExitStatus.VERIFICATION_FAILED)
        except (InputError, OSError, UnicodeDecodeError) as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(ExitStatus.INPUT_ERROR)
        except ConsistencyError as e:
            click.echo(f"Internal error: {e}", err=True)
            sys.exit(ExitStatus.INTERNAL_ERROR)
        except Exception as e:
            logger.debug("Unexpected failure", exc_info=True)
            click.echo(f"Internal error: {e}", err=True)
            sys.exit(ExitStatus.INTERNAL_ERROR)

    return wrapper


def emit(lines: Iterable[str]):
    click.echo("".join(f"{line}\n" for line in lines), nl=False)


def read_graph(path: Path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_flowgraph(f)


def read_tree(path: Path, graph):
    with open(path, "r", encoding="utf-8") as f:
        return parse_tree(f, graph)


def read_arcset(path: Path, graph):
    with open(path, "r", encoding="utf-8") as f:
        return parse_arcset(f, graph)


existing_file = click.Path(exists=True, dir_okay=False, readable=True, path_type=Path)


@click.group(invoke_without_command=True)
@click.option("--config", help="Config file path (default: .ftreach.json)")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Diagnostics written to standard error (default: WARNING)",
)
@click.pass_context
def main(ctx, config, log_level):
    """ftreach - minimum valid arc sets for fault-tolerant reachability."""
    cfg = Config(config)
    setup_logging(log_level or cfg.get("log_level", "WARNING"))
    ctx.obj = cfg

    if ctx.invoked_subcommand is None:
        click.echo("ftreach - minimum valid arc sets for fault-tolerant reachability")
        click.echo("\nCommands:")
        click.echo("  dom        Print immediate dominators")
        click.echo("  lowhigh    Print a low-high order")
        click.echo("  check      Check a low-high order")
        click.echo("  validset   Print a minimum-size valid arc set")
        click.echo("  verify     Check an arc set for validity")
        click.echo("  divergent  Print two divergent spanning trees")
        click.echo("  gen        Generate a random flow graph")
        click.echo("\nUse --help with any command for more information.")


@main.command()
@click.argument("graph_file", type=existing_file)
@handle_errors
def dom(graph_file):
    """Print the immediate dominator of every vertex except s.

    One line 'v d(v)' per vertex, in ascending v.
    """
    graph = read_graph(graph_file)
    tree = dominator_tree(graph)
    emit(f"{v} {u}" for v, u in sorted(tree.idom_map().items()))


@main.command()
@click.argument("graph_file", type=existing_file)
@click.option("--oracle", is_flag=True, help="Also confirm by exhaustive search (small graphs only)")
@click.pass_obj
@handle_errors
def lowhigh(cfg, graph_file, oracle):
    """Print a low-high order of the dominator tree, one vertex per line."""
    graph = read_graph(graph_file)
    tree = dominator_tree(graph)
    order = construct_low_high(graph, tree)
    verdict = check_low_high(graph, tree, order)
    if not verdict:
        raise ConsistencyError(
            f"low-high self-check failed at vertex {verdict.vertex} ({verdict.reason})"
        )
    if oracle:
        witness = brute_force_low_high(graph, tree, cfg.get_int("brute_force_max_n", 9))
        if witness is None:
            raise ConsistencyError("exhaustive search found no low-high order")
        logger.info("Exhaustive search agrees: first order is %s", list(witness))
    emit(str(v) for v in order)


@main.command()
@click.argument("graph_file", type=existing_file)
@click.argument("order_file", type=existing_file)
@handle_errors
def check(graph_file, order_file):
    """Check that ORDER_FILE lists a low-high order of GRAPH_FILE's dominator tree."""
    graph = read_graph(graph_file)
    tree = dominator_tree(graph)
    with open(order_file, "r", encoding="utf-8") as f:
        tokens = [
            token
            for line in f
            if not line.lstrip().startswith("#")
            for token in line.split()
        ]
    try:
        sequence = [int(token) for token in tokens]
    except ValueError as e:
        raise InputError(f"order file must list vertex ids: {e}")

    verdict = check_low_high(graph, tree, LowHighOrder(graph.n, sequence))
    if verdict:
        click.echo("ok")
        return
    vertex = "-" if verdict.vertex is None else verdict.vertex
    click.echo(f"{vertex} {verdict.reason}")
    sys.exit(ExitStatus.VERIFICATION_FAILED)


@main.command()
@click.argument("graph_file", type=existing_file)
@click.argument("tree_file", type=existing_file)
@click.option("--explain", is_flag=True, help="Print the case applied to each vertex to stderr")
@click.option("--oracle", is_flag=True, help="Also confirm minimality by exhaustive search (few non-tree arcs only)")
@click.pass_obj
@handle_errors
def validset(cfg, graph_file, tree_file, explain, oracle):
    """Print a minimum-size valid arc set for GRAPH_FILE and spanning tree TREE_FILE.

    The first line is the number of arcs, then one 'x v' line per arc. The
    result is verified before it is printed.

    Examples:
      ftreach validset graph.fg graph.tree
      ftreach validset graph.fg graph.tree > extra.arcs
    """
    graph = read_graph(graph_file)
    spanning = read_tree(tree_file, graph)
    tree = dominator_tree(graph)

    if graph.n <= cfg.get_int("naive_limit", 10) and dominator_tree_naive(graph) != tree:
        raise ConsistencyError("dominator tree disagrees with the vertex-removal oracle")

    order = construct_low_high(graph, tree)
    arcs = compute_valid_set(graph, spanning, tree, order)

    if explain:
        for v, case in classify(graph, spanning, tree, order).items():
            click.echo(f"{v} {case}", err=True)

    bound = lower_bound(spanning, tree)
    if len(arcs) != bound:
        raise ConsistencyError(f"valid set has {len(arcs)} arcs, lower bound is {bound}")
    mismatch = first_discrepancy(graph, spanning, arcs, tree)
    if mismatch is not None:
        v, expected, found = mismatch
        raise ConsistencyError(
            f"valid-set self-check failed at vertex {v}: d(v)={expected} in G, {found} in G'"
        )
    if oracle:
        smallest = brute_force_min_valid_set(
            graph, spanning, cfg.get_int("brute_force_max_arcs", 20)
        )
        if len(smallest) != len(arcs):
            raise ConsistencyError(
                f"exhaustive search found a valid set of {len(smallest)} arcs, not {len(arcs)}"
            )

    emit([str(len(arcs))] + [f"{u} {v}" for u, v in sorted(arcs)])


@main.command()
@click.argument("graph_file", type=existing_file)
@click.argument("tree_file", type=existing_file)
@click.argument("arcset_file", type=existing_file)
@handle_errors
def verify(graph_file, tree_file, arcset_file):
    """Check that ARCSET_FILE with the tree arcs keeps every dominator of the graph."""
    graph = read_graph(graph_file)
    spanning = read_tree(tree_file, graph)
    arcs = read_arcset(arcset_file, graph)

    mismatch = first_discrepancy(graph, spanning, arcs)
    if mismatch is None:
        click.echo("valid")
        return
    v, expected, found = mismatch
    click.echo(f"vertex {v}: immediate dominator {expected} in G, {found} in the subgraph")
    sys.exit(ExitStatus.VERIFICATION_FAILED)


@main.command()
@click.argument("graph_file", type=existing_file)
@click.option("--restrict", "restrict_file", type=existing_file, help="Only use arcs listed in this file")
@click.option("--format", "fmt", type=click.Choice(FORMATS), help="Output format (default: edgelist)")
@click.pass_obj
@handle_errors
def divergent(cfg, graph_file, restrict_file, fmt):
    """Print two divergent spanning trees B and R as 'v parent' lines.

    Examples:
      ftreach divergent graph.fg
      ftreach divergent graph.fg --restrict subgraph.arcs
      ftreach divergent graph.fg --format dot > trees.dot
    """
    graph = read_graph(graph_file)
    allowed = read_arcset(restrict_file, graph) if restrict_file else None
    tree = dominator_tree(graph)
    order = construct_low_high(graph, tree)
    pair = build_divergent_trees(graph, tree, order, allowed)

    verdict = check_divergent(graph, tree, pair, order)
    if not verdict:
        raise ConsistencyError(
            f"divergence self-check failed at vertex {verdict.vertex}: {verdict.reason}"
        )

    fmt = fmt or cfg.get("format", "edgelist")
    if fmt == "dot":
        click.echo(pair_to_dot(graph, pair), nl=False)
        return
    lines = ["B:"]
    lines.extend(f"{v} {u}" for v, u in sorted(pair.b_map().items()))
    lines.append("R:")
    lines.extend(f"{v} {u}" for v, u in sorted(pair.r_map().items()))
    emit(lines)


@main.command()
@click.argument("n", type=int)
@click.argument("m", type=int)
@click.argument("seed", type=int)
@click.option("--tree", "strategy", help="Also extract a spanning tree: bfs, dfs or random[:seed]")
@click.option("-o", "--out", "out_file", type=click.Path(dir_okay=False, path_type=Path), help="Graph file (default: stdout)")
@click.option("--tree-out", "tree_file", type=click.Path(dir_okay=False, path_type=Path), help="Tree file")
@click.option("--format", "fmt", type=click.Choice(FORMATS), help="Graph format (default: edgelist)")
@click.pass_obj
@handle_errors
def gen(cfg, n, m, seed, strategy, out_file, tree_file, fmt):
    """Generate a random flow graph with N vertices and M arcs from SEED.

    Examples:
      ftreach gen 100 400 7 -o g.fg --tree dfs --tree-out g.tree
      ftreach gen 5 4 1
    """
    graph = random_flowgraph(n, m, seed)

    spanning = None
    if strategy or tree_file:
        if tree_file is None:
            if out_file is None:
                raise InputError("--tree needs --tree-out when the graph goes to stdout")
            tree_file = out_file.with_suffix(".tree")
        name, tree_seed = cfg.parse_strategy(strategy)
        if ":" not in (strategy or ""):
            tree_seed = seed
        spanning = extract_spanning_tree(graph, name, tree_seed)

    text = serialize(graph, spanning, fmt or cfg.get("format", "edgelist"))
    if out_file is None:
        click.echo(text, nl=False)
    else:
        out_file.write_text(text, encoding="utf-8")
    if spanning is not None:
        tree_file.write_text(serialize_tree(spanning), encoding="utf-8")


@main.command()
def version():
    """Show version information."""
    from . import __version__

    click.echo(f"ftreach version {__version__}")


if __name__ == "__main__":
    main()
