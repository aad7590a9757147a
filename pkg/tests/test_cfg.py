import re
from collections import Counter

import pytest

from helpers import contract_ids, load
from tezla import build_cfg, decompile, emit_dot, parse_script
from tezla.cfg import LABELS
from tezla.ir import Failwith, If, Loop, Return, UnliftOr, flatten, format_stmt_head


def graph(name):
    return build_cfg(decompile(load(name)))


@pytest.mark.parametrize("name", contract_ids())
def test_structural_invariants(name):
    g = graph(name)
    order = flatten(decompile(load(name)).statements)
    assert len(g.statement_nodes) == len(order)
    assert [n.id for n in g.nodes] == list(range(len(g.nodes)))
    assert g.entry == 0
    for e in g.edges:
        assert e.label in LABELS
    reach = g.reachable()
    assert {n.id for n in g.statement_nodes} <= reach
    for n in g.statement_nodes:
        labels = Counter(e.label for e in g.succ[n.id])
        if isinstance(n.stmt, If):
            assert labels["true"] == 1 and labels["false"] == 1
        elif isinstance(n.stmt, Loop):
            assert labels["loop_body"] == 1 and labels["loop_exit"] == 1
            assert any(e.label == "back" for e in g.pred[n.id])
        elif isinstance(n.stmt, Failwith):
            assert [e.dst for e in g.succ[n.id]] == [g.fail_exit]
        elif isinstance(n.stmt, Return):
            assert g.succ[n.id] == []
        if not isinstance(n.stmt, Return):
            assert g.succ[n.id], f"node {n.id} has no successor"
    for e in g.edges:
        if e.label == "back":
            assert isinstance(g.nodes[e.dst].stmt, Loop)


def test_sign_contract_shape():
    g = graph("sign_mul.tz")
    assert len(g.statement_nodes) == 14
    assert g.fail_exit is None
    assert sorted((e.label, e.dst) for e in g.succ[5]) == [("false", 8), ("true", 6)]
    assert [e.dst for e in g.succ[7]] == [10]
    assert [e.dst for e in g.succ[9]] == [10]


def test_fail_exit_node():
    g = graph("guard.tz")
    assert g.fail_exit == len(g.statement_nodes)
    assert g.nodes[g.fail_exit].stmt is None
    assert g.pred[g.fail_exit]
    assert g.succ[g.fail_exit] == []


def test_loop_exit_reaches_after_loop():
    g = graph("loop_left_count.tz")
    header = next(n for n in g.statement_nodes if isinstance(n.stmt, Loop))
    (out,) = [e for e in g.succ[header.id] if e.label == "loop_exit"]
    after = g.nodes[out.dst].stmt
    assert isinstance(after.expr, UnliftOr)
    assert after.expr.var == header.stmt.header.target


def test_node_of_maps_statements():
    p = decompile(load("cons_branch.tz"))
    g = build_cfg(p)
    for k, s in enumerate(flatten(p.statements)):
        assert g.node_of(s) == k


@pytest.mark.parametrize("name", contract_ids())
def test_dot_lists_every_node_and_edge(name):
    g = graph(name)
    dot = emit_dot(g)
    assert dot.startswith("digraph cfg {")
    assert dot.rstrip().endswith("}")
    nodes = re.findall(r"^\s*n(\d+) \[label=", dot, re.M)
    edges = re.findall(r"^\s*n(\d+) -> n(\d+)", dot, re.M)
    assert sorted(map(int, nodes)) == [n.id for n in g.nodes]
    assert len(edges) == len(g.edges)
    assert emit_dot(g) == dot


def test_dot_shapes_and_labels():
    dot = emit_dot(graph("guard.tz"))
    assert "shape=diamond" in dot
    assert "shape=doubleoctagon" in dot
    assert "shape=doublecircle" in dot
    assert '[label="true"]' in dot
    assert 'v0 := CAR parameter_storage' in dot


def test_dot_labels_unescape_to_statement_heads():
    g = build_cfg(decompile(parse_script(
        'parameter unit ; storage string ; code { DROP ; PUSH string "say \\"hi\\"" ; NIL operation ; PAIR }')))
    labels = re.findall(r'^\s*n(\d+) \[label="((?:[^"\\]|\\.)*)"', emit_dot(g), re.M)
    assert len(labels) == len(g.nodes)
    for node_id, raw in labels:
        node = g.nodes[int(node_id)]
        if node.stmt is not None:
            assert re.sub(r"\\(.)", r"\1", raw) == f"{node.id}: {format_stmt_head(node.stmt)}"
