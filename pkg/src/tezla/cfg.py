"""Statement-level control-flow graphs over Tezla programs, and DOT output."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .errors import InvalidProgram
from .ir import Failwith, If, Loop, Program, Return, flatten, format_stmt_head

LABELS = ("seq", "true", "false", "loop_body", "loop_exit", "back")


@dataclass(frozen=True)
class Node:
    id: int
    stmt: object  # None for the synthetic fail exit


@dataclass(frozen=True, order=True)
class Edge:
    src: int
    dst: int
    label: str


@dataclass
class Cfg:
    nodes: List[Node]
    edges: List[Edge]
    entry: int
    exit: Optional[int]
    fail_exit: Optional[int] = None
    succ: Dict[int, List[Edge]] = field(default_factory=dict, repr=False)
    pred: Dict[int, List[Edge]] = field(default_factory=dict, repr=False)
    # id(stmt) -> node id, so interpreters can map executed statements to nodes
    index: Dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        succ, pred = defaultdict(list), defaultdict(list)
        for e in self.edges:
            succ[e.src].append(e)
            pred[e.dst].append(e)
        self.succ = {n.id: succ[n.id] for n in self.nodes}
        self.pred = {n.id: pred[n.id] for n in self.nodes}
        self.index = {id(n.stmt): n.id for n in self.nodes if n.stmt is not None}

    @property
    def statement_nodes(self) -> List[Node]:
        return [n for n in self.nodes if n.stmt is not None]

    def node_of(self, stmt) -> int:
        return self.index[id(stmt)]

    def loop_headers(self):
        return {n.id for n in self.nodes if isinstance(n.stmt, Loop)}

    def reachable(self, start=None, reverse=False):
        start = self.entry if start is None else start
        table = self.pred if reverse else self.succ
        seen, todo = {start}, [start]
        while todo:
            n = todo.pop()
            for e in table[n]:
                m = e.src if reverse else e.dst
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen


def build_cfg(p: Program) -> Cfg:
    """One node per atomic statement or compound header, numbered in preorder.

    Branch exits flow to the statement after the branch (its first phi when
    there is one); the last statement of a loop body flows back to the header;
    every FAILWITH flows to a synthetic fail-exit node numbered after all
    statements.
    """
    order = flatten(p.statements)
    if not order:
        raise InvalidProgram("cannot build a graph for an empty program")
    ids = {id(s): i for i, s in enumerate(order)}
    has_fail = any(isinstance(s, Failwith) for s in order)
    fail_exit = len(order) if has_fail else None
    edges = []

    def link(pending, dst):
        for src, label in pending:
            edges.append(Edge(src, dst, label))

    def block(stmts, pending):
        for s in stmts:
            pending = stmt(s, pending)
        return pending

    def stmt(s, pending):
        nid = ids[id(s)]
        link(pending, nid)
        if isinstance(s, Failwith):
            edges.append(Edge(nid, fail_exit, "seq"))
            return []
        if isinstance(s, Return):
            return []
        if isinstance(s, If):
            return block(s.then, [(nid, "true")]) + block(s.orelse, [(nid, "false")])
        if isinstance(s, Loop):
            for src, label in block(s.body, [(nid, "loop_body")]):
                edges.append(Edge(src, nid, "back" if label == "seq" else label))
            return [(nid, "loop_exit")]
        return [(nid, "seq")]

    dangling = block(p.statements, [])
    if dangling:
        raise InvalidProgram("program falls off its end without return or FAILWITH")
    returns = [i for i, s in enumerate(order) if isinstance(s, Return)]
    nodes = [Node(i, s) for i, s in enumerate(order)]
    if has_fail:
        nodes.append(Node(fail_exit, None))
    return Cfg(nodes, sorted(set(edges)), 0, returns[0] if returns else None, fail_exit)


def _node_label(g: Cfg, n: Node) -> str:
    if n.stmt is None:
        return f"{n.id}: fail_exit"
    return f"{n.id}: {format_stmt_head(n.stmt)}"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: Cfg) -> str:
    lines = ["digraph cfg {"]
    for n in g.nodes:
        attrs = [f"label={_quote(_node_label(g, n))}"]
        if n.stmt is None:
            attrs.append("shape=doubleoctagon")
        elif n.id == g.exit:
            attrs.append("shape=doublecircle")
        elif isinstance(n.stmt, (If, Loop)):
            attrs.append("shape=diamond")
        else:
            attrs.append("shape=box")
        lines.append(f"  n{n.id} [{', '.join(attrs)}];")
    for e in sorted(g.edges, key=lambda e: (e.src, e.label, e.dst)):
        lines.append(f"  n{e.src} -> n{e.dst} [label={_quote(e.label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
