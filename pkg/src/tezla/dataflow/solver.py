"""Worklist solver for monotone dataflow frameworks (MFP solution)."""
from __future__ import annotations

import operator
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from ..cfg import Cfg
from ..errors import SolverDivergence


@dataclass(frozen=True)
class DomainSpec:
    """A join semilattice of analysis facts (here: whole environments).

    ``height`` is the height of the per-variable lattice; the solver combines it
    with the analysis width to bound the number of node visits.
    """
    bottom: Any
    join: Callable[[Any, Any], Any]
    leq: Callable[[Any, Any], bool]
    widen: Optional[Callable[[Any, Any], Any]] = None
    pretty: Callable[[Any], str] = str
    height: int = 1
    eq: Callable[[Any, Any], bool] = operator.eq


@dataclass(frozen=True)
class AnalysisSpec:
    direction: str  # "forward" | "backward"
    domain: DomainSpec
    init_entry: Any
    transfer: Callable  # (node, env) -> env
    edge_refine: Optional[Callable] = None  # (edge, node, env) -> env, forward only
    width: int = 1  # number of variables tracked per environment
    name: str = "analysis"


@dataclass
class Solution:
    """Per-node facts. For forward analyses ``entry`` is the input of the node's
    transfer and ``exit`` its output; for backward ones ``entry`` holds the facts
    after the node (its input) and ``exit`` the facts before it."""
    entry: Dict[int, Any] = field(default_factory=dict)
    exit: Dict[int, Any] = field(default_factory=dict)
    visits: int = 0


def _incoming(g: Cfg, spec: AnalysisSpec, sol: Solution, n: int):
    dom = spec.domain
    acc = dom.bottom
    if spec.direction == "forward":
        if n == g.entry:
            acc = dom.join(acc, spec.init_entry)
        for e in g.pred[n]:
            facts = sol.exit[e.src]
            if spec.edge_refine is not None:
                facts = spec.edge_refine(e, g.nodes[e.src], facts)
            acc = dom.join(acc, facts)
    else:
        if not g.succ[n]:
            acc = dom.join(acc, spec.init_entry)
        for e in g.succ[n]:
            acc = dom.join(acc, sol.exit[e.dst])
    return acc


def solve(g: Cfg, spec: AnalysisSpec, max_visits: Optional[int] = None) -> Solution:
    """Least fixpoint of the dataflow equations by chaotic FIFO iteration.

    Every node starts on the worklist. Loop headers widen (join by default).
    Exceeding the visit bound means a transfer function is not monotone.
    """
    dom = spec.domain
    widen = dom.widen or dom.join
    forward = spec.direction == "forward"
    if spec.direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {spec.direction!r}")
    ids = [n.id for n in g.nodes]
    if max_visits is None:
        max_visits = len(ids) * (dom.height + 1) * max(1, spec.width) + len(ids)
    headers = g.loop_headers()
    sol = Solution({i: dom.bottom for i in ids}, {i: dom.bottom for i in ids})
    seen = set()
    work = deque(ids if forward else reversed(ids))
    queued = set(ids)
    while work:
        n = work.popleft()
        queued.discard(n)
        sol.visits += 1
        if sol.visits > max_visits:
            raise SolverDivergence(f"{spec.name}: no fixpoint after {max_visits} node visits")
        inp = _incoming(g, spec, sol, n)
        if n in headers:
            inp = widen(sol.entry[n], inp)
        sol.entry[n] = inp
        out = spec.transfer(g.nodes[n], inp)
        if n in seen and dom.eq(out, sol.exit[n]):
            continue
        seen.add(n)
        sol.exit[n] = out
        nexts = [e.dst for e in g.succ[n]] if forward else [e.src for e in g.pred[n]]
        for m in nexts:
            if m not in queued:
                queued.add(m)
                work.append(m)
    return sol


def fixpoint_violations(g: Cfg, spec: AnalysisSpec, sol: Solution) -> List[int]:
    """Nodes where the solution does not satisfy its own equations."""
    dom = spec.domain
    bad = []
    for node in g.nodes:
        n = node.id
        if not dom.eq(spec.transfer(node, sol.entry[n]), sol.exit[n]):
            bad.append(n)
        elif not dom.leq(_incoming(g, spec, sol, n), sol.entry[n]):
            bad.append(n)
    return bad
