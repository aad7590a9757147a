"""Live-variable analysis (backward, may) over Tezla statements."""
from __future__ import annotations

from ..ir import defs, uses
from .solver import AnalysisSpec, DomainSpec

LIVE_DOMAIN = DomainSpec(
    bottom=frozenset(),
    join=lambda a, b: a | b,
    leq=lambda a, b: a <= b,
    pretty=lambda s: ", ".join(sorted(s)),
    height=1,
)


def live_transfer(node, live_out: frozenset) -> frozenset:
    s = node.stmt
    if s is None:
        return live_out
    return (live_out - frozenset(defs(s))) | frozenset(uses(s))


def liveness_spec(width: int = 1) -> AnalysisSpec:
    return AnalysisSpec("backward", LIVE_DOMAIN, frozenset(), live_transfer, None, width, "liveness")


def dead_definitions(g, sol):
    """(node id, var) pairs whose definition is never read afterwards."""
    out = []
    for node in g.statement_nodes:
        for v in defs(node.stmt):
            if v not in sol.entry[node.id]:
                out.append((node.id, v))
    return out
