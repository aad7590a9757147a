"""Per-node reports of a dataflow solution, as text or JSON."""
from __future__ import annotations

import json
import re

from . import sign


def natural_key(var: str):
    m = re.fullmatch(r"v(\d+)", var)
    return (1, int(m.group(1)), var) if m else (0, 0, var)


def _rows(sol, g, analysis: str, var_count: int):
    rows = {}
    for node in g.statement_nodes:
        env = sol.exit[node.id]
        if analysis == "sign":
            # index order is natural order, with parameter_storage (last slot) first
            names = sign.NAMES
            row = {sign.PARAMETER_STORAGE: names[env[var_count]]} if env[var_count] else {}
            row.update((f"v{i}", names[x]) for i, x in enumerate(env[:var_count]) if x)
            rows[node.id] = row
        else:
            rows[node.id] = sorted(env, key=natural_key)
    return rows


def emit_report(sol, g, fmt: str = "text", analysis: str = "sign", var_count: int = 0) -> str:
    """Exit facts of every statement node, ordered by node id then variable.

    Sign reports omit bot (non-numeric) bindings. For liveness the exit facts
    are the variables live before the node.
    """
    rows = _rows(sol, g, analysis, var_count)
    if fmt == "json":
        return json.dumps({str(k): v for k, v in rows.items()}, indent=2)
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = []
    for k, v in rows.items():
        if analysis == "sign":
            body = ", ".join(f"{var}: {val}" for var, val in v.items())
        else:
            body = ", ".join(v)
        lines.append(f"{k}: {{ {body} }}" if body else f"{k}: {{}}")
    return "\n".join(lines) + ("\n" if lines else "")
