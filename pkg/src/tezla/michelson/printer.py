"""Concrete-syntax printer; its output parses back to the same Script."""
from __future__ import annotations

import json

from . import ast as A


def format_type(ty: A.MType, nested: bool = False) -> str:
    if not ty.args:
        return ty.prim
    body = " ".join([ty.prim] + [format_type(a, nested=True) for a in ty.args])
    return f"({body})" if nested else body


def _string(value: str) -> str:
    # json escaping covers \" \\ \n \t which are exactly the Michelson escapes we read
    return json.dumps(value, ensure_ascii=False)


def format_literal(lit, nested: bool = False) -> str:
    if isinstance(lit, A.Int):
        return str(lit.value)
    if isinstance(lit, A.String):
        return _string(lit.value)
    if isinstance(lit, A.Bool):
        return "True" if lit.value else "False"
    if isinstance(lit, A.Unit):
        return "Unit"
    if isinstance(lit, A.NoneLit):
        return "None"
    if isinstance(lit, A.Seq):
        if not lit.items:
            return "{}"
        return "{ " + " ; ".join(format_literal(x) for x in lit.items) + " }"
    if isinstance(lit, A.Pair):
        parts = ["Pair", format_literal(lit.left, True), format_literal(lit.right, True)]
    elif isinstance(lit, A.Elt):
        parts = ["Elt", format_literal(lit.key, True), format_literal(lit.value, True)]
    else:
        parts = [type(lit).__name__, format_literal(lit.value, True)]
    body = " ".join(parts)
    return f"({body})" if nested else body


def format_block(block) -> str:
    if not block:
        return "{}"
    return "{ " + " ; ".join(format_instr(i) for i in block) + " }"


def format_instr(ins: A.Instruction) -> str:
    parts = [ins.opcode]
    if ins.n is not None:
        parts.append(str(ins.n))
    parts.extend(format_type(x, nested=True) for x in ins.type_args)
    if ins.literal is not None:
        parts.append(format_literal(ins.literal, nested=True))
    parts.extend(format_block(b) for b in ins.blocks)
    return " ".join(parts)


def print_script(script: A.Script) -> str:
    lines = [
        f"parameter {format_type(script.parameter, nested=True)} ;",
        f"storage {format_type(script.storage, nested=True)} ;",
    ]
    if not script.code:
        lines.append("code {}")
    else:
        body = (" ;\n" + " " * 7).join(format_instr(i) for i in script.code)
        lines.append(f"code {{ {body} }}")
    return "\n".join(lines)
