"""Typed conversion of Micheline trees, macro expansion, and the public parsers."""
from __future__ import annotations

import re

from ..errors import (MichelineError, MichelsonSyntaxError, ParseError,
                      UnsupportedInstruction, UnsupportedType)
from . import ast as A
from . import micheline as M

# Opcodes that exist in Michelson but are outside the supported core.
KNOWN_UNSUPPORTED = frozenset(
    """LAMBDA EXEC APPLY CONTRACT TRANSFER_TOKENS SET_DELEGATE CREATE_CONTRACT
    CREATE_ACCOUNT IMPLICIT_ACCOUNT ADDRESS SELF CHAIN_ID STEPS_TO_QUOTA PACK UNPACK
    SHA256 SHA512 BLAKE2B SHA3 KECCAK HASH_KEY CHECK_SIGNATURE CONCAT SLICE LSL LSR
    CAST RENAME EMPTY_BIG_MAP NEVER TICKET READ_TICKET SPLIT_TICKET JOIN_TICKETS
    SAPLING_EMPTY_STATE SAPLING_VERIFY_UPDATE GET_AND_UPDATE LEVEL VOTING_POWER
    TOTAL_VOTING_POWER PAIRING_CHECK OPEN_CHEST VIEW EMIT MIN_BLOCK_TIME
    SELF_ADDRESS_RAW""".split()
)
KNOWN_UNSUPPORTED_TYPES = frozenset(
    """bytes key key_hash signature chain_id lambda contract big_map never ticket
    sapling_state sapling_transaction bls12_381_g1 bls12_381_g2 bls12_381_fr
    chest chest_key tx_rollup_l2_address""".split()
)

_CMP_OPS = ("EQ", "NEQ", "LT", "GT", "LE", "GE")
_CMP = "(" + "|".join(_CMP_OPS) + ")"


def _where(node):
    return getattr(node, "line", 0) or None, getattr(node, "col", 0) or None


def _fail(message, node):
    line, col = _where(node)
    raise MichelsonSyntaxError(message, line, col)


# -- types --------------------------------------------------------------------

def node_to_type(node) -> A.MType:
    if not isinstance(node, M.Prim):
        _fail("expected a type", node)
    name = node.name
    if name in KNOWN_UNSUPPORTED_TYPES:
        raise UnsupportedType(name)
    if name not in A.TYPE_ARITY:
        _fail(f"unknown type {name!r}", node)
    args = tuple(node_to_type(a) for a in node.args)
    try:
        return A.MType(name, args)
    except ValueError as exc:
        _fail(str(exc), node)


# -- literals -----------------------------------------------------------------

_LIT_ARITY = {"True": 0, "False": 0, "Unit": 0, "None": 0,
              "Pair": 2, "Left": 1, "Right": 1, "Some": 1, "Elt": 2}


def node_to_literal(node, in_seq=False) -> A.Literal:
    if isinstance(node, M.IntNode):
        return A.Int(node.value)
    if isinstance(node, M.StringNode):
        return A.String(node.value)
    if isinstance(node, M.BytesNode):
        raise UnsupportedType("bytes")
    if isinstance(node, M.SeqNode):
        return A.Seq(tuple(node_to_literal(x, in_seq=True) for x in node.items))
    name = node.name
    if name not in _LIT_ARITY:
        _fail(f"unknown literal constructor {name!r}", node)
    if len(node.args) != _LIT_ARITY[name]:
        _fail(f"{name} takes {_LIT_ARITY[name]} arguments", node)
    args = [node_to_literal(a) for a in node.args]
    if name == "True":
        return A.Bool(True)
    if name == "False":
        return A.Bool(False)
    if name == "Unit":
        return A.Unit()
    if name == "None":
        return A.NoneLit()
    if name == "Pair":
        return A.Pair(*args)
    if name == "Left":
        return A.Left(args[0])
    if name == "Right":
        return A.Right(args[0])
    if name == "Some":
        return A.Some(args[0])
    if not in_seq:
        _fail("Elt outside of a map literal", node)
    return A.Elt(*args)


def literal_fits(lit, ty: A.MType) -> bool:
    """Shape-level check that a literal inhabits a type."""
    p = ty.prim
    if p in ("int",):
        return isinstance(lit, A.Int)
    if p in ("nat", "mutez"):
        return isinstance(lit, A.Int) and lit.value >= 0
    if p == "timestamp":
        return isinstance(lit, (A.Int, A.String))
    if p in ("string", "address"):
        return isinstance(lit, A.String)
    if p == "bool":
        return isinstance(lit, A.Bool)
    if p == "unit":
        return isinstance(lit, A.Unit)
    if p == "pair":
        return isinstance(lit, A.Pair) and literal_fits(lit.left, ty.args[0]) and literal_fits(lit.right, ty.args[1])
    if p == "option":
        return isinstance(lit, A.NoneLit) or (isinstance(lit, A.Some) and literal_fits(lit.value, ty.args[0]))
    if p == "or":
        if isinstance(lit, A.Left):
            return literal_fits(lit.value, ty.args[0])
        return isinstance(lit, A.Right) and literal_fits(lit.value, ty.args[1])
    if p in ("list", "set"):
        return isinstance(lit, A.Seq) and all(literal_fits(x, ty.args[0]) for x in lit.items)
    if p == "map":
        return isinstance(lit, A.Seq) and all(
            isinstance(x, A.Elt) and literal_fits(x.key, ty.args[0]) and literal_fits(x.value, ty.args[1])
            for x in lit.items)
    return False  # operation


# -- instructions -------------------------------------------------------------

# Argument shapes per opcode: T type, L literal, N natural, N? optional natural, B block.
_SHAPES = {
    "PUSH": "TL", "NIL": "T", "NONE": "T", "LEFT": "T", "RIGHT": "T",
    "EMPTY_SET": "T", "EMPTY_MAP": "TT",
    "DIP": "?B", "DROP": "?", "DUP": "?", "DIG": "N", "DUG": "N",
    "IF": "BB", "IF_CONS": "BB", "IF_NONE": "BB", "IF_LEFT": "BB",
    "LOOP": "B", "LOOP_LEFT": "B", "ITER": "B", "MAP": "B",
}


def _nat_arg(node, prim):
    if not isinstance(node, M.IntNode) or node.value < 0:
        _fail(f"{prim} expects a natural number argument", node)
    return node.value


def _core(node: M.Prim) -> A.Instruction:
    name = node.name
    shape = _SHAPES.get(name, "")
    args = list(node.args)
    type_args, literal, n, blocks = [], None, None, []
    if shape.startswith("?"):
        if args and isinstance(args[0], M.IntNode):
            n = _nat_arg(args.pop(0), name)
        shape = shape[1:]
    if len(args) != len(shape):
        _fail(f"{name} expects {len(shape)} argument(s), got {len(args)}", node)
    for kind, arg in zip(shape, args):
        if kind == "T":
            type_args.append(node_to_type(arg))
        elif kind == "L":
            literal = node_to_literal(arg)
        elif kind == "N":
            n = _nat_arg(arg, name)
        else:
            if not isinstance(arg, M.SeqNode):
                _fail(f"{name} expects a {{ ... }} block", arg)
            blocks.append(node_to_code(arg))
    if name == "PUSH":
        ty = type_args[0]
        if ty.contains("operation"):
            _fail("cannot PUSH an operation", node)
        if not literal_fits(literal, ty):
            _fail(f"literal does not fit type {ty}", node)
    if name == "DUP" and n == 0:
        _fail("DUP 0 is invalid", node)
    return A.Instruction(name, tuple(type_args), literal, n, tuple(blocks))


def _i(op, *blocks):
    return A.Instruction(op, blocks=tuple(tuple(b) for b in blocks))


_FAIL = (_i("UNIT"), _i("FAILWITH"))


def _blocks(node, k):
    if len(node.args) != k or not all(isinstance(a, M.SeqNode) for a in node.args):
        _fail(f"{node.name} expects {k} block argument(s)", node)
    return [node_to_code(a) for a in node.args]


def _no_args(node):
    if node.args:
        _fail(f"{node.name} takes no arguments", node)


def expand_macro(node: M.Prim):
    """Expand a standard Michelson macro, or return None if ``node`` is not one."""
    name = node.name
    m = re.fullmatch("CMP" + _CMP, name)
    if m:
        _no_args(node)
        return [_i("COMPARE"), _i(m.group(1))]
    m = re.fullmatch("IFCMP" + _CMP, name)
    if m:
        bt, bf = _blocks(node, 2)
        return [_i("COMPARE"), _i(m.group(1)), _i("IF", bt, bf)]
    m = re.fullmatch("IF" + _CMP, name)
    if m:
        bt, bf = _blocks(node, 2)
        return [_i(m.group(1)), _i("IF", bt, bf)]
    if name == "FAIL":
        _no_args(node)
        return list(_FAIL)
    if name == "ASSERT":
        _no_args(node)
        return [_i("IF", (), _FAIL)]
    m = re.fullmatch("ASSERT_CMP" + _CMP, name)
    if m:
        _no_args(node)
        return [_i("COMPARE"), _i(m.group(1)), _i("IF", (), _FAIL)]
    m = re.fullmatch("ASSERT_" + _CMP, name)
    if m:
        _no_args(node)
        return [_i(m.group(1)), _i("IF", (), _FAIL)]
    simple_asserts = {
        "ASSERT_NONE": ("IF_NONE", (), _FAIL),
        "ASSERT_SOME": ("IF_NONE", _FAIL, ()),
        "ASSERT_LEFT": ("IF_LEFT", (), _FAIL),
        "ASSERT_RIGHT": ("IF_LEFT", _FAIL, ()),
    }
    if name in simple_asserts:
        _no_args(node)
        op, bt, bf = simple_asserts[name]
        return [_i(op, bt, bf)]
    if name in ("IF_SOME", "IF_RIGHT"):
        bt, bf = _blocks(node, 2)
        return [_i("IF_NONE" if name == "IF_SOME" else "IF_LEFT", bf, bt)]
    m = re.fullmatch("D(U+)P", name)
    if m and len(m.group(1)) > 1:
        _no_args(node)
        return [A.Instruction("DUP", n=len(m.group(1)))]
    m = re.fullmatch("D(I+)P", name)
    if m and len(m.group(1)) > 1:
        (body,) = _blocks(node, 1)
        return [A.Instruction("DIP", n=len(m.group(1)), blocks=(body,))]
    m = re.fullmatch("C([AD]{2,})R", name)
    if m:
        _no_args(node)
        return [_i("CAR" if c == "A" else "CDR") for c in m.group(1)]
    if name == "SET_CAR":
        _no_args(node)
        return [_i("CDR"), _i("SWAP"), _i("PAIR")]
    if name == "SET_CDR":
        _no_args(node)
        return [_i("CAR"), _i("PAIR")]
    return None


def node_to_code(seq: M.SeqNode):
    out = []
    for item in seq.items:
        if isinstance(item, M.SeqNode):
            # nested sequences are flattened: they have no effect of their own
            out.extend(node_to_code(item))
            continue
        if not isinstance(item, M.Prim):
            _fail("expected an instruction", item)
        name = item.name
        if name in A.SUPPORTED_OPCODES:
            out.append(_core(item))
            continue
        expanded = expand_macro(item)
        if expanded is not None:
            out.extend(expanded)
        elif name in KNOWN_UNSUPPORTED or re.fullmatch(r"[A-Z][A-Z0-9_]*", name):
            raise UnsupportedInstruction(name)
        else:
            _fail(f"expected an instruction, found {name!r}", item)
    return tuple(out)


# -- scripts ------------------------------------------------------------------

def nodes_to_script(items) -> A.Script:
    sections = {}
    for node in items:
        if not isinstance(node, M.Prim) or node.name not in ("parameter", "storage", "code"):
            _fail("expected a parameter, storage or code section", node)
        if node.name in sections:
            _fail(f"duplicate {node.name} section", node)
        if len(node.args) != 1:
            _fail(f"{node.name} takes exactly one argument", node)
        sections[node.name] = node.args[0]
    missing = [s for s in ("parameter", "storage", "code") if s not in sections]
    if missing:
        raise MichelineError(f"missing section(s): {', '.join(missing)}")
    code = sections["code"]
    if not isinstance(code, M.SeqNode):
        _fail("code must be a { ... } sequence", code)
    parameter = node_to_type(sections["parameter"])
    storage = node_to_type(sections["storage"])
    for label, ty in (("parameter", parameter), ("storage", storage)):
        if ty.contains("operation"):
            raise ParseError(f"{label} type may not contain operation")
    return A.Script(parameter, storage, node_to_code(code))


def parse_script(text: str) -> A.Script:
    """Parse a contract written in concrete ``.tz`` syntax."""
    return nodes_to_script(M.parse_concrete(text))


def parse_micheline(json_text: str) -> A.Script:
    """Parse a contract in Micheline JSON.

    Accepts the bare list of toplevel prims, or an RPC ``script`` object whose
    ``code`` member holds that list.
    """
    import json
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise MichelineError(f"malformed JSON: {exc}") from None
    if isinstance(obj, dict) and "code" in obj:
        obj = obj["code"]
    root = M.from_json(obj)
    if not isinstance(root, M.SeqNode):
        raise MichelineError("toplevel must be a sequence of parameter/storage/code")
    return nodes_to_script(root.items)


def parse_file(path) -> A.Script:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        return parse_micheline(text)
    return parse_script(text)


# -- back to Micheline --------------------------------------------------------

def type_to_node(ty: A.MType):
    return M.Prim(ty.prim, tuple(type_to_node(a) for a in ty.args))


def literal_to_node(lit):
    if isinstance(lit, A.Int):
        return M.IntNode(lit.value)
    if isinstance(lit, A.String):
        return M.StringNode(lit.value)
    if isinstance(lit, A.Bool):
        return M.Prim("True" if lit.value else "False")
    if isinstance(lit, A.Unit):
        return M.Prim("Unit")
    if isinstance(lit, A.NoneLit):
        return M.Prim("None")
    if isinstance(lit, A.Pair):
        return M.Prim("Pair", (literal_to_node(lit.left), literal_to_node(lit.right)))
    if isinstance(lit, A.Elt):
        return M.Prim("Elt", (literal_to_node(lit.key), literal_to_node(lit.value)))
    if isinstance(lit, A.Seq):
        return M.SeqNode(tuple(literal_to_node(x) for x in lit.items))
    name = type(lit).__name__
    return M.Prim(name, (literal_to_node(lit.value),))


def instr_to_node(ins: A.Instruction):
    args = []
    if ins.n is not None:
        args.append(M.IntNode(ins.n))
    args.extend(type_to_node(x) for x in ins.type_args)
    if ins.literal is not None:
        args.append(literal_to_node(ins.literal))
    args.extend(M.SeqNode(tuple(instr_to_node(i) for i in b)) for b in ins.blocks)
    return M.Prim(ins.opcode, tuple(args))


def script_to_micheline(script: A.Script) -> str:
    import json
    nodes = M.SeqNode((
        M.Prim("parameter", (type_to_node(script.parameter),)),
        M.Prim("storage", (type_to_node(script.storage),)),
        M.Prim("code", (M.SeqNode(tuple(instr_to_node(i) for i in script.code)),)),
    ))
    return json.dumps(M.to_json(nodes))
