"""Result types of value-producing Michelson instructions.

The decompiler tracks one type per stack slot; these rules double as the
stack-shape validation it performs.
"""
from __future__ import annotations

from .errors import StackTypeError
from .michelson.ast import (ADDRESS, BOOL, COMPARABLE_TYPES, INT, MUTEZ, NAT, TIMESTAMP, UNIT,
                            MType, t)

_ARITH = {
    "ADD": {("nat", "nat"): NAT, ("nat", "int"): INT, ("int", "nat"): INT, ("int", "int"): INT,
            ("timestamp", "int"): TIMESTAMP, ("int", "timestamp"): TIMESTAMP,
            ("mutez", "mutez"): MUTEZ},
    "SUB": {("nat", "nat"): INT, ("nat", "int"): INT, ("int", "nat"): INT, ("int", "int"): INT,
            ("timestamp", "int"): TIMESTAMP, ("timestamp", "timestamp"): INT,
            ("mutez", "mutez"): MUTEZ},
    "MUL": {("nat", "nat"): NAT, ("nat", "int"): INT, ("int", "nat"): INT, ("int", "int"): INT,
            ("mutez", "nat"): MUTEZ, ("nat", "mutez"): MUTEZ},
    "EDIV": {("nat", "nat"): t("option", t("pair", NAT, NAT)),
             ("nat", "int"): t("option", t("pair", INT, NAT)),
             ("int", "nat"): t("option", t("pair", INT, NAT)),
             ("int", "int"): t("option", t("pair", INT, NAT)),
             ("mutez", "nat"): t("option", t("pair", MUTEZ, MUTEZ)),
             ("mutez", "mutez"): t("option", t("pair", NAT, MUTEZ))},
    "AND": {("bool", "bool"): BOOL, ("nat", "nat"): NAT, ("int", "nat"): NAT},
    "OR": {("bool", "bool"): BOOL, ("nat", "nat"): NAT},
    "XOR": {("bool", "bool"): BOOL, ("nat", "nat"): NAT},
}
_UNARY = {
    "NEG": {"nat": INT, "int": INT},
    "ABS": {"int": NAT},
    "ISNAT": {"int": t("option", NAT)},
    "INT": {"nat": INT},
    "NOT": {"bool": BOOL, "nat": INT, "int": INT},
}
_CHAIN = {"AMOUNT": MUTEZ, "BALANCE": MUTEZ, "SENDER": ADDRESS, "SOURCE": ADDRESS,
          "SELF_ADDRESS": ADDRESS, "NOW": TIMESTAMP, "UNIT": UNIT}


def _bad(op, *types):
    shown = ", ".join(str(x) for x in types)
    raise StackTypeError(f"{op} is not defined on ({shown})")


def comparable(ty: MType) -> bool:
    if ty.prim == "pair":
        return all(comparable(a) for a in ty.args)
    return ty.prim in COMPARABLE_TYPES


def result_type(op: str, type_args, args) -> MType:
    """Type pushed by ``op`` given its operand types (top of stack first)."""
    if op in _CHAIN:
        return _CHAIN[op]
    if op == "PUSH":
        return type_args[0]
    if op == "NIL":
        return t("list", type_args[0])
    if op == "NONE":
        return t("option", type_args[0])
    if op == "EMPTY_SET":
        if not comparable(type_args[0]) or type_args[0].prim == "pair":
            _bad(op, *type_args)
        return t("set", type_args[0])
    if op == "EMPTY_MAP":
        return t("map", type_args[0], type_args[1])
    if op in _ARITH:
        key = (args[0].prim, args[1].prim)
        if key not in _ARITH[op]:
            _bad(op, *args)
        return _ARITH[op][key]
    if op in _UNARY:
        if args[0].prim not in _UNARY[op]:
            _bad(op, *args)
        return _UNARY[op][args[0].prim]
    if op == "COMPARE":
        if args[0] != args[1] or not comparable(args[0]):
            _bad(op, *args)
        return INT
    if op in ("EQ", "NEQ", "LT", "LE", "GT", "GE"):
        if args[0] != INT:
            _bad(op, *args)
        return BOOL
    if op == "PAIR":
        return t("pair", args[0], args[1])
    if op in ("CAR", "CDR"):
        if args[0].prim != "pair":
            _bad(op, *args)
        return args[0].args[0 if op == "CAR" else 1]
    if op == "SOME":
        return t("option", args[0])
    if op == "LEFT":
        return t("or", args[0], type_args[0])
    if op == "RIGHT":
        return t("or", type_args[0], args[0])
    if op == "CONS":
        if args[1] != t("list", args[0]):
            _bad(op, *args)
        return args[1]
    if op == "SIZE":
        if args[0].prim not in ("list", "set", "map", "string"):
            _bad(op, *args)
        return NAT
    if op == "MEM":
        coll = args[1]
        if coll.prim not in ("set", "map") or coll.args[0] != args[0]:
            _bad(op, *args)
        return BOOL
    if op == "GET":
        coll = args[1]
        if coll.prim != "map" or coll.args[0] != args[0]:
            _bad(op, *args)
        return t("option", coll.args[1])
    if op == "UPDATE":
        key, val, coll = args
        if coll.prim == "set" and coll.args[0] == key and val == BOOL:
            return coll
        if coll.prim == "map" and coll.args[0] == key and val == t("option", coll.args[1]):
            return coll
        _bad(op, *args)
    raise StackTypeError(f"no typing rule for {op}")


def element_type(coll: MType) -> MType:
    """Type of the element ITER/MAP/hd exposes for a collection type."""
    if coll.prim in ("list", "set"):
        return coll.args[0]
    if coll.prim == "map":
        return t("pair", coll.args[0], coll.args[1])
    raise StackTypeError(f"cannot iterate over {coll}")
