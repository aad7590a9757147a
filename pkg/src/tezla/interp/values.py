"""Runtime values shared by both interpreters.

nat/int are Python ints, bool is bool, string is str and lists are tuples.
Other Michelson scalars get small tagged wrappers so that values of distinct
types never compare equal by accident.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Tuple

from ..michelson import ast as A


@dataclass(frozen=True)
class Mutez:
    amount: int


@dataclass(frozen=True)
class Timestamp:
    seconds: int


@dataclass(frozen=True)
class Address:
    value: str


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class NoneV:
    pass


UNIT = UnitV()
NONE = NoneV()


@dataclass(frozen=True)
class Pair:
    left: Any
    right: Any


@dataclass(frozen=True)
class Left:
    value: Any


@dataclass(frozen=True)
class Right:
    value: Any


@dataclass(frozen=True)
class Some:
    value: Any


@dataclass(frozen=True)
class MSet:
    items: Tuple[Any, ...] = ()


@dataclass(frozen=True)
class MMap:
    items: Tuple[Tuple[Any, Any], ...] = ()

    def get(self, key):
        for k, v in self.items:
            if compare(k, key) == 0:
                return v
        return None


@dataclass(frozen=True)
class Operation:
    tag: str


@dataclass(frozen=True)
class ChainEnv:
    amount: Mutez = Mutez(0)
    balance: Mutez = Mutez(1_000_000)
    sender: Address = Address("tz1KqTpEZ7Yob7QbPE4Hy4Wo8fHG8LhKxZSx")
    source: Address = Address("tz1KqTpEZ7Yob7QbPE4Hy4Wo8fHG8LhKxZSx")
    now: Timestamp = Timestamp(1_600_000_000)
    self_address: Address = Address("KT1BEqzn5Wx8uJrZNvuS9DVHmLvG9td3fDLi")


# -- ordering -----------------------------------------------------------------

def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def compare(a, b) -> int:
    """Michelson COMPARE on comparable values: -1, 0 or 1."""
    if isinstance(a, bool):
        return _cmp(a, b)
    if isinstance(a, (int, str)):
        return _cmp(a, b)
    if isinstance(a, Mutez):
        return _cmp(a.amount, b.amount)
    if isinstance(a, Timestamp):
        return _cmp(a.seconds, b.seconds)
    if isinstance(a, Address):
        return _cmp(a.value, b.value)
    if isinstance(a, Pair):
        return compare(a.left, b.left) or compare(a.right, b.right)
    raise TypeError(f"values of {type(a).__name__} are not comparable")


sort_key = functools.cmp_to_key(compare)


def make_set(items) -> MSet:
    out = []
    for x in sorted(items, key=sort_key):
        if not out or compare(out[-1], x) != 0:
            out.append(x)
    return MSet(tuple(out))


def make_map(pairs) -> MMap:
    out = []
    # stable sort: among equal keys the last binding wins
    for k, v in sorted(pairs, key=lambda kv: sort_key(kv[0])):
        if out and compare(out[-1][0], k) == 0:
            out[-1] = (k, v)
        else:
            out.append((k, v))
    return MMap(tuple(out))


# -- literals -------------------------------------------------------------------

def _timestamp(lit) -> Timestamp:
    if isinstance(lit, A.Int):
        return Timestamp(lit.value)
    text = lit.value.replace("Z", "+00:00")
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return Timestamp(int(dt.timestamp()))


def literal_to_value(lit, ty: A.MType):
    """Interpret a PUSH literal at its declared type."""
    p = ty.prim
    if p in ("nat", "int"):
        return lit.value
    if p == "mutez":
        return Mutez(lit.value)
    if p == "timestamp":
        return _timestamp(lit)
    if p == "address":
        return Address(lit.value)
    if p in ("string", "bool"):
        return lit.value
    if p == "unit":
        return UNIT
    if p == "pair":
        return Pair(literal_to_value(lit.left, ty.args[0]), literal_to_value(lit.right, ty.args[1]))
    if p == "option":
        return NONE if isinstance(lit, A.NoneLit) else Some(literal_to_value(lit.value, ty.args[0]))
    if p == "or":
        if isinstance(lit, A.Left):
            return Left(literal_to_value(lit.value, ty.args[0]))
        return Right(literal_to_value(lit.value, ty.args[1]))
    if p == "list":
        return tuple(literal_to_value(x, ty.args[0]) for x in lit.items)
    if p == "set":
        return make_set(literal_to_value(x, ty.args[0]) for x in lit.items)
    if p == "map":
        return make_map((literal_to_value(e.key, ty.args[0]), literal_to_value(e.value, ty.args[1]))
                        for e in lit.items)
    raise TypeError(f"no literal form for {ty}")


# -- rendering ------------------------------------------------------------------

def format_value(v) -> str:
    """Michelson-literal-like rendering, used in reports to reproduce inputs."""
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, Mutez):
        return f"{v.amount}mutez"
    if isinstance(v, Timestamp):
        return f"@{v.seconds}"
    if isinstance(v, Address):
        return f'"{v.value}"'
    if isinstance(v, UnitV):
        return "Unit"
    if isinstance(v, NoneV):
        return "None"
    if isinstance(v, Pair):
        return f"(Pair {format_value(v.left)} {format_value(v.right)})"
    if isinstance(v, (Left, Right, Some)):
        return f"({type(v).__name__} {format_value(v.value)})"
    if isinstance(v, tuple):
        return "{" + " ; ".join(format_value(x) for x in v) + "}"
    if isinstance(v, MSet):
        return "set{" + " ; ".join(format_value(x) for x in v.items) + "}"
    if isinstance(v, MMap):
        return "{" + " ; ".join(f"Elt {format_value(k)} {format_value(x)}" for k, x in v.items) + "}"
    if isinstance(v, Operation):
        return f"<op {v.tag}>"
    return repr(v)


def canon(v):
    """Structural form where bools and ints never collide."""
    if isinstance(v, bool):
        return ("bool", v)
    if isinstance(v, (int, str)):
        return v
    if isinstance(v, tuple):
        return ("list",) + tuple(canon(x) for x in v)
    if isinstance(v, MSet):
        return ("set",) + tuple(canon(x) for x in v.items)
    if isinstance(v, MMap):
        return ("map",) + tuple((canon(k), canon(x)) for k, x in v.items)
    if isinstance(v, Pair):
        return ("pair", canon(v.left), canon(v.right))
    if isinstance(v, (Left, Right, Some)):
        return (type(v).__name__, canon(v.value))
    if isinstance(v, Operation):
        return ("op", v.tag)
    return v


def well_typed(v, ty: A.MType) -> bool:
    p = ty.prim
    if p in ("nat", "int"):
        return isinstance(v, int) and not isinstance(v, bool) and (p == "int" or v >= 0)
    if p == "bool":
        return isinstance(v, bool)
    if p == "string":
        return isinstance(v, str)
    if p == "mutez":
        return isinstance(v, Mutez) and 0 <= v.amount < 2 ** 63
    if p == "timestamp":
        return isinstance(v, Timestamp)
    if p == "address":
        return isinstance(v, Address)
    if p == "unit":
        return v == UNIT
    if p == "operation":
        return isinstance(v, Operation)
    if p == "pair":
        return isinstance(v, Pair) and well_typed(v.left, ty.args[0]) and well_typed(v.right, ty.args[1])
    if p == "option":
        return v == NONE or (isinstance(v, Some) and well_typed(v.value, ty.args[0]))
    if p == "or":
        return ((isinstance(v, Left) and well_typed(v.value, ty.args[0]))
                or (isinstance(v, Right) and well_typed(v.value, ty.args[1])))
    if p == "list":
        return isinstance(v, tuple) and all(well_typed(x, ty.args[0]) for x in v)
    if p == "set":
        return (isinstance(v, MSet) and all(well_typed(x, ty.args[0]) for x in v.items)
                and all(compare(a, b) < 0 for a, b in zip(v.items, v.items[1:])))
    if p == "map":
        return (isinstance(v, MMap)
                and all(well_typed(k, ty.args[0]) and well_typed(x, ty.args[1]) for k, x in v.items)
                and all(compare(a[0], b[0]) < 0 for a, b in zip(v.items, v.items[1:])))
    return False
