"""Primitive (non-control) instruction semantics shared by both machines.

``apply`` takes operands top of stack first, matching the Tezla operand order.
Runtime faults that Michelson turns into a failed operation (mutez overflow
and underflow) raise ``MichelsonFailure``; ill-typed operands raise ``Stuck``.
"""
from __future__ import annotations

from . import values as V

MUTEZ_LIMIT = 2 ** 63


class MichelsonFailure(Exception):
    """A failed run; ``value`` is the FAILWITH payload or a fault marker."""

    def __init__(self, value):
        super().__init__(value)
        self.value = value


class Stuck(Exception):
    pass


def fault(kind: str) -> MichelsonFailure:
    return MichelsonFailure(V.Pair("fault", kind))


def _mutez(n: int) -> V.Mutez:
    if n < 0:
        raise fault("mutez underflow")
    if n >= MUTEZ_LIMIT:
        raise fault("mutez overflow")
    return V.Mutez(n)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _ediv(a: int, b: int):
    if b == 0:
        return None
    q, r = divmod(a, abs(b))
    if b < 0:
        q = -q
    return q, r


def _add(a, b):
    if _is_int(a) and _is_int(b):
        return a + b
    if isinstance(a, V.Mutez) and isinstance(b, V.Mutez):
        return _mutez(a.amount + b.amount)
    if isinstance(a, V.Timestamp) and _is_int(b):
        return V.Timestamp(a.seconds + b)
    if _is_int(a) and isinstance(b, V.Timestamp):
        return V.Timestamp(a + b.seconds)
    raise Stuck(f"ADD on {a!r}, {b!r}")


def _sub(a, b):
    if _is_int(a) and _is_int(b):
        return a - b
    if isinstance(a, V.Mutez) and isinstance(b, V.Mutez):
        return _mutez(a.amount - b.amount)
    if isinstance(a, V.Timestamp) and _is_int(b):
        return V.Timestamp(a.seconds - b)
    if isinstance(a, V.Timestamp) and isinstance(b, V.Timestamp):
        return a.seconds - b.seconds
    raise Stuck(f"SUB on {a!r}, {b!r}")


def _mul(a, b):
    if _is_int(a) and _is_int(b):
        return a * b
    if isinstance(a, V.Mutez) and _is_int(b):
        return _mutez(a.amount * b)
    if _is_int(a) and isinstance(b, V.Mutez):
        return _mutez(a * b.amount)
    raise Stuck(f"MUL on {a!r}, {b!r}")


def _div(a, b):
    if _is_int(a) and _is_int(b):
        res = _ediv(a, b)
        return V.NONE if res is None else V.Some(V.Pair(*res))
    if isinstance(a, V.Mutez) and _is_int(b):
        res = _ediv(a.amount, b)
        return V.NONE if res is None else V.Some(V.Pair(V.Mutez(res[0]), V.Mutez(res[1])))
    if isinstance(a, V.Mutez) and isinstance(b, V.Mutez):
        res = _ediv(a.amount, b.amount)
        return V.NONE if res is None else V.Some(V.Pair(res[0], V.Mutez(res[1])))
    raise Stuck(f"EDIV on {a!r}, {b!r}")


def _logic(op, a, b):
    if isinstance(a, bool) and isinstance(b, bool):
        return {"AND": a and b, "OR": a or b, "XOR": a != b}[op]
    if _is_int(a) and _is_int(b):
        return {"AND": a & b, "OR": a | b, "XOR": a ^ b}[op]
    raise Stuck(f"{op} on {a!r}, {b!r}")


def _size(c):
    if isinstance(c, (tuple, str)):
        return len(c)
    if isinstance(c, (V.MSet, V.MMap)):
        return len(c.items)
    raise Stuck(f"SIZE on {c!r}")


def _mem(k, c):
    if isinstance(c, V.MSet):
        return any(V.compare(x, k) == 0 for x in c.items)
    if isinstance(c, V.MMap):
        return c.get(k) is not None
    raise Stuck(f"MEM on {c!r}")


def _update(k, v, c):
    if isinstance(c, V.MSet):
        rest = [x for x in c.items if V.compare(x, k) != 0]
        return V.make_set(rest + [k] if v else rest)
    if isinstance(c, V.MMap):
        rest = [(x, y) for x, y in c.items if V.compare(x, k) != 0]
        if isinstance(v, V.Some):
            rest.append((k, v.value))
        return V.make_map(rest)
    raise Stuck(f"UPDATE on {c!r}")


_REL = {"EQ": lambda c: c == 0, "NEQ": lambda c: c != 0, "LT": lambda c: c < 0,
        "LE": lambda c: c <= 0, "GT": lambda c: c > 0, "GE": lambda c: c >= 0}


def apply(op: str, type_args, literal, args, env: V.ChainEnv):
    if op == "PUSH":
        return V.literal_to_value(literal, type_args[0])
    if op == "UNIT":
        return V.UNIT
    if op == "NIL":
        return ()
    if op == "NONE":
        return V.NONE
    if op == "EMPTY_SET":
        return V.MSet(())
    if op == "EMPTY_MAP":
        return V.MMap(())
    if op == "AMOUNT":
        return env.amount
    if op == "BALANCE":
        return env.balance
    if op == "SENDER":
        return env.sender
    if op == "SOURCE":
        return env.source
    if op == "NOW":
        return env.now
    if op == "SELF_ADDRESS":
        return env.self_address
    if op == "DUP":
        return args[0]
    if op == "ADD":
        return _add(*args)
    if op == "SUB":
        return _sub(*args)
    if op == "MUL":
        return _mul(*args)
    if op == "EDIV":
        return _div(*args)
    if op in ("AND", "OR", "XOR"):
        return _logic(op, *args)
    x = args[0] if args else None
    if op == "NEG":
        return -x
    if op == "ABS":
        return abs(x)
    if op == "ISNAT":
        return V.Some(x) if x >= 0 else V.NONE
    if op == "INT":
        return x
    if op == "NOT":
        return (not x) if isinstance(x, bool) else ~x
    if op == "COMPARE":
        return V.compare(args[0], args[1])
    if op in _REL:
        return _REL[op](x)
    if op == "PAIR":
        return V.Pair(args[0], args[1])
    if op in ("CAR", "CDR"):
        if not isinstance(x, V.Pair):
            raise Stuck(f"{op} on {x!r}")
        return x.left if op == "CAR" else x.right
    if op == "SOME":
        return V.Some(x)
    if op == "LEFT":
        return V.Left(x)
    if op == "RIGHT":
        return V.Right(x)
    if op == "CONS":
        return (args[0],) + args[1]
    if op == "SIZE":
        return _size(x)
    if op == "MEM":
        return _mem(args[0], args[1])
    if op == "GET":
        found = args[1].get(args[0])
        return V.NONE if found is None else V.Some(found)
    if op == "UPDATE":
        return _update(*args)
    if op == "MAP_INIT":
        return () if isinstance(x, tuple) else V.MMap(())
    if op == "MAP_APPEND":
        acc, elem, new = args
        if isinstance(acc, tuple):
            return acc + (new,)
        return V.MMap(acc.items + ((elem.left, new),))
    raise Stuck(f"no semantics for {op}")


# -- deconstruction helpers used by both machines ---------------------------------

def is_empty(c) -> bool:
    if isinstance(c, tuple):
        return not c
    if isinstance(c, (V.MSet, V.MMap)):
        return not c.items
    raise Stuck(f"not a collection: {c!r}")


def head(c):
    if isinstance(c, tuple) and c:
        return c[0]
    if isinstance(c, V.MSet) and c.items:
        return c.items[0]
    if isinstance(c, V.MMap) and c.items:
        return V.Pair(*c.items[0])
    raise Stuck(f"hd of {c!r}")


def tail(c):
    if isinstance(c, tuple) and c:
        return c[1:]
    if isinstance(c, V.MSet) and c.items:
        return V.MSet(c.items[1:])
    if isinstance(c, V.MMap) and c.items:
        return V.MMap(c.items[1:])
    raise Stuck(f"tl of {c!r}")


def elements(c):
    """Iteration order for ITER/MAP: list order, ascending for sets and maps."""
    if isinstance(c, tuple):
        return list(c)
    if isinstance(c, V.MSet):
        return list(c.items)
    if isinstance(c, V.MMap):
        return [V.Pair(k, v) for k, v in c.items]
    raise Stuck(f"not a collection: {c!r}")

