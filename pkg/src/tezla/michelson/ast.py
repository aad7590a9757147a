"""Typed abstract syntax for the supported Michelson subset."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

ATOM_TYPES = frozenset(
    ["nat", "int", "bool", "string", "unit", "mutez", "address", "timestamp", "operation"]
)
COMPARABLE_TYPES = frozenset(["nat", "int", "bool", "string", "mutez", "address", "timestamp"])
NUMERIC_TYPES = frozenset(["nat", "int", "mutez"])
TYPE_ARITY = {"pair": 2, "or": 2, "map": 2, "option": 1, "list": 1, "set": 1}
TYPE_ARITY.update({name: 0 for name in ATOM_TYPES})


@dataclass(frozen=True)
class MType:
    prim: str
    args: Tuple["MType", ...] = ()

    def __post_init__(self):
        if self.prim not in TYPE_ARITY:
            raise ValueError(f"unknown type constructor {self.prim!r}")
        if len(self.args) != TYPE_ARITY[self.prim]:
            raise ValueError(f"{self.prim} takes {TYPE_ARITY[self.prim]} arguments")
        if self.prim in ("set", "map") and self.args[0].prim not in COMPARABLE_TYPES:
            raise ValueError(f"{self.prim} key must be comparable, got {self.args[0]}")

    def contains(self, prim: str) -> bool:
        return self.prim == prim or any(a.contains(prim) for a in self.args)

    @property
    def is_numeric(self) -> bool:
        return self.prim in NUMERIC_TYPES

    def __str__(self):
        from .printer import format_type
        return format_type(self)


def t(prim: str, *args: MType) -> MType:
    return MType(prim, tuple(args))


NAT = t("nat")
INT = t("int")
BOOL = t("bool")
STRING = t("string")
UNIT = t("unit")
MUTEZ = t("mutez")
ADDRESS = t("address")
TIMESTAMP = t("timestamp")
OPERATION = t("operation")


# -- literals -----------------------------------------------------------------

@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class String:
    value: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Pair:
    left: "Literal"
    right: "Literal"


@dataclass(frozen=True)
class Left:
    value: "Literal"


@dataclass(frozen=True)
class Right:
    value: "Literal"


@dataclass(frozen=True)
class Some:
    value: "Literal"


@dataclass(frozen=True)
class NoneLit:
    pass


@dataclass(frozen=True)
class Seq:
    items: Tuple["Literal", ...] = ()


@dataclass(frozen=True)
class Elt:
    key: "Literal"
    value: "Literal"


Literal = Union[Int, String, Bool, Unit, Pair, Left, Right, Some, NoneLit, Seq, Elt]


# -- instructions -------------------------------------------------------------

TWO_BLOCKS = frozenset(["IF", "IF_CONS", "IF_NONE", "IF_LEFT"])
ONE_BLOCK = frozenset(["DIP", "LOOP", "LOOP_LEFT", "ITER", "MAP"])

SUPPORTED_OPCODES = frozenset(
    """PUSH UNIT DROP DUP SWAP DIG DUG DIP
    ADD SUB MUL EDIV NEG ABS ISNAT INT COMPARE EQ NEQ LT LE GT GE
    AND OR XOR NOT PAIR CAR CDR UNPAIR SOME NONE IF_NONE LEFT RIGHT IF_LEFT
    NIL CONS IF_CONS SIZE EMPTY_SET EMPTY_MAP MEM GET UPDATE
    IF LOOP LOOP_LEFT ITER MAP FAILWITH
    AMOUNT BALANCE SENDER SOURCE NOW SELF_ADDRESS""".split()
)


@dataclass(frozen=True)
class Instruction:
    opcode: str
    type_args: Tuple[MType, ...] = ()
    literal: Optional[Literal] = None
    n: Optional[int] = None
    blocks: Tuple[Tuple["Instruction", ...], ...] = ()

    def __post_init__(self):
        if self.opcode not in SUPPORTED_OPCODES:
            raise ValueError(f"unsupported opcode {self.opcode}")
        want = 2 if self.opcode in TWO_BLOCKS else 1 if self.opcode in ONE_BLOCK else 0
        if len(self.blocks) != want:
            raise ValueError(f"{self.opcode} carries {want} blocks, got {len(self.blocks)}")

    def __str__(self):
        from .printer import format_instr
        return format_instr(self)


def instr(opcode: str, *type_args: MType, literal=None, n=None, blocks=()) -> Instruction:
    return Instruction(opcode, tuple(type_args), literal, n, tuple(tuple(b) for b in blocks))


@dataclass(frozen=True)
class Script:
    parameter: MType
    storage: MType
    code: Tuple[Instruction, ...] = field(default=())

    def __post_init__(self):
        for name, ty in (("parameter", self.parameter), ("storage", self.storage)):
            if ty.contains("operation"):
                raise ValueError(f"{name} type may not contain operation")


def instruction_count(code) -> int:
    """Number of instructions in a (macro-expanded) sequence, nested blocks included."""
    total = 0
    for i in code:
        total += 1
        for block in i.blocks:
            total += instruction_count(block)
    return total


def iter_instructions(code, path=()):
    """Yield (path, instruction) pairs in preorder.

    A path is ``(i,)`` for top-level instructions and ``parent + (block, j)``
    for instructions nested in a block; both interpreters and the decompiler
    use the same scheme so their traces line up.
    """
    for i, ins in enumerate(code):
        p = path + (i,)
        yield p, ins
        for b, block in enumerate(ins.blocks):
            yield from iter_instructions(block, p + (b,))
