"""Sign analysis over the eight-element lattice {bot, 0, 1, +, -, 0+, 0-, top}.

Each lattice element is encoded as the set of concrete classes it covers,
as a bitmask over NEG (< 0), ZERO, ONE and BIG (> 1). Order is inclusion,
meet is intersection, and join is the smallest element covering the union.
Operation tables are written per class and lifted to elements by union.
"""
from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, Optional

from .. import ir
from ..errors import AnalysisError
from ..ir import PARAMETER_STORAGE, Assign, Hd, If, InstrApp, Loop, Phi
from ..michelson import ast as A
from . import kernels
from .solver import AnalysisSpec, DomainSpec

NEG, ZERO, ONE, BIG = 1, 2, 4, 8
CLASSES = (NEG, ZERO, ONE, BIG)
NONNEG = ZERO | ONE | BIG

BOT, POS, ZPOS, ZNEG, TOP = 0, ONE | BIG, NONNEG, NEG | ZERO, 15
ELEMENTS = (BOT, ZERO, ONE, POS, NEG, ZPOS, ZNEG, TOP)
NAMES = {BOT: "bot", ZERO: "0", ONE: "1", POS: "+", NEG: "-", ZPOS: "0+", ZNEG: "0-", TOP: "top"}
BY_NAME = {v: k for k, v in NAMES.items()}


def _closure(mask: int) -> int:
    covers = [e for e in ELEMENTS if e & mask == mask]
    return min(covers, key=lambda e: bin(e).count("1"))


ALPHA = bytes(_closure(m & 15) for m in range(256))
kernels.install_alpha(ALPHA)


def alpha(mask: int) -> int:
    return ALPHA[mask]


def join(a: int, b: int) -> int:
    return ALPHA[a | b]


def meet(a: int, b: int) -> int:
    return a & b


def leq(a: int, b: int) -> bool:
    return a & ~b == 0


def pretty(a: int) -> str:
    return NAMES[a]


def classify(x: int) -> int:
    if x < 0:
        return NEG
    return ZERO if x == 0 else ONE if x == 1 else BIG


def abstract(x: int) -> int:
    return ALPHA[classify(x)]


def gamma_contains(a: int, x: int) -> bool:
    return bool(a & classify(x))


# -- per-class tables ---------------------------------------------------------
# Binary tables are indexed [top operand class][second operand class].

_ANY = NEG | ZERO | ONE | BIG

def _sym(rows):
    return {(a, b): m for (a, b), m in rows.items()} | {(b, a): m for (a, b), m in rows.items()}


ADD_T = _sym({
    (NEG, NEG): NEG, (NEG, ZERO): NEG, (NEG, ONE): NEG | ZERO, (NEG, BIG): _ANY,
    (ZERO, ZERO): ZERO, (ZERO, ONE): ONE, (ZERO, BIG): BIG,
    (ONE, ONE): BIG, (ONE, BIG): BIG, (BIG, BIG): BIG,
})
SUB_T = {
    (NEG, NEG): _ANY, (NEG, ZERO): NEG, (NEG, ONE): NEG, (NEG, BIG): NEG,
    (ZERO, NEG): ONE | BIG, (ZERO, ZERO): ZERO, (ZERO, ONE): NEG, (ZERO, BIG): NEG,
    (ONE, NEG): BIG, (ONE, ZERO): ONE, (ONE, ONE): ZERO, (ONE, BIG): NEG,
    (BIG, NEG): BIG, (BIG, ZERO): BIG, (BIG, ONE): ONE | BIG, (BIG, BIG): _ANY,
}
MUL_T = _sym({
    (NEG, NEG): ONE | BIG, (NEG, ZERO): ZERO, (NEG, ONE): NEG, (NEG, BIG): NEG,
    (ZERO, ZERO): ZERO, (ZERO, ONE): ZERO, (ZERO, BIG): ZERO,
    (ONE, ONE): ONE, (ONE, BIG): BIG, (BIG, BIG): BIG,
})
# comparison outcome encoded as the class of -1 / 0 / 1
_LT, _EQ, _GT = NEG, ZERO, ONE
COMPARE_T = {
    (NEG, NEG): _LT | _EQ | _GT, (NEG, ZERO): _LT, (NEG, ONE): _LT, (NEG, BIG): _LT,
    (ZERO, NEG): _GT, (ZERO, ZERO): _EQ, (ZERO, ONE): _LT, (ZERO, BIG): _LT,
    (ONE, NEG): _GT, (ONE, ZERO): _GT, (ONE, ONE): _EQ, (ONE, BIG): _LT,
    (BIG, NEG): _GT, (BIG, ZERO): _GT, (BIG, ONE): _GT, (BIG, BIG): _LT | _EQ | _GT,
}
NEG_T = {NEG: ONE | BIG, ZERO: ZERO, ONE: NEG, BIG: NEG}
ABS_T = {NEG: ONE | BIG, ZERO: ZERO, ONE: ONE, BIG: BIG}
INT_T = {c: c for c in CLASSES}

BINARY = {"ADD": ADD_T, "SUB": SUB_T, "MUL": MUL_T, "COMPARE": COMPARE_T}
UNARY = {"NEG": NEG_T, "ABS": ABS_T, "INT": INT_T}


def _classes(a: int):
    return [c for c in CLASSES if a & c]


def lift2(table, a: int, b: int) -> int:
    m = 0
    for ca in _classes(a):
        for cb in _classes(b):
            m |= table[ca, cb]
    return ALPHA[m]


def lift1(table, a: int) -> int:
    m = 0
    for c in _classes(a):
        m |= table[c]
    return ALPHA[m]


def abstract_op(op: str, *args: int) -> int:
    """Abstract evaluation of a tabled numeric operation (operands top first)."""
    if op in BINARY:
        return lift2(BINARY[op], *args)
    return lift1(UNARY[op], *args)


# -- brute-force oracle ---------------------------------------------------------

SAMPLE = (-5, -3, -2, -1, 0, 1, 2, 3, 5)

_CONCRETE = {
    "ADD": lambda x, y: x + y,
    "SUB": lambda x, y: x - y,
    "MUL": lambda x, y: x * y,
    "COMPARE": lambda x, y: (x > y) - (x < y),
    "NEG": lambda x: -x,
    "ABS": abs,
    "INT": lambda x: x,
}


def sampled_op(op: str, *args: int, sample: Iterable[int] = SAMPLE) -> int:
    """Join of the abstractions of ``op`` over sampled representatives of each operand."""
    sample = tuple(sample)
    pools = [[x for x in sample if gamma_contains(a, x)] for a in args]
    out = BOT
    for xs in product(*pools):
        out = join(out, abstract(_CONCRETE[op](*xs)))
    return out


# -- types ----------------------------------------------------------------------

_NUMERIC = ("nat", "int", "mutez")


def is_numeric(ty: Optional[A.MType]) -> bool:
    return ty is not None and ty.prim in _NUMERIC


def type_default(ty: Optional[A.MType]) -> int:
    if ty is None or ty.prim not in _NUMERIC:
        return BOT
    return TOP if ty.prim == "int" else ZPOS


def constrain(ty: Optional[A.MType], a: int) -> int:
    if ty is not None and ty.prim in ("nat", "mutez"):
        return ALPHA[a & NONNEG]
    return a


# -- environments -------------------------------------------------------------

def var_index(var: str, var_count: int) -> int:
    if var == PARAMETER_STORAGE:
        return var_count
    return int(var[1:])


def var_name(i: int, var_count: int) -> str:
    return PARAMETER_STORAGE if i == var_count else f"v{i}"


def env_domain(var_count: int) -> DomainSpec:
    width = var_count + 1
    return DomainSpec(
        bottom=bytes(width),
        join=lambda a, b: kernels.env_join(a, b),
        leq=lambda a, b: kernels.env_leq(a, b),
        pretty=lambda env: ", ".join(f"{var_name(i, var_count)}: {NAMES[x]}"
                                     for i, x in enumerate(env) if x),
        height=4,
    )


def env_to_dict(env: bytes, var_count: int) -> Dict[str, str]:
    return {var_name(i, var_count): NAMES[x] for i, x in enumerate(env) if x}


# -- transfer -------------------------------------------------------------------

class SignAnalysis:
    """Sign transfer and branch refinement, compiled per program."""

    REL = ("EQ", "NEQ", "LT", "LE", "GT", "GE")
    NEGATE = {"EQ": "NEQ", "NEQ": "EQ", "LT": "GE", "GE": "LT", "LE": "GT", "GT": "LE"}
    # comparison outcomes (classes of compare's result) satisfying each relation
    ACCEPT = {"EQ": _EQ, "NEQ": _LT | _GT, "LT": _LT, "LE": _LT | _EQ, "GT": _GT, "GE": _GT | _EQ}

    def __init__(self, program: ir.Program):
        if not program.types:
            raise AnalysisError("sign analysis needs variable types; decompile the contract first")
        self.program = program
        self.types = program.types
        self.var_count = program.var_count
        self.defs = ir.definitions(program)
        self._ix = lambda v: var_index(v, self.var_count)

    # value of one assignment's expression
    def eval_expr(self, target: str, e, env: bytes) -> int:
        ty = self.types.get(target)
        if not is_numeric(ty):
            return BOT
        if isinstance(e, Phi):
            return join(env[self._ix(e.a)], env[self._ix(e.b)])
        if isinstance(e, Hd):  # hd / tl / unlift_*
            return type_default(ty)
        op = e.op
        if op == "DUP":
            return env[self._ix(e.args[0])]
        if op == "PUSH":
            return abstract(e.literal.value)
        operand_types = [self.types.get(a) for a in e.args]
        if op in BINARY or op in UNARY:
            if all(is_numeric(t) for t in operand_types):
                vals = [env[self._ix(a)] for a in e.args]
                return constrain(ty, abstract_op(op, *vals))
        return type_default(ty)

    def transfer(self, node, env: bytes) -> bytes:
        s = node.stmt
        if isinstance(s, Assign):
            return kernels.env_set(env, self._ix(s.target), self.eval_expr(s.target, s.expr, env))
        if isinstance(s, Loop):
            out = env
            for ph in s.phis:
                out = kernels.env_set(out, self._ix(ph.target), self.eval_expr(ph.target, ph.expr, env))
            return out
        return env

    # -- refinement ---------------------------------------------------------

    def _through_dups(self, v: str) -> str:
        seen = set()
        while v not in seen:
            seen.add(v)
            d = self.defs.get(v)
            if isinstance(d, Assign) and isinstance(d.expr, InstrApp) and d.expr.op == "DUP":
                v = d.expr.args[0]
            else:
                break
        return v

    def _assigned(self, v: str, ops) -> Optional[InstrApp]:
        d = self.defs.get(v)
        if isinstance(d, Assign) and isinstance(d.expr, InstrApp) and d.expr.op in ops:
            return d.expr
        return None

    def condition(self, s: If):
        """Match ``c := REL d; d := COMPARE a b`` behind the condition of an IF."""
        if s.kind != "IF":
            return None
        rel = self._assigned(self._through_dups(s.subject), self.REL)
        if rel is None:
            return None
        cmp_ = self._assigned(self._through_dups(rel.args[0]), ("COMPARE",))
        if cmp_ is None:
            return None
        return rel.op, cmp_.args[0], cmp_.args[1]

    def _allowed(self, rel: str, other: int, x_is_top: bool) -> int:
        """Classes of x for which ``x rel other`` (or ``other rel x``) can hold."""
        want = self.ACCEPT[rel]
        out = 0
        for cx in CLASSES:
            for co in _classes(other):
                outcome = COMPARE_T[cx, co] if x_is_top else COMPARE_T[co, cx]
                if outcome & want:
                    out |= cx
                    break
        return out

    def _narrow(self, env: bytes, var: str, allowed: int) -> bytes:
        var_chain = [var]
        while True:
            d = self._assigned(var_chain[-1], ("DUP",))
            if d is None or d.args[0] in var_chain:
                break
            var_chain.append(d.args[0])
        for v in var_chain:
            if not is_numeric(self.types.get(v)):
                continue
            i = self._ix(v)
            env = kernels.env_set(env, i, ALPHA[env[i] & allowed])
        return env

    def refine(self, edge, node, env: bytes) -> bytes:
        if edge.label not in ("true", "false") or not isinstance(node.stmt, If):
            return env
        m = self.condition(node.stmt)
        if m is None:
            return env
        rel, a, b = m
        if edge.label == "false":
            rel = self.NEGATE[rel]
        if not (is_numeric(self.types.get(a)) and is_numeric(self.types.get(b))):
            return env
        va, vb = env[self._ix(a)], env[self._ix(b)]
        env = self._narrow(env, a, self._allowed(rel, vb, True))
        return self._narrow(env, b, self._allowed(rel, va, False))

    def dead_bindings(self, edge, node, env: bytes):
        """Numeric vars that refinement drives from a value to bot on this edge."""
        after = self.refine(edge, node, env)
        return [var_name(i, self.var_count) for i, (x, y) in enumerate(zip(env, after)) if x and not y]

    def spec(self) -> AnalysisSpec:
        width = self.var_count + 1
        return AnalysisSpec("forward", env_domain(self.var_count), bytes(width),
                            self.transfer, self.refine, width, "sign")


def sign_spec(program: ir.Program) -> AnalysisSpec:
    return SignAnalysis(program).spec()
