"""Tezla: a store-based SSA representation of Michelson code.

Statements are immutable; compound statements own their blocks. Loop-header
phi assignments live on the loop statement itself rather than in the body.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .errors import InvalidProgram, TezlaSyntaxError
from .michelson import ast as A
from .michelson import micheline as M
from .michelson.frontend import node_to_literal, node_to_type
from .michelson.printer import format_literal, format_type

PARAMETER_STORAGE = "parameter_storage"

# Operand counts for InstrApp, i.e. how many stack slots the opcode consumes.
# DUP is the exception: it reads one slot without consuming it.
ARITY = {op: 0 for op in ("PUSH", "UNIT", "NIL", "NONE", "EMPTY_SET", "EMPTY_MAP",
                          "AMOUNT", "BALANCE", "SENDER", "SOURCE", "NOW", "SELF_ADDRESS")}
ARITY.update({op: 1 for op in ("DUP", "NEG", "ABS", "ISNAT", "INT", "EQ", "NEQ", "LT", "LE",
                               "GT", "GE", "NOT", "CAR", "CDR", "SOME", "LEFT", "RIGHT",
                               "SIZE", "MAP_INIT")})
ARITY.update({op: 2 for op in ("ADD", "SUB", "MUL", "EDIV", "COMPARE", "AND", "OR", "XOR",
                               "PAIR", "CONS", "MEM", "GET")})
ARITY.update({"UPDATE": 3, "MAP_APPEND": 3})

TYPE_ARGS = {"PUSH": 1, "NIL": 1, "NONE": 1, "LEFT": 1, "RIGHT": 1, "EMPTY_SET": 1, "EMPTY_MAP": 2}

BRANCH_KINDS = ("IF", "IF_CONS", "IF_NONE", "IF_LEFT")
LOOP_KINDS = ("LOOP", "LOOP_LEFT", "ITER", "MAP")
NOOP_OPS = ("SWAP", "DIG", "DUG", "DROP", "DIP_MARK")


# -- expressions --------------------------------------------------------------

@dataclass(frozen=True)
class InstrApp:
    op: str
    type_args: Tuple[A.MType, ...] = ()
    literal: Optional[A.Literal] = None
    args: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.op not in ARITY:
            raise ValueError(f"no Tezla form for {self.op}")
        if len(self.args) != ARITY[self.op]:
            raise ValueError(f"{self.op} takes {ARITY[self.op]} operands, got {len(self.args)}")


@dataclass(frozen=True)
class Phi:
    a: str
    b: str

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("phi operands must be distinct")

    @property
    def args(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Hd:
    var: str

    @property
    def args(self):
        return (self.var,)


@dataclass(frozen=True)
class Tl(Hd):
    pass


@dataclass(frozen=True)
class UnliftOption(Hd):
    pass


@dataclass(frozen=True)
class UnliftOr(Hd):
    pass


Expr = Union[InstrApp, Phi, Hd, Tl, UnliftOption, UnliftOr]
_UNARY_NAMES = {Hd: "hd", Tl: "tl", UnliftOption: "unlift_option", UnliftOr: "unlift_or"}
_UNARY_BY_NAME = {v: k for k, v in _UNARY_NAMES.items()}


# -- statements ---------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class If:
    kind: str
    subject: str
    then: Tuple["Stmt", ...]
    orelse: Tuple["Stmt", ...]

    def __post_init__(self):
        if self.kind not in BRANCH_KINDS:
            raise ValueError(f"bad branch kind {self.kind}")


@dataclass(frozen=True)
class Loop:
    """LOOP / LOOP_LEFT / ITER / MAP with attached header phis.

    ``header`` is the control phi (condition, or-value, or collection cursor);
    ``extra`` are phis for deeper stack slots the body modifies. For MAP the
    first extra phi is the accumulator and ``result`` names its target.
    """
    kind: str
    header: Assign
    extra: Tuple[Assign, ...]
    body: Tuple["Stmt", ...]
    result: Optional[str] = None

    def __post_init__(self):
        if self.kind not in LOOP_KINDS:
            raise ValueError(f"bad loop kind {self.kind}")
        for phi in (self.header,) + self.extra:
            if not isinstance(phi.expr, Phi):
                raise ValueError("loop header assignments must be phis")
        if self.kind == "MAP" and (not self.extra or self.result != self.extra[0].target):
            raise ValueError("MAP loops carry the accumulator as first extra phi")

    @property
    def phis(self):
        return (self.header,) + self.extra


@dataclass(frozen=True)
class StackNoop:
    op: str
    n: Optional[int] = None

    def __post_init__(self):
        if self.op not in NOOP_OPS:
            raise ValueError(f"bad stack no-op {self.op}")


@dataclass(frozen=True)
class Failwith:
    var: str


@dataclass(frozen=True)
class Return:
    var: str


Stmt = Union[Assign, If, Loop, StackNoop, Failwith, Return]


@dataclass(frozen=True)
class Program:
    statements: Tuple[Stmt, ...]
    var_count: int
    # Michelson type of every variable; derived data, not part of the text form.
    types: Mapping[str, A.MType] = field(default_factory=dict, compare=False, repr=False)


# -- traversal ----------------------------------------------------------------

def flatten(statements) -> List[Stmt]:
    """Atomic statements and compound headers in program (preorder) order.

    The position of a statement in this list is its node id in the CFG and its
    index in diagnostics and def-use chains.
    """
    out = []

    def go(block):
        for s in block:
            out.append(s)
            if isinstance(s, If):
                go(s.then)
                go(s.orelse)
            elif isinstance(s, Loop):
                go(s.body)

    go(statements)
    return out


def defs(s) -> Tuple[str, ...]:
    if isinstance(s, Assign):
        return (s.target,)
    if isinstance(s, Loop):
        return tuple(p.target for p in s.phis)
    return ()


def uses(s) -> Tuple[str, ...]:
    if isinstance(s, Assign):
        return tuple(s.expr.args)
    if isinstance(s, If):
        return (s.subject,)
    if isinstance(s, Loop):
        return tuple(v for p in s.phis for v in p.expr.args)
    if isinstance(s, (Failwith, Return)):
        return (s.var,)
    return ()


# -- printing -----------------------------------------------------------------

def format_expr(e: Expr) -> str:
    if isinstance(e, Phi):
        return f"phi({e.a}, {e.b})"
    if type(e) in _UNARY_NAMES:
        return f"{_UNARY_NAMES[type(e)]} {e.var}"
    parts = [e.op]
    parts.extend(format_type(x, nested=True) for x in e.type_args)
    if e.literal is not None:
        parts.append(format_literal(e.literal, nested=True))
    parts.extend(e.args)
    return " ".join(parts)


def format_stmt_head(s) -> str:
    """One-line rendering; compound statements print their header only."""
    if isinstance(s, Assign):
        return f"{s.target} := {format_expr(s.expr)};"
    if isinstance(s, If):
        return f"{s.kind} {s.subject}"
    if isinstance(s, Loop):
        phis = ", ".join(f"{p.target} := {format_expr(p.expr)}" for p in s.phis)
        return f"{s.kind} {phis}"
    if isinstance(s, StackNoop):
        name = "DIP" if s.op == "DIP_MARK" else s.op
        return f"{name};" if s.n is None else f"{name} {s.n};"
    if isinstance(s, Failwith):
        return f"FAILWITH {s.var};"
    return f"return {s.var};"


def _print_block(block, indent, out):
    pad = "  " * indent
    for s in block:
        head = format_stmt_head(s)
        if isinstance(s, If):
            out.append(pad + head)
            for sub in (s.then, s.orelse):
                out.append(pad + "{")
                _print_block(sub, indent + 1, out)
                out.append(pad + "}")
            out[-1] += ";"
        elif isinstance(s, Loop):
            out.append(pad + head)
            out.append(pad + "{")
            _print_block(s.body, indent + 1, out)
            out.append(pad + "};")
        else:
            out.append(pad + head)


def print_program(p: Program) -> str:
    out: List[str] = []
    _print_block(p.statements, 0, out)
    return "\n".join(out) + "\n"


# -- reading ------------------------------------------------------------------

_TOK = re.compile(r'\s+|(:=|[{}();,]|"(?:[^"\\]|\\.)*"|-?[0-9]+|[A-Za-z_][A-Za-z0-9_]*)', re.S)
_VAR = re.compile(r"v[0-9]+|" + PARAMETER_STORAGE)


def _tokens(text):
    toks, pos = [], 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise TezlaSyntaxError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.group(1):
            toks.append(m.group(1))
        pos = m.end()
    return toks


class _Reader:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise TezlaSyntaxError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise TezlaSyntaxError(f"expected {tok!r}, got {got!r}")

    def var(self):
        tok = self.next()
        if not _VAR.fullmatch(tok):
            raise TezlaSyntaxError(f"expected a variable, got {tok!r}")
        return tok

    def micheline_atom(self):
        tok = self.next()
        if tok == "(":
            name = self.next()
            args = []
            while self.peek() != ")":
                args.append(self.micheline_atom())
            self.next()
            return M.Prim(name, tuple(args))
        if tok == "{":
            items = []
            while self.peek() != "}":
                items.append(self.micheline_expr())
                if self.peek() == ";":
                    self.next()
            self.next()
            return M.SeqNode(tuple(items))
        if tok.startswith('"'):
            return M.StringNode(M._unescape(tok, M.Token("string", tok, 0, 0)))
        if re.fullmatch(r"-?[0-9]+", tok):
            return M.IntNode(int(tok))
        return M.Prim(tok)

    def micheline_expr(self):
        # inside literal sequences: "Elt k v" may appear without parentheses
        if self.peek() not in ("(", "{") and re.fullmatch(r"[A-Z][a-z]+", self.peek() or ""):
            name = self.next()
            args = []
            while self.peek() not in (";", "}"):
                args.append(self.micheline_atom())
            return M.Prim(name, tuple(args))
        return self.micheline_atom()

    def phi(self):
        target = self.var()
        self.expect(":=")
        self.expect("phi")
        self.expect("(")
        a = self.var()
        self.expect(",")
        b = self.var()
        self.expect(")")
        return Assign(target, Phi(a, b))

    def expr(self):
        tok = self.next()
        if tok == "phi":
            self.expect("(")
            a = self.var()
            self.expect(",")
            b = self.var()
            self.expect(")")
            return Phi(a, b)
        if tok in _UNARY_BY_NAME:
            return _UNARY_BY_NAME[tok](self.var())
        if tok not in ARITY:
            raise TezlaSyntaxError(f"unknown operator {tok!r}")
        targs = tuple(node_to_type(self.micheline_atom()) for _ in range(TYPE_ARGS.get(tok, 0)))
        lit = node_to_literal(self.micheline_atom()) if tok == "PUSH" else None
        args = tuple(self.var() for _ in range(ARITY[tok]))
        return InstrApp(tok, targs, lit, args)

    def block(self):
        self.expect("{")
        stmts = []
        while self.peek() != "}":
            stmts.append(self.stmt())
        self.next()
        return tuple(stmts)

    def stmt(self):
        tok = self.peek()
        if tok in BRANCH_KINDS:
            self.next()
            subject = self.var()
            then = self.block()
            orelse = self.block()
            self.expect(";")
            return If(tok, subject, then, orelse)
        if tok in LOOP_KINDS:
            self.next()
            phis = [self.phi()]
            while self.peek() == ",":
                self.next()
                phis.append(self.phi())
            body = self.block()
            self.expect(";")
            result = phis[1].target if tok == "MAP" else None
            return Loop(tok, phis[0], tuple(phis[1:]), body, result)
        if tok in ("SWAP", "DIG", "DUG", "DROP", "DIP"):
            self.next()
            n = None
            if self.peek() != ";":
                n = int(self.next())
            self.expect(";")
            return StackNoop("DIP_MARK" if tok == "DIP" else tok, n)
        if tok == "FAILWITH":
            self.next()
            v = self.var()
            self.expect(";")
            return Failwith(v)
        if tok == "return":
            self.next()
            v = self.var()
            self.expect(";")
            return Return(v)
        target = self.var()
        self.expect(":=")
        e = self.expr()
        self.expect(";")
        return Assign(target, e)


def read_program(text: str) -> Program:
    """Parse the text produced by :func:`print_program`."""
    r = _Reader(text)
    stmts = []
    try:
        while r.peek() is not None:
            stmts.append(r.stmt())
    except ValueError as exc:
        raise TezlaSyntaxError(str(exc)) from None
    count = sum(1 for s in flatten(stmts) for v in defs(s) if v != PARAMETER_STORAGE)
    return Program(tuple(stmts), count)


# -- validity -----------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    kind: str  # double_assign | use_before_def | misplaced_return | bad_name
    var: Optional[str]
    index: int

    def __str__(self):
        return f"{self.kind}({self.var}) at statement {self.index}"


def ssa_check(p: Program) -> List[Diagnostic]:
    """SSA and def-before-use diagnostics; an empty list means the program is valid.

    Phi assignments that directly follow a branch take their first operand from
    the then-path and their second from the else-path. Loop-header phis may
    name a body-defined variable as their second (back-edge) operand.
    """
    diags: List[Diagnostic] = []
    order = flatten(p.statements)
    index = {id(s): i for i, s in enumerate(order)}

    seen = set()
    for i, s in enumerate(order):
        for v in defs(s):
            if v in seen or v == PARAMETER_STORAGE:
                diags.append(Diagnostic("double_assign", v, i))
            elif not _VAR.fullmatch(v):
                diags.append(Diagnostic("bad_name", v, i))
            seen.add(v)

    returns = [i for i, s in enumerate(order) if isinstance(s, Return)]
    if len(returns) > 1 or (returns and p.statements[-1] is not order[returns[0]]):
        for i in returns:
            diags.append(Diagnostic("misplaced_return", order[i].var, i))

    def need(v, defined, s):
        if v not in defined:
            diags.append(Diagnostic("use_before_def", v, index[id(s)]))

    def block(stmts, defined):
        failed = False
        branch_defs = None
        for s in stmts:
            if isinstance(s, Assign) and isinstance(s.expr, Phi) and branch_defs is not None:
                need(s.expr.a, branch_defs[0], s)
                need(s.expr.b, branch_defs[1], s)
                defined.add(s.target)
                continue
            branch_defs = None
            if isinstance(s, Assign):
                for v in s.expr.args:
                    need(v, defined, s)
                defined.add(s.target)
            elif isinstance(s, If):
                need(s.subject, defined, s)
                dt, ft = block(s.then, set(defined))
                de, fe = block(s.orelse, set(defined))
                if ft and fe:
                    failed = True
                elif ft:
                    defined = de
                elif fe:
                    defined = dt
                else:
                    defined = dt & de
                branch_defs = (dt, de)
            elif isinstance(s, Loop):
                targets = {ph.target for ph in s.phis}
                for ph in s.phis:
                    need(ph.expr.a, defined, s)
                db, _ = block(s.body, set(defined) | targets)
                for ph in s.phis:
                    need(ph.expr.b, db, s)
                defined = defined | targets
            elif isinstance(s, (Failwith, Return)):
                need(s.var, defined, s)
                if isinstance(s, Failwith):
                    failed = True
        return defined, failed

    block(p.statements, {PARAMETER_STORAGE})
    return diags


@dataclass
class DefUse:
    definition: Union[int, str]  # statement index, or "entry" for parameter_storage
    uses: List[int] = field(default_factory=list)


def def_use(p: Program) -> Dict[str, DefUse]:
    diags = ssa_check(p)
    if diags:
        raise InvalidProgram("; ".join(map(str, diags)))
    table: Dict[str, DefUse] = {PARAMETER_STORAGE: DefUse("entry")}
    order = flatten(p.statements)
    for i, s in enumerate(order):
        for v in defs(s):
            table[v] = DefUse(i)
    for i, s in enumerate(order):
        for v in uses(s):
            if i not in table[v].uses:
                table[v].uses.append(i)
    return table


def definitions(p: Program) -> Dict[str, Stmt]:
    """Map each assigned variable to the statement defining it."""
    return {v: s for s in flatten(p.statements) for v in defs(s)}
