"""Michelson to Tezla translation by symbolic execution of the operand stack.

Every stack slot is named by a variable. Value-producing instructions assign a
fresh variable; shuffles only permute names (and leave a no-op behind); joins
and loop headers get phi assignments for the slots whose names differ.
Operands are listed top of stack first.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import ir
from .errors import (BodyStackShapeError, DecompileError, NonUnitExitDepth, StackDepthMismatch,
                     StackTypeError, StackUnderflow)
from .ir import (PARAMETER_STORAGE, Assign, Failwith, Hd, If, InstrApp, Loop, Phi, Program,
                 Return, StackNoop, Tl, UnliftOption, UnliftOr)
from .michelson.ast import BOOL, OPERATION, Instruction, MType, Script, t
from .typing_rules import element_type, result_type


@dataclass(frozen=True)
class SymbolicStack:
    slots: Tuple[str, ...] = ()
    failed: bool = False

    @property
    def depth(self) -> int:
        return len(self.slots)

    def push(self, *names) -> "SymbolicStack":
        return SymbolicStack(tuple(names) + self.slots)


FAILED = SymbolicStack((), True)


class VarSupply:
    """Mints ``v0, v1, ...`` and remembers the Michelson type of every name.

    ``trace``, when given, collects the symbolic stack depth in front of each
    instruction, keyed by instruction path.
    """

    def __init__(self, next_index: int = 0, types: Optional[Dict[str, MType]] = None, trace=None):
        self.next_index = next_index
        self.types: Dict[str, MType] = dict(types or {})
        self.trace = trace

    def fresh(self, ty: MType) -> str:
        name = f"v{self.next_index}"
        self.next_index += 1
        self.types[name] = ty
        return name

    def type_of(self, var: str) -> MType:
        return self.types[var]

    def scratch(self) -> "VarSupply":
        return VarSupply(self.next_index, self.types, None)


def _need(ins, st: SymbolicStack, k: int):
    if st.depth < k:
        raise StackUnderflow(ins.opcode, k, st.depth)


def _expect(vs, var, prim, op):
    ty = vs.type_of(var)
    if ty.prim != prim:
        raise StackTypeError(f"{op} expects {prim} on top, found {ty}")
    return ty


def translate_seq(block, st: SymbolicStack, vs: VarSupply, path=()):
    out: List[ir.Stmt] = []
    for j, ins in enumerate(block):
        if st.failed:
            raise DecompileError(f"{ins.opcode} follows a failing instruction")
        if vs.trace is not None:
            vs.trace[path + (j,)] = st.depth
        stmts, st = translate_instr(ins, st, vs, path + (j,))
        out.extend(stmts)
    return out, st


def translate_instr(i: Instruction, st: SymbolicStack, vs: VarSupply, path=()):
    """Translate one instruction against a symbolic stack.

    Returns the emitted statements and the stack after the instruction.
    """
    op = i.opcode
    s = st.slots
    if op == "SWAP":
        _need(i, st, 2)
        return [StackNoop("SWAP")], SymbolicStack((s[1], s[0]) + s[2:])
    if op == "DIG":
        _need(i, st, i.n + 1)
        return [StackNoop("DIG", i.n)], SymbolicStack((s[i.n],) + s[:i.n] + s[i.n + 1:])
    if op == "DUG":
        _need(i, st, i.n + 1)
        return [StackNoop("DUG", i.n)], SymbolicStack(s[1:i.n + 1] + (s[0],) + s[i.n + 1:])
    if op == "DROP":
        k = 1 if i.n is None else i.n
        _need(i, st, k)
        return [StackNoop("DROP", i.n)], SymbolicStack(s[k:])
    if op == "DUP":
        k = 1 if i.n is None else i.n
        _need(i, st, k)
        src = s[k - 1]
        x = vs.fresh(vs.type_of(src))
        return [Assign(x, InstrApp("DUP", args=(src,)))], st.push(x)
    if op == "DIP":
        k = 1 if i.n is None else i.n
        _need(i, st, k)
        body, rest = translate_seq(i.blocks[0], SymbolicStack(s[k:]), vs, path + (0,))
        stmts = [StackNoop("DIP_MARK", i.n)] + body
        if rest.failed:
            return stmts, FAILED
        return stmts, SymbolicStack(s[:k] + rest.slots)
    if op == "UNPAIR":
        _need(i, st, 1)
        ty = _expect(vs, s[0], "pair", op)
        a = vs.fresh(ty.args[0])
        b = vs.fresh(ty.args[1])
        stmts = [Assign(a, InstrApp("CAR", args=(s[0],))), Assign(b, InstrApp("CDR", args=(s[0],)))]
        return stmts, SymbolicStack((a, b) + s[1:])
    if op == "FAILWITH":
        _need(i, st, 1)
        return [Failwith(s[0])], FAILED
    if op in ir.BRANCH_KINDS:
        return _branch(i, st, vs, path)
    if op in ir.LOOP_KINDS:
        _need(i, st, 1)
        return close_loop(op, st, i.blocks[0], vs, path)

    arity = ir.ARITY[op]
    _need(i, st, arity)
    args = s[:arity]
    ty = result_type(op, i.type_args, [vs.type_of(a) for a in args])
    x = vs.fresh(ty)
    return [Assign(x, InstrApp(op, i.type_args, i.literal, args))], SymbolicStack((x,) + s[arity:])


def _branch(i, st, vs, path):
    op = i.opcode
    _need(i, st, 1)
    v, rest = st.slots[0], SymbolicStack(st.slots[1:])
    if op == "IF":
        _expect(vs, v, "bool", op)
        t_stmts, st_t = translate_seq(i.blocks[0], rest, vs, path + (0,))
        f_stmts, st_f = translate_seq(i.blocks[1], rest, vs, path + (1,))
    elif op == "IF_CONS":
        ty = _expect(vs, v, "list", op)
        h = vs.fresh(ty.args[0])
        tl = vs.fresh(ty)
        t_stmts, st_t = translate_seq(i.blocks[0], rest.push(h, tl), vs, path + (0,))
        t_stmts = [Assign(h, Hd(v)), Assign(tl, Tl(v))] + t_stmts
        f_stmts, st_f = translate_seq(i.blocks[1], rest, vs, path + (1,))
    elif op == "IF_NONE":
        ty = _expect(vs, v, "option", op)
        t_stmts, st_t = translate_seq(i.blocks[0], rest, vs, path + (0,))
        u = vs.fresh(ty.args[0])
        f_stmts, st_f = translate_seq(i.blocks[1], rest.push(u), vs, path + (1,))
        f_stmts = [Assign(u, UnliftOption(v))] + f_stmts
    else:  # IF_LEFT
        ty = _expect(vs, v, "or", op)
        u = vs.fresh(ty.args[0])
        t_stmts, st_t = translate_seq(i.blocks[0], rest.push(u), vs, path + (0,))
        t_stmts = [Assign(u, UnliftOr(v))] + t_stmts
        w = vs.fresh(ty.args[1])
        f_stmts, st_f = translate_seq(i.blocks[1], rest.push(w), vs, path + (1,))
        f_stmts = [Assign(w, UnliftOr(v))] + f_stmts
    phis, out = unify_stacks(st_t, st_f, vs)
    return [If(op, v, tuple(t_stmts), tuple(f_stmts))] + phis, out


def unify_stacks(st_true: SymbolicStack, st_false: SymbolicStack, vs: VarSupply):
    """Join the exit stacks of two branches, minting a phi wherever names differ.

    A failed branch contributes nothing: the other stack passes through.
    """
    if st_true.failed:
        return [], st_false
    if st_false.failed:
        return [], st_true
    if st_true.depth != st_false.depth:
        raise StackDepthMismatch(f"branches leave {st_true.depth} and {st_false.depth} slots")
    phis, slots = [], []
    for a, b in zip(st_true.slots, st_false.slots):
        if a == b:
            slots.append(a)
            continue
        ty = vs.type_of(a)
        if vs.type_of(b) != ty:
            raise StackTypeError(f"branches disagree on slot type: {ty} vs {vs.type_of(b)}")
        x = vs.fresh(ty)
        phis.append(Assign(x, Phi(a, b)))
        slots.append(x)
    return phis, SymbolicStack(tuple(slots))


def _control_shape(kind, vs, c0):
    ty = vs.type_of(c0)
    if kind == "LOOP" and ty != BOOL:
        raise StackTypeError(f"LOOP expects bool on top, found {ty}")
    if kind == "LOOP_LEFT" and ty.prim != "or":
        raise StackTypeError(f"LOOP_LEFT expects an or on top, found {ty}")
    if kind == "ITER" and ty.prim not in ("list", "set", "map"):
        raise StackTypeError(f"ITER expects a collection on top, found {ty}")
    if kind == "MAP" and ty.prim not in ("list", "map"):
        raise StackTypeError(f"MAP expects a list or map on top, found {ty}")
    return ty


def _run_body(kind, ctl_ty, header, slots, block, vs, path):
    """Translate a loop body from its entry stack; returns (prologue, element var, body, exit)."""
    prologue, elem = [], None
    entry = SymbolicStack(slots)
    if kind == "LOOP_LEFT":
        elem = vs.fresh(ctl_ty.args[0])
        prologue = [Assign(elem, UnliftOr(header))]
        entry = entry.push(elem)
    elif kind in ("ITER", "MAP"):
        elem = vs.fresh(element_type(ctl_ty))
        prologue = [Assign(elem, Hd(header))]
        entry = entry.push(elem)
    body, exit_st = translate_seq(block, entry, vs, path + (0,))
    return prologue, elem, body, exit_st


def _split_exit(kind, ctl_ty, exit_st, depth, vs):
    """Return (value on top or None, the rest) of a live body-exit stack, checking its shape."""
    want = depth if kind == "ITER" else depth + 1
    if exit_st.depth != want:
        raise BodyStackShapeError(f"{kind} body leaves {exit_st.depth} slots, expected {want}")
    if kind == "ITER":
        return None, exit_st.slots
    top, rest = exit_st.slots[0], exit_st.slots[1:]
    if kind == "LOOP" and vs.type_of(top) != BOOL:
        raise BodyStackShapeError(f"LOOP body must leave a bool on top, left {vs.type_of(top)}")
    if kind == "LOOP_LEFT" and vs.type_of(top) != ctl_ty:
        raise BodyStackShapeError(f"LOOP_LEFT body must leave {ctl_ty}, left {vs.type_of(top)}")
    return top, rest


def close_loop(kind: str, entry_st: SymbolicStack, block, vs: VarSupply, path=()):
    """Translate a loop form with complete header phis.

    The body is translated twice. The first pass, on throw-away names, finds
    the slots the body rebinds; the second mints a header phi for each such
    slot and translates the body against the header names.
    """
    c0, outer = entry_st.slots[0], entry_st.slots[1:]
    ctl_ty = _control_shape(kind, vs, c0)

    # pass 1
    probe = vs.scratch()
    ph = probe.fresh(ctl_ty)
    provisional = tuple(probe.fresh(vs.type_of(x)) for x in outer)
    _, _, _, exit1 = _run_body(kind, ctl_ty, ph, provisional, block, probe, path)
    modified: List[int] = []
    mapped_ty = None
    if not exit1.failed:
        top, rest = _split_exit(kind, ctl_ty, exit1, len(outer), probe)
        for k, (before, after) in enumerate(zip(provisional, rest)):
            if probe.type_of(after) != probe.type_of(before):
                raise BodyStackShapeError(
                    f"{kind} body changes slot {k} from {probe.type_of(before)} to {probe.type_of(after)}")
            if after != before:
                modified.append(k)
        if kind == "MAP":
            mapped_ty = probe.type_of(top)
    elif kind == "MAP":
        raise BodyStackShapeError("MAP body fails on every path; result type is unknown")

    # pass 2
    pre: List[ir.Stmt] = []
    acc_ty = None
    if kind == "MAP":
        acc_ty = t("list", mapped_ty) if ctl_ty.prim == "list" else t("map", ctl_ty.args[0], mapped_ty)
        acc0 = vs.fresh(acc_ty)
        pre.append(Assign(acc0, InstrApp("MAP_INIT", args=(c0,))))
    h = vs.fresh(ctl_ty)
    acc = vs.fresh(acc_ty) if kind == "MAP" else None
    header_vars = {k: vs.fresh(vs.type_of(outer[k])) for k in modified}
    slots = tuple(header_vars.get(k, x) for k, x in enumerate(outer))
    prologue, elem, body, exit2 = _run_body(kind, ctl_ty, h, slots, block, vs, path)

    epilogue: List[ir.Stmt] = []
    extra: List[Assign] = []
    if exit2.failed:
        back = h  # the body never loops back; self-reference keeps the header well formed
    else:
        top, rest = _split_exit(kind, ctl_ty, exit2, len(outer), vs)
        for k, (before, after) in enumerate(zip(slots, rest)):
            if (k in header_vars) != (after != before):
                raise DecompileError("loop body translated inconsistently between passes")
        if kind == "MAP":
            acc1 = vs.fresh(acc_ty)
            epilogue.append(Assign(acc1, InstrApp("MAP_APPEND", args=(acc, elem, top))))
            extra.append(Assign(acc, Phi(acc0, acc1)))
        if kind in ("ITER", "MAP"):
            back = vs.fresh(ctl_ty)
            epilogue.append(Assign(back, Tl(h)))
        else:
            back = top
        extra.extend(Assign(header_vars[k], Phi(outer[k], rest[k])) for k in modified)
    loop = Loop(kind, Assign(h, Phi(c0, back)), tuple(extra),
                tuple(prologue + body + epilogue), acc)

    post: List[ir.Stmt] = []
    exit_slots = slots
    if kind == "LOOP_LEFT":
        u = vs.fresh(ctl_ty.args[1])
        post.append(Assign(u, UnliftOr(h)))
        exit_slots = (u,) + slots
    elif kind == "MAP":
        exit_slots = (acc,) + slots
    return pre + [loop] + post, SymbolicStack(exit_slots)


def decompile(script: Script, trace=None) -> Program:
    """Translate a whole contract.

    The initial stack holds ``parameter_storage``; a live exit stack must hold
    exactly the (operations, storage) pair, which becomes the ``return``.
    """
    ps_ty = t("pair", script.parameter, script.storage)
    vs = VarSupply(types={PARAMETER_STORAGE: ps_ty}, trace=trace)
    stmts, st = translate_seq(script.code, SymbolicStack((PARAMETER_STORAGE,)), vs)
    if not st.failed:
        if st.depth != 1:
            raise NonUnitExitDepth(f"contract ends with {st.depth} stack slots, expected 1")
        want = t("pair", t("list", OPERATION), script.storage)
        if vs.type_of(st.slots[0]) != want:
            raise StackTypeError(f"contract ends with {vs.type_of(st.slots[0])}, expected {want}")
        stmts.append(Return(st.slots[0]))
    return Program(tuple(stmts), vs.next_index, vs.types)
