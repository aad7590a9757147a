"""Interpreter for Tezla programs (store machine over SSA variables).

A phi that follows a branch selects the operand of the arm that ran. Loop
headers bind their phis from the entry operands, then rebind them in
parallel from the back-edge operands after every pass through the body.
"""
from __future__ import annotations

from typing import Callable, Optional

from ..ir import (PARAMETER_STORAGE, Assign, Failwith, Hd, If, InstrApp, Loop, Phi, Program, Return,
                  StackNoop, Tl, UnliftOption, UnliftOr)
from . import ops
from . import values as V
from .result import DEFAULT_FUEL, Failed, OutOfFuel, Stuck, Success


class _Returned(Exception):
    def __init__(self, value):
        self.value = value


class _Machine:
    def __init__(self, env, fuel, hook):
        self.env = env
        self.fuel = fuel
        self.hook = hook
        self.store = {}

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise OutOfFuel()

    def seen(self, s, taken=None):
        if self.hook is not None:
            self.hook(s, self.store, taken)

    def eval(self, e):
        st = self.store
        if isinstance(e, InstrApp):
            return ops.apply(e.op, e.type_args, e.literal, [st[a] for a in e.args], self.env)
        v = st[e.var]
        if isinstance(e, Tl):
            return ops.tail(v)
        if isinstance(e, UnliftOption):
            if not isinstance(v, V.Some):
                raise ops.Stuck(f"unlift_option of {v!r}")
            return v.value
        if isinstance(e, UnliftOr):
            if not isinstance(v, (V.Left, V.Right)):
                raise ops.Stuck(f"unlift_or of {v!r}")
            return v.value
        if isinstance(e, Hd):
            return ops.head(v)
        raise ops.Stuck(f"cannot evaluate {e!r}")

    def block(self, stmts):
        taken = None  # arm chosen by the branch just before a run of phis
        for s in stmts:
            self.tick()
            if isinstance(s, Assign) and isinstance(s.expr, Phi):
                if taken is None:
                    raise ops.Stuck(f"phi {s.target} does not follow a branch")
                self.store[s.target] = self.store[s.expr.a if taken else s.expr.b]
                self.seen(s)
                continue
            taken = None
            if isinstance(s, Assign):
                self.store[s.target] = self.eval(s.expr)
                self.seen(s)
            elif isinstance(s, StackNoop):
                self.seen(s)
            elif isinstance(s, If):
                taken = self.branch(s)
                self.seen(s, taken)
                self.block(s.then if taken else s.orelse)
            elif isinstance(s, Loop):
                self.loop(s)
            elif isinstance(s, Failwith):
                self.seen(s)
                raise ops.MichelsonFailure(self.store[s.var])
            elif isinstance(s, Return):
                self.seen(s)
                raise _Returned(self.store[s.var])
            else:
                raise ops.Stuck(f"unknown statement {s!r}")

    def branch(self, s: If) -> bool:
        v = self.store[s.subject]
        if s.kind == "IF":
            return bool(v)
        if s.kind == "IF_CONS":
            return bool(v)
        if s.kind == "IF_NONE":
            return not isinstance(v, V.Some)
        return isinstance(v, V.Left)

    def go_on(self, kind, v) -> bool:
        if kind == "LOOP":
            return bool(v)
        if kind == "LOOP_LEFT":
            return isinstance(v, V.Left)
        return not ops.is_empty(v)

    def loop(self, s: Loop):
        st = self.store
        first = {ph.target: st[ph.expr.a] for ph in s.phis}
        st.update(first)
        while True:
            go = self.go_on(s.kind, st[s.header.target])
            self.seen(s, go)
            if not go:
                return
            self.block(s.body)
            self.tick()
            back = {ph.target: st[ph.expr.b] for ph in s.phis}
            st.update(back)


def run_tezla(p: Program, param, storage, env: Optional[V.ChainEnv] = None,
              fuel: int = DEFAULT_FUEL, hook: Optional[Callable] = None):
    """Execute ``p``; ``hook(stmt, store, taken)`` observes every statement.

    ``taken`` is the chosen arm for branches and the continue flag for loop
    headers (reported on every header evaluation), None otherwise.
    """
    m = _Machine(env or V.ChainEnv(), fuel, hook)
    m.store[PARAMETER_STORAGE] = V.Pair(param, storage)
    try:
        m.block(p.statements)
    except _Returned as r:
        if not isinstance(r.value, V.Pair):
            return Stuck("return of a non-pair value")
        return Success(tuple(r.value.left), r.value.right)
    except ops.MichelsonFailure as e:
        return Failed(e.value)
    except OutOfFuel:
        return Stuck("out of fuel")
    except (ops.Stuck, AttributeError, TypeError, IndexError, KeyError) as e:
        return Stuck(f"{type(e).__name__}: {e}")
    return Stuck("program ended without return")
