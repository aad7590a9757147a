"""Big-step interpreter for the supported Michelson subset (operand stack machine)."""
from __future__ import annotations

from typing import Callable, Optional

from ..ir import ARITY
from ..michelson.ast import Script
from . import ops
from . import values as V
from .result import DEFAULT_FUEL, Failed, OutOfFuel, Stuck, Success


class _Machine:
    def __init__(self, env, fuel, on_step):
        self.env = env
        self.fuel = fuel
        self.on_step = on_step

    def block(self, code, stack, path=()):
        # the stack is a Python list with the top at the end
        for j, ins in enumerate(code):
            here = path + (j,)
            if self.on_step is not None:
                self.on_step(here, len(stack))
            self.fuel -= 1
            if self.fuel < 0:
                raise OutOfFuel()
            self.step(ins, stack, here)

    def pop(self, stack, k=1):
        if len(stack) < k:
            raise ops.Stuck(f"stack underflow: need {k}, have {len(stack)}")
        if k == 0:
            return []
        taken = stack[-k:][::-1]
        del stack[-k:]
        return taken

    def step(self, ins, stack, path):
        op = ins.opcode
        if op == "DROP":
            self.pop(stack, 1 if ins.n is None else ins.n)
        elif op == "DUP":
            k = 1 if ins.n is None else ins.n
            if len(stack) < k:
                raise ops.Stuck("DUP underflow")
            stack.append(stack[-k])
        elif op == "SWAP":
            a, b = self.pop(stack, 2)
            stack.extend([a, b])
        elif op == "DIG":
            if len(stack) <= ins.n:
                raise ops.Stuck("DIG underflow")
            stack.append(stack.pop(-1 - ins.n))
        elif op == "DUG":
            if len(stack) <= ins.n:
                raise ops.Stuck("DUG underflow")
            top = stack.pop()
            stack.insert(len(stack) - ins.n, top)
        elif op == "DIP":
            k = 1 if ins.n is None else ins.n
            saved = self.pop(stack, k)
            self.block(ins.blocks[0], stack, path + (0,))
            stack.extend(reversed(saved))
        elif op == "UNPAIR":
            (p,) = self.pop(stack)
            stack.extend([p.right, p.left])
        elif op == "FAILWITH":
            (v,) = self.pop(stack)
            raise ops.MichelsonFailure(v)
        elif op == "IF":
            (c,) = self.pop(stack)
            self.block(ins.blocks[0 if c else 1], stack, path + (0 if c else 1,))
        elif op == "IF_CONS":
            (lst,) = self.pop(stack)
            if lst:
                stack.extend([lst[1:], lst[0]])
                self.block(ins.blocks[0], stack, path + (0,))
            else:
                self.block(ins.blocks[1], stack, path + (1,))
        elif op == "IF_NONE":
            (o,) = self.pop(stack)
            if isinstance(o, V.Some):
                stack.append(o.value)
                self.block(ins.blocks[1], stack, path + (1,))
            else:
                self.block(ins.blocks[0], stack, path + (0,))
        elif op == "IF_LEFT":
            (o,) = self.pop(stack)
            stack.append(o.value)
            side = 0 if isinstance(o, V.Left) else 1
            self.block(ins.blocks[side], stack, path + (side,))
        elif op == "LOOP":
            while True:
                (c,) = self.pop(stack)
                if not c:
                    break
                self.block(ins.blocks[0], stack, path + (0,))
        elif op == "LOOP_LEFT":
            while True:
                (o,) = self.pop(stack)
                stack.append(o.value)
                if isinstance(o, V.Right):
                    break
                self.block(ins.blocks[0], stack, path + (0,))
        elif op == "ITER":
            (c,) = self.pop(stack)
            for e in ops.elements(c):
                stack.append(e)
                self.block(ins.blocks[0], stack, path + (0,))
        elif op == "MAP":
            (c,) = self.pop(stack)
            out = []
            for e in ops.elements(c):
                stack.append(e)
                self.block(ins.blocks[0], stack, path + (0,))
                (b,) = self.pop(stack)
                out.append(b if isinstance(c, tuple) else (e.left, b))
            stack.append(tuple(out) if isinstance(c, tuple) else V.MMap(tuple(out)))
        else:
            args = self.pop(stack, ARITY[op])
            stack.append(ops.apply(op, ins.type_args, ins.literal, args, self.env))


def run_michelson(script: Script, param, storage, env: Optional[V.ChainEnv] = None,
                  fuel: int = DEFAULT_FUEL, on_step: Optional[Callable] = None):
    """Run ``script`` on (param, storage).

    ``on_step(path, depth)`` is called before every instruction with its path
    in the instruction tree and the current stack depth.
    """
    m = _Machine(env or V.ChainEnv(), fuel, on_step)
    stack = [V.Pair(param, storage)]
    try:
        m.block(script.code, stack)
    except ops.MichelsonFailure as e:
        return Failed(e.value)
    except OutOfFuel:
        return Stuck("out of fuel")
    except (ops.Stuck, AttributeError, TypeError, IndexError, KeyError) as e:
        return Stuck(f"{type(e).__name__}: {e}")
    if len(stack) != 1 or not isinstance(stack[0], V.Pair):
        return Stuck(f"bad final stack of depth {len(stack)}")
    result = stack[0]
    return Success(tuple(result.left), result.right)
