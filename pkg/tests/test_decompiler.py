import pytest

import golden_harness
from helpers import GOLDEN, GOLDEN_CASES, contract_ids, load
from tezla import decompile, parse_script, print_program, ssa_check
from tezla.errors import (BodyStackShapeError, DecompileError, NonUnitExitDepth, StackDepthMismatch,
                          StackTypeError, StackUnderflow)
from tezla.interp import gen_inputs, run_michelson
from tezla.ir import Assign, Failwith, If, Loop, Phi, Return, flatten


def wrap(code, parameter="unit", storage="unit"):
    return parse_script(f"parameter {parameter} ; storage {storage} ; code {{ {code} }}")


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_listings(name):
    ours = print_program(decompile(load(name + ".tz")))
    reference = (GOLDEN / f"{name}.tezla").read_text()
    assert golden_harness.compare(ours, reference, **GOLDEN_CASES[name]) == []


def test_golden_harness_detects_a_changed_listing():
    ours = print_program(decompile(load("cons_branch.tz")))
    reference = (GOLDEN / "cons_branch.tezla").read_text().replace("ADD v4 v0", "ADD v0 v4")
    assert golden_harness.compare(ours, reference) != []


def test_iter_listing_needs_the_elision_rule():
    ours = print_program(decompile(load("iter_bools.tz")))
    assert golden_harness.compare(ours, (GOLDEN / "iter_bools.tezla").read_text()) != []


@pytest.mark.parametrize("name", contract_ids())
def test_deterministic(name):
    s = load(name)
    assert print_program(decompile(s)) == print_program(decompile(s))


@pytest.mark.parametrize("name", contract_ids())
def test_symbolic_depth_matches_runtime_depth(name):
    s = load(name)
    trace = {}
    decompile(s, trace=trace)
    seen = []

    def on_step(path, depth):
        seen.append(path)
        assert trace[path] == depth, path

    for i in range(20):
        param, storage, env = gen_inputs(s, f"depth:{i}")
        run_michelson(s, param, storage, env, on_step=on_step)
    assert seen


def test_operands_are_top_of_stack_first():
    p = decompile(wrap("DROP ; PUSH int 1 ; PUSH int 2 ; SUB ; DROP ; UNIT ; NIL operation ; PAIR"))
    sub = next(s for s in flatten(p.statements) if getattr(getattr(s, "expr", None), "op", "") == "SUB")
    assert sub.expr.args == ("v1", "v0")


def test_phi_after_every_live_join():
    p = decompile(load("variants.tz"))
    order = flatten(p.statements)
    for k, s in enumerate(order):
        if isinstance(s, If):
            nxt = order[k + 1 + len(flatten(s.then)) + len(flatten(s.orelse))]
            assert isinstance(nxt, Assign) and isinstance(nxt.expr, Phi)


def test_failing_branch_is_excluded_from_unification():
    p = decompile(load("guard.tz"))
    order = flatten(p.statements)
    assert any(isinstance(s, Failwith) for s in order)
    assert not any(isinstance(s, Assign) and isinstance(s.expr, Phi) for s in order)
    assert ssa_check(p) == []


def test_all_paths_failing_has_no_return():
    p = decompile(load("always_fails.tz"))
    assert not any(isinstance(s, Return) for s in flatten(p.statements))
    assert ssa_check(p) == []


def test_loop_rebinding_deeper_slots_gets_extra_phis():
    p = decompile(load("loop_sum.tz"))
    loop = next(s for s in flatten(p.statements) if isinstance(s, Loop))
    assert loop.kind == "LOOP"
    assert len(loop.extra) == 2


def test_untouched_slots_get_no_phi():
    p = decompile(load("loop_left_count.tz"))
    loop = next(s for s in flatten(p.statements) if isinstance(s, Loop))
    assert loop.extra == ()


def test_iter_with_failing_body_references_itself():
    p = decompile(wrap("CAR ; ITER { FAILWITH } ; UNIT ; NIL operation ; PAIR", parameter="(list int)"))
    loop = next(s for s in flatten(p.statements) if isinstance(s, Loop))
    assert loop.header.expr.b == loop.header.target
    assert ssa_check(p) == []


@pytest.mark.parametrize("code,error", [
    ("ADD", StackUnderflow),
    ("DROP ; DROP", StackUnderflow),
    ("DROP ; PUSH int 1 ; IF {} {}", StackTypeError),
    ("DROP ; PUSH bool True ; IF { UNIT } {} ; NIL operation ; PAIR", StackDepthMismatch),
    ("DROP ; PUSH bool True ; IF { PUSH int 1 } { PUSH nat 1 } ; DROP ; UNIT ; NIL operation ; PAIR",
     StackTypeError),
    ("DROP ; UNIT ; UNIT ; NIL operation ; PAIR", NonUnitExitDepth),
    ("DROP ; PUSH bool True ; LOOP { UNIT } ; UNIT ; NIL operation ; PAIR", BodyStackShapeError),
    ("DROP ; UNIT ; NIL operation ; PAIR ; UNIT ; FAILWITH ; UNIT", DecompileError),
    ("DROP ; NIL int ; MAP { FAILWITH } ; DROP ; UNIT ; NIL operation ; PAIR", BodyStackShapeError),
    ("DROP ; PUSH int 1 ; NIL operation ; PAIR", StackTypeError),
])
def test_decompile_errors(code, error):
    with pytest.raises(error):
        decompile(wrap(code, storage="unit"))


def test_errors_share_a_base_class():
    for cls in (StackUnderflow, StackDepthMismatch, StackTypeError, NonUnitExitDepth, BodyStackShapeError):
        assert issubclass(cls, DecompileError)
