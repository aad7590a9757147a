import json
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from helpers import (FIXTURES, GOLDEN, NUMERIC_OPS, REPS, check_monotone, contract_ids, load, pipeline,
                     sign_violations)
from tezla import build_cfg, decompile, parse_script
from tezla.dataflow import (AnalysisSpec, DomainSpec, dead_definitions, emit_report, fixpoint_violations,
                            liveness_spec, sign, solve)
from tezla.dataflow.sign import ALPHA, BOT, BY_NAME, ELEMENTS, NAMES, TOP
from tezla.errors import AnalysisError, SolverDivergence
from tezla.ir import Assign, If, Loop


def wrap(code, parameter="unit", storage="unit"):
    return parse_script(f"parameter {parameter} ; storage {storage} ; code {{ {code} }}")


# -- lattice ---------------------------------------------------------------------

def test_alpha_lands_on_lattice_elements():
    assert set(ALPHA) <= set(ELEMENTS)
    for e in ELEMENTS:
        assert ALPHA[e] == e


def test_join_laws_exhaustive():
    for a, b, c in product(ELEMENTS, repeat=3):
        j = sign.join
        assert j(a, b) == j(b, a)
        assert j(a, j(b, c)) == j(j(a, b), c)
        assert j(a, a) == a
        assert j(a, BOT) == a and j(a, TOP) == TOP
        assert sign.leq(a, j(a, b)) and sign.leq(b, j(a, b))
        if sign.leq(a, c) and sign.leq(b, c):
            assert sign.leq(j(a, b), c)


def test_leq_is_a_partial_order_exhaustive():
    for a, b, c in product(ELEMENTS, repeat=3):
        assert sign.leq(a, a)
        if sign.leq(a, b) and sign.leq(b, a):
            assert a == b
        if sign.leq(a, b) and sign.leq(b, c):
            assert sign.leq(a, c)
        assert sign.leq(a, b) == (sign.join(a, b) == b)


def test_meet_is_greatest_lower_bound():
    for a, b, c in product(ELEMENTS, repeat=3):
        m = sign.meet(a, b)
        assert m in ELEMENTS
        assert sign.leq(m, a) and sign.leq(m, b)
        if sign.leq(c, a) and sign.leq(c, b):
            assert sign.leq(c, m)


def test_lattice_height():
    def chain(a):
        ups = [b for b in ELEMENTS if b != a and sign.leq(a, b)]
        return 1 + max((chain(b) for b in ups), default=0)
    assert chain(BOT) - 1 == 4
    assert sign.env_domain(0).height == 4


def test_pretty_names_round_trip():
    assert [NAMES[e] for e in ELEMENTS] == ["bot", "0", "1", "+", "-", "0+", "0-", "top"]
    assert all(BY_NAME[NAMES[e]] == e for e in ELEMENTS)


@pytest.mark.parametrize("x,name", [(-7, "-"), (0, "0"), (1, "1"), (2, "+"), (10 ** 30, "+")])
def test_abstraction_of_constants(x, name):
    assert NAMES[sign.abstract(x)] == name
    assert sign.gamma_contains(sign.abstract(x), x)


# -- operation tables --------------------------------------------------------------

FROZEN = json.loads((FIXTURES / "sign_tables.json").read_text())


@pytest.mark.parametrize("op", sorted(FROZEN))
def test_tables_match_frozen_oracle(op):
    for key, want in FROZEN[op].items():
        args = [BY_NAME[x] for x in key.split()]
        assert NAMES[sign.abstract_op(op, *args)] == want, (op, key)
        assert NAMES[sign.sampled_op(op, *args)] == want, (op, key)


@pytest.mark.parametrize("op,a,b,want", [
    ("ADD", "+", "+", "+"), ("ADD", "0+", "0+", "0+"), ("ADD", "-", "0-", "-"), ("ADD", "1", "1", "+"),
    ("ADD", "1", "-", "0-"), ("SUB", "0", "+", "-"), ("SUB", "1", "1", "0"), ("MUL", "-", "-", "+"),
    ("MUL", "0", "top", "0"), ("MUL", "1", "1", "1"), ("MUL", "-", "0+", "0-"), ("COMPARE", "+", "-", "1"),
    ("COMPARE", "0", "0", "0"), ("COMPARE", "0+", "+", "top"), ("ADD", "bot", "+", "bot"),
])
def test_hand_checked_entries(op, a, b, want):
    assert NAMES[sign.abstract_op(op, BY_NAME[a], BY_NAME[b])] == want


def test_unary_tables():
    neg = {NAMES[a]: NAMES[sign.abstract_op("NEG", a)] for a in ELEMENTS}
    assert neg == {"bot": "bot", "0": "0", "1": "-", "+": "-", "-": "+", "0+": "0-", "0-": "0+", "top": "top"}
    assert NAMES[sign.abstract_op("ABS", BY_NAME["-"])] == "+"
    assert NAMES[sign.abstract_op("ABS", TOP)] == "0+"


@settings(max_examples=500, deadline=None)
@given(st.sampled_from(["ADD", "SUB", "MUL", "COMPARE"]), st.integers(-10 ** 6, 10 ** 6),
       st.integers(-10 ** 6, 10 ** 6))
def test_tables_are_sound_on_concrete_values(op, x, y):
    concrete = {"ADD": x + y, "SUB": x - y, "MUL": x * y, "COMPARE": (x > y) - (x < y)}[op]
    a = sign.abstract_op(op, sign.abstract(x), sign.abstract(y))
    assert sign.gamma_contains(a, concrete)


# -- transfer monotonicity ------------------------------------------------------------

def test_every_interesting_kind_is_represented():
    for kind in ["assign:" + op for op in NUMERIC_OPS + ("other", "phi", "unlift")] + [
            "If", "Loop", "StackNoop", "Failwith", "Return"]:
        assert kind in REPS, kind


@pytest.mark.parametrize("kind", sorted(REPS))
def test_transfer_is_monotone(kind):
    check_monotone(kind)


# -- branch refinement ---------------------------------------------------------------

def test_refinement_on_equality_with_zero():
    program, g, _, sol = pipeline(load("sign_mul.tz"))
    env_then = sol.entry[6]
    env_else = sol.entry[8]
    ix = lambda v: sign.var_index(v, program.var_count)  # noqa: E731
    assert NAMES[env_then[ix("v0")]] == "0"
    assert NAMES[env_then[ix("v1")]] == "0"
    assert NAMES[env_else[ix("v0")]] == "+"


def test_refinement_on_strict_comparison_with_constant():
    program, g, _, sol = pipeline(load("loop_left_count.tz"))
    right = next(n for n in g.statement_nodes
                 if isinstance(n.stmt, Assign) and getattr(n.stmt.expr, "op", "") == "RIGHT")
    env = sol.entry[right.id]
    # false edge of 100 >= v4 means v4 > 100, and v4 duplicates v3
    assert NAMES[env[sign.var_index("v4", program.var_count)]] == "+"
    assert NAMES[env[sign.var_index("v3", program.var_count)]] == "+"


def test_dead_branch_bindings():
    program, g, _, sol = pipeline(load("dead_branch.tz"))
    analysis = sign.SignAnalysis(program)
    node = next(n for n in g.statement_nodes if isinstance(n.stmt, If))
    (true_edge,) = [e for e in g.succ[node.id] if e.label == "true"]
    (false_edge,) = [e for e in g.succ[node.id] if e.label == "false"]
    # v1 := NEG v0 is 0-, v2 duplicates it and v3 is the constant 0
    dead = analysis.dead_bindings(true_edge, node, sol.exit[node.id])
    assert {"v1", "v2", "v3"} <= set(dead)
    assert analysis.dead_bindings(false_edge, node, sol.exit[node.id]) == []
    first_then = true_edge.dst
    assert sol.entry[first_then][sign.var_index("v1", program.var_count)] == BOT


def test_refinement_ignores_non_numeric_comparisons():
    s = wrap('DROP ; PUSH string "a" ; PUSH string "b" ; COMPARE ; EQ ; IF {} {} ; UNIT ; NIL operation ; PAIR')
    program, g, _, sol = pipeline(s)
    analysis = sign.SignAnalysis(program)
    node = next(n for n in g.statement_nodes if isinstance(n.stmt, If))
    assert analysis.condition(node.stmt) is not None
    for e in g.succ[node.id]:
        assert analysis.refine(e, node, sol.exit[node.id]) == sol.exit[node.id]


# -- solver -----------------------------------------------------------------------

@pytest.mark.parametrize("name", contract_ids())
def test_solutions_are_fixpoints(name):
    program, g, spec, sol = pipeline(load(name))
    assert fixpoint_violations(g, spec, sol) == []
    live = liveness_spec(program.var_count + 1)
    assert fixpoint_violations(g, live, solve(g, live)) == []


def test_visit_bound_catches_non_monotone_transfer():
    g = build_cfg(decompile(load("loop_sum.tz")))
    flip = {}

    def transfer(node, env):
        flip[node.id] = not flip.get(node.id, False)
        return frozenset([node.id]) if flip[node.id] else frozenset()

    dom = DomainSpec(frozenset(), lambda a, b: a | b, lambda a, b: a <= b,
                     widen=lambda old, new: new)
    spec = AnalysisSpec("forward", dom, frozenset(), transfer, name="flip")
    with pytest.raises(SolverDivergence):
        solve(g, spec)


def test_unknown_direction():
    g = build_cfg(decompile(load("push_add.tz")))
    spec = AnalysisSpec("sideways", liveness_spec().domain, frozenset(), lambda n, e: e)
    with pytest.raises(ValueError):
        solve(g, spec)


def test_loop_results_stabilise():
    program, g, _, sol = pipeline(load("loop_sum.tz"))
    header = next(n for n in g.statement_nodes if isinstance(n.stmt, Loop))
    env = sol.exit[header.id]
    acc = header.stmt.extra[1].target if len(header.stmt.extra) > 1 else header.stmt.extra[0].target
    assert NAMES[env[sign.var_index(acc, program.var_count)]] in ("0+", "+", "top")
    assert sol.visits <= len(g.nodes) * 4 * (program.var_count + 1) + len(g.nodes)


def test_sign_needs_types():
    from tezla import read_program
    with pytest.raises(AnalysisError):
        sign.sign_spec(read_program("v0 := UNIT;"))


@pytest.mark.parametrize("name", contract_ids())
def test_sign_analysis_is_sound(name):
    assert sign_violations(load(name), runs=25) == []


def test_soundness_check_notices_a_wrong_table(monkeypatch):
    monkeypatch.setitem(sign.UNARY, "NEG", sign.INT_T)
    assert sign_violations(load("dead_branch.tz"), runs=10) != []


# -- liveness -----------------------------------------------------------------------

def test_liveness_on_branching_contract():
    program = decompile(load("sign_mul.tz"))
    g = build_cfg(program)
    sol = solve(g, liveness_spec(program.var_count + 1))
    # exit facts for backward analyses are the live-before sets
    assert sol.exit[0] == {"parameter_storage", "v6", "v8"}
    assert sol.exit[10] == {"v6", "v8"}
    assert sol.entry[13] == frozenset()
    assert sol.exit[13] == {"v11"}
    assert dead_definitions(g, sol) == []


def test_dead_definitions():
    program = decompile(wrap("DROP ; PUSH int 1 ; DROP ; UNIT ; NIL operation ; PAIR"))
    g = build_cfg(program)
    sol = solve(g, liveness_spec(program.var_count + 1))
    assert dead_definitions(g, sol) == [(1, "v0")]


def test_liveness_through_loops():
    program = decompile(load("loop_sum.tz"))
    g = build_cfg(program)
    sol = solve(g, liveness_spec(program.var_count + 1))
    header = next(n for n in g.statement_nodes if isinstance(n.stmt, Loop))
    for ph in header.stmt.phis:
        assert ph.expr.a in sol.exit[header.id]


# -- reports -----------------------------------------------------------------------

def test_text_report_matches_reference_rows():
    program, g, _, sol = pipeline(load("sign_mul.tz"))
    text = emit_report(sol, g, "text", "sign", program.var_count)
    reference = (GOLDEN / "sign_mul.signs").read_text().splitlines()
    assert text.splitlines()[:len(reference)] == reference


def test_json_report_round_trips():
    program, g, _, sol = pipeline(load("cons_branch.tz"))
    doc = json.loads(emit_report(sol, g, "json", "sign", program.var_count))
    assert sorted(map(int, doc)) == [n.id for n in g.statement_nodes]
    for k, row in doc.items():
        assert row == sign.env_to_dict(sol.exit[int(k)], program.var_count)


def test_empty_rows_print_as_braces():
    program, g, _, sol = pipeline(wrap("DROP ; UNIT ; NIL operation ; PAIR"))
    text = emit_report(sol, g, "text", "sign", program.var_count)
    assert text.splitlines()[0] == "0: {}"
    assert json.loads(emit_report(sol, g, "json", "sign", program.var_count))["0"] == {}


def test_liveness_report():
    program = decompile(load("sign_mul.tz"))
    g = build_cfg(program)
    sol = solve(g, liveness_spec(program.var_count + 1))
    text = emit_report(sol, g, "text", "liveness", program.var_count)
    assert text.splitlines()[1] == "1: { v0, v6, v8 }"


def test_unknown_report_format():
    program, g, _, sol = pipeline(load("push_add.tz"))
    with pytest.raises(ValueError):
        emit_report(sol, g, "yaml", "sign", program.var_count)
