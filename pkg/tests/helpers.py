"""Shared fixture access and co-execution checks for the test suite."""
from pathlib import Path

from hypothesis import given, settings, strategies as st

from tezla import build_cfg, decompile, parse_file
from tezla.dataflow import sign, solve
from tezla.dataflow.sign import ALPHA
from tezla.interp import gen_inputs, run_tezla
from tezla.interp import values as V
from tezla.ir import Assign, If, InstrApp, Phi

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
CONTRACTS = FIXTURES / "contracts"
GOLDEN = HERE / "golden"

# contracts that double as reference listings, with their golden options
GOLDEN_CASES = {
    "push_add": dict(flip=("ADD",)),
    "cons_branch": {},
    "loop_left_count": {},
    "iter_bools": dict(elide=True),
    "sign_mul": {},
}


def contract_paths():
    return sorted(p for p in CONTRACTS.iterdir() if p.suffix in (".tz", ".json"))


def contract_ids():
    return [p.name for p in contract_paths()]


def load(name):
    return parse_file(CONTRACTS / name)


def pipeline(script):
    program = decompile(script)
    g = build_cfg(program)
    spec = sign.sign_spec(program)
    return program, g, spec, solve(g, spec)


def _as_int(v):
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, V.Mutez):
        return v.amount
    return None


def sign_violations(script, runs=50, seed="sound"):
    """Concrete values escaping the computed sign at the node that produced them.

    Every executed statement is mapped to its CFG node; every numeric variable in
    the store at that point must lie in the concretization of its sign in the
    node's exit environment.
    """
    program, g, _, sol = pipeline(script)
    numeric = {v for v, ty in program.types.items() if sign.is_numeric(ty)}
    bad = []

    def hook(stmt, store, taken):
        env = sol.exit[g.node_of(stmt)]
        for var in numeric & store.keys():
            x = _as_int(store[var])
            a = env[sign.var_index(var, program.var_count)]
            if x is not None and not sign.gamma_contains(a, x):
                bad.append((g.node_of(stmt), var, x, sign.pretty(a)))

    for i in range(runs):
        param, storage, env = gen_inputs(script, f"{seed}:{i}")
        run_tezla(program, param, storage, env, hook=hook)
    return bad


# -- transfer monotonicity ------------------------------------------------------------

NUMERIC_OPS = ("ADD", "SUB", "MUL", "NEG", "ABS", "INT", "COMPARE", "DUP", "PUSH")


def _kind(stmt):
    """Statement kinds as the sign transfer distinguishes them."""
    if isinstance(stmt, Assign):
        e = stmt.expr
        if isinstance(e, InstrApp):
            return "assign:" + (e.op if e.op in NUMERIC_OPS else "other")
        if isinstance(e, Phi):
            return "assign:phi"
        return "assign:unlift"
    return type(stmt).__name__


def _representatives():
    """One (program, node) per statement kind found in the corpus."""
    reps = {}
    for name in contract_ids():
        program = decompile(load(name))
        g = build_cfg(program)
        for node in g.statement_nodes:
            reps.setdefault(_kind(node.stmt), (name, program, g, node))
    return reps


REPS = _representatives()


def env_pairs(width):
    """(lo, hi) environments with lo <= hi pointwise."""
    raw = st.binary(min_size=width, max_size=width)

    def build(pair):
        hi = pair[0].translate(ALPHA)
        lo = bytes(ALPHA[h & m] for h, m in zip(hi, pair[1]))
        return lo, hi

    return st.tuples(raw, raw).map(build)


def check_monotone(kind, examples=1000):
    name, program, g, node = REPS[kind]
    analysis = sign.SignAnalysis(program)
    width = program.var_count + 1

    @settings(max_examples=examples, deadline=None, database=None)
    @given(env_pairs(width))
    def run(pair):
        lo, hi = pair
        assert sign.env_domain(program.var_count).leq(lo, hi)
        assert analysis.transfer(node, lo) == analysis.transfer(node, lo)
        assert sign.env_domain(program.var_count).leq(analysis.transfer(node, lo), analysis.transfer(node, hi))
        if isinstance(node.stmt, If):
            for e in g.succ[node.id]:
                assert sign.env_domain(program.var_count).leq(analysis.refine(e, node, lo),
                                                               analysis.refine(e, node, hi))
    run()
