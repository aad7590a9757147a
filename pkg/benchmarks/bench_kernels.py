"""Compare the compiled and pure-Python sign kernels.

Two measurements per backend: raw ``env_join``/``env_leq`` calls on random
environments of a few widths, and a full sign analysis of a generated
straight-line-with-branches contract of roughly 1000 instructions.

    python benchmarks/bench_kernels.py [--blocks 100] [--repeat 5]
"""
import argparse
import random
import timeit

from tezla import build_cfg, decompile, parse_script
from tezla.dataflow import kernels, sign, solve
from tezla.dataflow.sign import ALPHA

BLOCK = "DUP ; PUSH int 0 ; COMPARE ; LT ; IF { NEG ; PUSH int 1 ; ADD } { PUSH int 3 ; SUB } ;"


def synthetic_contract(blocks):
    body = " ".join(BLOCK for _ in range(blocks))
    return parse_script(f"parameter int ; storage int ; code {{ CAR ; {body} NIL operation ; PAIR }}")


def random_envs(width, count, rng):
    return [bytes(ALPHA[rng.randrange(256)] for _ in range(width)) for _ in range(count)]


def bench_ops(repeat, rng):
    rows = []
    for width in (16, 256, 2048):
        envs = random_envs(width, 64, rng)
        pairs = list(zip(envs, envs[1:] + envs[:1]))
        for backend in kernels.available():
            kernels.use(backend)
            join, leq = kernels.env_join, kernels.env_leq

            def loop():
                for a, b in pairs:
                    leq(a, join(a, b))

            best = min(timeit.repeat(loop, number=50, repeat=repeat))
            rows.append((f"join+leq w={width}", backend, best / (50 * len(pairs)) * 1e6, "us/call"))
    return rows


def bench_solve(blocks, repeat):
    script = synthetic_contract(blocks)
    program = decompile(script)
    g = build_cfg(program)
    spec = sign.sign_spec(program)
    rows = []
    for backend in kernels.available():
        kernels.use(backend)
        best = min(timeit.repeat(lambda: solve(g, spec), number=1, repeat=repeat))
        rows.append((f"solve {len(g.statement_nodes)} nodes", backend, best * 1e3, "ms"))
    return rows, script


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", type=int, default=100, help="branch blocks in the generated contract")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    before = kernels.BACKEND
    try:
        rows = bench_ops(args.repeat, random.Random(args.seed))
        solve_rows, script = bench_solve(args.blocks, args.repeat)
    finally:
        kernels.use(before)
    print(f"backends: {', '.join(kernels.available())}")
    print(f"generated contract: {len(script.code)} top-level instructions, {args.blocks} branch blocks")
    for what, backend, value, unit in rows + solve_rows:
        print(f"{what:<22} {backend:<7} {value:10.3f} {unit}")


if __name__ == "__main__":
    main()
