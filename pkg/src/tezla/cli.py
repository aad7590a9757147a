"""Command-line entry point: ``tezla <command> ...``.

Exit codes: 0 success, 1 input or parse error, 2 decompile error,
3 analysis error (including a failed differential check), 4 network error.
"""
from __future__ import annotations

import argparse
import sys

from . import corpus, rpc
from .cfg import build_cfg, emit_dot
from .dataflow import emit_report, liveness_spec, sign_spec, solve
from .decompiler import decompile
from .errors import AnalysisError, DecompileError, FetchError, InvalidProgram, ParseError
from .interp import differential_check
from .ir import print_program
from .michelson import parse_micheline, parse_script

EXIT_OK, EXIT_INPUT, EXIT_DECOMPILE, EXIT_ANALYSIS, EXIT_NETWORK = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load(path, fmt=None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    fmt = fmt or ("json" if str(path).endswith(".json") else "tz")
    return parse_micheline(text) if fmt == "json" else parse_script(text)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_decompile(args):
    _emit(print_program(decompile(_load(args.input, args.format))), args.output)
    return EXIT_OK


def cmd_cfg(args):
    g = build_cfg(decompile(_load(args.input, args.format)))
    _emit(emit_dot(g), args.dot)
    return EXIT_OK


def cmd_analyze(args):
    program = decompile(_load(args.input, args.format))
    g = build_cfg(program)
    spec = sign_spec(program) if args.analysis == "sign" else liveness_spec(program.var_count + 1)
    sol = solve(g, spec)
    _emit(emit_report(sol, g, args.report, args.analysis, program.var_count), args.output)
    return EXIT_OK


def cmd_check(args):
    report = differential_check(_load(args.input, args.format), args.runs, args.seed)
    _emit(report.to_json() + "\n" if args.json else report.text(), args.output)
    return EXIT_OK if report.ok else EXIT_ANALYSIS


def cmd_fetch(args):
    code = rpc.fetch_contract(args.rpc, args.address, args.timeout)
    _emit(code + "\n", args.output)
    return EXIT_OK


def cmd_corpus(args):
    entries = corpus.corpus_run(args.directory, args.analysis, args.jobs)
    _emit(corpus.to_csv(entries), args.output)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="tezla", description="Decompile Michelson contracts to Tezla and analyze them.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(sp):
        sp.add_argument("input", help="contract file (.tz or Micheline .json)")
        sp.add_argument("--format", choices=("tz", "json"), help="input syntax (default: by extension)")

    sp = sub.add_parser("decompile", help="print the Tezla program")
    with_input(sp)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_decompile)

    sp = sub.add_parser("cfg", help="emit the control-flow graph as DOT")
    with_input(sp)
    sp.add_argument("--dot", metavar="OUT", help="DOT output file (default: stdout)")
    sp.set_defaults(func=cmd_cfg)

    sp = sub.add_parser("analyze", help="run a dataflow analysis")
    with_input(sp)
    sp.add_argument("--analysis", choices=("sign", "liveness"), default="sign")
    sp.add_argument("--report", choices=("text", "json"), default="text")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("check", help="differential test of both interpreters")
    with_input(sp)
    sp.add_argument("--runs", type=int, default=100)
    sp.add_argument("--seed", default="0")
    sp.add_argument("--json", action="store_true", help="JSON report")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("fetch", help="download a contract's code over the Tezos RPC")
    sp.add_argument("address")
    sp.add_argument("--rpc", default=rpc.default_rpc(), help=f"node URL (default: ${rpc.RPC_ENV} or built-in)")
    sp.add_argument("--timeout", type=float, default=20.0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_fetch)

    sp = sub.add_parser("corpus", help="batch-run the pipeline and write a CSV report")
    sp.add_argument("directory")
    sp.add_argument("--analysis", choices=("sign", "liveness"), default="sign")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FetchError as exc:
        code, msg = EXIT_NETWORK, exc
    except (ParseError, OSError, UnicodeDecodeError) as exc:
        code, msg = EXIT_INPUT, exc
    except ValueError as exc:
        code, msg = EXIT_INPUT, exc
    except DecompileError as exc:
        code, msg = EXIT_DECOMPILE, exc
    except (AnalysisError, InvalidProgram) as exc:
        code, msg = EXIT_ANALYSIS, exc
    print(f"tezla: {type(msg).__name__}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
