"""Michelson to Tezla decompilation, control-flow graphs and dataflow analyses."""
from .cfg import Cfg, build_cfg, emit_dot
from .decompiler import decompile
from .ir import Program, def_use, print_program, read_program, ssa_check
from .michelson import parse_file, parse_micheline, parse_script, print_script

__version__ = "0.1.0"

__all__ = ["Cfg", "build_cfg", "emit_dot", "decompile", "Program", "def_use", "print_program",
           "read_program", "ssa_check", "parse_file", "parse_micheline", "parse_script", "print_script"]
