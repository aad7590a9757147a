"""Michelson frontend: parse ``.tz`` / Micheline JSON into a typed AST and print it back."""
from .ast import (ADDRESS, BOOL, INT, MUTEZ, NAT, OPERATION, STRING, TIMESTAMP, UNIT,
                  Instruction, MType, Script, instr, instruction_count, iter_instructions, t)
from .frontend import parse_file, parse_micheline, parse_script, script_to_micheline
from .printer import format_instr, format_literal, format_type, print_script

__all__ = [
    "ADDRESS", "BOOL", "INT", "MUTEZ", "NAT", "OPERATION", "STRING", "TIMESTAMP", "UNIT",
    "Instruction", "MType", "Script", "instr", "instruction_count", "iter_instructions", "t",
    "parse_file", "parse_micheline", "parse_script", "script_to_micheline",
    "format_instr", "format_literal", "format_type", "print_script",
]
