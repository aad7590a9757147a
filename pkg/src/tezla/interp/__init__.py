"""Concrete interpreters for Michelson and Tezla, input generation and differential checks."""
from .differential import DiffReport, differential_check
from .gen import gen_env, gen_inputs, gen_value
from .michelson_vm import run_michelson
from .result import DEFAULT_FUEL, Failed, Stuck, Success, same_outcome
from .tezla_vm import run_tezla
from .values import ChainEnv

__all__ = ["DiffReport", "differential_check", "gen_env", "gen_inputs", "gen_value", "run_michelson",
           "run_tezla", "DEFAULT_FUEL", "Failed", "Stuck", "Success", "same_outcome", "ChainEnv"]
