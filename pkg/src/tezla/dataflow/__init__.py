"""Monotone dataflow framework with sign and liveness analyses."""
from . import kernels
from .liveness import dead_definitions, liveness_spec
from .report import emit_report
from .sign import SignAnalysis, sign_spec
from .solver import AnalysisSpec, DomainSpec, Solution, fixpoint_violations, solve

__all__ = ["kernels", "AnalysisSpec", "DomainSpec", "Solution", "solve", "fixpoint_violations",
           "SignAnalysis", "sign_spec", "liveness_spec", "dead_definitions", "emit_report"]
