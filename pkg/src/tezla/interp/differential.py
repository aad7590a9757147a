"""Differential testing: the Michelson machine against the decompiled program."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

from ..decompiler import decompile
from ..ir import Program
from ..michelson.ast import Script
from .gen import gen_inputs
from .michelson_vm import run_michelson
from .result import DEFAULT_FUEL, same_outcome
from .tezla_vm import run_tezla
from .values import format_value


@dataclass
class RunRecord:
    index: int
    seed: str
    param: str
    storage: str
    env: str
    michelson: str
    tezla: str
    ok: bool


@dataclass
class DiffReport:
    runs: List[RunRecord] = field(default_factory=list)
    requested: int = 0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.runs)

    @property
    def divergence(self) -> Optional[RunRecord]:
        return next((r for r in self.runs if not r.ok), None)

    def text(self) -> str:
        lines = [f"run {r.index} [{r.seed}]: {'pass' if r.ok else 'FAIL'}" for r in self.runs]
        bad = self.divergence
        if bad is not None:
            lines += [f"  parameter: {bad.param}", f"  storage:   {bad.storage}", f"  env:       {bad.env}",
                      f"  michelson: {bad.michelson}", f"  tezla:     {bad.tezla}"]
        lines.append(f"verdict: {'pass' if self.ok else 'fail'} ({len(self.runs)}/{self.requested} runs)")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"verdict": "pass" if self.ok else "fail", "requested": self.requested,
                           "runs": [r.__dict__ for r in self.runs]}, indent=2)


def run_seed(seed, index: int) -> str:
    return f"{seed}:{index}"


def differential_check(script: Script, runs: int = 100, seed=0, program: Optional[Program] = None,
                       size: int = 3, fuel: int = DEFAULT_FUEL) -> DiffReport:
    """Run both machines on ``runs`` generated inputs; stop at the first divergence."""
    program = decompile(script) if program is None else program
    report = DiffReport(requested=runs)
    for i in range(runs):
        s = run_seed(seed, i)
        param, storage, env = gen_inputs(script, s, size)
        m = run_michelson(script, param, storage, env, fuel)
        t = run_tezla(program, param, storage, env, fuel)
        ok = same_outcome(m, t)
        report.runs.append(RunRecord(i, s, format_value(param), format_value(storage), repr(env),
                                     m.describe(), t.describe(), ok))
        if not ok:
            break
    return report
