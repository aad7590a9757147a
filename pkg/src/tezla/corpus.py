"""Batch runs over a directory of contracts, with Table-style summary statistics."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List

from .cfg import build_cfg
from .dataflow import emit_report, liveness_spec, sign_spec, solve
from .decompiler import decompile
from .errors import DecompileError, ParseError, TezlaError, UnsupportedInstruction
from .michelson import instruction_count, parse_file

COLUMNS = ("path", "address", "instructions", "decompile_s", "analyze_s", "status")


@dataclass
class CorpusEntry:
    path: str
    address: str = ""
    instructions: int = 0
    decompile_s: float = 0.0
    analyze_s: float = 0.0
    status: str = "ok"

    @property
    def total_s(self) -> float:
        return self.decompile_s + self.analyze_s


def contract_files(directory) -> List[Path]:
    root = Path(directory)
    return sorted(p for p in root.rglob("*") if p.is_file() and p.suffix in (".tz", ".json"))


def _address_of(path: Path) -> str:
    if path.suffix != ".json":
        return ""
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return ""
    return doc.get("address", "") if isinstance(doc, dict) else ""


def run_one(path, analysis: str = "sign") -> CorpusEntry:
    """Parse, decompile and analyze one file; failures become a status, never an exception."""
    path = Path(path)
    entry = CorpusEntry(str(path), _address_of(path))
    try:
        script = parse_file(path)
    except UnsupportedInstruction as exc:
        entry.status = f"parse_error:{exc.opcode}"
        return entry
    except (ParseError, OSError, ValueError):
        entry.status = "parse_error"
        return entry
    entry.instructions = instruction_count(script.code)
    t0 = time.perf_counter()
    try:
        program = decompile(script)
    except (DecompileError, ValueError):
        entry.status = "decompile_error"
        return entry
    t1 = time.perf_counter()
    entry.decompile_s = t1 - t0
    try:
        g = build_cfg(program)
        spec = sign_spec(program) if analysis == "sign" else liveness_spec(program.var_count + 1)
        sol = solve(g, spec)
        emit_report(sol, g, "text", analysis, program.var_count)
    except (TezlaError, ValueError):
        entry.status = "analysis_error"
    entry.analyze_s = time.perf_counter() - t1
    return entry


def _run_star(args):
    return run_one(*args)


def corpus_run(directory, analysis: str = "sign", jobs: int = 1) -> List[CorpusEntry]:
    files = contract_files(directory)
    work = [(str(f), analysis) for f in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_star, work))
    return [run_one(*w) for w in work]


def summary(entries: List[CorpusEntry]) -> dict:
    """The four benchmark statistics, over the rows that completed."""
    ok = [e for e in entries if e.status == "ok"]
    if not ok:
        return {}
    slowest = max(ok, key=lambda e: e.total_s)
    largest = max(ok, key=lambda e: e.instructions)
    instructions = sum(e.instructions for e in ok)
    total = sum(e.total_s for e in ok)
    return {
        "average_time_s": total / len(ok),
        "worst_case_time_s": slowest.total_s,
        "worst_case_time_instructions": slowest.instructions,
        "worst_case_instructions": largest.instructions,
        "worst_case_instructions_time_s": largest.total_s,
        "average_time_per_instruction_s": total / instructions if instructions else 0.0,
        "contracts": len(entries),
        "ok": len(ok),
    }


def to_csv(entries: List[CorpusEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for e in entries:
        w.writerow([e.path, e.address, e.instructions, f"{e.decompile_s:.3f}", f"{e.analyze_s:.3f}", e.status])
    s = summary(entries)
    if s:
        buf.write(f"# contracts: {s['contracts']} (ok: {s['ok']})\n")
        buf.write(f"# average time: {s['average_time_s']:.3f} s\n")
        buf.write(f"# worst-case time: {s['worst_case_time_s']:.3f} s "
                  f"({s['worst_case_time_instructions']} instructions)\n")
        buf.write(f"# worst-case instructions: {s['worst_case_instructions']} "
                  f"({s['worst_case_instructions_time_s']:.3f} s)\n")
        buf.write(f"# average time per instruction: {s['average_time_per_instruction_s']:.6f} s\n")
    return buf.getvalue()


def read_csv(text: str) -> List[dict]:
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.DictReader(rows))
