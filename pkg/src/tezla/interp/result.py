"""Outcomes of a contract run."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Tuple

from .values import canon, format_value


@dataclass(frozen=True)
class Success:
    operations: Tuple[Any, ...]
    storage: Any

    def key(self):
        return ("success", tuple(op.tag for op in self.operations), canon(self.storage))

    def describe(self):
        return f"success storage={format_value(self.storage)} ops={len(self.operations)}"


@dataclass(frozen=True)
class Failed:
    value: Any

    def key(self):
        return ("failed", canon(self.value))

    def describe(self):
        return f"failed with {format_value(self.value)}"


@dataclass(frozen=True)
class Stuck:
    reason: str

    def key(self):
        return ("stuck", self.reason)

    def describe(self):
        return f"stuck: {self.reason}"


ExecResult = (Success, Failed, Stuck)

DEFAULT_FUEL = 10 ** 6


class OutOfFuel(Exception):
    pass


def same_outcome(a, b) -> bool:
    """Structural agreement; operations are compared by tag only."""
    return a.key() == b.key()
