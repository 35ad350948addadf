"""Tri-state verdicts and the fuel-metered driver for semi-decision procedures.

A search is a generator.  Each ``yield`` asks for one unit of fuel; work done
between yields is free.  The final answer is the generator's return value, a
:class:`Verdict`.  This keeps every procedure resumable, so dovetailing is a
matter of handing out units round-robin.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Generator

Search = Generator[None, None, "Verdict"]


class Status(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    payload: Any = None
    steps: int = 0

    @classmethod
    def yes(cls, payload: Any = None) -> "Verdict":
        return cls(Status.YES, payload)

    @classmethod
    def no(cls, payload: Any = None) -> "Verdict":
        return cls(Status.NO, payload)

    @classmethod
    def unknown(cls, steps: int = 0, payload: Any = None) -> "Verdict":
        return cls(Status.UNKNOWN, payload, steps)

    @property
    def is_yes(self) -> bool:
        return self.status is Status.YES

    @property
    def is_no(self) -> bool:
        return self.status is Status.NO

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    def with_steps(self, steps: int) -> "Verdict":
        return replace(self, steps=steps)


class Task:
    """A primed search that is advanced one fuel unit at a time."""

    def __init__(self, search: Search, label: Any = None):
        self.label = label
        self.steps = 0
        self.result: Verdict | None = None
        self._search = search
        self._resume()

    def _resume(self) -> None:
        try:
            next(self._search)
        except StopIteration as stop:
            self.result = stop.value.with_steps(self.steps)

    @property
    def done(self) -> bool:
        return self.result is not None

    def grant(self) -> None:
        """Spend one unit on this task."""
        if self.result is None:
            self.steps += 1
            self._resume()

    def close(self) -> None:
        if self.result is None:
            self._search.close()


def drive(search: Search, fuel: int) -> Verdict:
    """Run ``search`` with a budget of ``fuel`` units."""
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    task = Task(search)
    while not task.done and task.steps < fuel:
        task.grant()
    if task.done:
        return task.result
    task.close()
    return Verdict.unknown(task.steps)


def run_all(tasks: list[Task]) -> Generator[None, None, list[Task]]:
    """Round-robin ``tasks`` until all finish or one says No.

    Returns the tasks; the caller inspects their results.
    """
    while True:
        pending = [t for t in tasks if not t.done]
        if any(t.result is not None and t.result.is_no for t in tasks) or not pending:
            return tasks
        for t in pending:
            yield
            t.grant()
            if t.done and t.result.is_no:
                return tasks


@dataclass
class Transcript:
    """Log of trusted (unchecked) assumptions and per-check fuel use."""

    trusted: list[str] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"trusted": list(self.trusted), "checks": list(self.checks)}
