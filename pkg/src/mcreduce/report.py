"""Reduction reports and the JSON-lines iteration log."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

@dataclass
class LogEntry:
    """One oracle-facing iteration.

    `verdict` is the driver's decision (a deletion is accepted only when
    the property holds and the token count strictly drops).  `source`
    records how the verdict was obtained; precheck-rejects never reached
    the oracle.  `typechecks` is whether the submitted program compiled,
    which is what the compilability guarantee is audited from.
    """

    iter: int
    stage: str  # "sem" | "syn"
    candidate_ids: list[int]
    verdict: str  # "accept" | "reject"
    tokens_after: int
    elapsed_ms: float
    source: str  # "oracle" | "cache" | "precheck-reject"
    typechecks: bool

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "iter": self.iter,
                "stage": self.stage,
                "candidate_ids": self.candidate_ids,
                "verdict": self.verdict,
                "tokens_after": self.tokens_after,
                "elapsed_ms": round(self.elapsed_ms, 3),
                "source": self.source,
                "typechecks": self.typechecks,
            }
        )


@dataclass
class StageReport:
    stage: str
    iterations: int
    queries: int
    tokens_in: int
    tokens_out: int
    time_seconds: float


@dataclass
class ReductionReport:
    tokens_before: int
    tokens_after: int
    queries: int
    time_seconds: float
    stages: list[StageReport] = field(default_factory=list)
    entries: list[LogEntry] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.entries)

    def to_metrics_dict(self) -> dict:
        return {
            "tokens_before": self.tokens_before,
            "tokens_after": self.tokens_after,
            "queries": self.queries,
            "time_seconds": round(self.time_seconds, 6),
            "stages": [
                {
                    "stage": s.stage,
                    "iterations": s.iterations,
                    "queries": s.queries,
                    "tokens_in": s.tokens_in,
                    "tokens_out": s.tokens_out,
                    "time_seconds": round(s.time_seconds, 6),
                }
                for s in self.stages
            ],
        }

    def write_metrics(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_metrics_dict(), handle, indent=2)
            handle.write("\n")

    def write_log(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for entry in self.entries:
                handle.write(entry.to_json_line() + "\n")
