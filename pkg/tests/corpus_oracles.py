"""In-process property checkers mirroring the corpus check scripts.

The shipped scripts invoke the same interpreter through a subprocess; tests
use these callables directly so whole-corpus sweeps stay fast.
"""

from __future__ import annotations

from typing import Callable

from mcreduce.frontend import run_source

ORACLE_FUEL = 200_000


def oracle_for(entry: dict) -> Callable[[str], bool]:
    if entry["kind"] == "contains":
        marker = str(entry["marker"])

        def contains(text: str) -> bool:
            return marker in run_source(text, fuel=ORACLE_FUEL).output.splitlines()

        return contains
    expect = list(entry["expect"])

    def exact(text: str) -> bool:
        return run_source(text, fuel=ORACLE_FUEL).output.splitlines() == expect

    return exact
