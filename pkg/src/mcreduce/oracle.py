"""Property-checker invocation: the external command protocol.

A candidate program is written to a fresh temporary directory under a
fixed filename, the checker command runs there with `DRR_CANDIDATE` set to
the candidate's absolute path, and exit code 0 within the timeout means
"the property holds".  Nonzero exits and timeouts are rejections; only
infrastructure failures (missing command, unusable temp dir) raise.

`OracleSession` adds verdict caching keyed on the exact program bytes and
the query ledger that the Q metric is computed from: cache hits cost no
query and report zero wall time.
"""

from __future__ import annotations

import hashlib
import os
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .ddmin import Verdict

DEFAULT_TIMEOUT = 30.0
DEFAULT_CANDIDATE_NAME = "candidate.mc"
CANDIDATE_ENV_VAR = "DRR_CANDIDATE"


class OracleError(Exception):
    pass


class InitialPropertyError(Exception):
    """The input program itself fails the property; nothing to reduce."""


@dataclass(frozen=True)
class OracleConfig:
    command: tuple[str, ...]
    timeout: float = DEFAULT_TIMEOUT
    candidate_name: str = DEFAULT_CANDIDATE_NAME

    def __post_init__(self):
        if self.timeout <= 0:
            raise OracleError("timeout must be positive")
        if not self.command:
            raise OracleError("empty oracle command")


@dataclass(frozen=True)
class QueryRecord:
    digest: str
    accept: bool
    wall_seconds: float
    cached: bool
    timed_out: bool = False


def _digest(program: str) -> str:
    return hashlib.sha256(program.encode("utf-8")).hexdigest()


def check(program: str, config: OracleConfig) -> tuple[Verdict, QueryRecord]:
    """Run the external checker once on `program` (no caching)."""
    try:
        workdir = tempfile.mkdtemp(prefix="mcreduce-")
    except OSError as exc:
        raise OracleError(f"could not create a working directory: {exc}") from exc
    started = time.perf_counter()
    timed_out = False
    try:
        candidate = os.path.join(workdir, config.candidate_name)
        with open(candidate, "w", encoding="utf-8") as handle:
            handle.write(program)
        env = dict(os.environ)
        env[CANDIDATE_ENV_VAR] = candidate
        try:
            proc = subprocess.run(
                list(config.command),
                cwd=workdir,
                env=env,
                timeout=config.timeout,
                stdout=subprocess.DEVNULL,
                stderr=subprocess.DEVNULL,
            )
            accept = proc.returncode == 0
        except subprocess.TimeoutExpired:
            accept = False
            timed_out = True
        except (FileNotFoundError, PermissionError) as exc:
            raise OracleError(f"oracle command failed to start: {exc}") from exc
    finally:
        shutil.rmtree(workdir, ignore_errors=True)
    wall = time.perf_counter() - started
    record = QueryRecord(_digest(program), accept, wall, cached=False, timed_out=timed_out)
    return Verdict(accept, "oracle"), record


class OracleSession:
    """One reduction run's view of the oracle: caching plus the query log.

    `runner` decides the verdict for an uncached program; the default runs
    the external command, and tests substitute in-process checkers.
    """

    def __init__(
        self,
        config: Optional[OracleConfig] = None,
        runner: Optional[Callable[[str], tuple[Verdict, QueryRecord]]] = None,
        cache: bool = True,
    ):
        if runner is None:
            if config is None:
                raise OracleError("a session needs a config or a runner")
            runner = lambda program: check(program, config)  # noqa: E731
        self._runner = runner
        self._cache_enabled = cache
        self._cache: dict[str, bool] = {}
        self._lock = threading.Lock()  # check() is thread-safe; so is the cache
        self.records: list[QueryRecord] = []

    def query(self, program: str) -> Verdict:
        digest = _digest(program)
        with self._lock:
            if self._cache_enabled and digest in self._cache:
                accept = self._cache[digest]
                self.records.append(QueryRecord(digest, accept, 0.0, cached=True))
                return Verdict(accept, "cache")
        verdict, record = self._runner(program)
        with self._lock:
            self.records.append(record)
            if self._cache_enabled:
                self._cache[digest] = verdict.accept
        return verdict

    @property
    def queries(self) -> int:
        return sum(1 for r in self.records if not r.cached)


def callable_session(
    decide: Callable[[str], bool], cache: bool = True
) -> OracleSession:
    """An in-process session: `decide(program) -> bool` plays the checker."""

    def runner(program: str) -> tuple[Verdict, QueryRecord]:
        started = time.perf_counter()
        accept = bool(decide(program))
        wall = time.perf_counter() - started
        return Verdict(accept, "oracle"), QueryRecord(_digest(program), accept, wall, False)

    return OracleSession(runner=runner, cache=cache)


@dataclass(frozen=True)
class Metrics:
    queries: int
    time_seconds: float


def metrics(log: Sequence[QueryRecord], pipeline_seconds: Optional[float] = None) -> Metrics:
    """Q and T from a completed query log.

    Q counts non-cached records.  T is the whole pipeline's wall time when
    the caller measured it (the normal case, analysis included); otherwise
    it falls back to the summed query wall time.
    """
    queries = sum(1 for r in log if not r.cached)
    if pipeline_seconds is None:
        pipeline_seconds = sum(r.wall_seconds for r in log)
    return Metrics(queries, pipeline_seconds)
