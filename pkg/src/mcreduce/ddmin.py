"""The ddmin search state machine.

Classic delta-debugging scheduling over an ordered candidate list, phrased
in deletion terms.  At granularity n the list is split into n contiguous
chunks; the subsets phase offers each chunk for deletion, the complements
phase offers everything but one chunk.  Complements are skipped at n == 2,
where they duplicate the subsets.

On an accepted deletion the search restarts over the caller-supplied
surviving candidate list: granularity resets to 2 after a subset accept
and drops by one (floor 2) after a complement accept.  On a reject the
cursor advances through chunks, then phases, then granularity doubles;
the search is exhausted when every attempt at n == len was rejected.

The machine is pure: callers own the candidate semantics, verdicts, and
the re-classified survivor lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

SUBSETS = "subsets"
COMPLEMENTS = "complements"


class StateError(Exception):
    pass


@dataclass(frozen=True)
class Verdict:
    accept: bool
    source: str = "oracle"  # "oracle" | "cache" | "precheck-reject"


@dataclass(frozen=True)
class DdminState:
    candidates: tuple[int, ...]
    n: int
    cursor: int
    phase: str
    exhausted: bool

    def __post_init__(self):
        if not self.exhausted:
            assert 0 <= self.cursor < self.n
            if len(self.candidates) >= 2:
                assert 2 <= self.n <= len(self.candidates)


def split(candidates: Sequence[int], n: int) -> list[tuple[int, ...]]:
    """n contiguous chunks with sizes as even as the classic split makes them."""
    chunks = []
    start = 0
    for i in range(n):
        size = (len(candidates) - start) // (n - i)
        chunks.append(tuple(candidates[start:start + size]))
        start += size
    return chunks


def _fresh(candidates: Sequence[int], n: int) -> DdminState:
    candidates = tuple(candidates)
    if not candidates:
        return DdminState((), 0, 0, SUBSETS, True)
    if len(candidates) == 1:
        return DdminState(candidates, 1, 0, SUBSETS, False)
    n = max(2, min(n, len(candidates)))
    return DdminState(candidates, n, 0, SUBSETS, False)


def init_ddmin(candidates: Sequence[int]) -> DdminState:
    """Start the search at granularity 2 (single-chunk for length-1 lists)."""
    return _fresh(candidates, 2)


def next_candidate(state: DdminState) -> Optional[tuple[int, ...]]:
    """The next deletion attempt, or None when the state is exhausted."""
    if state.exhausted:
        return None
    chunk = split(state.candidates, state.n)[state.cursor]
    if state.phase == SUBSETS:
        return chunk
    drop = set(chunk)
    return tuple(c for c in state.candidates if c not in drop)


def update_ddmin(
    state: DdminState,
    new_candidates: Optional[Sequence[int]],
    verdict: Verdict,
) -> DdminState:
    """Fold one verdict into the state.

    On accept, `new_candidates` must be the re-classified survivor list; on
    reject it is ignored.
    """
    if state.exhausted:
        raise StateError("update on an exhausted state")
    if verdict.accept:
        if new_candidates is None:
            raise StateError("an accepted deletion requires the new candidate list")
        if state.phase == SUBSETS:
            return _fresh(new_candidates, 2)
        return _fresh(new_candidates, state.n - 1)

    if state.cursor + 1 < state.n:
        return DdminState(state.candidates, state.n, state.cursor + 1, state.phase, False)
    if state.phase == SUBSETS and state.n > 2:
        return DdminState(state.candidates, state.n, 0, COMPLEMENTS, False)
    if state.n >= len(state.candidates):
        return DdminState(state.candidates, state.n, 0, state.phase, True)
    return DdminState(
        state.candidates, min(state.n * 2, len(state.candidates)), 0, SUBSETS, False
    )
